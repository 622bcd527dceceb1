"""Tools for ruling out Diophantine quintuples that contain a triple of the first kind.

Modules: ``arith`` (square tests, factoring, divisors), ``pell`` (the Pell
equation behind every triple extension), ``tuples`` (tuple checks, d+,
discards), ``bounds`` (gap-principle inequalities in MPFR), ``search`` (the
initial list, pruning and the b >= 2a case) and ``cli``.
"""
from .records import Entry
from .search import SearchConfig, case_b_ge_2a, enumerate_doubles, initial_list, prune, shard_and_merge
from .tuples import d_plus, is_m_tuple

__version__ = "0.1.0"

__all__ = [
    "Entry",
    "SearchConfig",
    "case_b_ge_2a",
    "enumerate_doubles",
    "initial_list",
    "prune",
    "shard_and_merge",
    "d_plus",
    "is_m_tuple",
]
