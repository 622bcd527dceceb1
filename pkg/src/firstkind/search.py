"""Candidate generation and pruning for quintuples whose {a, b, d} is of the first kind.

``initial_list`` walks every double with ``a + 2 < b < 2a`` (via the divisors
of ``r^2 - 1``), every triple {a, b, c} with ``c > b`` from the Pell streams,
and keeps the regular extensions ``d`` with ``b^5 < d < b^8`` that pass the
lara filter.  ``prune`` then applies the russell filter with the gamma
parameters of each candidate.  ``case_b_ge_2a`` disposes of ``b >= 2a``.
"""
from __future__ import annotations

import logging
import multiprocessing
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from filelock import FileLock

from . import bounds
from .arith import SmallFactorTable, as_perfect_square, divisors_via_r
from .pell import extensions, reduce_instance
from .records import Entry, format_entry, fsync_file, read_manifest, write_manifest
from .tuples import Discard, Double, d_plus_from_roots, is_discard_pair, is_m_tuple

__all__ = [
    "SearchConfig",
    "Counters",
    "Shard",
    "enumerate_doubles",
    "double_entries",
    "iter_initial_list",
    "initial_list",
    "PruneRecord",
    "prune_entry",
    "prune_report",
    "prune",
    "CaseReport",
    "case_b_ge_2a",
    "make_shards",
    "shard_and_merge",
    "run_search",
    "IncompleteShardsError",
    "run_shard_checkpointed",
    "init_manifest",
    "merge_shards",
    "manifest_fields",
    "parse_manifest",
    "verify_entry",
]

log = logging.getLogger(__name__)

# Factor tables are built for ranges up to this size; larger r fall back to rho.
_TABLE_LIMIT = 50_000_000


@dataclass(frozen=True)
class SearchConfig:
    r_min: int = 2
    r_max: int = 0
    b_max: int = 1_300_000_000
    d_lo_exp: int = 5
    d_hi_exp: int = 8

    def __post_init__(self):
        if self.r_max == 0:
            # ab + 1 = r^2 with a < b forces r <= b
            object.__setattr__(self, "r_max", self.b_max)
        if self.r_min < 2 or self.r_min > self.r_max + 1:
            raise ValueError(f"bad r range [{self.r_min}, {self.r_max}]")
        if self.b_max < 1:
            raise ValueError("b_max must be positive")
        if not self.d_lo_exp < self.d_hi_exp:
            raise ValueError("d_lo_exp must be below d_hi_exp")


@dataclass
class Counters:
    pairs: int = 0
    potential: int = 0
    survivors: int = 0

    def add(self, other: "Counters") -> None:
        self.pairs += other.pairs
        self.potential += other.potential
        self.survivors += other.survivors


@dataclass
class Shard:
    index: int
    r_lo: int
    r_hi: int
    status: str = "pending"
    output_path: str = ""
    last_r: int = 0
    output_bytes: int = 0
    counters: Counters = field(default_factory=Counters)

    def __post_init__(self):
        if self.last_r == 0:
            self.last_r = self.r_lo - 1


# ---------------------------------------------------------------------------
# Algorithm 1


def _factor_table(r_hi: int) -> Optional[SmallFactorTable]:
    return SmallFactorTable(r_hi + 1) if r_hi + 1 <= _TABLE_LIMIT else None


def _doubles_for_r(r: int, b_max: int, table: Optional[SmallFactorTable]) -> Iterator[Double]:
    w = r * r - 1
    for a in divisors_via_r(r, table):
        if a >= r - 1:
            break
        b = w // a
        if a + 2 < b < 2 * a and b <= b_max:
            yield Double(a, b, r)


def enumerate_doubles(cfg: SearchConfig) -> Iterator[Double]:
    """Doubles with ``a + 2 < b < 2a`` and ``b <= b_max``, ordered by r then a."""
    table = _factor_table(cfg.r_max)
    for r in range(cfg.r_min, cfg.r_max + 1):
        yield from _doubles_for_r(r, cfg.b_max, table)


def double_entries(dbl: Double, cfg: SearchConfig, counters: Optional[Counters] = None) -> Iterator[Entry]:
    """Initial-list entries contributed by one double, ordered by c (hence d)."""
    a, b, r = dbl.a, dbl.b, dbl.r
    d_lo, d_hi = b ** cfg.d_lo_exp, b ** cfg.d_hi_exp
    lara = bounds.LaraFilter(a, b)
    for c, s, t in extensions(a, b, reduce_instance(a, b)):
        if c <= b:
            continue
        d = d_plus_from_roots(a, b, c, r, s, t)
        if d <= d_lo:
            continue
        if d >= d_hi:
            break
        if counters is not None:
            counters.potential += 1
        if lara.holds(d):
            if counters is not None:
                counters.survivors += 1
            yield Entry(a, b, c, d)


def _entries_for_r(r: int, cfg: SearchConfig, table, counters: Counters) -> List[Entry]:
    out: List[Entry] = []
    for dbl in _doubles_for_r(r, cfg.b_max, table):
        counters.pairs += 1
        out.extend(double_entries(dbl, cfg, counters))
    return out


def iter_initial_list(cfg: SearchConfig, counters: Optional[Counters] = None) -> Iterator[Entry]:
    counters = counters if counters is not None else Counters()
    table = _factor_table(cfg.r_max)
    for r in range(cfg.r_min, cfg.r_max + 1):
        yield from _entries_for_r(r, cfg, table, counters)


def initial_list(cfg: SearchConfig, counters: Optional[Counters] = None) -> List[Entry]:
    """All initial-list entries for the configured r range, ordered by (r, a, d)."""
    return list(iter_initial_list(cfg, counters))


# ---------------------------------------------------------------------------
# Algorithm 2


@dataclass
class PruneRecord:
    entry: Entry
    params: Optional[bounds.GammaParams] = None
    verdict: Optional[bounds.Verdict] = None
    error: Optional[str] = None

    @property
    def survives(self) -> bool:
        # anything not positively eliminated is kept
        return self.verdict is None or self.verdict.holds

    @property
    def lemma_unmet(self) -> bool:
        return self.params is not None and not self.params.lemma_hypothesis


def prune_entry(entry: Entry, prec: int = bounds.DEFAULT_PREC) -> PruneRecord:
    a, b, _, d = entry
    try:
        params = bounds.gamma_params(a, b, d, prec)
        verdict = bounds.russell_holds(a, b, d, params.gamma3, prec)
    except (ArithmeticError, ValueError) as exc:
        log.warning("prune diagnostic for %s: %s", entry, exc)
        return PruneRecord(entry, error=f"{type(exc).__name__}: {exc}")
    if not params.lemma_hypothesis:
        log.warning("b/a < gamma1^2 for %s; gamma3 set to 0", entry)
    return PruneRecord(entry, params, verdict)


def prune_report(entries: Iterable[Entry], prec: int = bounds.DEFAULT_PREC) -> List[PruneRecord]:
    return [prune_entry(e, prec) for e in entries]


def prune(entries: Iterable[Entry], prec: int = bounds.DEFAULT_PREC) -> List[Entry]:
    """Entries the russell filter fails to eliminate."""
    return [rec.entry for rec in prune_report(entries, prec) if rec.survives]


# ---------------------------------------------------------------------------
# b >= 2a


@dataclass
class CaseReport:
    b_limit: int
    discarded: Dict[Tuple[int, int], Discard]
    doubles: List[Tuple[int, int]]
    d_bounds: Dict[Tuple[int, int], int]
    quadruples: List[Entry]
    final: List[Entry]


def case_b_ge_2a(prec: int = bounds.DEFAULT_PREC) -> CaseReport:
    """Rule out quintuples with ``b >= 2a`` and {a, b, d} of the first kind.

    Stage 1 keeps doubles with ``b <= threshold_b('pollock')`` that are not
    discards and for which hammond (K = 0.178) can hold for some d > b^5.
    Stage 2 finds every quadruple {a, b, c, d} with b^5 < d below the hammond
    bound.  Stage 3 re-tests quadruples with a = 1 using K = 0.45.
    """
    b_limit = bounds.threshold_b("pollock", prec=prec)
    discarded: Dict[Tuple[int, int], Discard] = {}
    doubles: List[Tuple[int, int]] = []
    for b in range(2, b_limit + 1):
        for a in range(1, b // 2 + 1):
            if as_perfect_square(a * b + 1) is None:
                continue
            reason = is_discard_pair(a, b)
            if reason is not None:
                discarded[(a, b)] = reason
                continue
            try:
                feasible = bounds.hammond_holds(a, b, b ** 5 + 1, "0.178", prec).holds
            except bounds.RegimeError:
                feasible = True
            if feasible:
                doubles.append((a, b))

    d_bounds: Dict[Tuple[int, int], int] = {}
    quadruples: List[Entry] = []
    for a, b in doubles:
        d_max = bounds.d_max_hammond(a, b, "0.178", prec)
        d_bounds[(a, b)] = d_max
        cs: List[int] = []
        for d, _, _ in extensions(a, b):
            if d > d_max:
                break
            if d > b ** 5:
                for c in cs:
                    if c > b and as_perfect_square(c * d + 1) is not None:
                        quadruples.append(Entry(a, b, c, d))
            cs.append(d)

    final = [q for q in quadruples if not (q.a == 1 and not bounds.hammond_holds(q.a, q.b, q.d, "0.45", prec).holds)]
    return CaseReport(b_limit, discarded, doubles, d_bounds, sorted(quadruples), final)


# ---------------------------------------------------------------------------
# sharding and checkpointed runs


class IncompleteShardsError(RuntimeError):
    pass


def make_shards(cfg: SearchConfig, k: int) -> List[Shard]:
    """Split ``[r_min, r_max]`` into at most k contiguous, non-empty r intervals."""
    if k < 1:
        raise ValueError("k must be at least 1")
    total = cfg.r_max - cfg.r_min + 1
    k = max(1, min(k, total))
    shards = []
    lo = cfg.r_min
    for i in range(k):
        size = total // k + (1 if i < total % k else 0)
        shards.append(Shard(i, lo, lo + size - 1))
        lo += size
    return shards


def _shard_cfg(cfg: SearchConfig, shard: Shard) -> SearchConfig:
    return SearchConfig(shard.r_lo, shard.r_hi, cfg.b_max, cfg.d_lo_exp, cfg.d_hi_exp)


def _run_shard_memory(args) -> Tuple[List[Entry], Counters]:
    cfg, shard = args
    counters = Counters()
    return initial_list(_shard_cfg(cfg, shard), counters), counters


def _pool(k: int, processes: Optional[int]):
    n = processes or min(k, os.cpu_count() or 1)
    return multiprocessing.get_context("spawn").Pool(n) if n > 1 else None


def shard_and_merge(cfg: SearchConfig, k: int, processes: Optional[int] = None,
                    counters: Optional[Counters] = None) -> List[Entry]:
    """Run ``initial_list`` over k shards and concatenate in r order.

    The result is identical to the unsharded run for every k.
    """
    shards = make_shards(cfg, k)
    pool = _pool(len(shards), processes)
    jobs = [(cfg, s) for s in shards]
    try:
        results = pool.map(_run_shard_memory, jobs) if pool else [_run_shard_memory(j) for j in jobs]
    finally:
        if pool:
            pool.close()
            pool.join()
    merged: List[Entry] = []
    for entries, cnt in results:
        merged.extend(entries)
        if counters is not None:
            counters.add(cnt)
    return merged


# --- manifest-backed runs

_CONFIG_KEYS = ("r_min", "r_max", "b_max", "d_lo_exp", "d_hi_exp")
_SHARD_KEYS = ("r_lo", "r_hi", "status", "last_r", "output_path", "output_bytes", "pairs", "potential", "survivors")
MANIFEST_FORMAT = "firstkind-manifest-1"


def manifest_fields(cfg: SearchConfig, shards: Sequence[Shard]) -> Dict[str, object]:
    fields: Dict[str, object] = {"format": MANIFEST_FORMAT}
    fields.update(asdict(cfg))
    fields["shards"] = len(shards)
    totals = Counters()
    for s in shards:
        p = f"shard.{s.index}."
        fields[p + "r_lo"] = s.r_lo
        fields[p + "r_hi"] = s.r_hi
        fields[p + "status"] = s.status
        fields[p + "last_r"] = s.last_r
        fields[p + "output_path"] = s.output_path
        fields[p + "output_bytes"] = s.output_bytes
        fields[p + "pairs"] = s.counters.pairs
        fields[p + "potential"] = s.counters.potential
        fields[p + "survivors"] = s.counters.survivors
        totals.add(s.counters)
    fields.update(pairs=totals.pairs, potential=totals.potential, survivors=totals.survivors)
    return fields


def parse_manifest(fields: Dict[str, str]) -> Tuple[SearchConfig, List[Shard]]:
    if fields.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"not a run manifest (format={fields.get('format')!r})")
    cfg = SearchConfig(*(int(fields[k]) for k in _CONFIG_KEYS))
    shards = []
    for i in range(int(fields["shards"])):
        p = f"shard.{i}."
        shards.append(Shard(
            i, int(fields[p + "r_lo"]), int(fields[p + "r_hi"]), fields[p + "status"],
            fields[p + "output_path"], int(fields[p + "last_r"]), int(fields[p + "output_bytes"]),
            Counters(int(fields[p + "pairs"]), int(fields[p + "potential"]), int(fields[p + "survivors"])),
        ))
    return cfg, shards


def _update_manifest(path: str, shard: Shard) -> None:
    with FileLock(path + ".lock"):
        cfg, shards = parse_manifest(read_manifest(path))
        shards[shard.index] = shard
        write_manifest(path, manifest_fields(cfg, shards))


def run_shard_checkpointed(manifest_path: str, index: int, interval: float = 5.0,
                           stop_after: Optional[int] = None) -> Shard:
    """Run (or resume) one shard, appending to its output and checkpointing.

    A checkpoint records the last completed r together with the byte length of
    the output at that moment; on resume the output is truncated back to that
    length, so a killed run resumes bit-identically.  ``stop_after`` makes the
    shard return after that many r values (used to simulate interruption).
    """
    with FileLock(manifest_path + ".lock"):
        cfg, shards = parse_manifest(read_manifest(manifest_path))
    shard = shards[index]
    if shard.status == "done":
        return shard
    scfg = _shard_cfg(cfg, shard)
    table = _factor_table(shard.r_hi)
    mode = "r+b" if os.path.exists(shard.output_path) else "w+b"
    with open(shard.output_path, mode) as out:
        out.truncate(shard.output_bytes)
        out.seek(shard.output_bytes)
        last_sync = time.monotonic()
        done_here = 0
        for r in range(shard.last_r + 1, shard.r_hi + 1):
            for e in _entries_for_r(r, scfg, table, shard.counters):
                out.write(format_entry(e).encode("ascii"))
            shard.last_r = r
            done_here += 1
            if r == shard.r_hi:
                shard.status = "done"
            now = time.monotonic()
            if shard.status == "done" or now - last_sync >= interval:
                fsync_file(out)
                shard.output_bytes = out.tell()
                _update_manifest(manifest_path, shard)
                last_sync = now
            if stop_after is not None and done_here >= stop_after and shard.status != "done":
                fsync_file(out)
                shard.output_bytes = out.tell()
                _update_manifest(manifest_path, shard)
                return shard
        if shard.status != "done":
            # empty range
            shard.status = "done"
            shard.output_bytes = out.tell()
            _update_manifest(manifest_path, shard)
    return shard


def _run_shard_job(args) -> Shard:
    return run_shard_checkpointed(*args)


def init_manifest(manifest_path: str, cfg: SearchConfig, k: int, out_path: str) -> Tuple[SearchConfig, List[Shard]]:
    """Create the manifest, or load it and check the config when resuming."""
    if os.path.exists(manifest_path):
        old_cfg, shards = parse_manifest(read_manifest(manifest_path))
        if old_cfg != cfg or len(shards) != len(make_shards(cfg, k)):
            raise ValueError(f"{manifest_path} belongs to a different run ({old_cfg}, {len(shards)} shards)")
        return old_cfg, shards
    shards = make_shards(cfg, k)
    for s in shards:
        s.output_path = f"{out_path}.shard{s.index}"
    with FileLock(manifest_path + ".lock"):
        write_manifest(manifest_path, manifest_fields(cfg, shards))
    return cfg, shards


def merge_shards(manifest_path: str, out_path: str) -> Counters:
    """Concatenate completed shard outputs into ``out_path``; refuses incomplete sets."""
    cfg, shards = parse_manifest(read_manifest(manifest_path))
    pending = [s.index for s in shards if s.status != "done"]
    if pending:
        raise IncompleteShardsError(f"shards not finished: {pending}")
    totals = Counters()
    tmp = out_path + ".tmp"
    with open(tmp, "wb") as out:
        for s in shards:
            with open(s.output_path, "rb") as fh:
                data = fh.read(s.output_bytes)
            out.write(data)
            totals.add(s.counters)
        fsync_file(out)
    os.replace(tmp, out_path)
    return totals


def run_search(cfg: SearchConfig, k: int, manifest_path: str, out_path: str,
               interval: float = 5.0, processes: Optional[int] = None) -> Counters:
    """Checkpointed, sharded Algorithm 1 writing records to ``out_path``.

    Re-invoking with the same arguments after an interruption resumes every
    unfinished shard from its last checkpoint.
    """
    _, shards = init_manifest(manifest_path, cfg, k, out_path)
    jobs = [(manifest_path, s.index, interval) for s in shards if s.status != "done"]
    pool = _pool(len(jobs), processes) if jobs else None
    try:
        if pool:
            pool.map(_run_shard_job, jobs)
        else:
            for job in jobs:
                _run_shard_job(job)
    finally:
        if pool:
            pool.close()
            pool.join()
    return merge_shards(manifest_path, out_path)


def verify_entry(e: Entry, cfg: SearchConfig) -> bool:
    """Recheck every invariant of an initial-list entry from scratch."""
    a, b, c, d = e
    return (
        a + 2 < b < 2 * a
        and b <= cfg.b_max
        and b < c < d
        and b ** cfg.d_lo_exp < d < b ** cfg.d_hi_exp
        and is_m_tuple((a, b, c, d))
        and d == d_plus_from_roots(a, b, c, *(as_perfect_square(x) for x in (a * b + 1, a * c + 1, b * c + 1)))
        and bounds.lara_holds(a, b, d).holds
    )
