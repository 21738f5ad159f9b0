"""Exact time-bounded complexity tables via exhaustive program enumeration.

For a fixed (length n, condition w, step budget t, program length cap)
the table holds C^t(x | w) for every x in {0,1}^n: the length of the
shortest program, within the cap, that halts with output x within t
steps.  Unconditional complexity is the empty condition; complexity
given the length uses the condition bin(n).

C^t is an upper bound on the (uncomputable) plain complexity and is
non-increasing in t and in the length cap.  Counting invariants carry
over exactly; logarithmic-slack statements become measured reports.
"""

from __future__ import annotations

import hashlib
import logging
import math
import multiprocessing
import os
import statistics
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .bits import Bits, all_strings, bin_numeral, bits_to_index, index_to_bits, pack_bits, random_bits, unpack_bits
from .errors import CacheError, PreconditionError, ResourceRefusal, TableRequiredError
from .machine import (
    C_LITERAL,
    C_OVERHEAD,
    VERSION_ID,
    RunStatus,
    decoded_programs,
    execute,
)

log = logging.getLogger("aitlab")

SENTINEL = 255

DEFAULT_BUDGET = 4096
DEFAULT_WORK_CEILING = 10**10

CACHE_MAGIC = b"AITLAB01"
_HEADER = struct.Struct("<8s16sHQBH")


def default_length_cap(n: int) -> int:
    """Literal programs need n+1 bits; +4 leaves room for compressed witnesses."""
    return n + 4


def estimated_steps(length_cap: int, budget: int) -> int:
    """Worst-case interpreter steps for one full table build: 2^(cap+1) * t."""
    return (1 << (length_cap + 1)) * budget


@dataclass(frozen=True)
class Witness:
    """A program that achieves the recorded complexity of its target."""

    target: Bits
    program: Bits
    condition: Bits


@dataclass
class ComplexityTable:
    n: int
    condition: Bits
    budget: int
    length_cap: int
    machine_version: str
    values: np.ndarray  # uint8, 2^n entries in lexicographic order of x
    witnesses: Optional[dict[int, Bits]] = field(default=None, repr=False)

    def value(self, x: Bits) -> int:
        if len(x) != self.n:
            raise ValueError(f"expected a {self.n}-bit string, got {x!r}")
        return int(self.values[bits_to_index(x)])

    def witness(self, x: Bits) -> Optional[Witness]:
        """First program in enumeration order achieving the table value.

        Recomputed by re-enumeration when the table was loaded from disk.
        Returns None for SENTINEL entries.
        """
        v = self.value(x)
        if v == SENTINEL:
            return None
        idx = bits_to_index(x)
        if self.witnesses is not None and idx in self.witnesses:
            return Witness(x, self.witnesses[idx], self.condition)
        for p, instrs in decoded_programs(self.length_cap):
            out = execute(list(instrs), self.condition, self.budget)
            if out.status is RunStatus.HALTED and out.output == x:
                if self.witnesses is not None:
                    self.witnesses[idx] = p
                return Witness(x, p, self.condition)
        raise AssertionError("table value present but no witness found")

    def int_values(self) -> np.ndarray:
        return self.values.astype(np.int16)

    def counting_violations(self) -> list[tuple[int, int]]:
        """(k, count) pairs with count >= 2^k; empty on a sound table."""
        bad = []
        for k in range(self.length_cap + 1):
            c = int(np.count_nonzero(self.values < k))
            if c >= (1 << k):
                bad.append((k, c))
        return bad


def build_table(
    n: int,
    condition: Bits = "",
    budget: int = DEFAULT_BUDGET,
    length_cap: Optional[int] = None,
    work_ceiling: Optional[int] = DEFAULT_WORK_CEILING,
) -> ComplexityTable:
    """Exhaustively enumerate programs and record first (shortest) hits.

    Enumeration is length-lexicographic, so the first program producing x
    both realises the minimum length and fixes the witness tie-break.
    Once every string of length n has been hit, longer programs cannot
    change anything and the scan stops early.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if budget < 0:
        raise ValueError("budget must be >= 0")
    cap = default_length_cap(n) if length_cap is None else length_cap
    if not 0 <= cap < SENTINEL:
        raise ValueError(f"length_cap must be in [0, {SENTINEL})")
    est = estimated_steps(cap, budget)
    if work_ceiling is not None and est > work_ceiling:
        raise ResourceRefusal(
            f"table build at length_cap={cap}, budget={budget} is estimated at "
            f"{est:.2e} interpreter steps, above the ceiling {work_ceiling:.2e}"
        )
    size = 1 << n
    values = np.full(size, SENTINEL, dtype=np.uint8)
    witnesses: dict[int, Bits] = {}
    found = 0
    for p, instrs in decoded_programs(cap):
        out = execute(list(instrs), condition, budget)
        if out.status is RunStatus.HALTED and len(out.output) == n:
            idx = bits_to_index(out.output)
            if values[idx] == SENTINEL:
                values[idx] = len(p)
                witnesses[idx] = p
                found += 1
                if found == size:
                    break
    return ComplexityTable(
        n=n,
        condition=condition,
        budget=budget,
        length_cap=cap,
        machine_version=VERSION_ID,
        values=values,
        witnesses=witnesses,
    )


def save_table(table: ComplexityTable, path: Union[str, Path]) -> None:
    """Write the bit-exact cache format (values only; witnesses are recomputable)."""
    path = Path(path)
    version = table.machine_version.encode("ascii")
    if len(version) != 16:
        raise ValueError("machine version id must be 16 bytes")
    header = _HEADER.pack(
        CACHE_MAGIC,
        version,
        table.n,
        table.budget,
        table.length_cap,
        len(table.condition),
    )
    payload = header + pack_bits(table.condition) + table.values.tobytes()
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def load_table(path: Union[str, Path]) -> ComplexityTable:
    """Load a cache file; reject bad magic, wrong machine version, truncation."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CacheError(f"{path}: shorter than the fixed header")
    magic, version, n, budget, cap, cond_bits = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    version_str = version.decode("ascii", errors="replace")
    if version_str != VERSION_ID:
        raise CacheError(
            f"{path}: built under machine {version_str}, this machine is {VERSION_ID}"
        )
    off = _HEADER.size
    cond_bytes = (cond_bits + 7) // 8
    if len(data) != off + cond_bytes + (1 << n):
        raise CacheError(f"{path}: wrong size for n={n}, condition of {cond_bits} bits")
    condition = unpack_bits(data[off : off + cond_bytes], cond_bits)
    values = np.frombuffer(data[off + cond_bytes :], dtype=np.uint8).copy()
    return ComplexityTable(
        n=n,
        condition=condition,
        budget=budget,
        length_cap=cap,
        machine_version=version_str,
        values=values,
        witnesses={},
    )


def _cache_name(n: int, condition: Bits, budget: int, cap: int) -> str:
    digest = hashlib.sha256(condition.encode("ascii")).hexdigest()[:12]
    return f"ct_{VERSION_ID}_n{n}_t{budget}_c{cap}_w{len(condition)}_{digest}.bin"


def _build_for_pool(args: tuple) -> tuple[Bits, bytes]:
    n, condition, budget, cap, ceiling = args
    t = build_table(n, condition, budget, cap, ceiling)
    return condition, t.values.tobytes()


class TableStore:
    """Build-on-demand table hub with in-memory and optional disk caching.

    Disk cache files are validated on load; corrupt or version-mismatched
    files are rebuilt with a logged warning, never silently served.
    """

    def __init__(
        self,
        cache_dir: Optional[Union[str, Path]] = None,
        budget: int = DEFAULT_BUDGET,
        length_cap: Optional[int] = None,
        work_ceiling: Optional[int] = DEFAULT_WORK_CEILING,
        autobuild: bool = True,
        workers: int = 1,
    ):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        if self.cache_dir is not None:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.budget = budget
        self.length_cap = length_cap
        self.work_ceiling = work_ceiling
        self.autobuild = autobuild
        self.workers = workers
        self._memory: dict[tuple, ComplexityTable] = {}
        self.stats = {"built": 0, "memory_hits": 0, "disk_hits": 0, "rejected": 0}

    def _resolve(self, n: int, budget: Optional[int], cap: Optional[int]) -> tuple[int, int]:
        b = self.budget if budget is None else budget
        c = (
            default_length_cap(n)
            if (cap is None and self.length_cap is None)
            else (self.length_cap if cap is None else cap)
        )
        return b, c

    def table(
        self,
        n: int,
        condition: Bits = "",
        budget: Optional[int] = None,
        length_cap: Optional[int] = None,
    ) -> ComplexityTable:
        b, c = self._resolve(n, budget, length_cap)
        key = (n, condition, b, c)
        hit = self._memory.get(key)
        if hit is not None:
            self.stats["memory_hits"] += 1
            return hit
        path = None
        if self.cache_dir is not None:
            path = self.cache_dir / _cache_name(n, condition, b, c)
            if path.exists():
                try:
                    t = load_table(path)
                    if (t.n, t.condition, t.budget, t.length_cap) != key:
                        raise CacheError(f"{path}: header does not match request")
                    self.stats["disk_hits"] += 1
                    self._memory[key] = t
                    return t
                except CacheError as exc:
                    self.stats["rejected"] += 1
                    log.warning("rejecting cache file and rebuilding: %s", exc)
        if not self.autobuild:
            raise TableRequiredError(
                f"table (n={n}, |cond|={len(condition)}, t={b}, cap={c}) is not "
                f"available and automatic building is disabled"
            )
        t = build_table(n, condition, b, c, self.work_ceiling)
        self.stats["built"] += 1
        self._memory[key] = t
        if path is not None:
            save_table(t, path)
        return t

    def build_many(
        self,
        n: int,
        conditions: Iterable[Bits],
        budget: Optional[int] = None,
        length_cap: Optional[int] = None,
    ) -> list[ComplexityTable]:
        """Build (or fetch) tables for many conditions, optionally in parallel.

        Worker results carry only the value arrays; they are merged here so
        the outcome is identical to a sequential build.
        """
        conds = list(conditions)
        if self.workers <= 1 or len(conds) <= 1:
            return [self.table(n, w, budget, length_cap) for w in conds]
        b, c = self._resolve(n, budget, length_cap)
        missing = [w for w in conds if (n, w, b, c) not in self._memory]
        todo = []
        for w in missing:
            if self.cache_dir is not None:
                path = self.cache_dir / _cache_name(n, w, b, c)
                if path.exists():
                    continue  # sequential path below will load it
            todo.append(w)
        if todo:
            jobs = [(n, w, b, c, self.work_ceiling) for w in todo]
            with multiprocessing.Pool(self.workers) as pool:
                for w, raw in pool.map(_build_for_pool, jobs):
                    t = ComplexityTable(
                        n=n,
                        condition=w,
                        budget=b,
                        length_cap=c,
                        machine_version=VERSION_ID,
                        values=np.frombuffer(raw, dtype=np.uint8).copy(),
                        witnesses={},
                    )
                    self.stats["built"] += 1
                    self._memory[(n, w, b, c)] = t
                    if self.cache_dir is not None:
                        save_table(t, self.cache_dir / _cache_name(n, w, b, c))
        return [self.table(n, w, budget, length_cap) for w in conds]

    def cvalue(self, x: Bits, condition: Bits = "", budget: Optional[int] = None) -> int:
        if len(x) == 0:
            return 0  # the empty program emits the empty string
        return self.table(len(x), condition, budget).value(x)


def complexity(
    x: Bits,
    condition: Bits = "",
    budget: int = DEFAULT_BUDGET,
    length_cap: Optional[int] = None,
    work_ceiling: Optional[int] = DEFAULT_WORK_CEILING,
    store: Optional[TableStore] = None,
) -> tuple[int, Optional[Witness]]:
    """C^t(x | condition) with its first witness, or (SENTINEL, None).

    With a store, the value comes from the full table (and stays
    consistent with it by construction); otherwise the enumeration stops
    at the first program that halts with output x.
    """
    if len(x) == 0:
        return 0, Witness(x, "", condition)
    if store is not None:
        t = store.table(len(x), condition, budget, length_cap)
        v = t.value(x)
        return (v, t.witness(x)) if v != SENTINEL else (SENTINEL, None)
    cap = default_length_cap(len(x)) if length_cap is None else length_cap
    est = estimated_steps(cap, budget)
    if work_ceiling is not None and est > work_ceiling:
        raise ResourceRefusal(
            f"direct search at length_cap={cap}, budget={budget} is estimated at "
            f"{est:.2e} interpreter steps, above the ceiling {work_ceiling:.2e}"
        )
    for p, instrs in decoded_programs(cap):
        out = execute(list(instrs), condition, budget)
        if out.status is RunStatus.HALTED and out.output == x:
            return len(p), Witness(x, p, condition)
    return SENTINEL, None


def shortest_description(
    x: Bits,
    budget: int = DEFAULT_BUDGET,
    length_cap: Optional[int] = None,
    store: Optional[TableStore] = None,
) -> Witness:
    """The first shortest unconditional program for x in enumeration order."""
    v, wit = complexity(x, "", budget, length_cap, store=store)
    if wit is None:
        raise PreconditionError(
            f"no program of length <= cap produces {x!r} within {budget} steps"
        )
    return wit


def info(
    x: Bits,
    y: Bits,
    budget: int = DEFAULT_BUDGET,
    store: Optional[TableStore] = None,
) -> int:
    """C^t(y) - C^t(y | x): the information x provides about y.

    May in principle be negative for a time-bounded measure; for this
    machine an exhaustive scan at small n finds no negative value (every
    unconditional witness ignores its condition, so conditioning never
    hurts).
    """
    if len(x) != len(y):
        raise ValueError("info is defined for equal-length strings")
    if store is None:
        store = TableStore(budget=budget)
    c_y = store.cvalue(y, "", budget)
    c_y_given_x = store.cvalue(y, x, budget)
    if SENTINEL in (c_y, c_y_given_x):
        raise PreconditionError("info needs both complexities to be finite")
    return c_y - c_y_given_x


def log_plus(v: float) -> float:
    """Base-2 log clamped at zero below 1 (log_plus(0) = 0)."""
    return math.log2(v) if v > 1 else 0.0


@dataclass(frozen=True)
class SlackStats:
    minimum: float
    median: float
    maximum: float
    violations: int

    @staticmethod
    def of(values: list[float]) -> "SlackStats":
        return SlackStats(
            minimum=min(values),
            median=float(statistics.median(values)),
            maximum=max(values),
            violations=sum(1 for v in values if v < 0),
        )

    def as_dict(self) -> dict:
        return {
            "min": self.minimum,
            "median": self.median,
            "max": self.maximum,
            "violations": self.violations,
        }


@dataclass
class SlackReport:
    """Measured slack of the two information-symmetry inequalities.

    slack_concat is C^t(y) + C^t(x|y) + 2*log+(C^t(y)) minus C^t(xy);
    slack_direction is [C^t(y) - C^t(y|x)] minus
    [C^t(x) - C^t(x|y) - 5*ceil(log2 n)].  Negative slack counts as a
    violation; violations are recorded outputs, not failures.
    """

    n: int
    budget: int
    length_cap: int
    machine_version: str
    sample: str
    seed: Optional[int]
    pair_count: int
    slack_a: SlackStats
    slack_c: SlackStats
    slack_a_values: Optional[list[float]] = None
    slack_c_values: Optional[list[float]] = None

    def as_dict(self, include_values: bool = False) -> dict:
        d = {
            "n": self.n,
            "budget": self.budget,
            "length_cap": self.length_cap,
            "machine_version": self.machine_version,
            "sample": self.sample,
            "seed": self.seed,
            "pair_count": self.pair_count,
            "slack_a": self.slack_a.as_dict(),
            "slack_c": self.slack_c.as_dict(),
        }
        if include_values:
            d["slack_a_values"] = self.slack_a_values
            d["slack_c_values"] = self.slack_c_values
        return d


def soi_report(
    n: int,
    budget: int = DEFAULT_BUDGET,
    sample: Union[str, int] = "all",
    seed: int = 0,
    store: Optional[TableStore] = None,
) -> SlackReport:
    """Measure information-symmetry slack over pairs of n-bit strings.

    sample="all" runs every pair exhaustively; an integer draws that many
    pairs with the seeded generator.  Deterministic given (n, budget,
    sample, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if store is None:
        store = TableStore(budget=budget)
    if sample == "all":
        pairs = [(x, y) for x in all_strings(n) for y in all_strings(n)]
        sample_tag = "all"
    else:
        count = int(sample)
        if count < 1:
            raise ValueError("sample count must be >= 1")
        import random as _random

        rng = _random.Random(seed)
        pairs = [(random_bits(n, rng), random_bits(n, rng)) for _ in range(count)]
        sample_tag = f"random:{count}"
    plain = store.table(n, "", budget)
    joint = store.table(2 * n, "", budget)
    log_n = math.ceil(math.log2(n)) if n > 1 else 0
    slack_a_values: list[float] = []
    slack_c_values: list[float] = []
    for x, y in pairs:
        c_x = plain.value(x)
        c_y = plain.value(y)
        c_xy = joint.value(x + y)
        c_x_given_y = store.table(n, y, budget).value(x)
        c_y_given_x = store.table(n, x, budget).value(y)
        if SENTINEL in (c_x, c_y, c_xy, c_x_given_y, c_y_given_x):
            raise PreconditionError("slack needs finite complexities; raise the cap")
        slack_a_values.append(c_y + c_x_given_y + 2 * log_plus(c_y) - c_xy)
        slack_c_values.append(
            (c_y - c_y_given_x) - (c_x - c_x_given_y - 5 * log_n)
        )
    return SlackReport(
        n=n,
        budget=plain.budget,
        length_cap=plain.length_cap,
        machine_version=VERSION_ID,
        sample=sample_tag,
        seed=seed if sample != "all" else None,
        pair_count=len(pairs),
        slack_a=SlackStats.of(slack_a_values),
        slack_c=SlackStats.of(slack_c_values),
        slack_a_values=slack_a_values,
        slack_c_values=slack_c_values,
    )


def condition_for_length(n: int) -> Bits:
    """The condition that encodes knowledge of the length: bin(n)."""
    return bin_numeral(n)
