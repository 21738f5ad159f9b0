"""Dependency sets, their hard size bounds, and prefix witness families.

A_{x,alpha} collects the n-bit strings y with C^t(y) - C^t(y|x) >= alpha;
B_{x,alpha} uses C^t(y|bin(n)) on the left instead.  Both are defined by
the inequality alone here; the coincidence clause (x is always dependent
with itself) belongs to the covering module.

The size bound |A| <= 2^(n - alpha + c_literal + 1) is exact for the
time-bounded measure: members satisfy C^t(y|x) <= n + c_literal - alpha
and there are fewer than 2^(n - alpha + c_literal + 1) programs that
short.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bits import Bits, all_strings, check_bits
from .complexity import SENTINEL, TableStore, condition_for_length, info, shortest_description
from .errors import PreconditionError
from .machine import C_LITERAL

KIND_A = "A"
KIND_B = "B"
KIND_A_RESTRICTED = "A-restricted"


def log_threshold(multiplier: float, n: int) -> int:
    """ceil(multiplier * log2(n)); the conservative reading of slack terms."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0
    return math.ceil(multiplier * math.log2(n))


def a_size_bound(n: int, alpha: int) -> float:
    """Hard counting bound on |A_{x,alpha}| for every center x."""
    return 2.0 ** (n - alpha + C_LITERAL + 1)


@dataclass(frozen=True)
class DepParams:
    """Threshold parameters for one dependency-set computation.

    alpha above n + c_literal is allowed and simply yields empty sets;
    s is the optional complexity floor of the restricted variant.
    """

    n: int
    alpha: int
    t: int = 4096
    s: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.t < 0:
            raise ValueError("t must be >= 0")


@dataclass
class DepSetResult:
    center: Bits
    kind: str
    params: DepParams
    members: tuple[Bits, ...]
    size: int
    hard_bound: float
    ideal_size: float  # 2^(n - alpha), the scale the bounds are measured against
    bound_ratio: float  # size / ideal_size

    def as_csv_row(self) -> list:
        return [
            self.center,
            self.kind,
            self.params.alpha,
            "" if self.params.s is None else self.params.s,
            self.size,
            self.bound_ratio,
        ]

    def as_dict(self, include_members: bool = False) -> dict:
        d = {
            "center": self.center,
            "kind": self.kind,
            "n": self.params.n,
            "alpha": self.params.alpha,
            "s": self.params.s,
            "t": self.params.t,
            "size": self.size,
            "hard_bound": self.hard_bound,
            "ideal_size": self.ideal_size,
            "bound_ratio": self.bound_ratio,
        }
        if include_members:
            d["members"] = list(self.members)
        return d


CSV_COLUMNS = ["center", "kind", "alpha", "s", "size", "bound_ratio"]


def _dep_members(
    left: np.ndarray, right: np.ndarray, alpha: int, n: int
) -> tuple[Bits, ...]:
    if int(left.max()) == SENTINEL or int(right.max()) == SENTINEL:
        raise PreconditionError("dependency sets need sentinel-free tables")
    picked = np.nonzero(left.astype(np.int16) - right.astype(np.int16) >= alpha)[0]
    return tuple(format(int(i), f"0{n}b") for i in picked)


def _result(center, kind, p, members) -> DepSetResult:
    ideal = 2.0 ** (p.n - p.alpha)
    return DepSetResult(
        center=center,
        kind=kind,
        params=p,
        members=members,
        size=len(members),
        hard_bound=a_size_bound(p.n, p.alpha),
        ideal_size=ideal,
        bound_ratio=len(members) / ideal,
    )


def dep_set_A(x: Bits, p: DepParams, store: TableStore) -> DepSetResult:
    """{y : C^t(y) - C^t(y|x) >= alpha}, inequality semantics only."""
    check_bits(x, "center")
    if len(x) != p.n:
        raise ValueError("center length must equal params.n")
    plain = store.table(p.n, "", p.t).values
    cond = store.table(p.n, x, p.t).values
    return _result(x, KIND_A, p, _dep_members(plain, cond, p.alpha, p.n))


def dep_set_B(x: Bits, p: DepParams, store: TableStore) -> DepSetResult:
    """{y : C^t(y|bin(n)) - C^t(y|x) >= alpha}: information besides the length."""
    check_bits(x, "center")
    if len(x) != p.n:
        raise ValueError("center length must equal params.n")
    given_len = store.table(p.n, condition_for_length(p.n), p.t).values
    cond = store.table(p.n, x, p.t).values
    return _result(x, KIND_B, p, _dep_members(given_len, cond, p.alpha, p.n))


def dep_set_A_restricted(x: Bits, p: DepParams, store: TableStore) -> DepSetResult:
    """dep_set_A members further filtered by C^t(y) >= s."""
    if p.s is None:
        raise ValueError("restricted set needs params.s")
    base = dep_set_A(x, p, store)
    plain = store.table(p.n, "", p.t)
    members = tuple(y for y in base.members if plain.value(y) >= p.s)
    return _result(x, KIND_A_RESTRICTED, p, members)


@dataclass
class DegreeResult:
    """D_alpha(u): the centers x whose dependency set contains u."""

    u: Bits
    params: DepParams
    count: int
    members: tuple[Bits, ...]
    sampled: bool
    conditions_scanned: int
    estimate: Optional[float] = None  # scaled to the full space when sampled

    def as_dict(self, include_members: bool = False) -> dict:
        d = {
            "u": self.u,
            "n": self.params.n,
            "alpha": self.params.alpha,
            "t": self.params.t,
            "count": self.count,
            "sampled": self.sampled,
            "conditions_scanned": self.conditions_scanned,
            "estimate": self.estimate,
        }
        if include_members:
            d["members"] = list(self.members)
        return d


def dep_degree(
    u: Bits,
    p: DepParams,
    store: TableStore,
    conditions: Optional[Sequence[Bits]] = None,
) -> DegreeResult:
    """Degree of u in the dependency structure: how many centers reach it.

    With conditions=None every center is scanned (2^n conditional
    tables); passing an explicit sample returns an estimate object whose
    sampled flag is set.  The transpose identity x in D(u) iff
    u in A_{x,alpha} holds exactly by construction.
    """
    check_bits(u, "u")
    if len(u) != p.n:
        raise ValueError("u length must equal params.n")
    sampled = conditions is not None
    centers = list(conditions) if sampled else list(all_strings(p.n))
    plain = store.table(p.n, "", p.t)
    c_u = plain.value(u)
    members = []
    for x in centers:
        if c_u - store.table(p.n, x, p.t).value(u) >= p.alpha:
            members.append(x)
    estimate = None
    if sampled and centers:
        estimate = len(members) / len(centers) * (1 << p.n)
    return DegreeResult(
        u=u,
        params=p,
        count=len(members),
        members=tuple(members),
        sampled=sampled,
        conditions_scanned=len(centers),
        estimate=estimate,
    )


@dataclass
class ContainmentReport:
    """Measured containment of the B-sets inside the A-sets."""

    n: int
    alpha: int
    t: int
    centers_scanned: int
    violations: int  # pairs (x, y) with y in B but not in A
    examples: tuple[tuple[Bits, Bits], ...]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "t": self.t,
            "centers_scanned": self.centers_scanned,
            "violations": self.violations,
            "examples": [list(e) for e in self.examples],
        }


def containment_report(
    n: int, alpha: int, store: TableStore, t: int = 4096, max_examples: int = 8
) -> ContainmentReport:
    """Scan every center and count B-members missing from A.

    Exact containment holds for the unbounded measure up to constants;
    for the time-bounded measure it is a recorded observation.
    """
    p = DepParams(n=n, alpha=alpha, t=t)
    violations = 0
    examples: list[tuple[Bits, Bits]] = []
    for x in all_strings(n):
        a = set(dep_set_A(x, p, store).members)
        for y in dep_set_B(x, p, store).members:
            if y not in a:
                violations += 1
                if len(examples) < max_examples:
                    examples.append((x, y))
    return ContainmentReport(
        n=n,
        alpha=alpha,
        t=t,
        centers_scanned=1 << n,
        violations=violations,
        examples=tuple(examples),
    )


@dataclass
class WitnessFamily:
    """Strings built as (prefix of the shortest description) + high-complexity tail.

    The counting bound is hard: fewer than 2^(n-beta-1) tails can have
    conditional complexity below n - beta - 1, so at least half of the
    2^(n-beta) tails qualify.
    """

    center: Bits
    alpha: Optional[int]
    beta: int
    prefix: Bits
    members: tuple[Bits, ...]
    dependencies: dict[Bits, int]
    size_bound: float  # 2^(n - beta - 1)
    dependency_median: Optional[float]

    @property
    def size(self) -> int:
        return len(self.members)

    def as_dict(self, include_members: bool = True) -> dict:
        d = {
            "center": self.center,
            "alpha": self.alpha,
            "beta": self.beta,
            "prefix": self.prefix,
            "size": self.size,
            "size_bound": self.size_bound,
            "dependency_median": self.dependency_median,
        }
        if include_members:
            d["members"] = list(self.members)
            d["dependencies"] = dict(self.dependencies)
        return d


def witness_family(
    x: Bits,
    beta: int,
    t: int,
    store: TableStore,
    alpha: Optional[int] = None,
) -> WitnessFamily:
    """Family {prefix z : C^t(z | prefix) >= n - beta - 1} for prefix = x*[:beta]."""
    check_bits(x, "center")
    n = len(x)
    if n < 1:
        raise ValueError("center must be nonempty")
    if beta < 0:
        raise PreconditionError("beta must be >= 0")
    if beta > n:
        raise PreconditionError(f"beta={beta} exceeds the string length {n}")
    star = shortest_description(x, budget=t, store=store)
    if beta > len(star.program):
        raise PreconditionError(
            f"beta={beta} exceeds |x*|={len(star.program)}; the prefix does not exist"
        )
    prefix = star.program[:beta]
    tail_len = n - beta
    if tail_len == 0:
        tails = [""]
    else:
        table = store.table(tail_len, prefix, t)
        tails = [z for z in all_strings(tail_len) if table.value(z) >= tail_len - 1]
    members = tuple(sorted(prefix + z for z in tails))
    deps = {y: info(x, y, budget=t, store=store) for y in members}
    med = float(statistics.median(deps.values())) if deps else None
    return WitnessFamily(
        center=x,
        alpha=alpha,
        beta=beta,
        prefix=prefix,
        members=members,
        dependencies=deps,
        size_bound=2.0 ** (n - beta - 1),
        dependency_median=med,
    )


def thm1_witnesses(x: Bits, alpha: int, t: int, store: TableStore) -> WitnessFamily:
    """Constructive dependency witnesses at beta = alpha + ceil(7 log2 n).

    Requires C^t(x) >= alpha + ceil(7 log2 n).  At desk-scale n the
    threshold exceeds the literal ceiling n + c_literal, so the
    hypothesis is unsatisfiable there and this raises PreconditionError;
    witness_family exposes the same construction for explicit beta.
    """
    check_bits(x, "center")
    n = len(x)
    threshold = alpha + log_threshold(7, n)
    c_x = store.cvalue(x, "", t)
    if c_x == SENTINEL or c_x < threshold:
        raise PreconditionError(
            f"need C^t(x) >= alpha + ceil(7 log2 n) = {threshold}, "
            f"but C^t(x) = {'infinite' if c_x == SENTINEL else c_x}"
        )
    return witness_family(x, threshold, t, store, alpha=alpha)
