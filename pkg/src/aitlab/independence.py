"""Mutual-dependency graphs, greedy independent sets, and tuple independence.

The graph puts an edge between u and v exactly when each provides at
least beta bits of information about the other.  The greedy
minimum-degree rule extracts an independent set of size at least
sum 1/(deg(v)+1), the classic Caro-Wei guarantee, which holds for every
graph regardless of where it came from.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Mapping, Optional, Sequence, Set, Union

from .bits import Bits, all_strings, check_bits
from .complexity import SENTINEL, TableStore, complexity
from .depsets import DepParams, a_size_bound, dep_set_A
from .errors import PreconditionError, ResourceRefusal

DEFAULT_GRAPH_N_LIMIT = 10
DEFAULT_PERM_CAP = 40320  # 8!


@dataclass
class DepGraph:
    n: int
    beta: int
    budget: int
    vertices: tuple[Bits, ...]
    adj: dict[Bits, frozenset[Bits]]

    @property
    def degrees(self) -> dict[Bits, int]:
        return {v: len(nb) for v, nb in self.adj.items()}

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def edges(self) -> list[tuple[Bits, Bits]]:
        return sorted((u, v) for u in self.vertices for v in self.adj[u] if u < v)


def build_dep_graph(
    n: int,
    beta: int,
    t: int,
    store: TableStore,
    max_n: int = DEFAULT_GRAPH_N_LIMIT,
) -> DepGraph:
    """Graph on {0,1}^n with mutual beta-dependency edges.

    Needs every conditional table at length n, so the size is gated:
    raise max_n explicitly to go past the default.
    """
    if n > max_n:
        raise ResourceRefusal(
            f"graph build needs 2^{n} conditional tables; raise max_n to allow n={n}"
        )
    vertices = tuple(all_strings(n))
    store.build_many(n, vertices, budget=t)
    plain = store.table(n, "", t).int_values()
    # mutual_info[i][j] = C(v_i) - C(v_i | v_j)
    cond = {v: store.table(n, v, t).int_values() for v in vertices}
    adj: dict[Bits, set[Bits]] = {v: set() for v in vertices}
    for i, u in enumerate(vertices):
        for j in range(i + 1, len(vertices)):
            v = vertices[j]
            if (
                plain[i] - cond[v][i] >= beta
                and plain[j] - cond[u][j] >= beta
            ):
                adj[u].add(v)
                adj[v].add(u)
    return DepGraph(
        n=n,
        beta=beta,
        budget=t,
        vertices=vertices,
        adj={v: frozenset(nb) for v, nb in adj.items()},
    )


GraphLike = Union[DepGraph, Mapping]


def _adjacency(graph: GraphLike) -> dict:
    if isinstance(graph, DepGraph):
        return {v: set(nb) for v, nb in graph.adj.items()}
    return {v: set(nb) for v, nb in graph.items()}


def caro_wei_bound(graph: GraphLike) -> int:
    """ceil(sum over vertices of 1/(degree+1)), computed exactly."""
    adj = _adjacency(graph)
    total = sum((Fraction(1, len(nb) + 1) for nb in adj.values()), Fraction(0))
    return ceil(total)


def caro_wei_independent_set(graph: GraphLike) -> set:
    """Greedy minimum-degree independent set (ties broken by vertex order).

    The returned set is independent and at least as large as
    caro_wei_bound(graph); both facts are machine-independent.
    """
    adj = _adjacency(graph)
    degrees = {v: len(nb) for v, nb in adj.items()}
    chosen = set()
    while degrees:
        v = min(degrees, key=lambda u: (degrees[u], u))
        chosen.add(v)
        removed = adj[v] | {v}
        for r in removed:
            for nb in adj[r]:
                if nb not in removed:
                    adj[nb].discard(r)
                    degrees[nb] -= 1
            adj.pop(r)
            degrees.pop(r)
    return chosen


def independent_in(graph: GraphLike, vertices: Set) -> bool:
    adj = _adjacency(graph)
    vs = list(vertices)
    return all(v not in adj[u] for u, v in itertools.combinations(vs, 2))


def random_graph(num_vertices: int, p: float, seed: int) -> dict[int, set[int]]:
    """Seeded Erdos-Renyi graph on integer vertices, for exercising the greedy."""
    rng = random.Random(seed)
    adj: dict[int, set[int]] = {v: set() for v in range(num_vertices)}
    for u in range(num_vertices):
        for v in range(u + 1, num_vertices):
            if rng.random() < p:
                adj[u].add(v)
                adj[v].add(u)
    return adj


@dataclass
class PairwiseReport:
    """Verdict of the pairwise independence check over all ordered pairs."""

    strings: tuple[Bits, ...]
    alpha: int
    t: int
    ok: bool
    violations: tuple[tuple[int, int, int], ...]  # (i, j, info value)
    size_bound: float  # 2 n^3 2^alpha, the counting ceiling for such sets
    bound_ratio: float

    def as_dict(self) -> dict:
        return {
            "strings": list(self.strings),
            "alpha": self.alpha,
            "t": self.t,
            "ok": self.ok,
            "violations": [list(v) for v in self.violations],
            "size_bound": self.size_bound,
            "bound_ratio": self.bound_ratio,
        }


def check_pairwise_independent(
    strings: Sequence[Bits],
    alpha: int,
    t: int,
    store: TableStore,
) -> PairwiseReport:
    """All ordered pairs must satisfy C^t(x_i) - C^t(x_i | x_j) <= alpha."""
    xs = tuple(check_bits(x) for x in strings)
    if len(xs) < 2:
        raise PreconditionError("pairwise check needs at least two strings")
    n = len(xs[0])
    if any(len(x) != n for x in xs):
        raise ValueError("all strings must share one length")
    plain = store.table(n, "", t)
    violations = []
    for i, xi in enumerate(xs):
        c_i = plain.value(xi)
        for j, xj in enumerate(xs):
            if i == j:
                continue
            gain = c_i - store.table(n, xj, t).value(xi)
            if gain > alpha:
                violations.append((i, j, gain))
    bound = 2.0 * n**3 * 2.0**alpha
    return PairwiseReport(
        strings=xs,
        alpha=alpha,
        t=t,
        ok=not violations,
        violations=tuple(violations),
        size_bound=bound,
        bound_ratio=len(xs) / bound,
    )


def concat_deficiency(xs: Sequence[Bits], t: int, store: TableStore) -> int:
    """sum C^t(x_i) - C^t(x_1 ... x_k), in the order given.

    Not asserted to be non-negative: the time-bounded measure may in
    principle rate the concatenation above the parts.
    """
    xs = [check_bits(x) for x in xs]
    if not xs:
        raise ValueError("need at least one string")
    total = sum(store.cvalue(x, "", t) for x in xs)
    joint, _ = complexity("".join(xs), "", budget=t)
    if joint == SENTINEL or total >= SENTINEL:
        raise PreconditionError("deficiency needs finite complexities")
    return total - joint


@dataclass
class TupleReport:
    """Per-permutation concatenation complexities of one tuple."""

    strings: tuple[Bits, ...]
    alpha: int
    t: int
    exhaustive: bool
    permutations_evaluated: int
    verdict: bool
    total_individual: int
    # permutation (as index tuple) -> complexity of the permuted concatenation
    concat_complexities: dict[tuple[int, ...], int]
    deficiency: int  # total_individual minus the smallest evaluated concatenation
    deficiency_given_order: int

    def as_dict(self) -> dict:
        return {
            "strings": list(self.strings),
            "alpha": self.alpha,
            "t": self.t,
            "exhaustive": self.exhaustive,
            "permutations_evaluated": self.permutations_evaluated,
            "verdict": self.verdict,
            "total_individual": self.total_individual,
            "concat_complexities": {
                ",".join(map(str, k)): v for k, v in self.concat_complexities.items()
            },
            "deficiency": self.deficiency,
            "deficiency_given_order": self.deficiency_given_order,
        }


def check_mutual_independent(
    strings: Sequence[Bits],
    alpha: int,
    t: int,
    store: TableStore,
    perm_cap: int = DEFAULT_PERM_CAP,
    seed: int = 0,
) -> TupleReport:
    """Every permuted concatenation must cost at least the sum minus alpha.

    All k! permutations are evaluated while k! <= perm_cap; beyond that a
    seeded sample of perm_cap permutations is used and the report says so.
    """
    xs = tuple(check_bits(x) for x in strings)
    if not xs:
        raise ValueError("need at least one string")
    k = len(xs)
    n_fact = 1
    for i in range(2, k + 1):
        n_fact *= i
    exhaustive = n_fact <= perm_cap
    if exhaustive:
        perms = list(itertools.permutations(range(k)))
    else:
        rng = random.Random(seed)
        base = list(range(k))
        seen = {tuple(base)}  # the given order is always evaluated
        while len(seen) < perm_cap:
            rng.shuffle(base)
            seen.add(tuple(base))
        perms = sorted(seen)
    total = sum(store.cvalue(x, "", t) for x in xs)
    concat_c: dict[tuple[int, ...], int] = {}
    verdict = True
    for perm in perms:
        joined = "".join(xs[i] for i in perm)
        v, _ = complexity(joined, "", budget=t)
        if v == SENTINEL:
            raise PreconditionError("mutual check needs finite concatenation complexity")
        concat_c[perm] = v
        if v < total - alpha:
            verdict = False
    identity = tuple(range(k))
    return TupleReport(
        strings=xs,
        alpha=alpha,
        t=t,
        exhaustive=exhaustive,
        permutations_evaluated=len(perms),
        verdict=verdict,
        total_individual=total,
        concat_complexities=concat_c,
        deficiency=total - min(concat_c.values()),
        deficiency_given_order=total - concat_c[identity],
    )


@dataclass
class IntersectionReport:
    """Exact intersection of dependency sets with its counting comparator."""

    strings: tuple[Bits, ...]
    alpha: int
    t: int
    members: tuple[Bits, ...]
    size: int
    deficiency: int  # beta in the comparator below
    comparator: float  # 2^(n - k*alpha + beta), the scale of the bound
    ratio: float

    def as_dict(self, include_members: bool = False) -> dict:
        d = {
            "strings": list(self.strings),
            "alpha": self.alpha,
            "t": self.t,
            "size": self.size,
            "deficiency": self.deficiency,
            "comparator": self.comparator,
            "ratio": self.ratio,
        }
        if include_members:
            d["members"] = list(self.members)
        return d


def intersect_dep_sets(
    xs: Sequence[Bits],
    alpha: int,
    t: int,
    store: TableStore,
) -> IntersectionReport:
    """Intersection of the A-sets of the given centers, measured against
    2^(n - k*alpha + deficiency)."""
    xs = tuple(check_bits(x) for x in xs)
    if not xs:
        raise ValueError("need at least one center")
    n = len(xs[0])
    if any(len(x) != n for x in xs):
        raise ValueError("all centers must share one length")
    p = DepParams(n=n, alpha=alpha, t=t)
    sets = [set(dep_set_A(x, p, store).members) for x in xs]
    members = tuple(sorted(set.intersection(*sets)))
    beta = concat_deficiency(xs, t, store)
    comparator = 2.0 ** (n - len(xs) * alpha + beta)
    return IntersectionReport(
        strings=xs,
        alpha=alpha,
        t=t,
        members=members,
        size=len(members),
        deficiency=beta,
        comparator=comparator,
        ratio=len(members) / comparator if comparator else float("inf"),
    )


def graph_degree_bound_ok(g: DepGraph) -> bool:
    """degree(u) <= |A_{u,beta}| <= 2^(n - beta + c_literal + 1), both links hard."""
    for u in g.vertices:
        if len(g.adj[u]) > a_size_bound(g.n, g.beta):
            return False
    return True
