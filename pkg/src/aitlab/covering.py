"""Covering sets: every n-bit string must depend on some chosen center.

Coverage uses the coincidence semantics: y is covered by center x when
C^t(y) - C^t(y|x) >= alpha or x equals y.  Without the coincidence
clause low-complexity strings could never be covered, which would make
the low-complexity augmentation of the random construction pointless.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from pathlib import Path
from typing import Optional, Union

from .bits import Bits, all_strings, bits_to_index, random_bits
from .complexity import TableStore
from .depsets import DepParams, a_size_bound, dep_set_A, log_threshold
from .errors import ResourceRefusal
from .machine import VERSION_ID

DEFAULT_COVER_N_LIMIT = 10


@dataclass
class CoverCandidate:
    n: int
    alpha: int
    t: int
    centers: tuple[Bits, ...]
    construction: dict  # enough metadata to reproduce the candidate exactly
    low_complexity_included: bool

    @property
    def size(self) -> int:
        return len(self.centers)

    def as_dict(self, include_centers: bool = True) -> dict:
        d = {
            "n": self.n,
            "alpha": self.alpha,
            "t": self.t,
            "size": self.size,
            "construction": dict(self.construction),
            "low_complexity_included": self.low_complexity_included,
            "machine_version": VERSION_ID,
        }
        if include_centers:
            d["centers"] = list(self.centers)
        return d


@dataclass
class CoverVerdict:
    ok: bool
    uncovered: tuple[Bits, ...]

    def as_dict(self) -> dict:
        return {"ok": self.ok, "uncovered": list(self.uncovered)}


def _def1_mask(x: Bits, alpha: int, t: int, store: TableStore) -> int:
    """Bitmask of strings covered by center x, coincidence included."""
    p = DepParams(n=len(x), alpha=alpha, t=t)
    mask = 1 << bits_to_index(x)
    for y in dep_set_A(x, p, store).members:
        mask |= 1 << bits_to_index(y)
    return mask


def random_covering(
    n: int,
    alpha: int,
    T: int,
    seed: int,
    t: int,
    store: TableStore,
) -> CoverCandidate:
    """T uniform seeded centers plus every string below the complexity cutoff.

    The cutoff alpha + ceil(12 log2 n) mirrors the probabilistic
    construction; at desk scale it usually exceeds the literal ceiling,
    so the low-complexity augmentation admits everything.  That is the
    honest small-n behaviour, not a bug.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    rng = random.Random(seed)
    centers = {random_bits(n, rng) for _ in range(T)}
    cutoff = alpha + log_threshold(12, n)
    plain = store.table(n, "", t)
    centers.update(u for u in all_strings(n) if plain.value(u) < cutoff)
    return CoverCandidate(
        n=n,
        alpha=alpha,
        t=t,
        centers=tuple(sorted(centers)),
        construction={"method": "random", "T": T, "seed": seed, "cutoff": cutoff},
        low_complexity_included=True,
    )


def greedy_covering(
    n: int,
    alpha: int,
    t: int,
    store: TableStore,
    max_n: int = DEFAULT_COVER_N_LIMIT,
) -> CoverCandidate:
    """Classic greedy set cover over the coincidence-extended dependency sets.

    Deterministic: the center covering the most new strings wins each
    round, ties broken lexicographically.  Terminates because every
    string covers at least itself.
    """
    if n > max_n:
        raise ResourceRefusal(
            f"greedy cover needs 2^{n} conditional tables; raise max_n to allow n={n}"
        )
    universe = (1 << (1 << n)) - 1
    vertices = list(all_strings(n))
    store.build_many(n, vertices, budget=t)
    masks = {x: _def1_mask(x, alpha, t, store) for x in vertices}
    covered = 0
    centers: list[Bits] = []
    while covered != universe:
        best_x, best_gain = None, 0
        for x in vertices:
            gain = bin(masks[x] & ~covered).count("1")
            if gain > best_gain:
                best_x, best_gain = x, gain
        assert best_x is not None, "coincidence guarantees progress"
        centers.append(best_x)
        covered |= masks[best_x]
    # addition order kept: the last center is the one whose removal must
    # break coverage, since it was picked for covering something new
    return CoverCandidate(
        n=n,
        alpha=alpha,
        t=t,
        centers=tuple(centers),
        construction={"method": "greedy"},
        low_complexity_included=False,
    )


def verify_covering(cand: CoverCandidate, t: int, store: TableStore) -> CoverVerdict:
    """Recompute coverage of every string from the tables; exact uncovered list."""
    covered = 0
    for x in cand.centers:
        covered |= _def1_mask(x, cand.alpha, t, store)
    uncovered = tuple(
        y for y in all_strings(cand.n) if not covered >> bits_to_index(y) & 1
    )
    return CoverVerdict(ok=not uncovered, uncovered=uncovered)


def cover_size_lower_bound(n: int, alpha: int) -> int:
    """Pigeonhole floor: no center covers more than the hard A-bound plus itself."""
    per_center = Fraction(int(a_size_bound(n, alpha)) + 1)
    return ceil(Fraction(1 << n) / per_center)


def thm6_size_comparators(n: int, alpha: int) -> dict:
    """The two scales the constructions are measured against."""
    return {
        "two_pow_alpha": 2.0**alpha,
        "poly_scale": (2.0 * n**13 + n**12) * 2.0**alpha,
    }


def save_cover(cand: CoverCandidate, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(cand.as_dict(), indent=2, sort_keys=True))


def load_cover(path: Union[str, Path]) -> CoverCandidate:
    d = json.loads(Path(path).read_text())
    return CoverCandidate(
        n=d["n"],
        alpha=d["alpha"],
        t=d["t"],
        centers=tuple(d["centers"]),
        construction=dict(d["construction"]),
        low_complexity_included=d["low_complexity_included"],
    )
