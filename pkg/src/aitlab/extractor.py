"""Two-source function tables and the popular-preimage counting harness.

Any explicit function E: {0,1}^n x {0,1}^n -> {0,1}^m can be plugged in.
For a fixed first input x, the most popular output value has at least
2^(n-m) preimages by pigeonhole.  Partitioning those preimages into
low-complexity strings, dependent strings, and the rest turns the count
into an unconditional lower-bound certificate for the dependent set:
the dependent class is a subset of B_{x,alpha} by construction.
"""

from __future__ import annotations

import base64
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .bits import Bits, bits_to_index, index_to_bits, pack_bits, unpack_bits
from .complexity import TableStore, condition_for_length
from .errors import PreconditionError

__all__ = [
    "CountParams",
    "Certificate",
    "ExtractorTable",
    "Partition",
    "PopularImage",
    "bad_partition",
    "load_extractor",
    "lower_bound_certificate",
    "make_constant_extractor",
    "make_random_extractor",
    "most_popular_image",
    "save_extractor",
]


@dataclass
class ExtractorTable:
    """Total function {0,1}^n x {0,1}^n -> {0,1}^m stored exhaustively."""

    n: int
    m: int
    values: np.ndarray  # shape (2^n, 2^n), entry = integer output value
    meta: dict

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValueError("need 1 <= m <= n")
        if self.values.shape != (1 << self.n, 1 << self.n):
            raise ValueError("table shape must be (2^n, 2^n)")

    def value(self, x: Bits, y: Bits) -> Bits:
        return index_to_bits(
            int(self.values[bits_to_index(x), bits_to_index(y)]), self.m
        )

    def entry_count(self) -> int:
        return self.values.size


def make_random_extractor(n: int, m: int, seed: int) -> ExtractorTable:
    """Seeded uniform table; reproducible from (n, m, seed) alone."""
    rng = random.Random(seed)
    size = 1 << n
    flat = [rng.getrandbits(m) for _ in range(size * size)]
    values = np.array(flat, dtype=np.uint16).reshape(size, size)
    return ExtractorTable(n=n, m=m, values=values, meta={"kind": "seeded", "seed": seed})


def make_constant_extractor(n: int, m: int, value: int = 0) -> ExtractorTable:
    if not 0 <= value < (1 << m):
        raise ValueError("constant value out of range for m output bits")
    size = 1 << n
    values = np.full((size, size), value, dtype=np.uint16)
    return ExtractorTable(
        n=n, m=m, values=values, meta={"kind": "constant", "value": value}
    )


@dataclass
class PopularImage:
    z: Bits  # lexicographically first among the most popular outputs
    count: int
    preimages: tuple[Bits, ...]

    def as_dict(self, include_preimages: bool = False) -> dict:
        d = {"z": self.z, "count": self.count}
        if include_preimages:
            d["preimages"] = list(self.preimages)
        return d


def most_popular_image(table: ExtractorTable, x: Bits) -> PopularImage:
    """Most frequent output over {x} x {0,1}^n; count >= 2^(n-m) by pigeonhole."""
    if len(x) != table.n:
        raise ValueError(f"x must have length {table.n}")
    row = table.values[bits_to_index(x)]
    counts = np.bincount(row, minlength=1 << table.m)
    z_idx = int(np.argmax(counts))  # argmax returns the first, i.e. smallest, index
    ys = np.nonzero(row == z_idx)[0]
    return PopularImage(
        z=index_to_bits(z_idx, table.m),
        count=int(counts[z_idx]),
        preimages=tuple(index_to_bits(int(i), table.n) for i in ys),
    )


@dataclass(frozen=True)
class CountParams:
    """Complexity floor s and dependency threshold alpha for the partition.

    Values of s above n + c_literal are allowed; they classify every
    preimage as low, which is the honest desk-scale reading of the
    asymptotic parameter choices.
    """

    s: int
    alpha: int
    t: int = 4096

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.s < self.alpha:
            raise ValueError("need alpha <= s")
        if self.t < 0:
            raise ValueError("t must be >= 0")


@dataclass
class Partition:
    """The popular preimages split into low / dependent / neither.

    A nonempty neither class means the table failed as an extractor for
    this x at these parameters; that is reported, never raised.
    """

    x: Bits
    params: CountParams
    popular: PopularImage
    low: tuple[Bits, ...]
    dependent: tuple[Bits, ...]
    neither: tuple[Bits, ...]

    def as_dict(self, include_members: bool = False) -> dict:
        d = {
            "x": self.x,
            "s": self.params.s,
            "alpha": self.params.alpha,
            "t": self.params.t,
            "popular": self.popular.as_dict(),
            "low_count": len(self.low),
            "dependent_count": len(self.dependent),
            "neither_count": len(self.neither),
        }
        if include_members:
            d.update(
                low=list(self.low),
                dependent=list(self.dependent),
                neither=list(self.neither),
            )
        return d


def bad_partition(
    table: ExtractorTable,
    x: Bits,
    params: CountParams,
    store: TableStore,
) -> Partition:
    """Classify the popular preimages by their conditional complexities.

    low:       C^t(y | bin(n)) <  s
    dependent: C^t(y | bin(n)) >= s and C^t(y|bin(n)) - C^t(y|x) >= alpha
    neither:   the rest
    """
    popular = most_popular_image(table, x)
    n = table.n
    given_len = store.table(n, condition_for_length(n), params.t)
    given_x = store.table(n, x, params.t)
    low, dependent, neither = [], [], []
    for y in popular.preimages:
        c_len = given_len.value(y)
        if c_len < params.s:
            low.append(y)
        elif c_len - given_x.value(y) >= params.alpha:
            dependent.append(y)
        else:
            neither.append(y)
    return Partition(
        x=x,
        params=params,
        popular=popular,
        low=tuple(low),
        dependent=tuple(dependent),
        neither=tuple(neither),
    )


@dataclass
class Certificate:
    """Lower-bound certificate for the dependent set of the center x.

    bound = popular count - low - neither = |dependent|; since the
    dependent class recomputes the defining inequality of B_{x,alpha},
    the bound never exceeds the true set size, valid flag or not.
    """

    x: Bits
    z: Bits
    params: CountParams
    popular_count: int
    low_count: int
    dependent_count: int
    neither_count: int
    bound: int
    valid: bool  # True when the neither class is empty

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "z": self.z,
            "s": self.params.s,
            "alpha": self.params.alpha,
            "t": self.params.t,
            "popular_count": self.popular_count,
            "low_count": self.low_count,
            "dependent_count": self.dependent_count,
            "neither_count": self.neither_count,
            "bound": self.bound,
            "valid": self.valid,
        }


def lower_bound_certificate(
    table: ExtractorTable,
    x: Bits,
    params: CountParams,
    store: TableStore,
) -> Certificate:
    part = bad_partition(table, x, params, store)
    bound = part.popular.count - len(part.low) - len(part.neither)
    return Certificate(
        x=x,
        z=part.popular.z,
        params=params,
        popular_count=part.popular.count,
        low_count=len(part.low),
        dependent_count=len(part.dependent),
        neither_count=len(part.neither),
        bound=bound,
        valid=not part.neither,
    )


def save_extractor(
    table: ExtractorTable,
    path: Union[str, Path],
    include_table: Optional[bool] = None,
) -> None:
    """JSON metadata; the raw table rides along unless the seed suffices."""
    if include_table is None:
        include_table = table.meta.get("kind") == "explicit"
    doc: dict = {"n": table.n, "m": table.m, "meta": dict(table.meta)}
    if include_table:
        bits = "".join(
            format(int(v), f"0{table.m}b") for v in table.values.reshape(-1)
        )
        doc["table_b64"] = base64.b64encode(pack_bits(bits)).decode("ascii")
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True))


def load_extractor(path: Union[str, Path]) -> ExtractorTable:
    doc = json.loads(Path(path).read_text())
    n, m, meta = doc["n"], doc["m"], dict(doc.get("meta", {}))
    if "table_b64" in doc:
        raw = base64.b64decode(doc["table_b64"])
        size = 1 << n
        bits = unpack_bits(raw, size * size * m)
        flat = [int(bits[i * m : (i + 1) * m], 2) for i in range(size * size)]
        values = np.array(flat, dtype=np.uint16).reshape(size, size)
        return ExtractorTable(n=n, m=m, values=values, meta=meta)
    if meta.get("kind") == "seeded":
        return make_random_extractor(n, m, meta["seed"])
    if meta.get("kind") == "constant":
        return make_constant_extractor(n, m, meta.get("value", 0))
    raise PreconditionError(f"{path}: no table payload and no reproducible metadata")
