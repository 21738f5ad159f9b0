"""The fixed universal machine: interpreter, program encoding, enumerator.

Every complexity value in this package is relative to this one machine.
A program is an arbitrary bitstring; it is decoded as a sequence of
instructions drawn from a prefix-free opcode alphabet and executed
against a mutable *condition* register (initially the conditioning
string, empty for unconditional complexity).

Opcode layout (frozen; ``VERSION_ID`` is derived from the table below):

    1      TAIL         append the rest of the program to the output; halt.
    01     COPY-TAIL    read j as unary ('0' * j then '1'); append the first
                        |cond| - j bits of the condition, then the rest of
                        the program; halt.  j > |cond| is Invalid.
    001    REPEAT-TAIL  read m >= 1 as an Elias gamma code; the rest of the
                        program is the unit u; append u exactly m+1 times;
                        halt.
    0001   COPY-ALL     append the whole condition; continue decoding.
    00001  SET-COND     read a gamma-coded length then that many bits s;
                        the condition becomes s for the rest of the run.
    00000  LITERAL      read a gamma-coded length then that many bits s;
                        append s; continue decoding.

The empty program halts immediately with empty output.  A program whose
bits run out mid-opcode or mid-operand is Invalid.  Terminal opcodes
(TAIL, COPY-TAIL, REPEAT-TAIL) absorb the remainder of the program, so
no instruction-stream terminator is needed and operand lengths for the
common constructions cost nothing.

Step accounting: one step per executed instruction plus one step per
emitted bit.  Execution that would exceed the step budget stops with
OutOfBudget and ``steps_used`` equal to the budget.

Machine constants:

    c_literal  = 1   C(x | w) <= |x| + 1 via the TAIL program '1' + x
    c_condcopy = 3   C(x | x) <= 3 via the COPY-TAIL program '011'
    c_overhead = 1   the literal program halts within |x| + 1 steps
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional

from .bits import Bits

__all__ = [
    "C_CONDCOPY",
    "C_LITERAL",
    "C_OVERHEAD",
    "MACHINE",
    "MachineSpec",
    "RunOutcome",
    "RunStatus",
    "VERSION_ID",
    "decode_program",
    "decoded_programs",
    "enumerate_programs",
    "execute",
    "gamma_decode",
    "gamma_encode",
    "program_reads_condition",
    "run",
]

# Instruction tags used in decoded form.
OP_TAIL = 0
OP_CPTAIL = 1
OP_RPTTAIL = 2
OP_COPYALL = 3
OP_SETCOND = 4
OP_LIT = 5

_ISA_TEXT = "\n".join(
    [
        "aitlab micro-machine ISA v1",
        "program = bitstring, decoded as prefix-free opcodes until exhausted",
        "1      TAIL: output += rest; halt",
        "01     COPY-TAIL: j = unary zeros before 1; k = |cond|-j (j<=|cond| else invalid);"
        " output += cond[:k] + rest; halt",
        "001    REPEAT-TAIL: m = elias-gamma (m>=1); output += rest * (m+1); halt",
        "0001   COPY-ALL: output += cond; continue",
        "00001  SET-COND: len+1 = elias-gamma; cond = next len bits; continue",
        "00000  LITERAL: len+1 = elias-gamma; output += next len bits; continue",
        "empty program halts with empty output",
        "steps = executed instructions + emitted bits; exceeding budget = out-of-budget",
        "truncated opcode or operand = invalid",
    ]
)

VERSION_ID = hashlib.sha256(_ISA_TEXT.encode("ascii")).hexdigest()[:16]

C_LITERAL = 1
C_CONDCOPY = 3
C_OVERHEAD = 1


class RunStatus(Enum):
    HALTED = "halted"
    OUT_OF_BUDGET = "out_of_budget"
    INVALID = "invalid"


@dataclass(frozen=True)
class RunOutcome:
    """Result of one bounded execution; Invalid is a value, never an exception."""

    status: RunStatus
    output: Optional[Bits]
    steps_used: int

    @property
    def halted(self) -> bool:
        return self.status is RunStatus.HALTED


@dataclass(frozen=True)
class MachineSpec:
    version_id: str
    c_literal: int
    c_condcopy: int
    c_overhead: int


MACHINE = MachineSpec(
    version_id=VERSION_ID,
    c_literal=C_LITERAL,
    c_condcopy=C_CONDCOPY,
    c_overhead=C_OVERHEAD,
)


def gamma_encode(m: int) -> Bits:
    """Elias gamma code of m >= 1."""
    if m < 1:
        raise ValueError("gamma code is defined for m >= 1")
    numeral = format(m, "b")
    return "0" * (len(numeral) - 1) + numeral


def gamma_decode(p: Bits, i: int) -> Optional[tuple[int, int]]:
    """Decode a gamma code at position i; returns (value, next_pos) or None."""
    n = len(p)
    z = 0
    while i + z < n and p[i + z] == "0":
        z += 1
    start = i + z
    end = start + z + 1
    if start >= n or end > n:
        return None
    return int(p[start:end], 2), end


def decode_program(p: Bits) -> Optional[list[tuple]]:
    """Statically decode a program into instruction tuples.

    Returns None when the bitstream is malformed (truncated opcode or
    operand).  Decoding never looks at the condition, so it can be done
    once per program and reused across conditions.
    """
    instrs: list[tuple] = []
    i, n = 0, len(p)
    while i < n:
        if p[i] == "1":
            instrs.append((OP_TAIL, p[i + 1 :]))
            return instrs
        z = 1
        while z < 5 and i + z < n and p[i + z] == "0":
            z += 1
        if z < 5 and i + z >= n:
            return None  # opcode truncated by end of program
        if z == 1:  # 01: COPY-TAIL
            j = 0
            q = i + 2
            while q < n and p[q] == "0":
                j += 1
                q += 1
            if q >= n:
                return None  # unary operand lacks its terminator
            instrs.append((OP_CPTAIL, j, p[q + 1 :]))
            return instrs
        if z == 2:  # 001: REPEAT-TAIL
            dec = gamma_decode(p, i + 3)
            if dec is None:
                return None
            m, q = dec
            instrs.append((OP_RPTTAIL, m, p[q:]))
            return instrs
        if z == 3:  # 0001: COPY-ALL
            instrs.append((OP_COPYALL,))
            i += 4
            continue
        # 00001: SET-COND / 00000: LITERAL
        opcode_len = 5
        setcond = z == 4
        dec = gamma_decode(p, i + opcode_len)
        if dec is None:
            return None
        lp1, q = dec
        length = lp1 - 1
        if q + length > n:
            return None
        s = p[q : q + length]
        instrs.append((OP_SETCOND, s) if setcond else (OP_LIT, s))
        i = q + length
    return instrs


def execute(instrs: list[tuple], condition: Bits, budget: int) -> RunOutcome:
    """Run a decoded instruction list under a step budget."""
    steps = 0
    cond = condition
    parts: list[Bits] = []
    for ins in instrs:
        if steps + 1 > budget:
            return RunOutcome(RunStatus.OUT_OF_BUDGET, None, budget)
        steps += 1
        op = ins[0]
        if op == OP_TAIL:
            need = len(ins[1])
            if steps + need > budget:
                return RunOutcome(RunStatus.OUT_OF_BUDGET, None, budget)
            steps += need
            parts.append(ins[1])
        elif op == OP_CPTAIL:
            j = ins[1]
            if j > len(cond):
                return RunOutcome(RunStatus.INVALID, None, steps)
            k = len(cond) - j
            need = k + len(ins[2])
            if steps + need > budget:
                return RunOutcome(RunStatus.OUT_OF_BUDGET, None, budget)
            steps += need
            parts.append(cond[:k])
            parts.append(ins[2])
        elif op == OP_RPTTAIL:
            m, unit = ins[1], ins[2]
            need = (m + 1) * len(unit)
            if steps + need > budget:
                return RunOutcome(RunStatus.OUT_OF_BUDGET, None, budget)
            steps += need
            parts.append(unit * (m + 1))
        elif op == OP_COPYALL:
            need = len(cond)
            if steps + need > budget:
                return RunOutcome(RunStatus.OUT_OF_BUDGET, None, budget)
            steps += need
            parts.append(cond)
        elif op == OP_SETCOND:
            cond = ins[1]
        else:  # OP_LIT
            need = len(ins[1])
            if steps + need > budget:
                return RunOutcome(RunStatus.OUT_OF_BUDGET, None, budget)
            steps += need
            parts.append(ins[1])
    return RunOutcome(RunStatus.HALTED, "".join(parts), steps)


def run(p: Bits, condition: Bits = "", budget: int = 4096) -> RunOutcome:
    """Execute program p with the given condition under a step budget.

    Deterministic and total: malformed programs return Invalid with
    steps_used = 0 (decoding is free; only execution is metered).
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    instrs = decode_program(p)
    if instrs is None:
        return RunOutcome(RunStatus.INVALID, None, 0)
    return execute(instrs, condition, budget)


def program_reads_condition(p: Bits) -> bool:
    """True when the decoded program contains a condition-reading opcode."""
    instrs = decode_program(p)
    if instrs is None:
        return False
    return any(ins[0] in (OP_CPTAIL, OP_COPYALL) for ins in instrs)


def enumerate_programs(max_len: int) -> Iterator[Bits]:
    """All bitstrings of length 0..max_len in length-lexicographic order."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    yield ""
    for length in range(1, max_len + 1):
        for v in range(1 << length):
            yield format(v, f"0{length}b")


@lru_cache(maxsize=8)
def decoded_programs(max_len: int) -> tuple[tuple[Bits, tuple], ...]:
    """Well-formed programs up to max_len, pre-decoded, in enumeration order.

    Malformed programs are dropped: they never halt, so they cannot
    contribute to any complexity value.
    """
    out = []
    for p in enumerate_programs(max_len):
        instrs = decode_program(p)
        if instrs is not None:
            out.append((p, tuple(instrs)))
    return tuple(out)
