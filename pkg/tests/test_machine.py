import random

import pytest

from aitlab.bits import all_strings, random_bits
from aitlab.machine import (
    C_CONDCOPY,
    C_LITERAL,
    C_OVERHEAD,
    MACHINE,
    VERSION_ID,
    RunStatus,
    decode_program,
    enumerate_programs,
    gamma_decode,
    gamma_encode,
    program_reads_condition,
    run,
)


# Independent reference interpreter: same ISA, written bit-at-a-time with
# its own decoder, used to cross-check the production implementation.
def ref_run(p, w, budget):
    emitted = []
    steps = 0
    cond = w

    def emit(bits):
        nonlocal steps
        for b in bits:
            if steps + 1 > budget:
                return False
            steps += 1
            emitted.append(b)
        return True

    i = 0
    while i < len(p):
        if steps + 1 > budget:
            return ("out_of_budget", None, budget)
        steps += 1  # instruction decode charge
        if p[i] == "1":
            if not emit(p[i + 1 :]):
                return ("out_of_budget", None, budget)
            return ("halted", "".join(emitted), steps)
        if p[i : i + 2] == "01":
            j = 0
            q = i + 2
            while q < len(p) and p[q] == "0":
                j += 1
                q += 1
            if q >= len(p):
                return ("invalid", None, 0)
            if j > len(cond):
                return ("invalid", None, steps)
            if not emit(cond[: len(cond) - j]) or not emit(p[q + 1 :]):
                return ("out_of_budget", None, budget)
            return ("halted", "".join(emitted), steps)
        if p[i : i + 3] == "001":
            g = gamma_decode(p, i + 3)
            if g is None:
                return ("invalid", None, 0)
            m, q = g
            for _ in range(m + 1):
                if not emit(p[q:]):
                    return ("out_of_budget", None, budget)
            return ("halted", "".join(emitted), steps)
        if p[i : i + 4] == "0001":
            if not emit(cond):
                return ("out_of_budget", None, budget)
            i += 4
            continue
        if p[i : i + 5] in ("00001", "00000"):
            setcond = p[i : i + 5] == "00001"
            g = gamma_decode(p, i + 5)
            if g is None:
                return ("invalid", None, 0)
            lp1, q = g
            if q + lp1 - 1 > len(p):
                return ("invalid", None, 0)
            s = p[q : q + lp1 - 1]
            if setcond:
                cond = s
            elif not emit(s):
                return ("out_of_budget", None, budget)
            i = q + lp1 - 1
            continue
        return ("invalid", None, 0)
    return ("halted", "".join(emitted), steps)


def outcome_tuple(o):
    return (o.status.value, o.output, o.steps_used)


def test_literal_mode():
    out = run("1" + "0110", "", 100)
    assert out.status is RunStatus.HALTED
    assert out.output == "0110"
    assert out.steps_used == 5


def test_empty_program_halts_empty():
    for w in ["", "0", "11010", "1" * 20]:
        out = run("", w, 100)
        assert out.status is RunStatus.HALTED
        assert out.output == ""
        assert out.steps_used == 0


def test_out_of_budget_example():
    # emission of 5 bits plus the decode step exceeds a budget of 4
    out = run("1" + "11111", "", 4)
    assert out.status is RunStatus.OUT_OF_BUDGET
    assert out.steps_used == 4
    assert out.output is None


def test_instruction_semantics():
    assert run("011", "10110", 100).output == "10110"  # whole-condition copy
    assert run("011", "10110", 100).steps_used == 6
    assert run("01" + "01" + "1", "10110", 100).output == "10111"  # drop 1, add 1
    assert run("001" + "011" + "10", "", 100).output == "10101010"  # unit * 4
    assert run("0001" + "1" + "11", "101", 100).output == "10111"
    assert run("00001" + "011" + "10" + "0001", "111111", 100).output == "10"
    assert run("00000" + "010" + "1" + "0001", "00", 100).output == "100"


@pytest.mark.parametrize(
    "bad", ["0", "00", "000", "0000", "0100", "001", "0010", "0000100"]
)
def test_malformed_programs_are_invalid(bad):
    out = run(bad, "1", 100)
    assert out.status is RunStatus.INVALID
    assert out.output is None


def test_condition_overread_is_invalid():
    # j = 1 against the empty condition
    out = run("01" + "01" + "1", "", 100)
    assert out.status is RunStatus.INVALID


def test_setcond_with_empty_payload_is_legal():
    out = run("000011", "1010", 100)
    assert out.status is RunStatus.HALTED and out.output == ""


def test_enumeration_order_and_count():
    assert list(enumerate_programs(2)) == ["", "0", "1", "00", "01", "10", "11"]
    programs = list(enumerate_programs(3))
    assert programs[7] == "000"  # first program of length 3
    assert sum(1 for _ in enumerate_programs(10)) == 2047


def test_determinism():
    rng = random.Random(1)
    for _ in range(500):
        p = random_bits(rng.randrange(0, 14), rng)
        w = random_bits(rng.randrange(0, 8), rng)
        b = rng.randrange(0, 50)
        assert run(p, w, b) == run(p, w, b)


def test_budget_monotonicity():
    rng = random.Random(2)
    for _ in range(800):
        p = random_bits(rng.randrange(0, 14), rng)
        w = random_bits(rng.randrange(0, 6), rng)
        t = rng.randrange(0, 40)
        out = run(p, w, t)
        if out.status is RunStatus.HALTED:
            for extra in (1, 7, 400):
                again = run(p, w, t + extra)
                assert again.status is RunStatus.HALTED
                assert again.output == out.output
                assert again.steps_used == out.steps_used


def test_literal_bound_ignores_condition():
    rng = random.Random(3)
    for x in all_strings(5):
        for _ in range(4):
            w = random_bits(rng.randrange(0, 9), rng)
            out = run("1" + x, w, len(x) + C_OVERHEAD)
            assert out.status is RunStatus.HALTED and out.output == x


def test_condition_independent_programs():
    # no COPY opcode in the decoded stream => identical outcome for every w
    rng = random.Random(4)
    checked = 0
    for _ in range(3000):
        p = random_bits(rng.randrange(0, 12), rng)
        if decode_program(p) is None or program_reads_condition(p):
            continue
        checked += 1
        base = run(p, "", 60)
        for w in ("0", "111", random_bits(6, rng)):
            assert run(p, w, 60) == base
    assert checked > 200


def test_against_reference_interpreter():
    conditions = ["", "1", "0110", "10110100"]
    budgets = [0, 3, 9, 100]
    for p in enumerate_programs(8):
        for w in conditions:
            for b in budgets:
                got = outcome_tuple(run(p, w, b))
                want = ref_run(p, w, b)
                # the reference reports 0 steps for every invalid; ours
                # charges executed instructions before a dynamic failure
                if got[0] == "invalid":
                    assert want[0] == "invalid", (p, w, b, got, want)
                else:
                    assert got == want, (p, w, b)


def test_machine_spec_constants():
    assert MACHINE.version_id == VERSION_ID
    assert len(VERSION_ID) == 16
    assert MACHINE.c_literal == C_LITERAL == 1
    assert MACHINE.c_condcopy == C_CONDCOPY == 3
    assert MACHINE.c_overhead == C_OVERHEAD == 1
    # the constants are realized by actual programs
    assert run("011", "110101", 100).output == "110101"
    assert len("011") == C_CONDCOPY


def test_gamma_roundtrip():
    for m in range(1, 200):
        code = gamma_encode(m)
        assert gamma_decode(code, 0) == (m, len(code))
    assert gamma_encode(1) == "1"
    assert gamma_encode(4) == "00100"
