import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from hlsdiff.execution import InputFormat, SlotFormat, TestInput
from hlsdiff.minic.types import FLOAT64, INT32
from hlsdiff.mutation import (
    EmptyInput,
    MutationScheduler,
    MutationType,
    apply_mutation,
    flip_bits,
    project,
    select_mutation,
    update_probabilities,
)

FMT = InputFormat((
    SlotFormat("a", "array", INT32, 1, 8, lo=-100, hi=100),
    SlotFormat("g", "scalar", INT32, lo=-20, hi=20),
))
MATRIX = InputFormat((SlotFormat("m", "matrix", INT32, 1, 4, 1, 4, lo=0, hi=9),))
FLOATS = InputFormat((SlotFormat("x", "array", FLOAT64, 1, 6, lo=-10.0, hi=10.0),))


def test_worked_example_update():
    s = MutationScheduler(seed=0)
    assert s.P == [0.125] * 8
    s.update(MutationType.DataElement, True)
    assert s.P[4] == pytest.approx(0.165, abs=1e-12)
    for k in range(8):
        if k != 4:
            assert s.P[k] == pytest.approx(0.125 - 0.04 / 7, abs=1e-12)
            assert round(s.P[k], 3) == 0.119
    assert math.fsum(s.P) == pytest.approx(1.0, abs=1e-12)


def test_untriggered_and_uniform_updates_leave_P():
    s = MutationScheduler(seed=0)
    s.update(MutationType.Order, False)
    assert s.P == [0.125] * 8
    u = MutationScheduler(seed=0, adaptive=False)
    u.update(MutationType.Order, True)
    assert u.P == [0.125] * 8
    assert len(u.history) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.tuples(st.integers(1, 8), st.booleans()), max_size=400))
def test_probability_invariants(seed, steps):
    s = MutationScheduler(seed=seed)
    for w, trig in steps:
        update_probabilities(s, MutationType(w), trig)
        assert abs(math.fsum(s.P) - 1.0) <= 1e-9
        assert min(s.P) >= 0.01 - 1e-12


@given(st.lists(st.floats(-1.0, 2.0), min_size=8, max_size=8))
def test_project_lands_in_simplex(raw):
    P = project(raw, 0.01)
    assert abs(math.fsum(P) - 1.0) <= 1e-9
    assert min(P) >= 0.01 - 1e-12


def test_selection_frequencies_follow_P():
    s = MutationScheduler(seed=7)
    for _ in range(15):
        s.update(MutationType.BitFlip, True)
    n = 40000
    counts = [0] * 8
    for _ in range(n):
        counts[select_mutation(s) - 1] += 1
    for k, p in enumerate(s.P):
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(counts[k] - n * p) <= 4 * sigma


def test_state_round_trip_resumes_rng():
    s = MutationScheduler(seed=3)
    s.update(MutationType.ZeroValue, True)
    t = MutationScheduler.from_state(s.state())
    assert [s.select() for _ in range(50)] == [t.select() for _ in range(50)]
    assert t.P == s.P


def test_byte_flip_example():
    assert flip_bits(0x1A2B, 0xFF) == 0x1AD4


def test_bit_flip_sign_bit():
    assert flip_bits(0, 1 << 31) == -(2 ** 31)
    assert flip_bits(1.0, 1 << 63) == -1.0


SEED = TestInput(((3, 1, 4, 1), 2))


@pytest.mark.parametrize("m", list(MutationType), ids=lambda m: m.name)
def test_mutations_conform(m):
    rng = random.Random(int(m))
    fmt = FLOATS if m is MutationType.DataType else FMT
    seed = TestInput(((1.0, 2.5, -3.0),)) if fmt is FLOATS else SEED
    changed = 0
    for _ in range(100):
        out = apply_mutation(seed, m, fmt, rng)
        assert fmt.conforms(out)
        changed += out.key() != seed.key()
    assert changed >= 90


def test_size_changes_length_by_one():
    rng = random.Random(1)
    for _ in range(50):
        out = apply_mutation(SEED, MutationType.DataSize, FMT, rng)
        if out.values[1] == SEED.values[1]:
            assert abs(len(out.values[0]) - 4) == 1


def test_order_is_a_permutation():
    rng = random.Random(2)
    out = apply_mutation(SEED, MutationType.Order, FMT, rng)
    assert sorted(out.values[0]) == sorted(SEED.values[0])
    assert out.values[0] != SEED.values[0]


def test_dimension_on_matrix_changes_columns():
    rng = random.Random(3)
    seed = TestInput((((1, 2), (3, 4)),))
    out = apply_mutation(seed, MutationType.DataDimension, MATRIX, rng)
    assert len(out.values[0]) == 2
    assert len(out.values[0][0]) in (1, 3)
    assert MATRIX.conforms(out)


def test_element_uses_feedback_range():
    rng = random.Random(4)
    outs = [apply_mutation(SEED, MutationType.DataElement, FMT, rng, ranges={0: (50, 60)}) for _ in range(200)]
    new = {x for o in outs for x in o.values[0]} - set(SEED.values[0])
    # sampled from the widened feedback range, clamped to the slot bounds
    assert new and all(40 <= x <= 70 for x in new)


def test_empty_input_errors():
    fmt = InputFormat((SlotFormat("g", "scalar", INT32, lo=0, hi=9),))
    with pytest.raises(EmptyInput):
        apply_mutation(TestInput((1,)), MutationType.Order, fmt, random.Random(0))


def test_degenerate_case_returns_input():
    fmt = InputFormat((SlotFormat("a", "array", INT32, 1, 1, lo=0, hi=0),))
    inp = TestInput(((0,),))
    assert apply_mutation(inp, MutationType.ZeroValue, fmt, random.Random(0)) == inp


def test_encoding_width_follows_slot_range():
    from hlsdiff.mutation import encoding
    assert encoding(None) == (32, True)
    assert encoding(SlotFormat("a", "array", INT32, 1, 8, lo=-100, hi=100)) == (8, True)
    assert encoding(SlotFormat("a", "array", INT32, 1, 8, lo=0, hi=255)) == (8, False)
    assert encoding(SlotFormat("a", "array", INT32, 1, 8, lo=0, hi=0x1A2B)) == (16, False)
    slot16 = SlotFormat("a", "array", INT32, 1, 8, lo=0, hi=0xFFFF)
    assert flip_bits(0x1A2B, 0xFF, slot16) == 0x1AD4
    assert flip_bits(3, 0xFF, SlotFormat("a", "array", INT32, 1, 8, lo=-100, hi=100)) == -4


def test_initial_frequencies_near_uniform():
    s = MutationScheduler(seed=11)
    n = 100000
    counts = [0] * 8
    for _ in range(n):
        counts[s.select() - 1] += 1
    assert all(abs(c / n - 0.125) <= 0.02 for c in counts)


def test_fifty_wins_clamp_the_rest():
    s = MutationScheduler(seed=0)
    for _ in range(50):
        s.update(MutationType.DataSize, True)
    assert s.P[1:] == pytest.approx([0.01] * 7, abs=1e-12)
    assert s.P[0] == pytest.approx(0.93, abs=1e-12)
    assert abs(math.fsum(s.P) - 1) <= 1e-9


def test_clamped_winner_frequency():
    # P_1 = 1 - 7 eps exactly, so the draw frequency scatters around it
    s = MutationScheduler(seed=5, P=project([1.0] + [0.0] * 7, 0.01))
    n = 10000
    hits = sum(s.select() == MutationType.DataSize for _ in range(n))
    p = 1 - 7 * 0.01
    assert hits / n >= p - 4 * math.sqrt(p * (1 - p) / n)


def test_same_seed_same_choice():
    assert MutationScheduler(seed=42).select() == MutationScheduler(seed=42).select()
