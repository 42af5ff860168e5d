import random

import pytest
from hypothesis import given, strategies as st

from hlsdiff.corpus import neutral_programs, parse_meta, planted_programs
from hlsdiff.execution import HardwareConfig, derive_format, run_hardware, run_software
from hlsdiff.minic import format_program, parse_file, parse_program
from hlsdiff.slicer import slice_program
from hlsdiff.spectra import (
    InputMismatch,
    SpectraRecord,
    UnknownVariable,
    collect_spectra,
    compare_spectra,
    feedback_array,
    instrument,
    merge,
    new_extremes,
)
from hlsdiff.slicer import KeyVariableSet

ACCUM = """
fn main(a: int[8]): int {
    @width(s, 9, unsigned)
    uint s = 0;
    for (int i = 0; i < len(a); i++) {
        s += a[i];
    }
    return s;
}
"""


def pair(src_or_prog, line):
    p = parse_program(src_or_prog) if isinstance(src_or_prog, str) else src_or_prog
    kv = slice_program(p)
    q = instrument(p, kv)
    inp = derive_format(p).parse_line(line)
    ts = run_software(q, inp)
    th = run_hardware(q, HardwareConfig.from_program(q), inp)
    return kv, q, (ts, collect_spectra(ts, kv)), (th, collect_spectra(th, kv))


def test_overflow_symptom():
    kv, q, sw, hw = pair(ACCUM, "200 200 120")
    rep = compare_spectra(sw, hw, HardwareConfig.from_program(q))
    assert rep.verdict == "discrepant"
    (s,) = [s for s in rep.symptoms if s.cls == "Overflow"]
    assert s.variable == "main::s"
    assert sw[1].val["main::s"] == (0, 520)
    assert hw[1].val["main::s"][1] <= 511


def test_clean_input_is_clean():
    kv, q, sw, hw = pair(ACCUM, "1 2 3")
    assert compare_spectra(sw, hw, HardwareConfig.from_program(q)).verdict == "clean"


def test_input_mismatch():
    p = parse_program(ACCUM)
    _, q, sw, _ = pair(p, "1 2 3")
    _, _, _, hw = pair(p, "1 2 4")
    with pytest.raises(InputMismatch):
        compare_spectra(sw, hw, HardwareConfig.from_program(q))


def test_instrument_marks_probes_and_round_trips():
    p = parse_program(ACCUM)
    q = instrument(p, slice_program(p))
    text = format_program(q)
    assert "probe" in text
    assert parse_program(text) == q


def test_instrument_empty_set_is_identity():
    p = parse_program(ACCUM)
    assert instrument(p, KeyVariableSet("main::return", frozenset(), frozenset())) is p


def test_instrument_unknown_member():
    p = parse_program(ACCUM)
    with pytest.raises(UnknownVariable):
        instrument(p, KeyVariableSet("x", frozenset({"main::nope"}), frozenset()))


@pytest.mark.parametrize("path", planted_programs() + neutral_programs(), ids=lambda p: p.name)
def test_probes_are_transparent(path):
    """Instrumentation never changes status or outputs."""
    p = parse_file(path)
    q = instrument(p, slice_program(p))
    fmt = derive_format(p, parse_meta(path.read_text()).overrides)
    cfg = HardwareConfig.from_program(p)
    rng = random.Random(path.name)
    for _ in range(15):
        inp = fmt.sample(rng)
        for run in (lambda prog: run_software(prog, inp), lambda prog: run_hardware(prog, cfg, inp)):
            a, b = run(p), run(q)
            assert (a.status, a.reason, a.outputs) == (b.status, b.reason, b.outputs)


_iv = st.tuples(st.integers(-50, 50), st.integers(0, 50)).map(lambda t: (t[0], t[0] + t[1]))
_records = st.builds(
    lambda val, loop, faults: SpectraRecord(val=val, loop=loop, faults=faults),
    st.dictionaries(st.sampled_from(["f::a", "f::b", "f::c"]), _iv),
    st.dictionaries(st.sampled_from(["f::L0", "f::L1"]), st.integers(0, 20)),
    st.sets(st.sampled_from(["Overflow", "OutOfBounds"])),
)


@given(_records, _records)
def test_merge_commutes(a, b):
    assert merge(a, b).to_dict() == merge(b, a).to_dict()


@given(_records, _records)
def test_merge_absorbs_and_kills_extremes(a, b):
    m = merge(a, b)
    assert new_extremes(m, a) == []
    assert new_extremes(m, b) == []
    assert merge(m, a).to_dict() == m.to_dict()


def test_new_extremes_detects_widening():
    seen = SpectraRecord(val={"f::a": (0, 5)}, loop={"f::L": 3})
    rec = SpectraRecord(val={"f::a": (0, 6)}, loop={"f::L": 3})
    assert new_extremes(seen, rec) == [("val", "f::a")]


def test_feedback_array_rows():
    kv, q, sw, hw = pair(ACCUM, "200 200 120")
    fb = feedback_array(sw[1])
    row = fb.row("main::s")
    assert (row.min, row.max) == (0, 520)
    assert [r.name for r in fb.rows] == sorted(r.name for r in fb.rows)
    assert "main::s" in fb.to_text()
