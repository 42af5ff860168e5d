"""Acceptance suite: ten end-to-end criteria at their stated tolerances.

Each ``criterion_N`` returns ``(passed, detail)``. Under pytest a one-line
verdict per criterion is printed in the terminal summary; run the file
directly (``python tests/test_acceptance.py``) to get the same lines
without pytest.
"""

import math
import random
import statistics
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

from hlsdiff.campaign import Campaign, CampaignConfig, replay
from hlsdiff.cli import main as cli_main
from hlsdiff.corpus import harness_programs, neutral_programs, parse_meta, planted_programs
from hlsdiff.execution import wrap_to_width
from hlsdiff.minic import check_hw_compat, parse_file, parse_program
from hlsdiff.minic.types import TypeSpec
from hlsdiff.mutation import MutationScheduler, MutationType
from hlsdiff.rag import RuleApplyingClient, RuleLibrary, cosine, pass_rate, repair_loop, retrieve
from hlsdiff.slicer import DepGraph, backward_slice, slice_program
from hlsdiff.spectra import collect_spectra, compare_spectra

FIXTURES = Path(__file__).parent / "fixtures"
CLASSES = ("Overflow", "OutOfBounds", "OrderDependence", "FifoFault", "StackOverflow", "Truncation")
BUDGET = 10_000
MISSED = BUDGET + 1  # executions-to-detection recorded for a miss

RESULTS = {}


def _quiet():
    import logging
    logging.getLogger("hlsdiff").setLevel(logging.ERROR)


# --------------------------------------------------------------- criterion 1


def criterion_1():
    _quiet()
    programs = planted_programs()
    per_class = Counter(parse_meta(p.read_text()).planted for p in programs)
    if len(programs) < 12 or any(per_class[c] < 2 for c in CLASSES):
        return False, f"corpus too small: {dict(per_class)}"
    t0 = time.monotonic()
    missed = []
    worst = 0
    for p in programs:
        planted = parse_meta(p.read_text()).planted
        rep = Campaign(CampaignConfig(program=str(p), max_execs=BUDGET, seed=0)).run()
        n = rep.first_detection.get(planted)
        if n is None:
            missed.append(p.stem)
        else:
            worst = max(worst, n)
    wall = time.monotonic() - t0
    ok = not missed and wall < 120.0
    return ok, (f"{len(programs) - len(missed)}/{len(programs)} planted classes detected, "
                f"latest first detection at execution {worst}, wall {wall:.1f}s (limit 120s)"
                + (f", missed {missed}" if missed else ""))


# --------------------------------------------------------------- criterion 2


def _first_detection(path, planted, seed, adaptive):
    # mutation only, no filter: isolates the scheduler
    rep = Campaign(CampaignConfig(program=str(path), max_execs=BUDGET, seed=seed, adaptive=adaptive,
                                  use_llm=False, use_filter=False, stop_on_detection=True)).run()
    return rep.first_detection.get(planted, MISSED)


def criterion_2():
    _quiet()
    wins, rows = 0, []
    programs = planted_programs()
    for p in programs:
        planted = parse_meta(p.read_text()).planted
        a = statistics.median(_first_detection(p, planted, s, True) for s in range(20))
        u = statistics.median(_first_detection(p, planted, s, False) for s in range(20))
        wins += a <= u
        rows.append(f"{p.stem}={a:g}/{u:g}")
    share = wins / len(programs)
    return share >= 0.7, f"adaptive median <= uniform on {wins}/{len(programs)} ({share:.0%}, need 70%): " + \
        " ".join(rows)


# --------------------------------------------------------------- criterion 3


def criterion_3():
    _quiet()
    worst_skip, problems = 1.0, []
    for p in planted_programs():
        c = Campaign(CampaignConfig(program=str(p), max_execs=1000, seed=0, use_filter=False))
        rep = c.run()
        inputs = [c.fmt.parse_line(r.input) for r in rep.rows]
        if len(inputs) != 1000:
            problems.append(f"{p.stem}: {len(inputs)} inputs")
            continue
        plain = replay(c, inputs, use_filter=False)
        filt = replay(c, inputs, use_filter=True)
        rate = filt["skips"] / len(inputs)
        worst_skip = min(worst_skip, rate)
        if rate < 0.2:
            problems.append(f"{p.stem}: skip rate {rate:.1%}")
        if plain["classes"] != filt["classes"]:
            problems.append(f"{p.stem}: classes {sorted(plain['classes'])} vs {sorted(filt['classes'])}")
        if filt["table"].justify_skips(c.fmt):
            problems.append(f"{p.stem}: unjustified skip")
    return not problems, (f"12 programs x 1000 inputs, lowest skip rate {worst_skip:.1%} (need 20%), "
                          "classes identical, all skips justified" if not problems else "; ".join(problems))


# --------------------------------------------------------------- criterion 4

TWO_FN = """
fn mul(a: int): int {
    int temp.o1 = a * 3;
    return temp.o1;
}

fn top(a: int, c: int): int {
    int temp.o1 = mul(a);
    int x = temp.o1 * c;
    return x;
}
"""

TWO_FN_MEMBERS = {"top::x", "top::temp.o1", "top::c", "top::a", "mul::return", "mul::temp.o1", "mul::a"}
TWO_FN_FRONTIER = {"top::a", "top::c"}


def _reverse_reach(V, E, x):
    rev = {v: [] for v in V}
    for u, v in E:
        rev[v].append(u)
    seen, todo = {x}, [x]
    while todo:
        for u in rev[todo.pop()]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def criterion_4():
    rng = random.Random(4)
    mismatches = 0
    for _ in range(100):
        n = rng.randint(1, 12)
        V = [f"v{i}" for i in range(n)]
        E = {(rng.choice(V), rng.choice(V)) for _ in range(rng.randint(0, 3 * n))}
        x = rng.choice(V)
        got = backward_slice(DepGraph(frozenset(V), frozenset(E)), x).members
        mismatches += got != _reverse_reach(V, E, x)
    kv = slice_program(parse_program(TWO_FN), "x")
    two_fn = kv.members == TWO_FN_MEMBERS and kv.frontier == TWO_FN_FRONTIER
    return mismatches == 0 and two_fn, (f"{100 - mismatches}/100 random graphs match reverse reachability; "
                                      f"two-function fixture slice exact: {two_fn}")


# --------------------------------------------------------------- criterion 5


def criterion_5():
    s = MutationScheduler(seed=0)
    s.update(MutationType.DataElement, True)
    win = abs(s.P[4] - 0.165) <= 1e-12
    rest = all(abs(p - (0.125 - 0.04 / 7)) <= 1e-12 for k, p in enumerate(s.P) if k != 4)
    shown = round(s.P[0], 3) == 0.119
    rng = random.Random(5)
    t = MutationScheduler(seed=5)
    worst_sum, worst_min = 0.0, 1.0
    for _ in range(10_000):
        t.update(MutationType(rng.randint(1, 8)), rng.random() < 0.5)
        worst_sum = max(worst_sum, abs(math.fsum(t.P) - 1.0))
        worst_min = min(worst_min, min(t.P))
    ok = win and rest and shown and worst_sum <= 1e-9 and worst_min >= 0.01
    return ok, (f"DataElement {s.P[4]:.12f}, others {s.P[0]:.6f}; 10000 random steps: "
                f"max |sum-1| {worst_sum:.1e}, min P {worst_min:.4f}")


# --------------------------------------------------------------- criterion 6


def criterion_6():
    rng = random.Random(6)
    bad = 0
    for _ in range(100_000):
        w = rng.randint(1, 64)
        signed = rng.random() < 0.5
        v = rng.randint(-(1 << 70), 1 << 70)
        m = v % (1 << w)
        if signed and m >= 1 << (w - 1):
            m -= 1 << w
        bad += wrap_to_width(v, TypeSpec("int" if signed else "uint", w)) != m
    u9 = TypeSpec("uint", 9)
    examples = all(wrap_to_width(v, u9) == v for v in range(482)) and wrap_to_width(520, u9) == 8
    return bad == 0 and examples, f"{bad} mismatches in 100000 cases; 0..481 fit 9 bits, 520 -> 8: {examples}"


# --------------------------------------------------------------- criterion 7


def criterion_7():
    total, bad = 0, []
    programs = neutral_programs()
    for p in programs:
        prog = parse_file(p)
        if prog.directives:
            bad.append(f"{p.stem} has directives")
            continue
        c = Campaign(CampaignConfig(program=str(p)))
        rng = random.Random(p.stem)
        for _ in range(1000):
            inp = c.fmt.sample(rng)
            ts, th = c.sw.run(inp), c.hw.run(inp)
            dr = compare_spectra((ts, collect_spectra(ts, c.kv)), (th, collect_spectra(th, c.kv)), c.hw_cfg)
            total += 1
            if dr.verdict != "clean":
                bad.append(f"{p.stem}: {inp.to_line()}")
    return len(programs) >= 5 and not bad, f"{len(bad)} discrepancies over {total} inputs on {len(programs)} programs"


# --------------------------------------------------------------- criterion 8


def criterion_8():
    lib = RuleLibrary.load()
    cases = []
    for line in (FIXTURES / "paraphrased_logs.tsv").read_text().splitlines():
        if line and not line.startswith("#"):
            cases.append(tuple(line.split("\t")))
    per_rule = Counter(code for code, _ in cases)
    hits = sum(retrieve(log, lib)[0].id == code for code, log in cases)
    acc = hits / len(cases)
    exact = max(abs(retrieve(t.sample_log, lib)[1] - 1.0) for t in lib.templates)
    invariant = True
    for _, log in cases:
        q = lib.embedder.raw(log)
        base = max(range(len(lib.templates)), key=lambda i: cosine(q, lib.templates[i].raw))
        for c in (0.001, 0.5, 3.0, 1e6):
            invariant &= base == max(range(len(lib.templates)), key=lambda i: cosine(c * q, lib.templates[i].raw))
    ok = (len(lib.templates) >= 10 and min(per_rule.values()) >= 3 and acc >= 0.9
          and exact <= 1e-9 and invariant)
    return ok, (f"top-1 {hits}/{len(cases)} = {acc:.1%} (need 90%) over {len(lib.templates)} rules; "
                f"exact-match deviation {exact:.1e}; scaling invariance {invariant}")


# --------------------------------------------------------------- criterion 9


def criterion_9():
    lib = RuleLibrary.load()
    files = harness_programs()
    m, its = 0, []
    for f in files:
        out = repair_loop(parse_file(f), lib, RuleApplyingClient(), max_iter=5)
        ok = out.repaired and check_hw_compat(parse_program(out.source)).ok
        m += ok
        its.append(out.iterations)
    n = len(files)
    ok = n >= 8 and m >= 8 and abs(pass_rate(m, n) - 100.0 * m / n) <= 1e-9
    return ok, f"{m}/{n} harnesses repaired within 5 iterations (iterations {its}); pass rate {pass_rate(m, n):.1f}%"


# -------------------------------------------------------------- criterion 10


def criterion_10(tmp=None):
    import contextlib
    import io
    import tempfile
    prog = str([p for p in planted_programs() if p.stem == "order_prefix_pipe"][0])
    with tempfile.TemporaryDirectory(dir=tmp) as d:
        outs = []
        for k in ("a", "b"):
            with contextlib.redirect_stdout(io.StringIO()):
                cli_main(["campaign", prog, "--seed", "7", "--max-execs", "500", "--workers", "1",
                          "--report-dir", f"{d}/{k}"])
            outs.append(Path(d, k, "report.json").read_bytes())
    same = outs[0] == outs[1]
    return same, f"report.json byte-identical across two runs: {same} ({len(outs[0])} bytes)"


CRITERIA = {
    1: ("planted corpus detection", criterion_1),
    2: ("adaptive vs uniform scheduling", criterion_2),
    3: ("filter soundness and benefit", criterion_3),
    4: ("slicing oracle", criterion_4),
    5: ("scheduler numerics", criterion_5),
    6: ("arithmetic oracle", criterion_6),
    7: ("neutrality", criterion_7),
    8: ("retrieval accuracy", criterion_8),
    9: ("repair loop", criterion_9),
    10: ("determinism", criterion_10),
}


def _line(n, ok, detail):
    return f"criterion {n:>2} {'PASS' if ok else 'FAIL'} {CRITERIA[n][0]}: {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, detail = CRITERIA[n][1]()
    RESULTS[n] = _line(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, (_, fn) in sorted(CRITERIA.items()):
        ok, detail = fn()
        failed += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
