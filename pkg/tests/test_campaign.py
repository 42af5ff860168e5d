import json

import pytest

from hlsdiff.campaign import (
    Campaign,
    CampaignConfig,
    CampaignError,
    CampaignReport,
    ConfigError,
    load_config,
    run_campaign,
)
from hlsdiff.corpus import harness_programs, neutral_programs, planted_programs
from hlsdiff.report import report_json

PLANTED = {f.stem: f for f in planted_programs()}


def cfg(name="overflow_accum_u9", **kw):
    kw.setdefault("max_execs", 300)
    return CampaignConfig(program=str(PLANTED[name]), **kw)


def test_overflow_found_within_2000():
    rep = run_campaign(cfg(max_execs=2000, seed=0))
    assert "Overflow" in rep.first_detection
    assert rep.executions <= 2000


def test_zero_budget():
    rep = run_campaign(cfg(max_execs=0))
    assert rep.rows == [] and rep.status == "budget_exhausted"


@pytest.mark.parametrize("kw", [
    {"max_execs": -1}, {"batch": 0}, {"llm_ratio": 1.5}, {"client": "psychic"}, {"workers": 0},
    {"max_seconds": 0}, {"patience": 0},
])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        cfg(**kw).validate()


def test_missing_program():
    with pytest.raises(CampaignError):
        run_campaign(CampaignConfig(program="/nonexistent.mc"))


def test_incompatible_program_rejected():
    with pytest.raises(CampaignError):
        Campaign(CampaignConfig(program=str(harness_programs()[0])))


def test_report_invariants():
    rep = run_campaign(cfg(max_execs=400, use_filter=True, seed=2))
    d = rep.to_dict()
    t = d["totals"]
    assert t["executions"] == sum(r.execution is not None for r in rep.rows)
    assert t["skips"] == sum(r.decision == "skip" for r in rep.rows)
    assert t["executions"] + t["skips"] == len(rep.rows)
    ys = [y for _, y in rep.series]
    assert ys == sorted(ys)
    assert rep.series == rep.replay_series()
    for r in rep.rows:
        if r.decision == "skip":
            assert r.execution is None and r.table_version >= 1
        else:
            assert r.sw_status != "-" and r.hw_status != "-"


def test_budget_respected_without_filter():
    rep = run_campaign(cfg(max_execs=123, use_filter=False))
    assert rep.executions == 123 and rep.status == "budget_exhausted"


def test_time_budget():
    rep = run_campaign(cfg(max_execs=10**6, max_seconds=0.3, use_filter=False))
    assert rep.wall_seconds < 3.0


def test_saturation_stops_campaign():
    rep = run_campaign(cfg(max_execs=10**6, patience=200))
    assert rep.status == "saturated"


def test_stop_on_detection():
    rep = run_campaign(cfg(max_execs=5000, use_filter=False, stop_on_detection=True))
    assert rep.status == "detected"
    assert rep.executions == max(rep.first_detection.values())


def test_determinism_and_round_trip(tmp_path):
    a = run_campaign(cfg(seed=9, report_dir=str(tmp_path / "a")))
    b = run_campaign(cfg(seed=9, report_dir=str(tmp_path / "b")))
    ra, rb = (tmp_path / "a" / "report.json").read_bytes(), (tmp_path / "b" / "report.json").read_bytes()
    assert ra == rb
    again = CampaignReport.from_dict(json.loads(ra))
    assert report_json(again) == report_json(a)
    for name in ("summary.txt", "rows.tsv", "timing.txt", "checkpoint.json", "discrepancies.png",
                 "probabilities.png"):
        assert (tmp_path / "a" / name).is_file()
    assert "wall" not in ra.decode()
    assert b.rows


def test_different_seeds_differ():
    a = run_campaign(cfg(seed=1, use_filter=False, max_execs=50))
    b = run_campaign(cfg(seed=2, use_filter=False, max_execs=50))
    assert [r.input for r in a.rows] != [r.input for r in b.rows]


def test_no_llm_and_uniform_flags():
    rep = run_campaign(cfg(use_llm=False, adaptive=False, use_filter=False, max_execs=200))
    assert all(r.source != "llm" for r in rep.rows)
    assert all(P == [0.125] * 8 for _, P in rep.probabilities)


def test_workers_preserve_aggregates():
    one = run_campaign(cfg(use_filter=False, max_execs=200, seed=4))
    two = run_campaign(cfg(use_filter=False, max_execs=200, seed=4, workers=2))
    assert one.first_detection == two.first_detection
    assert one.executions == two.executions


def test_harness_repair_recorded(tmp_path):
    rep = run_campaign(cfg(max_execs=20, harness=str(harness_programs()[2]), report_dir=str(tmp_path)))
    assert rep.repair["status"] == "repaired"
    assert (tmp_path / "repair_transcript.txt").is_file()


def test_neutral_program_stays_clean():
    path = [p for p in neutral_programs() if p.stem == "sum"][0]
    rep = run_campaign(CampaignConfig(program=str(path), max_execs=300, use_filter=False))
    assert rep.first_detection == {}


def test_load_config(tmp_path):
    f = tmp_path / "c.conf"
    f.write_text(f"# campaign\nprogram = {PLANTED['stack_rsum']}\nmax_execs = 50\nadaptive = false\n"
                 "max_seconds = none\nllm_ratio = 0.5\n")
    c = load_config(f, seed=3)
    assert (c.max_execs, c.adaptive, c.max_seconds, c.llm_ratio, c.seed) == (50, False, None, 0.5, 3)
    f.write_text("bogus = 1\n")
    with pytest.raises(ConfigError):
        load_config(f)
    f.write_text("adaptive = maybe\n")
    with pytest.raises(ConfigError):
        load_config(f)
