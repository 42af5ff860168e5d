import csv
import io

import pytest

from hlsdiff.cli import main
from hlsdiff.corpus import harness_programs, neutral_programs, planted_programs

PLANTED = {f.stem: str(f) for f in planted_programs()}
NEUTRAL = {f.stem: str(f) for f in neutral_programs()}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_exit_codes(capsys):
    code, out, _ = run(capsys, "check", PLANTED["stack_rsum"])
    assert code == 0 and "compatible" in out
    code, out, _ = run(capsys, "check", str(harness_programs()[0]))
    assert code == 2 and "ERROR E_" in out


def test_repair_reports_pass_rate(capsys, tmp_path):
    files = [str(p) for p in harness_programs()]
    code, out, _ = run(capsys, "repair", *files, "--out", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out), delimiter="\t"))
    assert rows[0] == ["harness", "status", "iterations", "rules"]
    assert all(r[1] == "repaired" for r in rows[1:len(files) + 1])
    assert out.strip().endswith(f"# pass_rate {len(files)}/{len(files)} = 100.00%")
    assert len(list(tmp_path.glob("*.repaired.mc"))) == len(files)


def test_slice_and_instrument(capsys):
    code, out, _ = run(capsys, "slice", PLANTED["overflow_accum_u9"])
    assert code == 0 and "main::sum" in out
    code, out, _ = run(capsys, "instrument", PLANTED["overflow_accum_u9"])
    assert code == 0 and "probe uint sum" in out


def test_exec_reports_divergence(capsys):
    code, out, _ = run(capsys, "exec", PLANTED["overflow_accum_u9"], "--input", "200 200 120 1")
    assert code == 2
    assert "outputs 521" in out and "outputs 9" in out
    code, _, _ = run(capsys, "exec", PLANTED["overflow_accum_u9"], "--input", "1 2 3 4")
    assert code == 0


def test_campaign_and_report(capsys, tmp_path):
    d = tmp_path / "r"
    code, out, _ = run(capsys, "campaign", PLANTED["oob_histogram"], "--max-execs", "200",
                       "--report-dir", str(d), "--seed", "1")
    assert code == 2 and "OutOfBounds" in out
    assert (d / "report.json").is_file() and (d / "discrepancies.png").is_file()
    code, out, _ = run(capsys, "report", str(d))
    assert code == 2
    rows = list(csv.reader(io.StringIO(out), delimiter="\t"))
    assert rows[0][0] == "report" and rows[1][4] == "OutOfBounds"


def test_fuzz_ablation_flags_and_comparison(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "fuzz", PLANTED["truncation_fir_fixed"], "--max-execs", "100", "--no-filter",
        "--report-dir", str(a))
    run(capsys, "fuzz", PLANTED["truncation_fir_fixed"], "--max-execs", "100", "--no-filter",
        "--uniform-mutation", "--report-dir", str(b))
    code, out, _ = run(capsys, "report", str(a), str(b), "--out", str(tmp_path / "cmp"))
    assert (tmp_path / "cmp" / "comparison.png").is_file()
    assert out.count("Truncation") == 2


def test_neutral_campaign_is_clean(capsys):
    code, out, _ = run(capsys, "campaign", NEUTRAL["dot"], "--max-execs", "200", "--no-filter")
    assert code == 0 and "none" in out


def test_config_file(capsys, tmp_path):
    conf = tmp_path / "c.conf"
    conf.write_text("max_execs = 30\nuse_llm = false\n")
    code, out, _ = run(capsys, "campaign", PLANTED["stack_rsum"], "--config", str(conf))
    assert code in (0, 2) and "executions" in out


def test_tool_errors_exit_one(capsys, tmp_path):
    code, _, err = run(capsys, "slice", str(tmp_path / "missing.mc"))
    assert code == 1 and "error" in err
    bad = tmp_path / "bad.mc"
    bad.write_text("fn main( {")
    code, _, _ = run(capsys, "check", str(bad))
    assert code == 1
    code, _, _ = run(capsys, "campaign", PLANTED["stack_rsum"], "--batch", "0")
    assert code == 1


def test_usage_error():
    with pytest.raises(SystemExit):
        main([])
