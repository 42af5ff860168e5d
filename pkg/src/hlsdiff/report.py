"""Campaign report files.

``report.json`` is deterministic for a fixed configuration and seed: it has
sorted keys and no wall-clock data. Timing goes to ``timing.txt``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .mutation import MutationType

ROW_FIELDS = ("index", "execution", "source", "op", "decision", "table_version", "verdict", "classes",
              "new_extreme", "sw_status", "hw_status", "input")


def report_json(rep) -> str:
    return json.dumps(rep.to_dict(), sort_keys=True, indent=1) + "\n"


def summary_text(rep) -> str:
    d = rep.to_dict()
    t = d["totals"]
    lines = [
        f"program      {rep.program}",
        f"seed         {rep.seed}",
        f"status       {rep.status}",
        f"inputs       {t['rows']}",
        f"executions   {t['executions']}",
        f"skipped      {t['skips']}",
        f"llm inputs   {t['llm_inputs']}",
        f"discrepant   {t['discrepant_executions']}",
        f"key vars     {' '.join(rep.key_variables) or '-'}",
    ]
    if rep.repair is not None:
        lines.append(f"repair       {rep.repair['status']} after {rep.repair['iterations']} iteration(s)")
    lines.append("first detection per class:")
    if rep.first_detection:
        for cls, n in sorted(rep.first_detection.items(), key=lambda kv: (kv[1], kv[0])):
            lines.append(f"  {cls:<16} execution {n}")
    else:
        lines.append("  none")
    lines.append("distinct signatures:")
    for sig, n in sorted(rep.signatures.items(), key=lambda kv: (kv[1], kv[0])):
        lines.append(f"  {sig}  (execution {n})")
    if rep.probabilities:
        P = rep.probabilities[-1][1]
        lines.append("final mutation probabilities:")
        lines += [f"  {m.name:<14} {P[k]:.4f}" for k, m in enumerate(MutationType)]
    return "\n".join(lines) + "\n"


def write_rows(rep, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(ROW_FIELDS)
        for r in rep.rows:
            d = r.to_dict()
            d["classes"] = ",".join(d["classes"]) or "-"
            w.writerow(["-" if d[k] is None else d[k] for k in ROW_FIELDS])
    return path


def write_report(rep, out_dir, checkpoint=None, figures: bool = True) -> dict:
    """Write every report artifact into ``out_dir``; return name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["report"] = out / "report.json"
    paths["report"].write_text(report_json(rep))
    paths["summary"] = out / "summary.txt"
    paths["summary"].write_text(summary_text(rep))
    paths["rows"] = write_rows(rep, out / "rows.tsv")
    paths["timing"] = out / "timing.txt"
    rate = rep.executions / rep.wall_seconds if rep.wall_seconds > 0 else 0.0
    paths["timing"].write_text(f"wall_seconds {rep.wall_seconds:.3f}\nexecutions_per_second {rate:.1f}\n")
    if checkpoint is not None:
        paths["checkpoint"] = out / "checkpoint.json"
        paths["checkpoint"].write_text(json.dumps(checkpoint, sort_keys=True) + "\n")
    if figures:
        from .plotting import plot_discrepancies, plot_probabilities
        paths["discrepancies_png"] = plot_discrepancies({rep.program: rep}, out / "discrepancies.png")
        paths["probabilities_png"] = plot_probabilities(rep, out / "probabilities.png")
    return paths


def load_report(path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / "report.json"
    return json.loads(p.read_text())
