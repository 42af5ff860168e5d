"""Command-line entry point.

Exit codes: 0 clean, 2 discrepancies (or incompatibilities) found, 1 tool error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .campaign import Campaign, CampaignConfig, CampaignError, CampaignReport, ConfigError, load_config
from .execution import HARDWARE, SOFTWARE, Executable, HardwareConfig, derive_format
from .execution.inputs import InputFormatError
from .llm import ClientError
from .minic import MiniCError, check_hw_compat, format_program, parse_file
from .rag import RuleApplyingClient, RuleLibrary, pass_rate, repair_loop
from .report import load_report, summary_text, write_report
from .slicer import UnknownTarget, slice_program
from .spectra import instrument

EXIT_CLEAN, EXIT_ERROR, EXIT_FOUND = 0, 1, 2

log = logging.getLogger("hlsdiff")


def cmd_check(args) -> int:
    found = False
    for path in args.files:
        rep = check_hw_compat(parse_file(path))
        if rep.ok:
            print(f"{path}: compatible")
        else:
            found = True
            for line in rep.to_log().splitlines():
                print(f"{path}: {line}")
    return EXIT_FOUND if found else EXIT_CLEAN


def cmd_repair(args) -> int:
    lib = RuleLibrary.load(args.library)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    m = 0
    w = csv.writer(sys.stdout, delimiter="\t", lineterminator="\n")
    w.writerow(["harness", "status", "iterations", "rules"])
    for path in args.files:
        res = repair_loop(parse_file(path), lib, RuleApplyingClient(), max_iter=args.max_iter)
        m += res.repaired
        w.writerow([path, res.status, res.iterations, ",".join(s.rule_id for s in res.steps) or "-"])
        if out:
            stem = Path(path).stem
            (out / f"{stem}.repaired.mc").write_text(res.source)
            (out / f"{stem}.transcript.txt").write_text(res.transcript())
    n = len(args.files)
    print(f"# pass_rate {m}/{n} = {pass_rate(m, n):.2f}%")
    return EXIT_CLEAN if m == n else EXIT_FOUND


def cmd_slice(args) -> int:
    kv = slice_program(parse_file(args.file), args.target)
    print(f"target {kv.target}")
    print(f"iterations {kv.iterations}")
    print("members " + " ".join(sorted(kv.members)))
    print("frontier " + (" ".join(sorted(kv.frontier)) or "-"))
    return EXIT_CLEAN


def cmd_instrument(args) -> int:
    p = parse_file(args.file)
    text = format_program(instrument(p, slice_program(p, args.target)))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_CLEAN


def cmd_exec(args) -> int:
    p = parse_file(args.file)
    inp = derive_format(p).parse_line(args.input)
    modes = (SOFTWARE, HARDWARE) if args.mode == "both" else (args.mode,)
    outs = []
    for mode in modes:
        ex = Executable(p, mode, HardwareConfig.from_program(p) if mode == HARDWARE else None, budget=args.budget)
        t = ex.run(inp)
        sys.stdout.write(t.serialize())
        outs.append((t.status_text(), t.outputs))
    return EXIT_FOUND if len(outs) == 2 and outs[0] != outs[1] else EXIT_CLEAN


def _config(args, **forced) -> CampaignConfig:
    over = {
        "program": args.file, "harness": getattr(args, "harness", None), "target": args.target,
        "max_execs": args.max_execs, "max_seconds": args.max_seconds, "batch": args.batch,
        "llm_ratio": getattr(args, "llm_ratio", None), "alpha": args.alpha, "epsilon": args.epsilon,
        "seed": args.seed, "client": getattr(args, "client", None), "mock_dir": getattr(args, "mock_dir", None),
        "library": getattr(args, "library", None), "report_dir": args.report_dir, "workers": args.workers,
        "exec_delay": args.exec_delay, "patience": args.patience,
    }
    if args.uniform_mutation:
        over["adaptive"] = False
    if getattr(args, "no_llm", False):
        over["use_llm"] = False
    if args.no_filter:
        over["use_filter"] = False
    if args.stop_on_detection:
        over["stop_on_detection"] = True
    over.update(forced)
    if args.config:
        return load_config(args.config, **over)
    cfg = CampaignConfig(**{k: v for k, v in over.items() if v is not None})
    cfg.validate()
    return cfg


def _run(cfg: CampaignConfig) -> int:
    rep = Campaign(cfg).run()
    sys.stdout.write(summary_text(rep))
    if cfg.report_dir:
        print(f"report written to {cfg.report_dir}")
    return EXIT_FOUND if rep.first_detection else EXIT_CLEAN


def cmd_campaign(args) -> int:
    return _run(_config(args))


def cmd_fuzz(args) -> int:
    return _run(_config(args, use_llm=False))


def cmd_report(args) -> int:
    reports = {}
    for d in args.dirs:
        rep = CampaignReport.from_dict(load_report(d))
        reports[str(d)] = rep
    out = Path(args.out) if args.out else Path(args.dirs[0])
    out.mkdir(parents=True, exist_ok=True)
    if len(reports) == 1:
        rep = next(iter(reports.values()))
        write_report(rep, out)
    else:
        from .plotting import plot_discrepancies
        plot_discrepancies(reports, out / "comparison.png")
    # delimited summary on stdout; figures sit next to it in the output directory
    w = csv.writer(sys.stdout, delimiter="\t", lineterminator="\n")
    w.writerow(["report", "status", "executions", "skips", "class", "first_detection"])
    found = False
    for name, rep in reports.items():
        rows = sorted(rep.first_detection.items()) or [("-", "-")]
        for cls, n in rows:
            w.writerow([name, rep.status, rep.executions, rep.skips, cls, n])
        found |= bool(rep.first_detection)
    return EXIT_FOUND if found else EXIT_CLEAN


def _campaign_flags(sp, llm: bool):
    sp.add_argument("file", help="MiniC program under test")
    sp.add_argument("--config", help="key = value configuration file")
    sp.add_argument("--target", help="output variable to slice from (default: entry return)")
    sp.add_argument("--max-execs", type=int)
    sp.add_argument("--max-seconds", type=float)
    sp.add_argument("--batch", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--patience", type=int, help="consecutive skips before stopping as saturated")
    sp.add_argument("--report-dir")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--exec-delay", type=float, help="artificial per-execution delay in seconds")
    sp.add_argument("--uniform-mutation", action="store_true", help="disable probability adaptation")
    sp.add_argument("--no-filter", action="store_true", help="execute every generated input")
    sp.add_argument("--stop-on-detection", action="store_true")
    if llm:
        sp.add_argument("--harness", help="testbench harness to repair first")
        sp.add_argument("--llm-ratio", type=float)
        sp.add_argument("--client", choices=("mock", "remote", "none"))
        sp.add_argument("--mock-dir", help="directory of canned responses keyed by prompt hash")
        sp.add_argument("--library", help="directory of *.rule files")
        sp.add_argument("--no-llm", action="store_true", help="mutation-only input generation")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hlsdiff", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="report hardware-incompatible constructs")
    sp.add_argument("files", nargs="+")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("repair", help="repair testbench harnesses with retrieved rules")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--library")
    sp.add_argument("--max-iter", type=int, default=5)
    sp.add_argument("--out", help="directory for repaired sources and transcripts")
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("slice", help="print the key variable set")
    sp.add_argument("file")
    sp.add_argument("--target")
    sp.set_defaults(func=cmd_slice)

    sp = sub.add_parser("instrument", help="print the program with probes inserted")
    sp.add_argument("file")
    sp.add_argument("--target")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_instrument)

    sp = sub.add_parser("exec", help="run one input in software and/or hardware mode")
    sp.add_argument("file")
    sp.add_argument("--input", required=True, help="input line, e.g. '1 2 3 | 4'")
    sp.add_argument("--mode", choices=(SOFTWARE, HARDWARE, "both"), default="both")
    sp.add_argument("--budget", type=int, default=1_000_000)
    sp.set_defaults(func=cmd_exec)

    sp = sub.add_parser("fuzz", help="mutation-only campaign")
    _campaign_flags(sp, llm=False)
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("campaign", help="full pipeline campaign")
    _campaign_flags(sp, llm=True)
    sp.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("report", help="re-render reports; several directories give a comparison plot")
    sp.add_argument("dirs", nargs="+")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MiniCError, ConfigError, CampaignError, UnknownTarget, InputFormatError, ClientError,
            OSError, ValueError) as e:
        print(f"hlsdiff: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
