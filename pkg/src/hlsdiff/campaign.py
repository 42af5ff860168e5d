"""Campaign orchestration: repair, slice, instrument, generate, filter,
execute in both modes, compare, and adapt."""

from __future__ import annotations

import concurrent.futures as cf
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import parse_meta
from .execution import (
    HARDWARE,
    SOFTWARE,
    Executable,
    HardwareConfig,
    TestInput,
    derive_format,
)
from .inputgen import DEFAULT_SCENARIO, InputGenerator, build_reasoning_chain
from .llm import HeuristicResponder, MockClient, RemoteClient
from .minic import check_hw_compat, parse_file
from .minic import ast as A
from .mutation import MutationScheduler
from .rag import RuleApplyingClient, RuleLibrary, pass_rate, repair_loop  # noqa: F401
from .redundancy import Decision, RecordTable
from .slicer import slice_program
from .spectra import SpectraRecord, collect_spectra, compare_spectra, feedback_array, instrument, merge, new_extremes

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class CampaignError(RuntimeError):
    pass


@dataclass
class CampaignConfig:
    program: str = ""
    harness: Optional[str] = None
    target: Optional[str] = None
    max_execs: int = 10000
    max_seconds: Optional[float] = None
    patience: int = 2000  # consecutive skipped inputs before the campaign counts as saturated
    batch: int = 10
    llm_ratio: float = 0.3
    alpha: float = 0.04
    epsilon: float = 0.01
    seed: int = 0
    client: str = "mock"  # mock | remote | none
    mock_dir: Optional[str] = None
    library: Optional[str] = None
    report_dir: Optional[str] = None
    adaptive: bool = True
    use_llm: bool = True
    use_filter: bool = True
    workers: int = 1
    exec_delay: float = 0.0
    step_budget: int = 1_000_000
    stop_on_detection: bool = False
    scenario: Optional[str] = None
    temperature: float = 0.2

    def validate(self):
        if not self.program:
            raise ConfigError("no program given")
        if self.max_execs < 0:
            raise ConfigError("max_execs must be non-negative")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ConfigError("max_seconds must be positive")
        if self.patience < 1:
            raise ConfigError("patience must be at least 1")
        if self.batch < 1:
            raise ConfigError("batch must be at least 1")
        if not 0.0 <= self.llm_ratio <= 1.0:
            raise ConfigError("llm_ratio must lie in [0, 1]")
        if self.client not in ("mock", "remote", "none"):
            raise ConfigError(f"unknown client {self.client!r}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")


def _coerce_field(f: dataclasses.Field, raw: str):
    t = str(f.type)
    if raw.lower() in ("none", "") and "Optional" in t:
        return None
    if "bool" in t:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{f.name}: expected a boolean, got {raw!r}")
    try:
        if "int" in t:
            return int(raw)
        if "float" in t:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{f.name}: cannot parse {raw!r}") from None
    return raw


def load_config(path, **overrides) -> CampaignConfig:
    """Read a ``key = value`` file (``#`` starts a comment)."""
    fields = {f.name: f for f in dataclasses.fields(CampaignConfig)}
    values = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (x.strip() for x in line.split("=", 1))
        if k not in fields:
            raise ConfigError(f"{path}:{n}: unknown key {k!r}")
        values[k] = _coerce_field(fields[k], v)
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = CampaignConfig(**values)
    cfg.validate()
    return cfg


@dataclass
class Row:
    index: int
    input: str
    source: str
    op: Optional[str]
    decision: str
    table_version: int
    execution: Optional[int] = None
    verdict: str = "-"
    classes: tuple = ()
    signatures: tuple = ()
    new_extreme: bool = False
    sw_status: str = "-"
    hw_status: str = "-"

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["classes"] = list(self.classes)
        d["signatures"] = [list(s) for s in self.signatures]
        return d


@dataclass
class CampaignReport:
    program: str
    seed: int
    status: str = "budget_exhausted"
    rows: list = field(default_factory=list)
    series: list = field(default_factory=list)  # (execution index, cumulative distinct signatures)
    first_detection: dict = field(default_factory=dict)  # class -> execution index
    signatures: dict = field(default_factory=dict)  # "class variable" -> first execution index
    probabilities: list = field(default_factory=list)  # (execution index, P vector)
    key_variables: list = field(default_factory=list)
    repair: Optional[dict] = None
    table: dict = field(default_factory=dict)
    llm_failures: int = 0
    wall_seconds: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def executions(self) -> int:
        return sum(1 for r in self.rows if r.decision == Decision.EXECUTE.value)

    @property
    def skips(self) -> int:
        return sum(1 for r in self.rows if r.decision == Decision.SKIP.value)

    @property
    def classes(self) -> set:
        return set(self.first_detection)

    def to_dict(self) -> dict:
        """Machine-readable form; carries no wall-clock data."""
        return {
            "program": self.program,
            "seed": self.seed,
            "status": self.status,
            "totals": {
                "rows": len(self.rows),
                "executions": self.executions,
                "skips": self.skips,
                "llm_inputs": sum(1 for r in self.rows if r.source == "llm"),
                "mutation_inputs": sum(1 for r in self.rows if r.source == "mutation"),
                "discrepant_executions": sum(1 for r in self.rows if r.verdict == "discrepant"),
                "distinct_classes": len(self.first_detection),
                "distinct_signatures": len(self.signatures),
                "llm_failures": self.llm_failures,
            },
            "first_detection": dict(sorted(self.first_detection.items())),
            "signatures": dict(sorted(self.signatures.items())),
            "series": [list(p) for p in self.series],
            "probabilities": [[i, list(P)] for i, P in self.probabilities],
            "key_variables": list(self.key_variables),
            "repair": self.repair,
            "table": self.table,
            "config": self.config,
            "rows": [r.to_dict() for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignReport":
        rows = []
        for r in d["rows"]:
            r = dict(r)
            r["classes"] = tuple(r["classes"])
            r["signatures"] = tuple(tuple(s) for s in r["signatures"])
            rows.append(Row(**r))
        return cls(d["program"], d["seed"], d["status"], rows,
                   series=[tuple(p) for p in d["series"]],
                   first_detection=dict(d["first_detection"]),
                   signatures=dict(d["signatures"]),
                   probabilities=[(i, list(P)) for i, P in d["probabilities"]],
                   key_variables=list(d["key_variables"]),
                   repair=d["repair"], table=d["table"],
                   llm_failures=d["totals"]["llm_failures"], config=d["config"])

    def replay_series(self) -> list:
        """Cumulative distinct-signature series recomputed from the rows."""
        seen, out = set(), []
        for r in self.rows:
            if r.execution is None:
                continue
            seen |= {f"{c} {v}" for c, v in r.signatures}
            out.append((r.execution, len(seen)))
        return out


def build_client(cfg: CampaignConfig):
    if not cfg.use_llm or cfg.client == "none":
        return None
    if cfg.client == "remote":
        return RemoteClient.from_env(temperature=cfg.temperature)
    return MockClient(cfg.mock_dir, fallback=HeuristicResponder())


# ------------------------------------------------------------ parallel workers

_WORKER = {}


def _worker_init(p: A.Program, hw_cfg: HardwareConfig, budget: int):
    _WORKER["sw"] = Executable(p, SOFTWARE, budget=budget)
    _WORKER["hw"] = Executable(p, HARDWARE, hw_cfg, budget=budget)


def _worker_run(values):
    inp = TestInput(values)
    return _WORKER["sw"].run(inp), _WORKER["hw"].run(inp)


# -------------------------------------------------------------------- campaign


class Campaign:
    """A prepared campaign; :meth:`run` executes it."""

    def __init__(self, cfg: CampaignConfig, program: Optional[A.Program] = None):
        cfg.validate()
        self.cfg = cfg
        path = Path(cfg.program)
        source = path.read_text() if path.is_file() else ""
        self.meta = parse_meta(source)
        self.program = program if program is not None else parse_file(path)
        report = check_hw_compat(self.program)
        if not report.ok:
            raise CampaignError("program under test is not hardware compatible:\n" + report.to_log())
        self.kv = slice_program(self.program, cfg.target)
        self.instrumented = instrument(self.program, self.kv)
        self.hw_cfg = HardwareConfig.from_program(self.program)
        self.sw = Executable(self.instrumented, SOFTWARE, budget=cfg.step_budget)
        self.hw = Executable(self.instrumented, HARDWARE, self.hw_cfg, budget=cfg.step_budget)
        self.fmt = derive_format(self.program, self.meta.overrides)
        seeds = [self.fmt.parse_line(s) for s in self.meta.seeds]
        if not seeds:
            seeds = [self._default_seed()]
        self.seeds = seeds
        entry = self.program.function(self.program.entry)
        self.slot_names = tuple(A.qualify(entry.name, prm.name) for prm in entry.params)

    def _default_seed(self) -> TestInput:
        vals = []
        for s in self.fmt.slots:
            z = min(max(0, s.lo), s.hi)
            z = float(z) if s.is_float else int(z)
            if s.shape == "scalar":
                vals.append(z)
            elif s.shape == "array":
                vals.append((z,) * s.min_len)
            else:
                vals.append(tuple((z,) * s.min_cols for _ in range(s.min_len)))
        return TestInput(tuple(vals))

    def _repair(self) -> Optional[dict]:
        if not self.cfg.harness:
            return None
        lib = RuleLibrary.load(self.cfg.library)
        client = RuleApplyingClient() if self.cfg.client != "remote" else build_client(self.cfg)
        outcome = repair_loop(parse_file(self.cfg.harness), lib, client)
        if self.cfg.report_dir:
            d = Path(self.cfg.report_dir)
            d.mkdir(parents=True, exist_ok=True)
            (d / "repair_transcript.txt").write_text(outcome.transcript())
            (d / "repaired_harness.mc").write_text(outcome.source)
        return {
            "status": outcome.status,
            "iterations": outcome.iterations,
            "rules": [s.rule_id for s in outcome.steps],
        }

    def run(self) -> CampaignReport:
        cfg = self.cfg
        t0 = time.monotonic()
        rep = CampaignReport(str(cfg.program), cfg.seed)
        rep.config = {k: v for k, v in sorted(dataclasses.asdict(cfg).items())
                      if k not in ("report_dir", "mock_dir", "library", "workers", "max_seconds", "exec_delay")}
        rep.key_variables = sorted(self.kv.members)
        rep.repair = self._repair()

        sched = MutationScheduler(seed=cfg.seed, alpha=cfg.alpha, epsilon=cfg.epsilon, adaptive=cfg.adaptive)
        client = build_client(cfg)
        chain = None
        if client is not None:
            chain = build_reasoning_chain(self.program, cfg.scenario or self.meta.scenario or DEFAULT_SCENARIO,
                                          self.fmt)
        corpus = list(self.seeds)
        gen = InputGenerator(self.fmt, sched, corpus, client, chain, cfg.llm_ratio, cfg.seed, self.slot_names)
        table = RecordTable()
        seen = SpectraRecord()
        seen_sw = SpectraRecord()
        executions = 0
        pool = None
        if cfg.workers > 1:
            pool = cf.ProcessPoolExecutor(
                cfg.workers, initializer=_worker_init,
                initargs=(self.instrumented, self.hw_cfg, cfg.step_budget))
        rep.probabilities.append((0, list(sched.P)))
        pending_seeds = [(s, "seed", None) for s in self.seeds]
        idle = 0  # consecutive skips
        timed_out = False
        stop = cfg.max_execs == 0
        try:
            while not stop:
                if pending_seeds:
                    items, pending_seeds = pending_seeds, []
                else:
                    items = [(g.input, g.source, g.op) for g in gen.next_batch(cfg.batch)]
                planned = []
                room = cfg.max_execs - executions
                for inp, source, op in items:
                    if room == 0:
                        break
                    if cfg.use_filter:
                        d = table.decide_and_update(inp)
                    else:
                        d = Decision.EXECUTE
                        table.update_record(inp)
                    room -= d is Decision.EXECUTE
                    planned.append((inp, source, op, d, table.version))
                runs = [p[0] for p in planned if p[3] is Decision.EXECUTE]
                if pool is not None:
                    res_iter = iter(list(pool.map(_worker_run, [i.values for i in runs])))
                else:
                    res_iter = ((self.sw.run(i), self.hw.run(i)) for i in runs)
                for inp, source, op, d, version in planned:
                    row = Row(len(rep.rows), inp.to_line(), source, op.name if op is not None else None,
                              d.value, version)
                    rep.rows.append(row)
                    if d is Decision.SKIP:
                        idle += 1
                        continue
                    idle = 0
                    ts, th = next(res_iter)
                    if cfg.exec_delay:
                        time.sleep(cfg.exec_delay)
                    executions += 1
                    row.execution = executions
                    rs, rh = collect_spectra(ts, self.kv), collect_spectra(th, self.kv)
                    dr = compare_spectra((ts, rs), (th, rh), self.hw_cfg)
                    both = merge(rs, rh)
                    fresh = new_extremes(seen, both)
                    seen = merge(seen, both)
                    seen_sw = merge(seen_sw, rs)
                    row.verdict = dr.verdict
                    row.classes = tuple(sorted(dr.classes))
                    row.signatures = tuple(sorted(set(s.signature for s in dr.symptoms)))
                    row.new_extreme = bool(fresh)
                    row.sw_status, row.hw_status = ts.status_text(), th.status_text()
                    for cls in row.classes:
                        rep.first_detection.setdefault(cls, executions)
                    for sig in row.signatures:
                        rep.signatures.setdefault(f"{sig[0]} {sig[1]}", executions)
                    rep.series.append((executions, len(rep.signatures)))
                    if op is not None:
                        sched.update(op, bool(fresh))
                    if fresh:
                        corpus.append(inp)
                    if cfg.stop_on_detection and row.verdict == "discrepant":
                        stop = True
                        break
                    if cfg.max_seconds is not None and time.monotonic() - t0 >= cfg.max_seconds:
                        timed_out = True
                        break
                gen.set_feedback(feedback_array(seen_sw))
                rep.probabilities.append((executions, list(sched.P)))
                if stop:
                    rep.status = "detected"
                    break
                if executions >= cfg.max_execs:
                    break
                if idle >= cfg.patience:
                    # every recent input was subsumed by the record table
                    rep.status = "saturated"
                    break
                if timed_out or (cfg.max_seconds is not None and time.monotonic() - t0 >= cfg.max_seconds):
                    break
        finally:
            if pool is not None:
                pool.shutdown()
        rep.table = table.to_dict()
        rep.llm_failures = gen.llm_failures
        rep.wall_seconds = time.monotonic() - t0
        self.scheduler = sched
        self.table = table
        self.generator = gen
        if cfg.report_dir:
            from .report import write_report
            write_report(rep, cfg.report_dir, checkpoint={"scheduler": sched.state(), "table": table.to_dict(),
                                                          "corpus": [c.to_line() for c in corpus]})
        return rep


def run_campaign(cfg: CampaignConfig) -> CampaignReport:
    cfg.validate()
    try:
        return Campaign(cfg).run()
    except (ConfigError, CampaignError):
        raise
    except Exception as e:
        raise CampaignError(f"campaign on {cfg.program} failed: {type(e).__name__}: {e}") from e


def replay(campaign: Campaign, inputs: list, use_filter: bool) -> dict:
    """Run a fixed input sequence, optionally through a fresh record table.
    Returns detected classes, skip count and the table."""
    table = RecordTable()
    classes = set()
    skips = 0
    for inp in inputs:
        if use_filter and table.decide_and_update(inp) is Decision.SKIP:
            skips += 1
            continue
        ts, th = campaign.sw.run(inp), campaign.hw.run(inp)
        dr = compare_spectra((ts, collect_spectra(ts, campaign.kv)), (th, collect_spectra(th, campaign.kv)),
                             campaign.hw_cfg)
        classes |= dr.classes
    return {"classes": classes, "skips": skips, "table": table}
