"""Benchmark harness: timed runs, CSV records, suite sweeps and statistics."""

from __future__ import annotations

import csv
import io
import logging
import multiprocessing as mp
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, Optional, TextIO

from .decomposition import read_td_file
from .graph import read_graph_file, stats as graph_stats
from .solve import SolveResult, canonical_algorithm, prepare, solve

log = logging.getLogger(__name__)

CSV_VERSION = "hamtw-runs v1"
STATS_VERSION = "hamtw-stats v1"
WORKERS_ENV = "HAMTW_WORKERS"
SMALL_WIDTH = 8
DEFAULT_TIMEOUT_SMALL = 600.0
DEFAULT_TIMEOUT_LARGE = 1800.0

TAU_GRID = {4: [3, 4], 6: list(range(5, 18, 2)), 8: [9, 18, 36, 72, 144]}
ALPHA_GRID = [0.5 * 2 ** k for k in range(12)]
RANK_ALGORITHMS = ("rank4t", "rank-improved")
GRAPH_SUFFIXES = (".gr", ".hcp")


class BenchDisagreement(RuntimeError):
    """Two completed algorithms gave different answers on one instance."""


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    mode: str
    outcome: str  # yes / no / timeout / error
    wall_ms: int
    peak_table: int = 0
    decision_calls: int = 0
    seed: str = ""
    tau: str = ""
    alpha: str = ""
    width: int = -1
    note: str = ""

    @property
    def solved(self) -> bool:
        return self.outcome in ("yes", "no")


RECORD_FIELDS = [f.name for f in fields(RunRecord)]


def default_timeout(width: int) -> float:
    return DEFAULT_TIMEOUT_SMALL if width <= SMALL_WIDTH else DEFAULT_TIMEOUT_LARGE


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring non-integer %s=%r", WORKERS_ENV, raw)
        return 1


def format_tau(tau: Optional[dict]) -> str:
    return " ".join(f"{k}={v}" for k, v in sorted((tau or {}).items()))


def parse_tau(items: Iterable[str]) -> dict:
    """``["4=3", "6=5"]`` -> ``{4: 3, 6: 5}``."""
    out = {}
    for item in items:
        for part in item.replace(",", " ").split():
            key, sep, val = part.partition("=")
            if not sep:
                raise ValueError(f"threshold {part!r} is not of the form l=value")
            ell, tau = int(key), int(val)
            if ell < 2 or ell % 2:
                raise ValueError(f"threshold size {ell} must be even and at least 2")
            if tau < 1:
                raise ValueError(f"threshold {tau} must be at least 1")
            out[ell] = tau
    return out


# --- timed execution ---------------------------------------------------------------


def _child(conn, kwargs):
    try:
        conn.send(("ok", _solve_job(**kwargs)))
    except Exception as exc:  # reported back as an error row
        conn.send(("error", f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


def _solve_job(graph_path: str, td_path: Optional[str], **opts) -> SolveResult:
    g = read_graph_file(graph_path)
    td = read_td_file(td_path) if td_path else None
    return solve(g, prepare(g, td), **opts)


def run_timed(graph_path: str, td_path: Optional[str], timeout: Optional[float],
              **opts) -> tuple[str, object, float]:
    """Solve in a child process.  Returns (status, result-or-message, seconds)
    with status one of ``ok``, ``error``, ``timeout``."""
    kwargs = dict(opts, graph_path=graph_path, td_path=td_path)
    ctx = mp.get_context("fork")
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(send, kwargs), daemon=True)
    started = time.perf_counter()
    proc.start()
    send.close()
    try:
        ready = recv.poll(timeout)
        if not ready:
            return "timeout", f"exceeded {timeout} s", time.perf_counter() - started
        try:
            status, payload = recv.recv()
        except EOFError:
            return "error", f"worker died with exit code {proc.exitcode}", time.perf_counter() - started
        return status, payload, time.perf_counter() - started
    finally:
        if proc.is_alive():
            proc.terminate()
        proc.join()
        recv.close()


def record_from(instance: str, algorithm: str, mode: str, status: str, payload,
                seconds: float, timeout: Optional[float], opts: dict) -> RunRecord:
    ms = int(round(seconds * 1000))
    rec = RunRecord(instance, algorithm, mode, status, ms,
                    tau=format_tau(opts.get("tau")),
                    alpha="" if opts.get("alpha") is None else str(opts["alpha"]))
    if status == "timeout":
        rec.wall_ms = max(ms, int(timeout * 1000))
        rec.note = str(payload)
    elif status == "error":
        rec.note = str(payload)
    else:
        res: SolveResult = payload
        rec.outcome = "yes" if res.hamiltonian else "no"
        rec.mode = res.mode
        rec.peak_table = res.peak_table
        rec.decision_calls = res.decision_calls
        rec.seed = "" if res.seed is None else str(res.seed)
        rec.width = res.width
        rec.note = res.note
        if res.policy:
            rec.tau = format_tau(res.policy.get("tau"))
            rec.alpha = str(res.policy.get("alpha"))
    rec.note = " ".join(rec.note.split())
    return rec


# --- CSV -------------------------------------------------------------------------------


class CsvSink:
    """Serialized CSV writer; each row is written and flushed under one lock."""

    def __init__(self, fh: Optional[TextIO], columns: list, version: str):
        self.fh = fh
        self.columns = columns
        self.lock = threading.Lock()
        if fh is not None:
            fh.write(f"# {version}\n")
            fh.write(",".join(columns) + "\n")
            fh.flush()

    def _line(self, values: list) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(values)
        return buf.getvalue()

    def row(self, values: list):
        if self.fh is None:
            return
        line = self._line(values)
        with self.lock:
            self.fh.write(line)
            self.fh.flush()

    def comment(self, text: str):
        if self.fh is None:
            return
        with self.lock:
            for line in text.splitlines():
                self.fh.write(f"# {line}\n")
            self.fh.flush()


def record_row(rec: RunRecord) -> list:
    return [getattr(rec, name) for name in RECORD_FIELDS]


def read_records(text: str) -> list[RunRecord]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        for key in ("wall_ms", "peak_table", "decision_calls", "width"):
            row[key] = int(row[key])
        out.append(RunRecord(**row))
    return out


# --- bench -------------------------------------------------------------------------------


def find_instances(suite: str) -> list[tuple[str, str, Optional[str]]]:
    """(name, graph path, td path or None) for every graph file in ``suite``."""
    out = []
    for entry in sorted(os.listdir(suite)):
        stem, ext = os.path.splitext(entry)
        if ext not in GRAPH_SUFFIXES:
            continue
        td = os.path.join(suite, stem + ".td")
        out.append((stem, os.path.join(suite, entry), td if os.path.exists(td) else None))
    return out


def _instance_width(graph_path: str, td_path: Optional[str]) -> int:
    try:
        g = read_graph_file(graph_path)
        td = read_td_file(td_path) if td_path else None
        return prepare(g, td).width
    except Exception:
        return -1


def run_suite(instances: list, algorithms: Iterable[str], timeout: Optional[float] = None,
              mode: str = "auto", seed: Optional[int] = None, sink: Optional[CsvSink] = None,
              workers: Optional[int] = None, **opts) -> list[RunRecord]:
    algorithms = [canonical_algorithm(a) for a in algorithms]
    workers = workers or worker_count()
    jobs = []
    for name, gpath, tpath in instances:
        limit = timeout
        if limit is None:
            limit = default_timeout(_instance_width(gpath, tpath))
        for algo in algorithms:
            jobs.append((name, gpath, tpath, algo, limit))

    def run(job) -> RunRecord:
        name, gpath, tpath, algo, limit = job
        kw = dict(opts, algorithm=algo, mode=mode, seed=seed)
        status, payload, secs = run_timed(gpath, tpath, limit, **kw)
        rec = record_from(name, algo, mode, status, payload, secs, limit, kw)
        if sink is not None:
            sink.row(record_row(rec))
        return rec

    if workers == 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


def disagreements(records: list[RunRecord]) -> dict:
    """instance -> {algorithm: outcome} for instances with conflicting answers."""
    by_inst: dict = {}
    for r in records:
        if r.solved:
            by_inst.setdefault(r.instance, {})[r.algorithm] = r.outcome
    return {k: v for k, v in by_inst.items() if len(set(v.values())) > 1}


def common_totals(records: list[RunRecord]) -> dict:
    """Per-algorithm total milliseconds over instances solved by every algorithm."""
    algos = sorted({r.algorithm for r in records})
    by_inst: dict = {}
    for r in records:
        by_inst.setdefault(r.instance, {})[r.algorithm] = r
    common = [inst for inst, rs in by_inst.items()
              if all(a in rs and rs[a].solved for a in algos)]
    totals = {a: sum(by_inst[i][a].wall_ms for i in common) for a in algos}
    solved = {a: sum(1 for rs in by_inst.values() if a in rs and rs[a].solved) for a in algos}
    return {"common_instances": len(common), "total_ms": totals, "solved": solved}


def summary_text(records: list[RunRecord]) -> str:
    t = common_totals(records)
    lines = [f"commonly solved instances: {t['common_instances']}"]
    for a, ms in t["total_ms"].items():
        lines.append(f"total {a}: {ms} ms over common subset, {t['solved'][a]} solved")
    return "\n".join(lines)


def bench(suite: str, algorithms: Iterable[str], fh: Optional[TextIO] = None, **kw) -> list:
    sink = CsvSink(fh, RECORD_FIELDS, CSV_VERSION)
    records = run_suite(find_instances(suite), algorithms, sink=sink, **kw)
    sink.comment(summary_text(records))
    bad = disagreements(records)
    if bad:
        sink.comment(f"DISAGREEMENT on {len(bad)} instance(s)")
        raise BenchDisagreement(f"algorithms disagree on {sorted(bad)}: {bad}")
    return records


# --- tuning -------------------------------------------------------------------------------

TUNE_FIELDS = ["sweep", "algorithm", "ell", "value", "total_ms", "solved", "timeouts",
               "consistent"]


def tune(suite: str, sweep: str = "tau", grid=None, fh: Optional[TextIO] = None,
         timeout: Optional[float] = None, **kw) -> list[dict]:
    """Sweep thresholds.  ``tau``: one size at a time, other sizes at their
    defaults, the per-size rule forced on; ``alpha``: the alpha rule forced on."""
    if sweep not in ("tau", "alpha"):
        raise ValueError(f"unknown sweep {sweep!r}")
    instances = find_instances(suite)
    if sweep == "tau":
        grid = grid or TAU_GRID
        points = [(ell, v, {"tau": {ell: v}, "width_switch": 1 << 30})
                  for ell in sorted(grid) for v in grid[ell]]
    else:
        grid = grid or ALPHA_GRID
        points = [("", a, {"alpha": a, "width_switch": -1}) for a in grid]
    sink = CsvSink(fh, TUNE_FIELDS, "hamtw-tune v1")
    answers: dict = {}
    rows = []
    for ell, value, opts in points:
        for algo in RANK_ALGORITHMS:
            recs = run_suite(instances, [algo], timeout=timeout, **dict(kw, **opts))
            consistent = True
            for r in recs:
                if r.solved:
                    prev = answers.setdefault(r.instance, r.outcome)
                    consistent &= prev == r.outcome
            row = {"sweep": sweep, "algorithm": algo, "ell": ell, "value": value,
                   "total_ms": sum(r.wall_ms for r in recs if r.solved),
                   "solved": sum(r.solved for r in recs),
                   "timeouts": sum(r.outcome == "timeout" for r in recs),
                   "consistent": consistent}
            sink.row([row[k] for k in TUNE_FIELDS])
            rows.append(row)
    if not all(r["consistent"] for r in rows):
        raise BenchDisagreement("answers changed across tuning grid points")
    return rows


# --- stats -------------------------------------------------------------------------------

STATS_FIELDS = ["instance", "n", "m", "min_deg", "avg_deg", "max_deg", "girth", "diameter",
                "width", "error"]


def stats_rows(suite: str, fh: Optional[TextIO] = None) -> list[dict]:
    sink = CsvSink(fh, STATS_FIELDS, STATS_VERSION)
    rows = []
    for name, gpath, tpath in find_instances(suite):
        row = dict.fromkeys(STATS_FIELDS, "")
        row["instance"] = name
        try:
            g = read_graph_file(gpath)
            s = graph_stats(g)
            row.update(n=s.n, m=s.m, min_deg=s.min_deg, avg_deg=f"{s.avg_deg:.4g}",
                       max_deg=s.max_deg, girth=s.girth, diameter=s.diameter)
            if tpath:
                row["width"] = read_td_file(tpath).width
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        sink.row([row[k] for k in STATS_FIELDS])
        rows.append(row)
    return rows
