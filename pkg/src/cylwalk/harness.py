"""Seeded, resumable experiment driver.

Each experiment is pinned by an ExperimentConfig; replica r of an
experiment always consumes stream (seed, r), so a re-run with the same
config produces byte-identical CSV output and parallel execution schemes
cannot change results.  Records are emitted as CSV (deterministic), JSON
(same content plus a timestamp), and optional SVG plots.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import stats as sstats

from . import __version__, crit, plots, returnprob, vacant
from .geometry import core_range, offsets_count, seg_sites
from .walk import (TrajectoryStore, WalkConfig, ledger_from_state,
                   local_time_counts_from_levels)

EXPERIMENTS = ("disconnect", "scaling", "excursions", "events", "expbound",
               "localtime", "qtable", "thresholds", "peierls")


class ConfigError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    d: int = 1
    n_values: list[int] = field(default_factory=lambda: [8])
    replicas: int = 50
    seed: int = 1
    cadence: int | None = None
    budget: int = 10 ** 9
    out_dir: str = "results"
    formats: list[str] = field(default_factory=lambda: ["csv", "json"])
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.kind!r}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        for fmt in self.formats:
            if fmt not in ("csv", "json", "svg"):
                raise ConfigError(f"unknown output format {fmt!r}")
        if self.kind not in ("qtable", "thresholds", "peierls"):
            if self.d < 1:
                raise ConfigError("d must be >= 1")
            if not self.n_values or any(n < 2 for n in self.n_values):
                raise ConfigError("n_values must all be >= 2")

    def config_hash(self) -> str:
        """Hash of the result-determining fields (output location and
        formats do not change what is computed)."""
        doc = asdict(self)
        doc.pop("out_dir")
        doc.pop("formats")
        blob = json.dumps(doc, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


# -- config files (INI: key/value with nested sections) -------------------------

_INT_KEYS = {"d", "replicas", "seed", "cadence", "budget"}


def _parse_value(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if " " in text or "," in text:
        items = [t for t in text.replace(",", " ").split() if t]
        return [_parse_value(t) for t in items]
    return text


def load_config(path: str, kind: str | None = None) -> ExperimentConfig:
    """Read an INI config: [experiment] and [output] for the common keys,
    one section per experiment kind for its parameters."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    exp = dict(cp.items("experiment")) if cp.has_section("experiment") else {}
    out = dict(cp.items("output")) if cp.has_section("output") else {}
    kind = kind or exp.pop("kind", None)
    if kind is None:
        raise ConfigError("experiment kind missing (section [experiment], key kind)")
    kwargs: dict = {"kind": kind}
    for key, raw in exp.items():
        if key == "kind":
            continue
        val = _parse_value(raw)
        if key == "n_values":
            kwargs["n_values"] = val if isinstance(val, list) else [val]
        elif key in _INT_KEYS:
            kwargs[key] = int(val)
        else:
            raise ConfigError(f"unknown [experiment] key {key!r}")
    if "dir" in out:
        kwargs["out_dir"] = out.pop("dir")
    if "format" in out:
        val = _parse_value(out.pop("format"))
        kwargs["formats"] = val if isinstance(val, list) else [val]
    if out:
        raise ConfigError(f"unknown [output] keys {sorted(out)}")
    params = {}
    if cp.has_section(kind):
        for key, raw in cp.items(kind):
            params[key] = _parse_value(raw)
    kwargs["params"] = params
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# -- result records ---------------------------------------------------------------

RECORD_SCHEMA = {
    "type": "object",
    "required": ["experiment", "version", "config_hash", "params", "columns",
                 "rows", "summary", "censored"],
    "properties": {
        "experiment": {"type": "string"},
        "version": {"type": "string"},
        "config_hash": {"type": "string"},
        "params": {"type": "object"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array"},
        "summary": {"type": "object"},
        "censored": {"type": "integer"},
        "created_at": {"type": "string"},
    },
}

_JSON_TYPES = {"string": str, "object": dict, "array": list, "integer": int}


def validate_record_dict(doc: dict) -> None:
    """Check a serialized record against RECORD_SCHEMA (hand-rolled, the
    schema stays simple enough not to need a validator dependency)."""
    for key in RECORD_SCHEMA["required"]:
        if key not in doc:
            raise ValueError(f"record missing required field {key!r}")
    for key, spec in RECORD_SCHEMA["properties"].items():
        if key in doc:
            expected = _JSON_TYPES[spec["type"]]
            if not isinstance(doc[key], expected):
                raise ValueError(f"record field {key!r} is not {spec['type']}")
    if any(not isinstance(c, str) for c in doc["columns"]):
        raise ValueError("columns must be strings")


@dataclass
class ResultRecord:
    experiment: str
    params: dict
    columns: list[str]
    rows: list[list]
    summary: dict
    censored: int
    config_hash: str
    version: str = __version__
    analysis: list | None = None  # per-event JSON records, when applicable

    def to_dict(self, timestamp: bool = False) -> dict:
        doc = {
            "experiment": self.experiment,
            "version": self.version,
            "config_hash": self.config_hash,
            "params": self.params,
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary,
            "censored": self.censored,
        }
        if timestamp:
            doc["created_at"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        validate_record_dict(doc)
        return doc


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_cell(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def record_to_csv(rec: ResultRecord) -> str:
    lines = [f"# experiment={rec.experiment}",
             f"# version={rec.version}",
             f"# config_hash={rec.config_hash}",
             ",".join(rec.columns)]
    for row in rec.rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def load_csv(path: str):
    """Parse a record CSV back into (meta, columns, rows); repr-formatted
    floats round-trip bit-exactly."""
    meta = {}
    columns = None
    rows = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append([_parse_cell(c) for c in line.split(",")])
    return meta, columns, rows


def emit(rec: ResultRecord, cfg: ExperimentConfig, svg_series=None) -> list[str]:
    """Write the record in each configured format; returns file paths."""
    written = []
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        stem = os.path.join(cfg.out_dir, f"{rec.experiment}_{rec.config_hash}")
        if "csv" in cfg.formats:
            path = stem + ".csv"
            with open(path, "w", encoding="utf-8") as fp:
                fp.write(record_to_csv(rec))
            written.append(path)
        if "json" in cfg.formats:
            path = stem + ".json"
            with open(path, "w", encoding="utf-8") as fp:
                json.dump(rec.to_dict(timestamp=True), fp, indent=1,
                          sort_keys=True)
                fp.write("\n")
            written.append(path)
            if rec.analysis:
                path = stem + "_analysis.jsonl"
                with open(path, "w", encoding="utf-8") as fp:
                    vacant.write_analysis_records(rec.analysis, fp)
                written.append(path)
        if "svg" in cfg.formats and svg_series:
            path = stem + ".svg"
            title, xlabel, ylabel, series = svg_series
            plots.svg_line_plot(series, path, title=title, xlabel=xlabel,
                                ylabel=ylabel)
            written.append(path)
    except OSError as exc:
        raise IOError(f"emit failed for {cfg.out_dir}: {exc}") from exc
    return written


# -- summary statistics ------------------------------------------------------------

def summarize(values, seed: int = 0, n_boot: int = 500) -> dict:
    """Median/quantile summary with a bootstrap CI for the median."""
    arr = np.asarray([v for v in values if v is not None], dtype=float)
    if arr.size == 0:
        return {"count": 0}
    qs = np.quantile(arr, [0.1, 0.25, 0.5, 0.75, 0.9])
    out = {
        "count": int(arr.size),
        "mean": float(arr.mean()),
        "q10": float(qs[0]), "q25": float(qs[1]), "median": float(qs[2]),
        "q75": float(qs[3]), "q90": float(qs[4]),
    }
    if arr.size >= 3:
        rng = np.random.default_rng(seed ^ 0xB00757AB)
        meds = np.median(rng.choice(arr, size=(n_boot, arr.size)), axis=1)
        out["median_ci_low"] = float(np.quantile(meds, 0.025))
        out["median_ci_high"] = float(np.quantile(meds, 0.975))
    return out


def fit_loglog(ns, medians, seed: int = 0, samples_by_n=None, n_boot: int = 500):
    """Least-squares slope of log(median) on log(N), with a bootstrap CI
    over replicas when the per-N samples are given."""
    lx = np.log(np.asarray(ns, dtype=float))
    ly = np.log(np.asarray(medians, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    out = {"exponent": float(slope), "intercept": float(intercept)}
    if samples_by_n:
        rng = np.random.default_rng(seed ^ 0x5C41)
        slopes = []
        for _ in range(n_boot):
            meds = []
            for samp in samples_by_n:
                arr = np.asarray(samp, dtype=float)
                meds.append(np.median(rng.choice(arr, size=arr.size)))
            slopes.append(np.polyfit(lx, np.log(meds), 1)[0])
        out["exponent_ci_low"] = float(np.quantile(slopes, 0.025))
        out["exponent_ci_high"] = float(np.quantile(slopes, 0.975))
    return out


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov sup-distance."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    allv = np.concatenate([a, b])
    ca = np.searchsorted(a, allv, side="right") / a.size
    cb = np.searchsorted(b, allv, side="right") / b.size
    return float(np.abs(ca - cb).max())


# -- runners -----------------------------------------------------------------------

def _estimate_disconnect_steps(d: int, N: int) -> int:
    # generous desk-scale envelope for a typical disconnection run
    return int(60 * N ** (2 * d) * max(1.0, math.log(N)))


def run_disconnect(cfg: ExperimentConfig) -> ResultRecord:
    """Disconnection-time distribution per N, scaling fit across N."""
    est = max(_estimate_disconnect_steps(cfg.d, n) for n in cfg.n_values)
    if est > cfg.budget:
        raise BudgetError(f"estimated {est} steps/replica exceeds budget "
                          f"{cfg.budget}")
    growth = float(cfg.params.get("growth", 2.0))
    rows = []
    censored = 0
    samples_by_n = []
    for N in cfg.n_values:
        vals = []
        for r in range(cfg.replicas):
            wc = WalkConfig(cfg.d, N, cfg.seed, step_cap=cfg.budget, replica=r)
            res = vacant.disconnection_time(wc, cadence=cfg.cadence,
                                            growth=growth)
            if res.censored:
                censored += 1
                rows.append([N, r, None, res.steps_run, True])
            else:
                vals.append(res.time)
                rows.append([N, r, res.time, res.steps_run, False])
        samples_by_n.append(vals)
    summary: dict = {"per_N": {}}
    for N, vals in zip(cfg.n_values, samples_by_n):
        s = summarize(vals, seed=cfg.seed)
        ratios = [N ** (2 * cfg.d) / v for v in vals if v]
        s["scaled_ratio"] = summarize(ratios, seed=cfg.seed)
        summary["per_N"][str(N)] = s
    if len(cfg.n_values) >= 2 and all(samples_by_n):
        medians = [float(np.median(v)) for v in samples_by_n]
        summary["scaling"] = fit_loglog(cfg.n_values, medians, seed=cfg.seed,
                                        samples_by_n=samples_by_n)
        dists = {}
        for (n1, s1), (n2, s2) in zip(
                list(zip(cfg.n_values, samples_by_n))[:-1],
                list(zip(cfg.n_values, samples_by_n))[1:]):
            r1 = [n1 ** (2 * cfg.d) / v for v in s1]
            r2 = [n2 ** (2 * cfg.d) / v for v in s2]
            dists[f"{n1}:{n2}"] = ks_distance(r1, r2)
        summary["cdf_sup_distance"] = dists
    return ResultRecord("scaling" if cfg.kind == "scaling" else "disconnect",
                        dict(cfg.params, d=cfg.d, n_values=cfg.n_values,
                             replicas=cfg.replicas, seed=cfg.seed),
                        ["N", "replica", "T_N", "steps_run", "censored"],
                        rows, summary, censored, cfg.config_hash())


def run_excursions(cfg: ExperimentConfig) -> ResultRecord:
    """Excursion-budget events over a gamma grid, with the level local-time
    supremum comparison as a side record."""
    N = cfg.n_values[0]
    d = cfg.d
    u = float(cfg.params.get("u", 0.5))
    gammas = sorted(cfg.params.get("gamma_grid", [0.05, 0.1, 0.2, 0.4, 0.8]))
    mfac = float(cfg.params.get("m_factor", 4.0))
    t_target = max(1, math.floor(u * N ** (d - 1)))
    horizon = math.ceil(gammas[-1] * N ** (2 * d))
    if horizon > cfg.budget:
        raise BudgetError(f"horizon {horizon} exceeds budget {cfg.budget}")
    n2d = N ** (2 * d)
    rows = []
    event_counts = {g: 0 for g in gammas}
    sup_ok_counts = {g: 0 for g in gammas}
    sup_obs_counts = {g: 0 for g in gammas}
    for r in range(cfg.replicas):
        wc = WalkConfig(d, N, cfg.seed, step_cap=horizon + 1, replica=r)
        traj = TrajectoryStore(wc, keep_path=False, record=False,
                               track_levels=True, level_target=t_target,
                               track_tau=True)
        traj.run(horizon)
        st = traj.state
        dtimes = list(st.lev_dtime.values())
        for g in gammas:
            cut = g * n2d
            ok = all(dt > cut for dt in dtimes)
            event_counts[g] += ok
            rows.append([r, g, ok, len(dtimes)])
            # side check: sup of level local time at the tau horizon
            ntau = math.floor(mfac * g * N ** (2 * d - 2))
            if len(st.tau_levels) > ntau:
                llt = local_time_counts_from_levels(st.tau_levels, ntau)
                good = llt.sup() < 0.5 * math.floor(u * N ** (d - 1))
                sup_obs_counts[g] += 1
                sup_ok_counts[g] += good
    probs = [event_counts[g] / cfg.replicas for g in gammas]
    if any(p2 > p1 + 1e-12 for p1, p2 in zip(probs, probs[1:])):
        raise AssertionError("budget event must shrink as gamma grows")
    summary = {
        "gamma_grid": gammas,
        "probability": {str(g): event_counts[g] / cfg.replicas for g in gammas},
        "sup_localtime_ok": {
            str(g): (sup_ok_counts[g] / sup_obs_counts[g]
                     if sup_obs_counts[g] else None) for g in gammas},
        "u": u, "t_target": t_target, "horizon": horizon,
    }
    return ResultRecord("excursions",
                        dict(cfg.params, d=d, N=N, replicas=cfg.replicas,
                             seed=cfg.seed),
                        ["replica", "gamma", "event", "levels_completed"],
                        rows, summary, 0, cfg.config_hash())


def run_events(cfg: ExperimentConfig) -> ResultRecord:
    """Vacant-set events (segment census, planar components, giant frame,
    linkage) over a grid of excursion rates u at level 0."""
    N = cfg.n_values[0]
    d = cfg.d
    if d < 3:
        raise ConfigError("vacant-set events need d >= 3")
    us = sorted(cfg.params.get("u_grid", [0.05, 0.1, 0.2]))
    K = cfg.params.get("k_factor")
    if K is None:
        rep = crit.rho_cached(d) if d >= 4 else None
        if rep is not None and rep.holds:
            K = rep.c0
        else:
            raise ConfigError("threshold condition fails at this d; "
                              "set k_factor explicitly (diagnostic run)")
    K = float(K)
    at_boundaries = bool(cfg.params.get("at_boundaries", True))
    plane_samples = cfg.params.get("plane_samples")
    j = int(cfg.params.get("j", 0))
    t_max = max(1, math.floor(us[-1] * N ** (d - 1)))
    est = 40 * t_max * N * N * (d + 1)
    if est > cfg.budget:
        raise BudgetError(f"estimated {est} steps/replica exceeds budget "
                          f"{cfg.budget}")
    L = seg_sites(K, N)
    if L >= N // 2:
        raise ConfigError(f"segment length {L} reaches the torus diameter; "
                          "lower k_factor or raise N")
    pad = offsets_count(N) + L + 2
    clo, chi = core_range(j, N)
    rows = []
    censored = 0
    counts = {u: {"segments": 0, "components": 0, "giant": 0, "obs": 0}
              for u in us}
    implication_failures = 0
    analysis: list = []
    for r in range(cfg.replicas):
        wc = WalkConfig(d, N, cfg.seed, step_cap=cfg.budget, replica=r,
                        start="uniform_block")
        traj = TrajectoryStore(wc, keep_path=False, record=True,
                               rec_window=(clo - pad, chi + pad),
                               excursion_level=j, excursion_target=t_max)
        reason = traj.run(cfg.budget)
        st = traj.state
        led = ledger_from_state(traj)
        for u in us:
            t_u = math.floor(u * N ** (d - 1))
            n_u = led.departure_time(t_u)
            if n_u is None:
                censored += 1
                rows.append([r, u, None, None, None, None, None, True])
                for name in ("segments", "components", "giant"):
                    analysis.append(vacant.analysis_record(
                        cfg.seed, d, N, j, u, name, None, censored=True))
                continue
            ok_v, _ = vacant.segment_census(st.visited, d, N, j, K, n=n_u)
            ns = ([dep for dep in led.departures if dep <= n_u] or [n_u]) \
                if at_boundaries else [n_u]
            ok_u = vacant.planar_components_event(st.visited, d, N, j, K, ns,
                                                  plane_samples=plane_samples)
            ok_g = ok_v and ok_u
            verdict = vacant.segment_linkage(st.visited, d, N, j, L, n=n_u)
            linked = verdict.lines_ok and verdict.unique_component
            if ok_g and not linked:
                implication_failures += 1
            c = counts[u]
            c["segments"] += ok_v
            c["components"] += ok_u
            c["giant"] += ok_g
            c["obs"] += 1
            rows.append([r, u, ok_v, ok_u, ok_g, verdict.lines_ok,
                         verdict.unique_component, False])
            for name, val in (("segments", ok_v), ("components", ok_u),
                              ("giant", ok_g), ("linkage", linked)):
                analysis.append(vacant.analysis_record(
                    cfg.seed, d, N, j, u, name, bool(val)))
        del traj, st, led
        _ = reason
    summary: dict = {"K": K, "L": L, "u_grid": us,
                     "implication_failures": implication_failures}
    for name in ("segments", "components", "giant"):
        summary[f"P_{name}"] = {
            str(u): (counts[u][name] / counts[u]["obs"]
                     if counts[u]["obs"] else None) for u in us}
    for u in us:
        c = counts[u]
        if c["giant"] > min(c["segments"], c["components"]):
            raise AssertionError("conjunction count exceeded a conjunct")
    return ResultRecord("events",
                        dict(cfg.params, d=d, N=N, replicas=cfg.replicas,
                             seed=cfg.seed, K=K),
                        ["replica", "u", "segments", "components", "giant",
                         "linkage_lines", "linkage_unique", "censored"],
                        rows, summary, censored, cfg.config_hash(),
                        analysis=analysis)


def run_expbound(cfg: ExperimentConfig) -> ResultRecord:
    """Probability that the trace covers nested planar patches, versus
    patch size, against the exponential-decay reference."""
    N = cfg.n_values[0]
    d = cfg.d
    if d < 3:
        raise ConfigError("the exponential bound needs d >= 3")
    u = float(cfg.params.get("u", 0.5))
    s_max = int(cfg.params.get("s_max", 8))
    lam_ref = cfg.params.get("lambda_ref")
    t_target = max(1, math.floor(u * N ** (d - 1)))
    est = 40 * t_target * N * N * (d + 1)
    if est > cfg.budget:
        raise BudgetError(f"estimated {est} steps/replica exceeds budget "
                          f"{cfg.budget}")
    width = max(2, math.ceil(math.sqrt(s_max)))
    patch = [((i % width, i // width) + (0,) * (d - 2), 0)
             for i in range(s_max)]
    j = 0
    rows = []
    censored = 0
    cover_counts = np.zeros(s_max, dtype=np.int64)
    observed = 0
    for r in range(cfg.replicas):
        wc = WalkConfig(d, N, cfg.seed, step_cap=cfg.budget, replica=r,
                        start="uniform_block")
        traj = TrajectoryStore(wc, keep_path=False, record=True,
                               rec_window=(-2, 2),
                               excursion_level=j, excursion_target=t_target)
        traj.run(cfg.budget)
        st = traj.state
        led = ledger_from_state(traj)
        n_fin = led.departure_time(t_target)
        if n_fin is None:
            censored += 1
            continue
        observed += 1
        covered = 0
        for s, (torus, z) in enumerate(patch):
            fh = st.visited.get(st.pack(torus, z))
            if fh is not None and fh <= n_fin:
                covered = s + 1
            else:
                break
        # nested patches: coverage of A_(s+1) implies coverage of A_s
        cover_counts[:covered] += 1
        rows.append([r, covered, n_fin])
    probs = cover_counts / max(observed, 1)
    sizes = np.arange(1, s_max + 1)
    pos = probs > 0
    fit = {}
    if pos.sum() >= 3:
        slope, intercept = np.polyfit(sizes[pos], np.log(probs[pos]), 1)
        fit = {"log_slope": float(slope), "log_intercept": float(intercept)}
    summary = {"u": u, "t_target": t_target,
               "P_cover": {str(s): float(p) for s, p in zip(sizes, probs)},
               "fit": fit, "lambda_ref": lam_ref, "observed": observed}
    return ResultRecord("expbound",
                        dict(cfg.params, d=d, N=N, replicas=cfg.replicas,
                             seed=cfg.seed),
                        ["replica", "max_covered_size", "n_final"],
                        rows, summary, censored, cfg.config_hash())


def _srw_local_times(ks, replicas, seed):
    """Direct simple-random-walk-on-Z local times at the origin (the
    comparison oracle), plus the supremum over sites."""
    rng = np.random.default_rng(seed)
    kmax = max(ks)
    at0 = {k: np.empty(replicas, dtype=np.int64) for k in ks}
    sup = {k: np.empty(replicas, dtype=np.int64) for k in ks}
    chunk = max(1, min(replicas, (1 << 22) // (kmax + 1)))
    done = 0
    while done < replicas:
        m = min(chunk, replicas - done)
        steps = rng.integers(0, 2, size=(m, kmax)).astype(np.int64) * 2 - 1
        pos = np.concatenate([np.zeros((m, 1), dtype=np.int64),
                              np.cumsum(steps, axis=1)], axis=1)
        for k in ks:
            window = pos[:, :k + 1]
            at0[k][done:done + m] = (window == 0).sum(axis=1)
            shifted = window + k
            sup_k = np.empty(m, dtype=np.int64)
            for i in range(m):
                sup_k[i] = np.bincount(shifted[i]).max()
            sup[k][done:done + m] = sup_k
        done += m
    return at0, sup


def run_localtime(cfg: ExperimentConfig) -> ResultRecord:
    """Two-sample comparison of the cylinder's level local time against the
    local time of plain simple random walk on Z."""
    N = cfg.n_values[0]
    d = cfg.d
    ks = sorted(int(k) for k in cfg.params.get("ks", [50, 200, 1000]))
    kmax = ks[-1]
    est = 8 * kmax * N * N * (d + 1)
    if est > cfg.budget:
        raise BudgetError(f"estimated {est} steps/replica exceeds budget "
                          f"{cfg.budget}")
    cyl0 = {k: np.empty(cfg.replicas, dtype=np.int64) for k in ks}
    cylsup = {k: np.empty(cfg.replicas, dtype=np.int64) for k in ks}
    censored = 0
    for r in range(cfg.replicas):
        wc = WalkConfig(d, N, cfg.seed, step_cap=cfg.budget, replica=r)
        traj = TrajectoryStore(wc, keep_path=False, record=False,
                               track_tau=True, tau_target=kmax)
        reason = traj.run(cfg.budget)
        levels = traj.state.tau_levels
        if len(levels) < kmax + 1:
            censored += 1
            for k in ks:
                cyl0[k][r] = -1
                cylsup[k][r] = -1
            continue
        for k in ks:
            llt = local_time_counts_from_levels(levels, k)
            if llt.total() != k + 1:
                raise AssertionError("local-time mass invariant violated")
            cyl0[k][r] = llt.counts.get(0, 0)
            cylsup[k][r] = llt.sup()
        _ = reason
    srw0, srwsup = _srw_local_times(ks, cfg.replicas,
                                    np.random.SeedSequence([cfg.seed, 0xA17]))
    rows = []
    summary: dict = {"ks": ks, "per_k": {}}
    for k in ks:
        a = cyl0[k][cyl0[k] >= 0]
        b = srw0[k]
        ks_res = sstats.ks_2samp(a, b)
        amax = int(max(a.max(), b.max()))
        bins = np.arange(amax + 2)
        ca = np.histogram(a, bins=bins)[0].astype(float)
        cb = np.histogram(b, bins=bins)[0].astype(float)
        pooled = ca + cb
        keep = pooled >= 5
        if keep.sum() < 2:
            chi_p = float("nan")
        else:
            ca2 = np.append(ca[keep], ca[~keep].sum())
            cb2 = np.append(cb[keep], cb[~keep].sum())
            table = np.stack([ca2, cb2])
            table = table[:, table.sum(axis=0) > 0]
            chi_p = float(sstats.chi2_contingency(table)[1])
        sup_res = sstats.ks_2samp(cylsup[k][cylsup[k] >= 0], srwsup[k])
        summary["per_k"][str(k)] = {
            "ks_stat": float(ks_res.statistic), "ks_p": float(ks_res.pvalue),
            "chi2_p": chi_p,
            "sup_ks_p": float(sup_res.pvalue),
            "mean_cylinder": float(a.mean()), "mean_srw": float(b.mean()),
        }
        rows.append([k, float(ks_res.statistic), float(ks_res.pvalue), chi_p,
                     float(sup_res.pvalue)])
    return ResultRecord("localtime",
                        dict(cfg.params, d=d, N=N, replicas=cfg.replicas,
                             seed=cfg.seed),
                        ["k", "ks_stat", "ks_p", "chi2_p", "sup_ks_p"],
                        rows, summary, censored, cfg.config_hash())


def run_qtable(cfg: ExperimentConfig) -> ResultRecord:
    nus = [int(v) for v in cfg.params.get("nu_values", [3, 4, 5, 8, 16, 30])]
    tol = float(cfg.params.get("tol", 1e-6))
    mc_nus = [int(v) for v in cfg.params.get("mc_nu_values", [])]
    horizon = int(cfg.params.get("mc_horizon", 10 ** 5))
    mc_replicas = int(cfg.params.get("mc_replicas", 10 ** 5))
    rows = []
    ests = []
    for nu in nus:
        est = returnprob.q_quadrature(nu, tol)
        ests.append(est)
        rows.append([nu, est.value, est.abs_error, est.method])
    for nu in mc_nus:
        est = returnprob.q_monte_carlo(nu, horizon, mc_replicas, cfg.seed)
        ests.append(est)
        rows.append([nu, est.value, est.abs_error, est.method])
    summary = {"tol": tol}
    return ResultRecord("qtable",
                        dict(cfg.params, seed=cfg.seed),
                        ["nu", "q", "abs_error", "method"],
                        rows, summary, 0, cfg.config_hash())


def run_thresholds(cfg: ExperimentConfig) -> ResultRecord:
    d_lo = int(cfg.params.get("d_lo", 4))
    d_hi = int(cfg.params.get("d_hi", 30))
    tol = float(cfg.params.get("tol", 1e-6))
    reports, minimal = crit.threshold_scan(d_lo, d_hi, tol)
    rows = [[r.d, r.q_value, r.rho, r.rho_err, r.holds, r.lambda0, r.c0]
            for r in reports]
    summary = {"minimal_holding_d": minimal}
    return ResultRecord("thresholds",
                        dict(cfg.params),
                        ["d", "q", "rho", "rho_err", "holds", "lambda0", "c0"],
                        rows, summary, 0, cfg.config_hash())


def run_peierls(cfg: ExperimentConfig) -> ResultRecord:
    n_max = int(cfg.params.get("n_max", 8))
    rows = []
    prev = None
    for n in range(1, n_max + 1):
        a = crit.count_star_saws(n)
        bound = crit.star_saw_bound(n)
        if a > bound:
            raise AssertionError("contour count exceeded the 8*7^(n-1) bound")
        if prev is not None and a > 7 * prev:
            raise AssertionError("contour growth exceeded factor 7")
        rows.append([n, a, bound, a / prev if prev else None])
        prev = a
    return ResultRecord("peierls", dict(cfg.params),
                        ["n", "count", "bound", "growth_ratio"],
                        rows, {"n_max": n_max}, 0, cfg.config_hash())


_RUNNERS = {
    "disconnect": run_disconnect,
    "scaling": run_disconnect,
    "excursions": run_excursions,
    "events": run_events,
    "expbound": run_expbound,
    "localtime": run_localtime,
    "qtable": run_qtable,
    "thresholds": run_thresholds,
    "peierls": run_peierls,
}


def run_experiment(cfg: ExperimentConfig) -> ResultRecord:
    if cfg.kind == "scaling" and len(cfg.n_values) < 2:
        raise ConfigError("scaling needs at least two N values")
    return _RUNNERS[cfg.kind](cfg)
