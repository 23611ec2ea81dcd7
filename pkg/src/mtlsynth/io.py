"""Configuration loading and result persistence (CSV, JSON, SVG, LP)."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .synthesis import AgentConfig, ConfigError, MonteCarloResult, RunTrace, ScenarioConfig

SCHEMA_VERSION = 1


def _schema(name: str) -> dict:
    return json.loads(resources.files("mtlsynth.data").joinpath(name).read_text())


def config_schema() -> dict:
    return _schema("config.schema.json")


def summary_schema() -> dict:
    return _schema("summary.schema.json")


def bundled_scenario_path() -> Path:
    return Path(str(resources.files("mtlsynth.data").joinpath("scenario_patrol.json")))


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of the JSON element at ``path``."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    pos = 0
    for key in keys:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if not m:
            break
        pos = m.start()
    return text.count("\n", 0, pos) + 1 if pos else None


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        line = _line_of(text, list(err.absolute_path))
        loc = f"{source}:{line}" if line else source
        raise ConfigError(f"{loc}: {where}: {err.message}")
    return config_from_dict(doc)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


def _tuple2(rows):
    return None if rows is None else tuple(tuple(float(v) for v in r) for r in rows)


def config_from_dict(doc: dict) -> ScenarioConfig:
    agents = []
    for a in doc["agents"]:
        mdl, pv = a["model"], a["privacy"]
        agents.append(AgentConfig(
            name=a["name"], x0=tuple(float(v) for v in a["x0"]),
            epsilon=float(pv["epsilon"]), delta=float(pv["delta"]), nu=float(pv.get("nu", 1.0)),
            kind=mdl["kind"], b=float(mdl.get("b", 0.01)),
            A=_tuple2(mdl.get("A")), B=_tuple2(mdl.get("B")), Upsilon=_tuple2(mdl.get("Upsilon")),
            C=_tuple2(mdl.get("C")), K=_tuple2(mdl.get("K"))))
    timing, prob, inp = doc["timing"], doc["probability"], doc["inputs"]
    solver = doc.get("solver", {})
    cert = doc.get("certificate", {})
    box = doc.get("privacy_box")
    noise = doc.get("noise", {})
    ws = doc.get("workspace")
    return ScenarioConfig(
        agents=tuple(agents), predicates=dict(doc["predicates"]), formula=doc["formula"],
        T=int(timing["T"]), T_max=int(timing["T_max"]), dt=float(timing.get("dt", 1.0)),
        gamma=float(prob["gamma"]), eta=float(prob["eta"]), chi=float(prob["chi"]),
        u_min=float(inp["u_min"]), u_max=float(inp["u_max"]), seed=int(doc.get("seed", 0)),
        epsilon_range=tuple(box["epsilon"]) if box else None,
        delta_range=tuple(box["delta"]) if box else None,
        privacy_enabled=bool(noise.get("privacy", True)),
        process_noise=bool(noise.get("process", True)),
        backend=solver.get("backend", "highs"), max_nodes=int(solver.get("max_nodes", 100_000)),
        time_limit=float(solver.get("time_limit", 120.0)),
        encoding=solver.get("encoding", "threshold"), big_m=solver.get("big_m"),
        mu=cert.get("mu"), stabilize_margin=float(cert.get("stabilize_margin", 0.25)),
        beta_safety=float(cert.get("beta_safety", 1e-6)),
        workspace_lo=tuple(ws["lo"]) if ws else None, workspace_hi=tuple(ws["hi"]) if ws else None)


# ---------------------------------------------------------------------------
# trace table


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_csv(trace: RunTrace) -> str:
    """One row per (step, agent): state, estimate, privatized output, input."""
    n_i = max(trace.state_offsets[i + 1] - trace.state_offsets[i]
              for i in range(len(trace.agent_names)))
    q_i = max(trace.output_offsets[i + 1] - trace.output_offsets[i]
              for i in range(len(trace.agent_names)))
    m_i = max(trace.input_offsets[i + 1] - trace.input_offsets[i]
              for i in range(len(trace.agent_names)))
    header = (["step", "t", "agent"] + [f"state{j}" for j in range(n_i)]
              + [f"estimate{j}" for j in range(n_i)] + [f"output_priv{j}" for j in range(q_i)]
              + [f"input{j}" for j in range(m_i)])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    S = trace.states.shape[0]
    for k in range(S):
        for a, name in enumerate(trace.agent_names):
            s = slice(trace.state_offsets[a], trace.state_offsets[a + 1])
            o = slice(trace.output_offsets[a], trace.output_offsets[a + 1])
            u = slice(trace.input_offsets[a], trace.input_offsets[a + 1])
            row = [str(k), _fmt(k * trace.dt), name]
            row += _pad([_fmt(v) for v in trace.states[k, s]], n_i)
            row += _pad([_fmt(v) for v in trace.estimates[k, s]], n_i)
            row += _pad([_fmt(v) for v in trace.outputs[k, o]], q_i)
            ins = trace.inputs[k, u] if k < trace.inputs.shape[0] else []
            row += _pad([_fmt(v) for v in ins], m_i)
            w.writerow(row)
    return buf.getvalue()


def _pad(vals: list[str], n: int) -> list[str]:
    return vals + [""] * (n - len(vals))


def read_trace_states(path_or_text, from_text: bool = False) -> np.ndarray:
    """Aggregate true states ``(steps, n)`` from a trace table.

    Agents are concatenated in order of first appearance, which matches the
    aggregation order used when the table was written.
    """
    text = path_or_text if from_text else Path(path_or_text).read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("trace table has no data rows")
    cols = [c for c in rows[0].keys() if re.fullmatch(r"state\d+", c or "")]
    if not cols:
        raise ValueError("trace table has no state columns")
    cols.sort(key=lambda c: int(c[5:]))
    agents = list(dict.fromkeys(r["agent"] for r in rows))
    steps = sorted({int(r["step"]) for r in rows})
    table: dict[tuple[int, str], list[float]] = {}
    for r in rows:
        vals = [float(r[c]) for c in cols if r[c] not in ("", None)]
        table[(int(r["step"]), r["agent"])] = vals
    out = []
    for k in steps:
        out.append(np.concatenate([table[(k, a)] for a in agents]))
    return np.array(out)


# ---------------------------------------------------------------------------
# summaries


def seed_streams(n_agents: int) -> list[str]:
    return [f"agent{a}/{purpose}" for a in range(n_agents) for purpose in ("process", "privacy")]


def synth_summary(trace: RunTrace, beta: float, beta_hat: float) -> dict:
    s = trace.summary()
    return {"schema": SCHEMA_VERSION, "command": "synth", "seed": trace.seed,
            "seeds": {"master": trace.seed, "streams": seed_streams(len(trace.agent_names))},
            "beta": beta, "beta_hat": beta_hat, "satisfied": s["satisfied"],
            "robustness": s["robustness"], "objective": s["objective"],
            "degraded": s["degraded"], "replans": s["replans"],
            "plans": [p.to_dict() for p in trace.plans]}


def montecarlo_summary(res: MonteCarloResult, seed: int, n_agents: int, beta: float,
                       beta_hat: float) -> dict:
    d = res.to_dict()
    d["robustness_values"] = [r if math.isfinite(r) else str(r) for r in res.robustness]
    d["episode_satisfied"] = res.satisfied
    d["episode_seeds"] = d.pop("seeds")
    return {"schema": SCHEMA_VERSION, "command": "montecarlo", "seed": seed,
            "seeds": {"master": seed, "streams": seed_streams(n_agents)},
            "beta": beta, "beta_hat": beta_hat, **d}


def validate_summary(doc: dict):
    jsonschema.validate(doc, summary_schema())


def dump_json(doc, path):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def montecarlo_csv(res: MonteCarloResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["episode", "seed", "satisfied", "robustness", "certified"])
    for i, (s, sat, rob, cert) in enumerate(zip(res.seeds, res.satisfied, res.robustness,
                                                res.certified)):
        w.writerow([i, s, int(sat), _fmt(rob), int(cert)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# plots


_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def svg_lines(series: list[tuple[str, np.ndarray, np.ndarray]], title: str,
              xlabel: str = "t", ylabel: str = "", width: int = 640, height: int = 360,
              step: bool = False) -> str:
    """Polyline plot; ``step=True`` draws zero-order-hold staircases."""
    pad_l, pad_r, pad_t, pad_b = 60, 120, 30, 40
    xs = np.concatenate([s[1] for s in series]) if series else np.zeros(1)
    ys = np.concatenate([s[2] for s in series]) if series else np.zeros(1)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    W, H = width - pad_l - pad_r, height - pad_t - pad_b

    def px(x):
        return pad_l + (x - x0) / (x1 - x0) * W

    def py(y):
        return pad_t + (1.0 - (y - y0) / (y1 - y0)) * H

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
           f'<rect x="{pad_l}" y="{pad_t}" width="{W}" height="{H}" fill="none" stroke="black"/>',
           f'<text x="{pad_l + W / 2:.1f}" y="{height - 8}" text-anchor="middle" '
           f'font-size="12">{xlabel}</text>',
           f'<text x="14" y="{pad_t + H / 2:.1f}" font-size="12" '
           f'transform="rotate(-90 14 {pad_t + H / 2:.1f})" text-anchor="middle">{ylabel}</text>']
    for val, anchor in ((y0, "end"), (y1, "end")):
        out.append(f'<text x="{pad_l - 4}" y="{py(val) + 4:.1f}" text-anchor="{anchor}" '
                   f'font-size="10">{val:.3g}</text>')
    for val in (x0, x1):
        out.append(f'<text x="{px(val):.1f}" y="{pad_t + H + 14}" text-anchor="middle" '
                   f'font-size="10">{val:.3g}</text>')
    for i, (label, x, y) in enumerate(series):
        if step and len(x) > 1:
            pts = []
            for k in range(len(x) - 1):
                pts += [(x[k], y[k]), (x[k + 1], y[k])]
            pts.append((x[-1], y[-1]))
        else:
            pts = list(zip(x, y))
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = pad_t + 14 * (i + 1)
        out.append(f'<line x1="{pad_l + W + 10}" y1="{ly - 4}" x2="{pad_l + W + 30}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{pad_l + W + 34}" y="{ly}" font-size="11">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def input_plot(trace: RunTrace) -> str:
    t = np.arange(trace.inputs.shape[0] + 1) * trace.dt
    series = []
    for a, name in enumerate(trace.agent_names):
        for j in range(trace.input_offsets[a], trace.input_offsets[a + 1]):
            vals = trace.inputs[:, j]
            series.append((f"{name} u{j - trace.input_offsets[a] + 1}", t,
                           np.append(vals, vals[-1] if vals.size else 0.0)))
    return svg_lines(series, "applied inputs", "t", "u", step=True)


def position_plot(trace: RunTrace) -> str:
    series = []
    for a, name in enumerate(trace.agent_names):
        s = trace.state_offsets[a]
        if trace.state_offsets[a + 1] - s >= 2:
            series.append((f"{name} true", trace.states[:, s], trace.states[:, s + 1]))
            series.append((f"{name} est.", trace.estimates[:, s], trace.estimates[:, s + 1]))
    return svg_lines(series, "planar positions", "x", "y")


def histogram_plot(res: MonteCarloResult) -> str:
    counts, edges = res.to_dict()["histogram"]["counts"], res.to_dict()["histogram"]["edges"]
    if not counts:
        return svg_lines([], "robustness histogram")
    xs, ys = [], []
    for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
        xs += [lo, lo, hi, hi]
        ys += [0, c, c, 0]
    return svg_lines([("episodes", np.array(xs), np.array(ys, dtype=float))],
                     "robustness of the true trajectory", "robustness", "count")
