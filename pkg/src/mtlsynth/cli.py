"""``mtlsynth`` command-line front end.

Exit codes: 0 success (or satisfied episode), 2 unsatisfied episode or
failed validation verdict on a well-formed input, 1 errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import io as rio
from .logic import FormulaError, boolean_sat, parse_formula, predicate_from_dict, robustness
from .milp import export_lp
from .synthesis import (ConfigError, build_plan_model, compile_scenario, monte_carlo,
                        run_episode, validate_problem)

log = logging.getLogger("mtlsynth")

EXIT_OK, EXIT_ERROR, EXIT_UNSAT = 0, 1, 2


def _setup_logging():
    level = os.environ.get("MTLSYNTH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _config_path(args) -> Path:
    return Path(args.config) if args.config else rio.bundled_scenario_path()


def _load(args):
    cfg = rio.load_config(_config_path(args))
    if getattr(args, "seed", None) is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(args) -> int:
    cfg = _load(args)
    sc = compile_scenario(cfg)
    trace = run_episode(sc, cfg.seed)
    out = _out_dir(args)
    (out / "trace.csv").write_text(rio.trace_csv(trace))
    rio.dump_json([p.to_dict() for p in trace.plans], out / "plans.json")
    summary = rio.synth_summary(trace, sc.beta, sc.beta_hat)
    rio.validate_summary(summary)
    rio.dump_json(summary, out / "summary.json")
    (out / "inputs.svg").write_text(rio.input_plot(trace))
    (out / "positions.svg").write_text(rio.position_plot(trace))
    if args.export_lp:
        _write_plan_lps(sc, trace, out)
    print(f"robustness {trace.robustness:.6g}  satisfied {trace.satisfied}  "
          f"replans {len(trace.plans)}  degraded {trace.degraded}")
    print(f"results in {out}")
    return EXIT_OK if trace.satisfied else EXIT_UNSAT


def _write_plan_lps(sc, trace, out: Path):
    from .logic import rewrite
    for i, p in enumerate(trace.plans):
        if p.beta_used is None:
            continue
        hist = trace.estimates[:p.ell + 1]
        phi = rewrite(sc.phi, hist, p.ell) if p.ell > 0 else sc.phi
        model, _, _ = build_plan_model(sc, p.ell, trace.estimates[p.ell], phi, p.beta_used)
        (out / f"plan_{i:03d}.lp").write_text(export_lp(model))


def cmd_montecarlo(args) -> int:
    cfg = _load(args)
    sc = compile_scenario(cfg)
    res = monte_carlo(cfg, args.runs, cfg.seed, args.threads)
    out = _out_dir(args)
    (out / "episodes.csv").write_text(rio.montecarlo_csv(res))
    summary = rio.montecarlo_summary(res, cfg.seed, len(cfg.agents), sc.beta, sc.beta_hat)
    rio.validate_summary(summary)
    rio.dump_json(summary, out / "summary.json")
    (out / "robustness_hist.svg").write_text(rio.histogram_plot(res))
    print(f"rate {res.rate:.4f}  ({sum(res.satisfied)}/{res.runs})  "
          f"{int(res.confidence * 100)}% CI [{res.ci_low:.4f}, {res.ci_high:.4f}]")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = rio.load_config(_config_path(args))
    rep = validate_problem(cfg)
    print(rep.text())
    return EXIT_OK if rep.passed else EXIT_ERROR


def cmd_monitor(args) -> int:
    states = rio.read_trace_states(args.trace)
    if states.shape[0] == 0:
        raise ValueError("trace is empty")
    preds = {}
    if args.config or not args.predicates:
        doc_cfg = rio.load_config(_config_path(args))
        preds = {k: predicate_from_dict(v) for k, v in doc_cfg.predicates.items()}
    if args.predicates:
        import json
        raw = json.loads(Path(args.predicates).read_text())
        preds.update({k: predicate_from_dict(v) for k, v in raw.items()})
    phi = parse_formula(args.formula, preds)
    rho = robustness(phi, states, 0)
    sat = boolean_sat(phi, states, 0)
    print(f"robustness {rho!r}")
    print(f"satisfied {sat}")
    return EXIT_OK if sat else EXIT_UNSAT


def cmd_export_lp(args) -> int:
    cfg = _load(args)
    sc = compile_scenario(cfg)
    model, _, _ = build_plan_model(sc, 0, sc.x0, sc.phi, sc.beta_hat)
    text = export_lp(model)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        out = _out_dir(args)
        (out / "plan_000.lp").write_text(text)
        print(f"wrote {out / 'plan_000.lp'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mtlsynth",
                                description="Private MTL controller synthesis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--config", help="scenario JSON (default: bundled two-agent scenario)")
        if seed:
            sp.add_argument("--seed", type=int, help="master seed (overrides the config)")

    s = sub.add_parser("synth", help="run one receding-horizon episode")
    common(s)
    s.add_argument("--out", default="mtlsynth_out")
    s.add_argument("--export-lp", action="store_true", help="also write every plan as LP text")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("montecarlo", help="satisfaction rate over many episodes")
    common(s)
    s.add_argument("--runs", type=int, default=100)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", default="mtlsynth_mc")
    s.set_defaults(func=cmd_montecarlo)

    s = sub.add_parser("check", help="validate a scenario and its certificate")
    common(s, seed=False)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("monitor", help="evaluate a formula on a trace table")
    s.add_argument("trace", help="trace CSV written by synth")
    s.add_argument("formula", help="formula text")
    s.add_argument("--config", help="take predicate definitions from this scenario")
    s.add_argument("--predicates", help="JSON object mapping names to predicates")
    s.set_defaults(func=cmd_monitor)

    s = sub.add_parser("export-lp", help="write the first planning MILP in LP format")
    common(s)
    s.add_argument("--out", default="-", help="directory, or '-' for stdout")
    s.set_defaults(func=cmd_export_lp)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FormulaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
