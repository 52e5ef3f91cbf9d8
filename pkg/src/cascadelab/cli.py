"""Command-line interface.

Subcommands: derive, thresholds, simulate, exact, approx, sweep, report.
Results go to stdout (JSON by default; sweeps can emit CSV), diagnostics
to stderr.  Exit codes: 0 success, 2 parameter/usage problems, 1 runtime
failures.  A JSON config file can preload any flag values; explicit flags
win.  Every JSON result echoes the effective configuration under
"config".
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import agents, approx, sweep as sweep_mod, walk
from .errors import ParameterError, UnsupportedRegimeError
from .figures import render_sweep_figure
from .model import ModelParams, bayesian_threshold, cascade_thresholds, derive

__all__ = ["build_parser", "run", "main"]


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ParameterError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ParameterError("config file must hold a JSON object")
    return raw


def _effective(args: argparse.Namespace, defaults: dict) -> dict:
    """Layer defaults, then config-file values, then explicit flags."""
    cfg = dict(defaults)
    file_cfg = _load_config(getattr(args, "config", None))
    for key in defaults:
        if key in file_cfg:
            cfg[key] = file_cfg[key]
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _require(cfg: dict, key: str, flag: str) -> None:
    if cfg[key] is None:
        raise ParameterError(f"{flag} is required (flag or config file)")


def _params(cfg: dict) -> ModelParams:
    _require(cfg, "p", "--p")
    return ModelParams(p=float(cfg["p"]), eps=float(cfg["eps"]), beta=float(cfg["beta"]))


def _cmd_derive(args: argparse.Namespace) -> int:
    cfg = _effective(args, dict(p=None, eps=0.0, beta=0.0, format="json"))
    d = derive(_params(cfg))
    _emit({
        "a": d.a, "b": d.b, "alpha": d.alpha,
        "eta_y": d.eta_y, "eta_n": d.eta_n,
        "pf_g": d.pf_g, "pf_b": d.pf_b,
        "config": cfg,
    })
    return 0


def _cmd_thresholds(args: argparse.Namespace) -> int:
    cfg = _effective(
        args, dict(p=None, beta=0.0, r_max=10, k_max=2, format="json")
    )
    _require(cfg, "p", "--p")
    p, beta = float(cfg["p"]), float(cfg["beta"])
    r_max, k_max = int(cfg["r_max"]), int(cfg["k_max"])
    bayes = [
        {"r": r, "eps": bayesian_threshold(p, beta, r)} for r in range(1, r_max + 1)
    ]
    fam = [
        {"r": t.r, "k": t.k, "eps": t.eps_value}
        for t in cascade_thresholds(p, beta, r_max, k_max)
    ]
    _emit({"bayesian": bayes, "cascade": fam, "config": cfg})
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _effective(args, dict(
        p=None, eps=0.0, beta=0.0, v="B", engine="walk",
        trials=10**5, seed=0, max_steps=walk.DEFAULT_MAX_STEPS,
        max_agents=agents.DEFAULT_MAX_AGENTS, format="json",
    ))
    params = _params(cfg)
    trials, seed = int(cfg["trials"]), int(cfg["seed"])
    if cfg["engine"] == "walk":
        est = walk.mc_estimate(params, cfg["v"], trials, seed, int(cfg["max_steps"]))
    elif cfg["engine"] == "agent":
        est = agents.mc_estimate(params, cfg["v"], trials, seed, int(cfg["max_agents"]))
    else:
        raise ParameterError(f"engine must be 'walk' or 'agent', got {cfg['engine']!r}")
    _emit({
        "p_hat": est.p_hat, "std_err": est.std_err,
        "trials": est.trials, "undecided": est.undecided, "seed": est.seed,
        "config": cfg,
    })
    return 0


def _cmd_exact(args: argparse.Namespace) -> int:
    cfg = _effective(args, dict(
        p=None, eps=0.0, beta=0.0, v="B", depth=walk.DEFAULT_DP_DEPTH, format="json"
    ))
    iv = walk.exact_interval(_params(cfg), cfg["v"], int(cfg["depth"]))
    _emit({
        "y_lower": iv.y_lower, "y_upper": iv.y_upper,
        "n_mass": iv.n_mass, "pending": iv.pending,
        "config": cfg,
    })
    return 0


def _cmd_approx(args: argparse.Namespace) -> int:
    cfg = _effective(args, dict(
        p=None, eps=0.0, beta=0.0, v="B", method="tree", iters=10,
        depth_cap=approx.DEFAULT_DEPTH_CAP, format="json",
    ))
    params = _params(cfg)
    iters = int(cfg["iters"])
    if cfg["method"] == "tree":
        iv = approx.tree_approx(params, cfg["v"], iters, int(cfg["depth_cap"]))
        _emit({
            "y_lower": iv.y_lower, "y_upper": iv.y_upper,
            "n_mass": iv.n_mass, "pending": iv.pending,
            "config": cfg,
        })
        return 0
    if cfg["method"] == "sequence":
        stages = approx.stage_decomposition(derive(params))
        bound = approx.sequence_lower_bound(params, cfg["v"], iters)
        _emit({
            "bound": bound, "r1": stages.r1, "t1": stages.t1,
            "k_plus_1": stages.k_plus_1,
            "config": cfg,
        })
        return 0
    raise ParameterError(f"method must be 'tree' or 'sequence', got {cfg['method']!r}")


def _sweep_spec(cfg: dict) -> sweep_mod.SweepSpec:
    _require(cfg, "p", "--p")
    return sweep_mod.SweepSpec(
        p=float(cfg["p"]), beta=float(cfg["beta"]), v=cfg["v"], method=cfg["method"],
        eps_start=float(cfg["eps_start"]),
        eps_stop=None if cfg["eps_stop"] is None else float(cfg["eps_stop"]),
        eps_step=float(cfg["eps_step"]),
        trials=int(cfg["trials"]), seed=int(cfg["seed"]),
        depth=int(cfg["depth"]), iters=int(cfg["iters"]),
    )


_SWEEP_DEFAULTS = dict(
    p=None, beta=0.0, v="B", method="exact",
    eps_start=0.0, eps_stop=None, eps_step=0.005,
    trials=10**5, seed=0, depth=walk.DEFAULT_DP_DEPTH, iters=10,
)


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _effective(args, dict(_SWEEP_DEFAULTS, out=None, format="csv"))
    spec = _sweep_spec(cfg)
    rows = sweep_mod.sweep_eps(spec)
    fmt = cfg["format"]
    if cfg["out"] is not None:
        sweep_mod.write_table(rows, fmt, cfg["out"])
        _emit({"out": str(cfg["out"]), "rows": len(rows), "config": cfg})
        return 0
    if fmt == "json":
        payload = [
            {name: getattr(r, name) for name in sweep_mod.CSV_HEADER} for r in rows
        ]
        _emit({"rows": payload, "config": cfg})
        return 0
    sys.stdout.write(",".join(sweep_mod.CSV_HEADER) + "\n")
    for r in rows:
        cells = [sweep_mod._format_cell(getattr(r, name)) for name in sweep_mod.CSV_HEADER]
        sys.stdout.write(",".join(cells) + "\n")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    cfg = _effective(args, dict(
        _SWEEP_DEFAULTS, methods="exact", min_jump=0.02, r_max=12,
        out_dir=".", stem=None, format="csv",
    ))
    _require(cfg, "p", "--p")
    method_list = [m.strip() for m in str(cfg["methods"]).split(",") if m.strip()]
    if not method_list:
        raise ParameterError("--methods must name at least one method")
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    p, beta, v = float(cfg["p"]), float(cfg["beta"]), cfg["v"]
    stem = cfg["stem"] or f"cascade_p{p:g}_beta{beta:g}_{v}"
    fmt = cfg["format"]
    ext = "csv" if fmt == "csv" else "json"

    tables: dict[str, str] = {}
    rows_by_method: dict[str, list[sweep_mod.SweepRow]] = {}
    for method in method_list:
        spec = _sweep_spec(dict(cfg, method=method))
        rows = sweep_mod.sweep_eps(spec)
        table_path = out_dir / f"{stem}_{method}.{ext}"
        sweep_mod.write_table(rows, fmt, table_path)
        tables[method] = str(table_path)
        rows_by_method[method] = rows

    lead_rows = rows_by_method[method_list[0]]
    grid_top = max(r.eps for r in lead_rows)
    thresholds = cascade_thresholds(p, beta, int(cfg["r_max"]), 2)
    visible = [t for t in thresholds if t.eps_value <= grid_top]
    drops = sweep_mod.detect_drops(lead_rows, float(cfg["min_jump"]))
    figure_path = render_sweep_figure(
        rows_by_method,
        out_dir / f"{stem}.png",
        thresholds=visible,
        drops=drops,
        title=f"p={p:g}, beta={beta:g}, V={v}",
    )

    manifest = {
        "figure": str(figure_path),
        "tables": tables,
        "drops": [{"eps": e, "size": s} for e, s in drops],
        "config": cfg,
    }
    (out_dir / f"{stem}_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _emit(manifest)
    return 0


def _add_model_flags(sp: argparse.ArgumentParser, with_eps: bool = True) -> None:
    sp.add_argument("--p", type=float, help="signal quality, in (1/2, 1)")
    if with_eps:
        sp.add_argument("--eps", type=float, help="Y-fake fraction")
    sp.add_argument("--beta", type=float, help="N-fake fraction")


def _add_common(sp: argparse.ArgumentParser, formats: tuple[str, ...]) -> None:
    sp.add_argument("--config", help="JSON file with default flag values")
    sp.add_argument("--format", choices=list(formats), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadelab",
        description="Cascade analysis for sequential Bayesian learning with fake agents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("derive", help="observation probabilities and walk weights")
    _add_model_flags(sp)
    _add_common(sp, ("json",))
    sp.set_defaults(handler=_cmd_derive)

    sp = sub.add_parser("thresholds", help="Bayesian and cascade threshold family")
    _add_model_flags(sp, with_eps=False)
    sp.add_argument("--r-max", dest="r_max", type=int, help="largest run length")
    sp.add_argument("--k-max", dest="k_max", type=int, help="largest N count")
    _add_common(sp, ("json",))
    sp.set_defaults(handler=_cmd_thresholds)

    sp = sub.add_parser("simulate", help="Monte Carlo cascade frequency")
    _add_model_flags(sp)
    sp.add_argument("--v", choices=["G", "B"], help="true item value")
    sp.add_argument("--engine", choices=["walk", "agent"], help="simulation engine")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-steps", dest="max_steps", type=int)
    sp.add_argument("--max-agents", dest="max_agents", type=int)
    _add_common(sp, ("json",))
    sp.set_defaults(handler=_cmd_simulate)

    sp = sub.add_parser("exact", help="certified DP bracket on the cascade probability")
    _add_model_flags(sp)
    sp.add_argument("--v", choices=["G", "B"])
    sp.add_argument("--depth", type=int, help="DP horizon")
    _add_common(sp, ("json",))
    sp.set_defaults(handler=_cmd_exact)

    sp = sub.add_parser("approx", help="tree bracket or sequence lower bound")
    _add_model_flags(sp)
    sp.add_argument("--v", choices=["G", "B"])
    sp.add_argument("--method", choices=["tree", "sequence"])
    sp.add_argument("--iters", type=int, help="iteration / block budget")
    sp.add_argument("--depth-cap", dest="depth_cap", type=int)
    _add_common(sp, ("json",))
    sp.set_defaults(handler=_cmd_approx)

    def add_sweep_flags(sp: argparse.ArgumentParser) -> None:
        _add_model_flags(sp, with_eps=False)
        sp.add_argument("--v", choices=["G", "B"])
        sp.add_argument("--eps-start", dest="eps_start", type=float)
        sp.add_argument("--eps-stop", dest="eps_stop", type=float)
        sp.add_argument("--eps-step", dest="eps_step", type=float)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--depth", type=int)
        sp.add_argument("--iters", type=int)

    sp = sub.add_parser("sweep", help="cascade probability over an eps grid")
    add_sweep_flags(sp)
    sp.add_argument("--method", choices=list(sweep_mod.METHODS))
    sp.add_argument("--out", help="write the table here instead of stdout")
    _add_common(sp, ("csv", "json"))
    sp.set_defaults(handler=_cmd_sweep)

    sp = sub.add_parser(
        "report", help="sweep tables plus a rendered figure and manifest"
    )
    add_sweep_flags(sp)
    sp.add_argument("--methods", help="comma-separated methods to overlay")
    sp.add_argument("--min-jump", dest="min_jump", type=float)
    sp.add_argument("--r-max", dest="r_max", type=int)
    sp.add_argument("--out-dir", dest="out_dir")
    sp.add_argument("--stem", help="basename for the emitted files")
    _add_common(sp, ("csv", "json"))
    sp.set_defaults(handler=_cmd_report)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except (ParameterError, UnsupportedRegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001  runtime failure, not usage
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
