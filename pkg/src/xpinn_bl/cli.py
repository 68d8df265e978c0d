"""Command-line front end for single runs, method comparisons and ablations.

Every command writes plot-ready CSV/JSON data only; figures are produced
outside this package.  Relative output directories are resolved against the
``XPINN_BL_OUTPUT_ROOT`` environment variable when it is set.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, config as config_mod, metrics, network, oracle, sampling, training
from .config import ExperimentConfig
from .flux import FluxModel, welge_analysis
from .losses import Mode
from .oracle import ExactSolution

OUTPUT_ROOT_ENV = "XPINN_BL_OUTPUT_ROOT"

COMPARE_METHODS = [
    Mode.XPINN,
    Mode.STANDARD_PINN,
    Mode.DIFFUSIVITY_PINN,
    Mode.WELGE_PINN,
    Mode.OLEINIK_PINN,
]

#: Settings that must agree across methods for a fair comparison.
BUDGET_KEYS = [
    "epochs",
    "learning_rate",
    "n_ic",
    "n_bc",
    "n_pre_shock",
    "n_post_shock",
    "n_interface",
    "train_seed",
    "sampling_seed",
]


def _resolve_out(directory) -> Path:
    path = Path(directory)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        path = Path(root) / path
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_metadata(cfg: ExperimentConfig, analysis, nets) -> dict:
    return {
        "package_version": __version__,
        "config": cfg.to_string(),
        "mode": cfg.mode.value,
        "welge_form": cfg.welge_form.value,
        "s_star": analysis.s_star,
        "sigma": analysis.sigma,
        "architectures": cfg.architectures(),
        "parameter_counts": [net.param_count for net in nets],
        "total_parameters": sum(net.param_count for net in nets),
        "total_collocation_points": cfg.n_ic
        + cfg.n_bc
        + cfg.n_pre_shock
        + cfg.n_post_shock
        + cfg.n_interface,
        "adam": {
            "beta1": cfg.adam_beta1,
            "beta2": cfg.adam_beta2,
            "eps": cfg.adam_eps,
            "learning_rate": cfg.learning_rate,
        },
        "seeds": {"train": cfg.train_seed, "sampling": cfg.sampling_seed},
    }


def run_experiment(cfg: ExperimentConfig, out_dir: Path):
    """build_plan -> train -> grade, with all artifacts written to out_dir.

    Returns (best nets, history, report).
    """
    model = FluxModel(cfg.m)
    analysis = welge_analysis(model)
    sol = ExactSolution(model=model, analysis=analysis)
    plan = sampling.build_plan(
        analysis, cfg.sample_counts(), cfg.band_halfwidth, cfg.sampling_seed
    )
    if cfg.export_plan:
        plan.export_csv(out_dir / "plan.csv")

    try:
        nets, history = training.train(
            cfg.train_config(), plan, analysis, model, checkpoint_dir=out_dir / "checkpoints"
        )
    except training.TrainingDiverged:
        # Partial artifacts stay in place for post-mortem.
        raise

    history.to_csv(out_dir / "history.csv")
    best = history.best_nets
    train_seconds = history.elapsed_seconds[-1] if history.elapsed_seconds else 0.0
    report = metrics.grade(best, analysis, sol, train_seconds=train_seconds)
    report.to_json(out_dir / "report.json")

    meta = _run_metadata(cfg, analysis, best)
    meta["min_total_loss"] = history.min_total()
    meta["min_loss_per_subnet"] = [history.min_loss(i) for i in range(len(best))]
    meta["best_epoch"] = history.best_epoch
    meta["train_seconds"] = train_seconds
    with open(out_dir / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")

    if cfg.export_profiles:
        metrics.export_profile_slices(
            best, analysis, sol, out_dir / "profile_t{t}.csv"
        )
    return best, history, report


def cmd_analyze_flux(args) -> int:
    model = FluxModel(args.m)
    analysis = welge_analysis(model)
    print(f"M = {model.M}")
    print(f"s_star = {analysis.s_star:.9f}")
    print(f"sigma  = {analysis.sigma:.9f}")
    if args.out:
        out = _resolve_out(Path(args.out).parent) / Path(args.out).name
        s = np.linspace(0.0, 1.0, 501)
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "f", "dfds"])
            for si, fi, dfi in zip(
                s, model.fractional_flow(s), model.fractional_flow_derivative(s)
            ):
                writer.writerow([repr(float(si)), repr(float(fi)), repr(float(dfi))])
        print(f"flux table written to {out}")
    return 0


def cmd_oracle_profile(args) -> int:
    model = FluxModel(args.m)
    sol = ExactSolution.for_model(model)
    out = _resolve_out(Path(args.out).parent) / Path(args.out).name
    grid = np.linspace(0.0, 1.0, args.nx)
    oracle.export_profile_csv(sol, args.t, grid, out)
    print(f"oracle profile at t={args.t} written to {out}")
    return 0


def _load_config(path) -> ExperimentConfig:
    try:
        return config_mod.load(path)
    except config_mod.ConfigError as err:
        raise SystemExit(f"config error in {path}: {err}")


def cmd_train(args) -> int:
    cfg = _load_config(args.config)
    out_dir = _resolve_out(cfg.out_directory)
    _, history, report = run_experiment(cfg, out_dir)
    print(f"run directory: {out_dir}")
    print(f"min total loss: {history.min_total():.6e} (epoch {history.min_total_epoch()})")
    print(f"L2 error vs exact: {report.l2_abs:.6e}")
    return 0


def _method_configs(args) -> list[ExperimentConfig]:
    if len(args.configs) == 1:
        base = _load_config(args.configs[0])
        methods = base.compare_methods or [m.value for m in COMPARE_METHODS]
        cfgs = [base.with_mode(Mode(m)) for m in methods]
    else:
        cfgs = [_load_config(p) for p in args.configs]
    modes = [c.mode for c in cfgs]
    if len(set(modes)) != len(modes):
        raise SystemExit("compare: duplicate method modes in config list")
    ref = cfgs[0]
    for cfg in cfgs[1:]:
        bad = [k for k in BUDGET_KEYS if getattr(cfg, k) != getattr(ref, k)]
        if bad or cfg.m != ref.m:
            raise SystemExit(
                f"compare: budget mismatch for mode {cfg.mode.value}: "
                f"{bad or ['m']} differ (fair-comparison guard)"
            )
    return cfgs


def cmd_compare(args) -> int:
    cfgs = _method_configs(args)
    out_root = _resolve_out(args.out or cfgs[0].out_directory)
    rows = []
    for cfg in cfgs:
        run_dir = _resolve_out(out_root / cfg.mode.value)
        nets, history, report = run_experiment(cfg, run_dir)
        rows.append(
            {
                "method": cfg.mode.value,
                "parameters": sum(net.param_count for net in nets),
                "l1_abs": report.l1_abs,
                "l2_abs": report.l2_abs,
                "l1_rel": report.l1_rel,
                "l2_rel": report.l2_rel,
                "min_total_loss": history.min_total(),
                "train_seconds": report.train_seconds,
            }
        )
        print(f"{cfg.mode.value}: L2 {report.l2_abs:.4e}  ({report.train_seconds:.1f} s)")
    rows.sort(key=lambda r: r["l2_abs"])
    with open(out_root / "comparison.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    with open(out_root / "comparison.json", "w") as fh:
        json.dump(
            {
                "m": cfgs[0].m,
                "note": "train_seconds are wall-clock and machine-dependent; "
                "only the accuracy ranking is meaningful across machines",
                "ranking": rows,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    print(f"ranking written to {out_root / 'comparison.csv'}")
    return 0


def cmd_ablate_interface(args) -> int:
    cfg = _load_config(args.config)
    if cfg.mode is not Mode.XPINN:
        raise SystemExit("ablate-interface requires an XPINN config")
    out_root = _resolve_out(args.out or cfg.out_directory)
    model = FluxModel(cfg.m)
    analysis = welge_analysis(model)
    results = {}
    for label, mode in [("with_interface", Mode.XPINN), ("without_interface", Mode.XPINN_NO_INTERFACE)]:
        run_dir = _resolve_out(out_root / label)
        nets, history, report = run_experiment(cfg.with_mode(mode), run_dir)
        results[label] = {
            "report": json.loads((run_dir / "report.json").read_text()),
            "min_total_loss": history.min_total(),
            "post_shock_plateau_t0.5": metrics.post_shock_plateau(nets, analysis, 0.5),
            "shock_location_t0.5": metrics.shock_location_estimate(nets, analysis, 0.5),
        }
    results["exact_shock_location_t0.5"] = analysis.sigma * 0.5
    with open(out_root / "ablation_report.json", "w") as fh:
        json.dump(results, fh, indent=2)
        fh.write("\n")
    for label in ("with_interface", "without_interface"):
        print(
            f"{label}: plateau {results[label]['post_shock_plateau_t0.5']:.4f}, "
            f"shock at {results[label]['shock_location_t0.5']:.4f}"
        )
    return 0


def cmd_export_plan(args) -> int:
    cfg = _load_config(args.config)
    model = FluxModel(cfg.m)
    analysis = welge_analysis(model)
    plan = sampling.build_plan(analysis, cfg.sample_counts(), cfg.band_halfwidth, cfg.sampling_seed)
    out = _resolve_out(Path(args.out).parent) / Path(args.out).name
    plan.export_csv(out)
    print(f"collocation plan written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xpinn-bl",
        description="Buckley-Leverett solver benchmark: XPINN vs PINN variants",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-flux", help="print s*, sigma and export a flux table")
    p.add_argument("--m", type=float, required=True, help="mobility ratio (> 0)")
    p.add_argument("--out", help="optional CSV path for a 501-point flux table")
    p.set_defaults(func=cmd_analyze_flux)

    p = sub.add_parser("oracle-profile", help="export the exact solution at one time")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--nx", type=int, default=501)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle_profile)

    p = sub.add_parser("train", help="run one configured experiment")
    p.add_argument("config")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="run all five methods with a shared budget")
    p.add_argument("configs", nargs="+", help="one base config, or one config per method")
    p.add_argument("--out", help="output root (defaults to the config's directory)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ablate-interface", help="paired runs with/without the RH term")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ablate_interface)

    p = sub.add_parser("export-plan", help="export the collocation plan as CSV")
    p.add_argument("config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_plan)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
