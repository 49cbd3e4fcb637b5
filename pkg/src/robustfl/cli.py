"""Command-line front end.

Exit codes: 0 success, 2 validation/parse error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .dpc import DpcConfig, receding_horizon
from .errors import NumericalError, RobustFLError, StageError, ValidationError
from .excitation import design_input, pe_check
from .experiments import ExperimentConfig, default_output_dir, format_report, reproduce
from .robustness import certify, estimate_rho0, rho0_sphere_grid
from .signals import Signal
from .simulate import NoiseModel, simulate
from .sysid import PredictorModel, error_bound, ls_estimate


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _load_config(args) -> ExperimentConfig:
    base = io.read_json(args.config) if args.config else {}
    if getattr(args, "system", None):
        base["system"] = io.read_json(args.system)
    overrides = {
        "T": getattr(args, "T", None),
        "noise_std": getattr(args, "noise_std", None),
        "horizon": getattr(args, "horizon", None),
        "steps": getattr(args, "steps", None),
        "reference": getattr(args, "reference", None),
        "x0": getattr(args, "x0", None),
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(base)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_design(args) -> int:
    u = design_input(args.m, args.T, args.k, args.target_alpha, args.seed)
    out = Path(args.out)
    io.write_signal_csv(u, out, "u")
    sidecar = {
        "m": args.m,
        "T": args.T,
        "k": args.k,
        "target_alpha": args.target_alpha,
        "seed": args.seed,
        "alpha": pe_check(u, args.k).alpha,
    }
    io.write_json(sidecar, out.with_suffix(".json"))
    _emit(sidecar)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    u = io.read_signal_csv(args.u)
    x0 = args.x0 if args.x0 is not None else cfg.data_x0
    data = simulate(cfg.system, u, x0, NoiseModel(cfg.noise_std, args.seed))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_signal_csv(data.u, out / "u.csv", "u")
    io.write_signal_csv(data.x, out / "x.csv", "x")
    io.write_signal_csv(Signal(NoiseModel(cfg.noise_std, args.seed).sequence(data.n, data.T)), out / "w.csv", "w")
    io.write_json(data.sidecar(), out / "dataset.json")
    _emit(data.sidecar())
    return 0


def cmd_identify(args) -> int:
    u = io.read_signal_csv(args.u)
    x = io.read_signal_csv(args.x)
    model = ls_estimate(u, x)
    result = {"predictor": model.to_dict()}
    if args.noise:
        result["error_bound"] = error_bound(io.read_signal_csv(args.noise), u, x)
    if args.out:
        io.write_json(model.to_dict(), args.out)
    _emit(result)
    return 0


def cmd_certify(args) -> int:
    u = io.read_signal_csv(args.u)
    x = io.read_signal_csv(args.x)
    _emit(certify(u, x, args.rho, args.n).to_dict())
    return 0


def cmd_rho0(args) -> int:
    cfg = _load_config(args)
    value = estimate_rho0(cfg.system, args.starts, args.seed, args.refine_tol)
    out = {"rho0_estimate": value, "starts": args.starts, "seed": args.seed}
    if args.grid:
        out["rho0_grid"] = rho0_sphere_grid(cfg.system)
    _emit(out)
    return 0


def cmd_dpc(args) -> int:
    cfg = _load_config(args)
    model = PredictorModel.from_dict(io.read_json(args.predictor))
    dcfg = DpcConfig(cfg.horizon, cfg.reference, model)
    res = receding_horizon(dcfg, cfg.system, cfg.x0, cfg.steps, NoiseModel(cfg.noise_std, args.seed))
    out = Path(args.out)
    io.write_closed_loop_csv(res.x, res.u, res.stage_costs, out)
    summary = {
        "tracking_cost": res.tracking_cost,
        "steps": cfg.steps,
        "horizon": cfg.horizon,
        "reference": list(cfg.reference),
        "x0": list(cfg.x0),
        "noise_std": cfg.noise_std,
        "seed": args.seed,
        "diverged_at": res.diverged_at,
    }
    io.write_json(summary, out.with_suffix(".json"))
    _emit(summary)
    return 0


def cmd_reproduce(args) -> int:
    cfg = _load_config(args)
    if args.seeds is not None:
        cfg.seeds = list(range(args.seed, args.seed + args.seeds))
    elif args.seed is not None:
        cfg.seeds = [args.seed + i for i in range(len(cfg.seeds))]
    if args.target_alpha is not None:
        cfg.target_alpha = args.target_alpha
    out = Path(args.out_dir) if args.out_dir else default_output_dir()
    report = reproduce(cfg, out)
    print(format_report(report))
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robustfl", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="experiment config JSON (flags override its fields)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_default=0):
        sp.add_argument("--seed", type=int, default=seed_default)
        sp.add_argument("--system", help="JSON file with A and B (default: double integrator)")

    sp = sub.add_parser("design", help="seeded input with a prescribed PE level")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--T", type=int, default=50)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--target-alpha", type=float, required=True)
    sp.add_argument("--out", required=True, help="signal CSV; a .json sidecar is written next to it")
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("simulate", help="simulate the plant under an input CSV")
    common(sp)
    sp.add_argument("--u", required=True)
    sp.add_argument("--noise-std", type=float)
    sp.add_argument("--x0", type=_floats)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("identify", help="least-squares [A B] estimate")
    sp.add_argument("--u", required=True)
    sp.add_argument("--x", required=True, help="state CSV including x(T)")
    sp.add_argument("--noise", help="noise CSV; adds the error bound to the output")
    sp.add_argument("--out", help="write the predictor JSON here")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_identify)

    sp = sub.add_parser("certify", help="certified singular-value bound of a dataset")
    sp.add_argument("--u", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("rho0", help="estimate the uniform controllability constant")
    common(sp)
    sp.add_argument("--starts", type=int, default=16)
    sp.add_argument("--refine-tol", type=float, default=1e-9)
    sp.add_argument("--grid", action="store_true", help="also run the sphere-grid check (n + m = 3 only)")
    sp.set_defaults(func=cmd_rho0)

    sp = sub.add_parser("dpc", help="closed-loop receding-horizon tracking with a predictor")
    common(sp)
    sp.add_argument("--predictor", required=True)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--reference", type=_floats)
    sp.add_argument("--x0", type=_floats)
    sp.add_argument("--noise-std", type=float)
    sp.add_argument("--out", required=True, help="closed-loop CSV; a .json summary is written next to it")
    sp.set_defaults(func=cmd_dpc)

    sp = sub.add_parser("reproduce-sec4", help="full case study: data sets, certificates, predictors, tracking")
    common(sp, seed_default=None)
    sp.add_argument("--seeds", type=int, help="number of consecutive seeds starting at --seed (default 0)")
    sp.add_argument("--target-alpha", type=float)
    sp.add_argument("--T", type=int)
    sp.add_argument("--noise-std", type=float)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--reference", type=_floats)
    sp.add_argument("--x0", type=_floats)
    sp.add_argument("--out-dir", help="default: $ROBUSTFL_OUTPUT_DIR or ./results")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "reproduce-sec4" and args.seeds is not None and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except StageError as exc:
        code = exc.cause.exit_code if isinstance(exc.cause, RobustFLError) else NumericalError.exit_code
        print(f"error: {exc}", file=sys.stderr)
        return code
    except RobustFLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return NumericalError.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ValidationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
