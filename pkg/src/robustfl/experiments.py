"""The case-study pipeline: excitation levels vs. identification and tracking quality.

For every run seed ``s`` three independent streams are derived with
``numpy.random.SeedSequence([s, stream])`` (stream 0: base input, 1: noise
during data collection, 2: noise in closed loop). The base input is scaled by
each factor in ``scalings``; all scaled datasets share the data-collection
noise and all closed loops share the closed-loop noise, so the only
difference between them is the excitation level.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .dpc import DpcConfig, receding_horizon
from .errors import RobustFLError, StageError, ValidationError
from .excitation import design_input, gaussian_input
from .robustness import certify, estimate_rho0
from .signals import Signal
from .simulate import NoiseModel, simulate
from .svgplot import state_trajectories_svg
from .sysid import error_bound, estimation_error, ls_estimate
from .system import LtiSystem, double_integrator

OUTPUT_DIR_ENV = "ROBUSTFL_OUTPUT_DIR"

STREAM_INPUT = 0
STREAM_DATA_NOISE = 1
STREAM_LOOP_NOISE = 2


def derive_seed(seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([int(seed), stream]).generate_state(1)[0])


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "results"))


@dataclass
class ExperimentConfig:
    system: LtiSystem = field(default_factory=double_integrator)
    T: int = 50
    base_input_std: float = 0.1
    scalings: list[float] = field(default_factory=lambda: [1.0, 0.05, 0.01])
    noise_std: float = 0.01
    horizon: int = 10
    steps: int = 60
    # None: r = e_1 and x0 = 0, i.e. (1, 0) and (0, 0) for the double integrator
    reference: list[float] | None = None
    x0: list[float] | None = None
    data_x0: list[float] | None = None
    seeds: list[int] = field(default_factory=lambda: list(range(20)))
    # None keeps the raw N(0, base_input_std^2) draw; a number rescales the base input to that PE level
    target_alpha: float | None = None
    rho0_starts: int = 16
    rho0_seed: int = 0

    def __post_init__(self):
        if isinstance(self.system, dict):
            self.system = LtiSystem.from_dict(self.system)
        n = self.system.n
        if self.reference is None:
            self.reference = [1.0] + [0.0] * (n - 1)
        if self.x0 is None:
            self.x0 = [0.0] * n
        if self.data_x0 is None:
            self.data_x0 = [0.0] * n
        self.reference = [float(v) for v in self.reference]
        self.x0 = [float(v) for v in self.x0]
        self.data_x0 = [float(v) for v in self.data_x0]
        self.scalings = [float(v) for v in self.scalings]
        self.seeds = [int(v) for v in self.seeds]
        if len(self.reference) != n or len(self.x0) != n or len(self.data_x0) != n:
            raise ValidationError(f"reference, x0 and data_x0 must have length n={n}")
        if self.T < 1 or self.horizon < 1 or self.steps < 0:
            raise ValidationError("T and horizon must be positive, steps nonnegative")
        if not self.scalings:
            raise ValidationError("at least one scaling is required")
        if not self.seeds:
            raise ValidationError("at least one seed is required")
        if any(int(s) < 0 for s in self.seeds):
            raise ValidationError("seeds must be nonnegative")
        if self.base_input_std <= 0 or self.noise_std < 0:
            raise ValidationError("base_input_std must be positive and noise_std nonnegative")
        if self.target_alpha is not None and not self.target_alpha > 0:
            raise ValidationError("target_alpha must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["system"] = self.system.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(io.read_json(path))


@dataclass
class ScalingRecord:
    scaling: float
    alpha: float
    delta_cert: float
    delta_actual: float
    id_error: float
    error_bound: float
    tracking_cost: float
    diverged_at: int | None = None


@dataclass
class ExperimentReport:
    rho0_estimate: float
    seeds: list[int]
    runs: dict[int, list[ScalingRecord]]

    def mean_tracking_costs(self) -> list[float]:
        k = len(next(iter(self.runs.values())))
        return [float(np.mean([recs[i].tracking_cost for recs in self.runs.values()])) for i in range(k)]

    def median_tracking_costs(self) -> list[float]:
        k = len(next(iter(self.runs.values())))
        return [float(np.median([recs[i].tracking_cost for recs in self.runs.values()])) for i in range(k)]

    def to_dict(self) -> dict:
        first = self.runs[self.seeds[0]]
        means = self.mean_tracking_costs()
        medians = self.median_tracking_costs()
        return {
            "rho0_estimate": self.rho0_estimate,
            "rho0_note": "multi-start local search value; an upper estimate of the true infimum",
            "seeds": list(self.seeds),
            "records": [asdict(r) for r in first],
            "summary": [
                {"scaling": r.scaling, "mean_tracking_cost": mu, "median_tracking_cost": md}
                for r, mu, md in zip(first, means, medians)
            ],
            "runs": {str(s): [asdict(r) for r in recs] for s, recs in self.runs.items()},
        }


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (RobustFLError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        raise StageError(name, exc) from exc


def base_input(cfg: ExperimentConfig, seed: int) -> Signal:
    s = derive_seed(seed, STREAM_INPUT)
    if cfg.target_alpha is None:
        return gaussian_input(cfg.system.m, cfg.T, cfg.base_input_std, s)
    return design_input(cfg.system.m, cfg.T, cfg.system.n + 1, cfg.target_alpha, s)


def run_seed(cfg: ExperimentConfig, seed: int, rho: float, out_dir: Path | None = None):
    """One seed of the pipeline; returns ``(records, closed-loop results)``."""
    sys = cfg.system
    n = sys.n
    u_base = _stage("design", base_input, cfg, seed)
    data_noise = NoiseModel(cfg.noise_std, derive_seed(seed, STREAM_DATA_NOISE))
    loop_noise = NoiseModel(cfg.noise_std, derive_seed(seed, STREAM_LOOP_NOISE))
    w = Signal(data_noise.sequence(n, cfg.T))
    records, loops = [], []
    for i, c in enumerate(cfg.scalings):
        u = u_base.scaled(c)
        data = _stage("simulate", simulate, sys, u, cfg.data_x0, data_noise, "sys")
        cert = _stage("certify", certify, data.u, data.x, rho, n)
        model = _stage("identify", ls_estimate, data.u, data.x)
        dcfg = DpcConfig(cfg.horizon, cfg.reference, model)
        loop = _stage("dpc", receding_horizon, dcfg, sys, cfg.x0, cfg.steps, loop_noise)
        rec = ScalingRecord(
            scaling=float(c),
            alpha=cert.alpha,
            delta_cert=cert.delta_cert,
            delta_actual=cert.delta_actual,
            id_error=estimation_error(model, sys.A, sys.B),
            error_bound=error_bound(w, data.u, data.x),
            tracking_cost=loop.tracking_cost,
            diverged_at=loop.diverged_at,
        )
        records.append(rec)
        loops.append(loop)
        if out_dir is not None:
            d = out_dir / f"seed_{seed}" / f"data_{i + 1}"
            d.mkdir(parents=True, exist_ok=True)
            io.write_signal_csv(data.u, d / "u.csv", "u")
            io.write_signal_csv(data.x, d / "x.csv", "x")
            io.write_signal_csv(w, d / "w.csv", "w")
            io.write_json(data.sidecar(), d / "dataset.json")
            io.write_json(model.to_dict(), d / "predictor.json")
            io.write_json(cert.to_dict(), d / "certificate.json")
            io.write_closed_loop_csv(loop.x, loop.u, loop.stage_costs, d / "closed_loop.csv")
            io.write_json(asdict(rec), d / "summary.json")
    return records, loops


def reproduce(cfg: ExperimentConfig, out_dir=None, write_plots: bool = True) -> ExperimentReport:
    """Run the whole study for every seed in ``cfg.seeds``; write files when ``out_dir`` is given."""
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(cfg.to_dict(), out / "config.json")
        manifest = {
            str(s): {
                "input": derive_seed(s, STREAM_INPUT),
                "data_noise": derive_seed(s, STREAM_DATA_NOISE),
                "loop_noise": derive_seed(s, STREAM_LOOP_NOISE),
            }
            for s in cfg.seeds
        }
        io.write_json({"seeds": list(cfg.seeds), "rho0_seed": cfg.rho0_seed, "streams": manifest}, out / "seeds.json")
    rho = _stage("rho0", estimate_rho0, cfg.system, cfg.rho0_starts, cfg.rho0_seed)
    runs = {}
    first_loops = None
    for s in cfg.seeds:
        recs, loops = run_seed(cfg, s, rho, out)
        runs[s] = recs
        if first_loops is None:
            first_loops = loops
    report = ExperimentReport(rho0_estimate=rho, seeds=list(cfg.seeds), runs=runs)
    if out is not None:
        io.write_json(report.to_dict(), out / "report.json")
        _write_table(report, out / "summary.csv")
        if write_plots:
            labels = [f"sigma_min = {r.delta_actual:.2e}" for r in runs[cfg.seeds[0]]]
            svg = state_trajectories_svg(
                [lp.x.samples for lp in first_loops],
                labels,
                reference=cfg.reference,
                title=f"Closed-loop states, seed {cfg.seeds[0]}",
            )
            (out / "trajectories.svg").write_text(svg)
    return report


def _write_table(report: ExperimentReport, path: Path) -> None:
    first = report.runs[report.seeds[0]]
    lines = ["scaling,alpha,delta_cert,delta_actual,id_error,error_bound,tracking_cost,mean_tracking_cost"]
    for r, mu in zip(first, report.mean_tracking_costs()):
        vals = [r.scaling, r.alpha, r.delta_cert, r.delta_actual, r.id_error, r.error_bound, r.tracking_cost, mu]
        lines.append(",".join(repr(float(v)) for v in vals))
    path.write_text("\n".join(lines) + "\n")


def format_report(report: ExperimentReport) -> str:
    """Human-readable table of the first seed plus the Monte-Carlo mean cost."""
    first = report.runs[report.seeds[0]]
    means = report.mean_tracking_costs()
    rows = [
        f"rho0 estimate: {report.rho0_estimate:.4f}   seeds: {len(report.seeds)}",
        f"{'scale':>7} {'alpha':>10} {'delta_cert':>11} {'delta_act':>11} {'id_error':>10} {'cost':>11} {'mean cost':>11}",
    ]
    for r, mu in zip(first, means):
        rows.append(
            f"{r.scaling:>7g} {r.alpha:>10.3g} {r.delta_cert:>11.3g} {r.delta_actual:>11.3g} "
            f"{r.id_error:>10.3g} {r.tracking_cost:>11.4g} {mu:>11.4g}"
        )
    return "\n".join(rows)

