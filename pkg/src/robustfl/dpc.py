"""Receding-horizon reference tracking with an identified one-step predictor.

At each time step the controller solves

    min  sum_{k=0}^{Tf-1} ||x_k - r||^2 + ||u_k||^2
    s.t. x_0 = x(t),  x_{k+1} = Ahat x_k + Bhat u_k,

and applies ``u_0``. ``DpcConfig.state_weight``/``input_weight`` scale the two
terms; both default to 1 and the closed-loop tracking cost always uses unit
weights. The terminal state
``x_Tf`` is not penalized, so ``u_{Tf-1}`` is always zero at the optimum.
The problem is unconstrained, so it is solved in condensed form as a linear
least-squares problem in the stacked inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .signals import Signal
from .simulate import NoiseModel
from .sysid import PredictorModel
from .system import LtiSystem


@dataclass(frozen=True, eq=False)
class DpcConfig:
    horizon: int
    reference: np.ndarray
    predictor: PredictorModel
    state_weight: float = 1.0
    input_weight: float = 1.0

    def __post_init__(self):
        if int(self.horizon) < 1:
            raise ValidationError("horizon must be at least 1")
        r = np.asarray(self.reference, dtype=float).reshape(-1)
        if r.size != self.predictor.n:
            raise DimensionError(f"reference has length {r.size}, predictor has n={self.predictor.n}")
        if not np.all(np.isfinite(r)):
            raise ValidationError("reference must be finite")
        if not (self.state_weight > 0 and self.input_weight > 0):
            raise ValidationError("weights must be positive")
        object.__setattr__(self, "reference", r)
        object.__setattr__(self, "horizon", int(self.horizon))


@dataclass(frozen=True)
class HorizonSolution:
    inputs: Signal
    predicted: Signal
    cost: float


@dataclass(frozen=True)
class ClosedLoopResult:
    x: Signal
    u: Signal | None
    stage_costs: np.ndarray
    tracking_cost: float
    diverged_at: int | None = None


def predict_one_step(p: PredictorModel, x, u) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if x.size != p.n or u.size != p.m:
        raise DimensionError(f"expected x in R^{p.n}, u in R^{p.m}; got {x.size}, {u.size}")
    return p.Ahat @ x + p.Bhat @ u


def prediction_matrices(p: PredictorModel, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """``Phi, Gamma`` with ``(x_0, ..., x_{Tf-1}) = Phi x_0 + Gamma (u_0, ..., u_{Tf-1})``."""
    n, m = p.n, p.m
    Phi = np.zeros((horizon * n, n))
    Gamma = np.zeros((horizon * n, horizon * m))
    Ak = np.eye(n)
    for k in range(horizon):
        Phi[k * n : (k + 1) * n] = Ak
        Ak = p.Ahat @ Ak
    # x_k depends on u_j for j < k through Ahat^{k-1-j} Bhat
    for k in range(1, horizon):
        blk = p.Bhat
        for j in range(k - 1, -1, -1):
            Gamma[k * n : (k + 1) * n, j * m : (j + 1) * m] = blk
            blk = p.Ahat @ blk
    return Phi, Gamma


def rollout(p: PredictorModel, x0, inputs: np.ndarray) -> np.ndarray:
    """States ``x_0 .. x_{Tf-1}`` produced by the predictor from ``x0`` under ``inputs`` (rows)."""
    x = np.asarray(x0, dtype=float).reshape(-1)
    out = [x]
    for u in inputs[:-1]:
        x = predict_one_step(p, x, u)
        out.append(x)
    return np.array(out)


def horizon_cost(cfg: DpcConfig, x0, inputs: np.ndarray) -> float:
    """Objective value of an input sequence, by forward simulation of the predictor."""
    X = rollout(cfg.predictor, x0, np.asarray(inputs, dtype=float).reshape(cfg.horizon, cfg.predictor.m))
    return float(cfg.state_weight * np.sum((X - cfg.reference) ** 2) + cfg.input_weight * np.sum(np.asarray(inputs) ** 2))


def solve_horizon(cfg: DpcConfig, x_now) -> HorizonSolution:
    p = cfg.predictor
    x_now = np.asarray(x_now, dtype=float).reshape(-1)
    if x_now.size != p.n:
        raise DimensionError(f"x_now has length {x_now.size}, predictor has n={p.n}")
    Tf, n, m = cfg.horizon, p.n, p.m
    Phi, Gamma = prediction_matrices(p, Tf)
    target = np.tile(cfg.reference, Tf) - Phi @ x_now
    sq, su = np.sqrt(cfg.state_weight), np.sqrt(cfg.input_weight)
    # || sq (Gamma U - target) ||^2 + || su U ||^2 as one stacked least-squares problem
    lhs = np.vstack([sq * Gamma, su * np.eye(Tf * m)])
    rhs = np.concatenate([sq * target, np.zeros(Tf * m)])
    U, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    resid = lhs @ U - rhs
    X = Phi @ x_now + Gamma @ U
    return HorizonSolution(
        inputs=Signal(U.reshape(Tf, m)),
        predicted=Signal(X.reshape(Tf, n)),
        cost=float(resid @ resid),
    )


def receding_horizon(
    cfg: DpcConfig,
    sys: LtiSystem,
    x0,
    steps: int,
    noise: NoiseModel | None = None,
) -> ClosedLoopResult:
    """Closed loop: re-solve at the measured state, apply the first input to the true plant."""
    noise = noise or NoiseModel()
    if sys.n != cfg.predictor.n or sys.m != cfg.predictor.m:
        raise DimensionError("plant and predictor dimensions differ")
    if steps < 0:
        raise ValidationError("steps must be nonnegative")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.size != sys.n:
        raise DimensionError(f"x0 has length {x.size}, plant has n={sys.n}")
    xs = [x]
    us = []
    stage = []
    diverged_at = None
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(steps):
            u = solve_horizon(cfg, x).inputs.samples[0].copy()
            x_next = sys.A @ x + sys.B @ u + noise.sample(t, sys.n)
            cost = float(np.sum((x - cfg.reference) ** 2) + np.sum(u**2))
            if not (np.all(np.isfinite(x_next)) and np.isfinite(cost)):
                # a badly identified predictor can blow the loop up; stop and report inf
                diverged_at = t
                break
            stage.append(cost)
            xs.append(x_next)
            us.append(u)
            x = x_next
    stage = np.array(stage)
    return ClosedLoopResult(
        x=Signal(np.array(xs)),
        u=Signal(np.array(us)) if us else None,
        stage_costs=stage,
        tracking_cost=float(stage.sum()) if diverged_at is None else float("inf"),
        diverged_at=diverged_at,
    )
