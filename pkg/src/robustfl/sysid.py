"""Least-squares identification of (A, B) from one input/state trajectory."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, ValidationError
from .signals import Signal, hankel, stack_state_input


@dataclass(frozen=True, eq=False)
class PredictorModel:
    """One-step predictor ``x+ = Ahat x + Bhat u``."""

    Ahat: np.ndarray
    Bhat: np.ndarray

    def __post_init__(self):
        A = linalg.as_matrix(self.Ahat, "Ahat")
        B = np.array(self.Bhat, dtype=float)
        B = linalg.as_matrix(B.reshape(-1, 1) if B.ndim == 1 else B, "Bhat")
        if A.shape[0] != A.shape[1] or B.shape[0] != A.shape[0]:
            raise DimensionError(f"inconsistent predictor shapes {A.shape}, {B.shape}")
        object.__setattr__(self, "Ahat", A)
        object.__setattr__(self, "Bhat", B)

    @property
    def n(self) -> int:
        return self.Ahat.shape[0]

    @property
    def m(self) -> int:
        return self.Bhat.shape[1]

    @property
    def AB(self) -> np.ndarray:
        return np.hstack([self.Ahat, self.Bhat])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "Ahat": {"rows": self.n, "cols": self.n, "data": self.Ahat.ravel().tolist()},
            "Bhat": {"rows": self.n, "cols": self.m, "data": self.Bhat.ravel().tolist()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PredictorModel":
        try:
            A = np.array(d["Ahat"]["data"], dtype=float).reshape(d["Ahat"]["rows"], d["Ahat"]["cols"])
            B = np.array(d["Bhat"]["data"], dtype=float).reshape(d["Bhat"]["rows"], d["Bhat"]["cols"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed predictor JSON: {exc}") from None
        return cls(A, B)


def _split(u: Signal, x: Signal) -> tuple[Signal, Signal]:
    T = u.length
    if x.length != T + 1:
        raise DimensionError(f"state must have length T+1 = {T + 1} (including x(T)), got {x.length}")
    f = x.first_index
    return x.window(f, f + T - 1), x.window(f + 1, f + T)


def ls_estimate(u: Signal, x: Signal) -> PredictorModel:
    """Minimum-norm least-squares ``[Ahat Bhat] = H_1(x_[1,T]) [H_1(x_[0,T-1]); H_1(u)]^+``."""
    past, future = _split(u, x)
    AB = hankel(future, 1) @ linalg.pseudoinverse(stack_state_input(past, u))
    n = x.dim
    return PredictorModel(AB[:, :n], AB[:, n:])


def residual(u: Signal, x: Signal, model: PredictorModel) -> np.ndarray:
    past, future = _split(u, x)
    return hankel(future, 1) - model.AB @ stack_state_input(past, u)


def error_bound(noise: Signal, u: Signal, x: Signal) -> float:
    """Upper bound on the spectral error of :func:`ls_estimate` caused by ``noise``.

    Returns ``||H_1(w)|| / sigma_min([H_1(x); H_1(u)])``, or ``inf`` when the
    data matrix is rank deficient. ``x`` may include the final state ``x(T)``.
    """
    T = u.length
    if noise.length != T:
        raise DimensionError(f"noise length {noise.length} != input length {T}")
    if x.length == T + 1:
        x = x.window(x.first_index, x.first_index + T - 1)
    # the max over the n singular values of H_1(w), i.e. its spectral norm
    num = linalg.max_singular_value(hankel(noise, 1))
    den = linalg.min_singular_value(stack_state_input(x, u))
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf
    return num / den


def estimation_error(model: PredictorModel, A, B) -> float:
    """Spectral norm of ``[Ahat Bhat] - [A B]``."""
    return linalg.spectral_norm(model.AB - np.hstack([np.asarray(A, float), np.asarray(B, float)]))
