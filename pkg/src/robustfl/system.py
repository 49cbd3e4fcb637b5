"""The state-space pair (A, B) and the double-integrator example."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, ValidationError


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """Discrete-time system ``x(t+1) = A x(t) + B u(t)``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = linalg.as_matrix(self.A, "A")
        B = np.array(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        B = linalg.as_matrix(B, "B")
        if A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise DimensionError(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
        if B.shape[1] < 1:
            raise ValidationError("system must have at least one input (m >= 1)")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def controllability_matrix(self) -> np.ndarray:
        blocks = [self.B]
        for _ in range(self.n - 1):
            blocks.append(self.A @ blocks[-1])
        return np.hstack(blocks)

    def is_controllable(self, rel_tol: float | None = None) -> bool:
        return linalg.numerical_rank(self.controllability_matrix(), rel_tol) == self.n

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "LtiSystem":
        try:
            return cls(np.array(d["A"], dtype=float), np.array(d["B"], dtype=float))
        except KeyError as exc:
            raise ValidationError(f"system is missing field {exc}") from None


def double_integrator() -> LtiSystem:
    """The case-study plant: ``A = [[1, 1], [0, 1]]``, ``B = [0, 1]^T``."""
    return LtiSystem(np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([[0.0], [1.0]]))


def random_controllable(n: int, m: int, rng: np.random.Generator, max_radius: float = 1.1) -> LtiSystem:
    """Random controllable pair with spectral radius in ``[0.5, max_radius]``."""
    while True:
        A = rng.standard_normal((n, n))
        radius = max(abs(np.linalg.eigvals(A)))
        if radius > 0:
            A *= rng.uniform(0.5, max_radius) / radius
        B = rng.standard_normal((n, m))
        sys = LtiSystem(A, B)
        if sys.is_controllable() and linalg.min_singular_value(sys.controllability_matrix()) > 1e-3:
            return sys
