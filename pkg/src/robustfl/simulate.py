"""Plant simulation with optional i.i.d. Gaussian process noise.

The noise sample ``w(t)`` is drawn from a generator seeded with ``(seed, t)``
only, so two datasets simulated with the same noise seed see exactly the same
disturbance no matter which input drives them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .signals import Signal
from .system import LtiSystem


@dataclass(frozen=True)
class NoiseModel:
    std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.std >= 0 and np.isfinite(self.std)):
            raise ValidationError(f"noise std must be finite and nonnegative, got {self.std}")
        if int(self.seed) < 0:
            raise ValidationError(f"noise seed must be nonnegative, got {self.seed}")

    def sample(self, t: int, n: int) -> np.ndarray:
        """``w(t)`` in R^n."""
        if self.std == 0.0:
            return np.zeros(n)
        rng = np.random.default_rng([int(self.seed), int(t)])
        return self.std * rng.standard_normal(n)

    def sequence(self, n: int, T: int, start: int = 0) -> np.ndarray:
        """Rows ``w(start), ..., w(start+T-1)``."""
        return np.array([self.sample(t, n) for t in range(start, start + T)]).reshape(T, n)


@dataclass(frozen=True)
class TrajectoryDataset:
    """Input ``u(0..T-1)`` and state ``x(0..T)`` from one experiment."""

    u: Signal
    x: Signal
    noise_std: float = 0.0
    seed: int = 0
    sys_tag: str = ""

    def __post_init__(self):
        if self.x.length != self.u.length + 1:
            raise DimensionError(f"state length {self.x.length} must be input length {self.u.length} + 1")

    @property
    def n(self) -> int:
        return self.x.dim

    @property
    def m(self) -> int:
        return self.u.dim

    @property
    def T(self) -> int:
        return self.u.length

    def sidecar(self) -> dict:
        return {"n": self.n, "m": self.m, "T": self.T, "noise_std": self.noise_std, "seed": self.seed, "sys_tag": self.sys_tag}


def simulate(
    sys: LtiSystem,
    u: Signal,
    x0=None,
    noise: NoiseModel | None = None,
    sys_tag: str = "",
) -> TrajectoryDataset:
    """Run ``x(t+1) = A x(t) + B u(t) + w(t)`` for ``t = 0..T-1``; ``x0`` defaults to zero."""
    noise = noise or NoiseModel()
    if u.dim != sys.m:
        raise DimensionError(f"input has dimension {u.dim}, system expects {sys.m}")
    x0 = np.zeros(sys.n) if x0 is None else np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != sys.n:
        raise DimensionError(f"x0 has length {x0.size}, system has n={sys.n}")
    T = u.length
    w = noise.sequence(sys.n, T)
    x = np.empty((T + 1, sys.n))
    x[0] = x0
    for t in range(T):
        x[t + 1] = sys.A @ x[t] + sys.B @ u.samples[t] + w[t]
    return TrajectoryDataset(u=u, x=Signal(x), noise_std=float(noise.std), seed=int(noise.seed), sys_tag=sys_tag)
