"""Persistency of excitation: rank verdicts, quantitative levels and input design.

Random draws use numpy's ``default_rng`` (PCG64 seeded through ``SeedSequence``).
Every call builds its own generator from the seed it is given, so results are
reproducible within this package and no generator state is shared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import StructuralError, ValidationError
from .signals import Signal, hankel


@dataclass(frozen=True)
class ExcitationReport:
    order: int
    is_pe: bool
    alpha: float
    hankel_rows: int
    hankel_cols: int
    structurally_infeasible: bool = False

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "is_pe": self.is_pe,
            "alpha": self.alpha,
            "hankel_rows": self.hankel_rows,
            "hankel_cols": self.hankel_cols,
            "structurally_infeasible": self.structurally_infeasible,
        }


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValidationError(f"seed must be nonnegative, got {seed}")
        return np.random.default_rng(int(seed))
    return np.random.default_rng(seed)


def pe_check(u: Signal, k: int) -> ExcitationReport:
    """Check whether ``u`` is persistently exciting of order ``k`` and by how much.

    ``alpha`` is the smallest singular value of the depth-``k`` Hankel matrix.
    When ``k*m`` exceeds the number of Hankel columns the matrix is wide the
    wrong way round; the report then has ``is_pe=False``, ``alpha=0`` and
    ``structurally_infeasible=True``.
    """
    if k < 1:
        raise ValidationError("order k must be positive")
    H = hankel(u, k)
    rows, cols = H.shape
    if rows > cols:
        return ExcitationReport(k, False, 0.0, rows, cols, structurally_infeasible=True)
    alpha = linalg.min_singular_value(H)
    is_pe = alpha > 0.0 and linalg.numerical_rank(H) == rows
    return ExcitationReport(k, is_pe, alpha, rows, cols)


def is_feasible(m: int, T: int, k: int) -> bool:
    return k * m <= T - k + 1


def design_input(m: int, T: int, k: int, target_alpha: float, seed: int) -> Signal:
    """Draw a seeded Gaussian input and rescale it to be exactly ``target_alpha``-PE of order ``k``.

    Hankel construction and singular values are homogeneous of degree one,
    so a single rescale hits the target.
    """
    if m < 1 or T < 1 or k < 1:
        raise ValidationError("m, T and k must be positive")
    if not target_alpha > 0 or not np.isfinite(target_alpha):
        raise ValidationError("target_alpha must be a positive finite number")
    if not is_feasible(m, T, k):
        raise StructuralError(
            f"order {k} needs k*m={k * m} <= T-k+1={T - k + 1}; no input of length {T} can be PE"
        )
    rng = make_rng(seed)
    while True:
        raw = rng.standard_normal((T, m))
        alpha0 = linalg.min_singular_value(hankel(Signal(raw), k))
        if alpha0 > 0.0:
            break
    return Signal(raw * (target_alpha / alpha0))


def gaussian_input(m: int, T: int, std: float, seed: int) -> Signal:
    """i.i.d. ``N(0, std^2)`` input, drawn from the same stream ``design_input`` uses."""
    if std < 0:
        raise ValidationError("std must be nonnegative")
    rng = make_rng(seed)
    return Signal(std * rng.standard_normal((T, m)))


def scale_input(u: Signal, c: float) -> Signal:
    return u.scaled(c)
