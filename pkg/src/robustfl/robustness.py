"""Quantitative controllability and certified singular-value bounds for input/state data.

For a unit direction ``(xi, eta)`` the padded vector ``z = (xi, eta, 0)``
lives in ``R^L`` with ``L = n + m(n+1)``. ``Theta_z`` stacks ``z^T M^j`` for
``j = 0..n``. If every such ``Theta_z`` has smallest singular value at least
``rho`` and the input is ``alpha``-PE of order ``n+1``, then the data matrix
``[H_1(x); H_1(u)]`` has smallest singular value at least
``alpha * rho / sqrt(n+1)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from . import linalg
from .errors import DimensionError, UncontrollableError, ValidationError
from .excitation import make_rng, pe_check
from .signals import Signal, hankel, stack_state_input
from .system import LtiSystem


@dataclass(frozen=True)
class ExtendedDirection:
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", np.atleast_1d(np.asarray(self.xi, dtype=float)))
        object.__setattr__(self, "eta", np.atleast_1d(np.asarray(self.eta, dtype=float)))

    @property
    def head(self) -> np.ndarray:
        """``(xi, eta)`` without the zero padding."""
        return np.concatenate([self.xi, self.eta])

    def z(self, n: int, m: int) -> np.ndarray:
        if self.xi.size != n or self.eta.size != m:
            raise DimensionError(f"direction has sizes ({self.xi.size}, {self.eta.size}), expected ({n}, {m})")
        return np.concatenate([self.xi, self.eta, np.zeros(n * m)])

    def normalized(self) -> "ExtendedDirection":
        nrm = float(np.linalg.norm(self.head))
        if nrm == 0.0:
            raise ValidationError("direction (xi, eta) must be nonzero")
        return ExtendedDirection(self.xi / nrm, self.eta / nrm)

    @classmethod
    def from_head(cls, v, n: int) -> "ExtendedDirection":
        v = np.asarray(v, dtype=float)
        return cls(v[:n], v[n:])


@dataclass(frozen=True)
class RobustnessCertificate:
    alpha: float
    rho: float
    n: int
    delta_cert: float
    delta_actual: float

    @property
    def holds(self) -> bool:
        return self.delta_actual >= self.delta_cert

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RobustnessCertificate":
        return cls(float(d["alpha"]), float(d["rho"]), int(d["n"]), float(d["delta_cert"]), float(d["delta_actual"]))


def build_M(sys: LtiSystem) -> np.ndarray:
    """Square block matrix of size ``n + m(n+1)``.

    Rows ``0..n-1`` are ``[A B 0 ... 0]``; input block ``i`` (``i = 1..n``)
    has ``I_m`` one block to the right of the diagonal; the last ``m`` rows
    are zero.
    """
    n, m = sys.n, sys.m
    L = n + m * (n + 1)
    M = np.zeros((L, L))
    M[:n, :n] = sys.A
    M[:n, n : n + m] = sys.B
    for i in range(1, n + 1):
        r = n + (i - 1) * m
        c = n + i * m
        M[r : r + m, c : c + m] = np.eye(m)
    return M


def theta_z(sys: LtiSystem, d: ExtendedDirection) -> np.ndarray:
    """``(n+1) x L`` matrix with row ``j`` equal to ``z^T M^j``."""
    M = build_M(sys)
    row = d.z(sys.n, sys.m)
    rows = [row]
    for _ in range(sys.n):
        row = M.T @ row
        rows.append(row)
    return np.array(rows)


def sigma_theta(sys: LtiSystem, d: ExtendedDirection) -> float:
    """Smallest singular value of ``Theta_z`` for the normalized direction ``d``."""
    return linalg.min_singular_value(theta_z(sys, d.normalized()))


class _ThetaObjective:
    """``v -> sigma_1(Theta_{v/|v|})`` over the unpadded head ``v = (xi, eta)``.

    Only the first ``n+m`` rows of each power of ``M`` meet a nonzero entry of
    ``z``. The Gram matrix ``Theta Theta^T`` is then a fixed quadratic form in
    ``v``, precomputed once.
    """

    def __init__(self, sys: LtiSystem):
        M = build_M(sys)
        p = sys.n + sys.m
        powers = [np.eye(M.shape[0])]
        for _ in range(sys.n):
            powers.append(powers[-1] @ M)
        self.P = np.stack([P[:p, :] for P in powers])  # (n+1, p, L)
        self.K = np.einsum("jpl,kql->jkpq", self.P, self.P)  # (n+1, n+1, p, p)
        self._P_flat = self.P.transpose(1, 0, 2).reshape(p, -1)
        self.p = p

    def batch(self, V: np.ndarray) -> np.ndarray:
        V = np.atleast_2d(V)
        Th = (V @ self._P_flat).reshape(V.shape[0], self.P.shape[0], -1)
        lam = np.linalg.eigvalsh(Th @ Th.transpose(0, 2, 1))[:, 0]
        return np.sqrt(np.maximum(lam, 0.0) / np.einsum("bp,bp->b", V, V))

    def __call__(self, v: np.ndarray) -> float:
        vv = v @ v
        if vv == 0.0:
            return np.inf
        lam = np.linalg.eigvalsh(self.K @ v @ v)[0]
        return math.sqrt(max(lam, 0.0) / vv)


def _sphere_samples(rng: np.random.Generator, count: int, p: int) -> np.ndarray:
    if count <= 0:
        return np.zeros((0, p))
    V = rng.standard_normal((count, p))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _tangent_bases(V: np.ndarray) -> np.ndarray:
    """Orthonormal bases of the complements of each row of ``V``: shape ``(K, p, p-1)``."""
    K, p = V.shape
    out = np.empty((K, p, p - 1))
    for k in range(K):
        q, _ = np.linalg.qr(np.column_stack([V[k], np.eye(p)]))
        out[k] = q[:, 1:p]
    return out


def _batched_nelder_mead(fun, X0: np.ndarray, step: float, xatol: float, fatol: float, maxiter: int):
    """Nelder-Mead run on ``K`` independent problems in lockstep.

    ``fun(X, idx)`` evaluates points ``X`` (one row per problem listed in
    ``idx``). Each problem keeps its own simplex and follows the standard
    reflect/expand/contract/shrink rules; converged problems are frozen.
    Returns ``(X, F)`` of the best vertex of every problem.
    """
    K, d = X0.shape
    S = np.repeat(X0[:, None, :], d + 1, axis=1)
    S[:, 1:, :] += step * np.eye(d)[None]
    everyone = np.arange(K)
    F = np.stack([fun(S[:, i], everyone) for i in range(d + 1)], axis=1)
    active = np.ones(K, dtype=bool)
    for _ in range(maxiter):
        order = np.argsort(F, axis=1, kind="stable")
        S = np.take_along_axis(S, order[:, :, None], axis=1)
        F = np.take_along_axis(F, order, axis=1)
        spread_x = np.max(np.abs(S[:, 1:] - S[:, :1]), axis=(1, 2))
        spread_f = np.max(np.abs(F[:, 1:] - F[:, :1]), axis=1)
        active &= ~((spread_x <= xatol) & (spread_f <= fatol))
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Sa, Fa = S[idx], F[idx]
        worst = Sa[:, -1]
        fbest, fsecond, fworst = Fa[:, 0], Fa[:, -2], Fa[:, -1]
        c = Sa[:, :-1].mean(axis=1)
        xr = 2 * c - worst
        fr = fun(xr, idx)
        new_x = worst.copy()
        new_f = fworst.copy()

        expand = fr < fbest
        xe = 3 * c - 2 * worst
        fe = np.full(idx.size, np.inf)
        if expand.any():
            fe[expand] = fun(xe[expand], idx[expand])
        use_e = expand & (fe < fr)
        use_r = (expand & ~use_e) | (~expand & (fr < fsecond))
        new_x[use_e], new_f[use_e] = xe[use_e], fe[use_e]
        new_x[use_r], new_f[use_r] = xr[use_r], fr[use_r]

        contract = fr >= fsecond
        outside = contract & (fr < fworst)
        xc = np.where(outside[:, None], 1.5 * c - 0.5 * worst, 0.5 * (c + worst))
        fc = np.full(idx.size, np.inf)
        if contract.any():
            fc[contract] = fun(xc[contract], idx[contract])
        ok = contract & np.where(outside, fc <= fr, fc < fworst)
        new_x[ok], new_f[ok] = xc[ok], fc[ok]
        shrink = contract & ~ok

        keep = ~shrink
        S[idx[keep], -1] = new_x[keep]
        F[idx[keep], -1] = new_f[keep]
        if shrink.any():
            sh = idx[shrink]
            S[sh, 1:] = S[sh, :1] + 0.5 * (S[sh, 1:] - S[sh, :1])
            for i in range(1, d + 1):
                F[sh, i] = fun(S[sh, i], sh)
    i0 = np.argmin(F, axis=1)
    return S[everyone, i0], F[everyone, i0]


def _local_search(f: "_ThetaObjective", V: np.ndarray, tol: float, step: float, maxiter: int):
    """Derivative-free local minimization on the unit sphere from each row of ``V``.

    Each search runs in exponential-map coordinates around its start point,
    since the objective is constant along rays and would give the simplex a
    flat direction in ``R^p``.
    """
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    Q = _tangent_bases(V)

    def lift(W, idx):
        # exponential map at each start: bounded, so a simplex cannot run off to infinity
        r = np.linalg.norm(W, axis=1, keepdims=True)
        sinc = np.where(r > 0, np.sin(r) / np.where(r > 0, r, 1.0), 1.0)
        Y = np.cos(r) * V[idx] + sinc * np.einsum("kpd,kd->kp", Q[idx], W)
        return Y / np.linalg.norm(Y, axis=1, keepdims=True)

    def fun(W, idx):
        return f.batch(lift(W, idx))

    W, vals = _batched_nelder_mead(fun, np.zeros((V.shape[0], V.shape[1] - 1)), step, tol, tol * 1e-2, maxiter)
    return lift(W, np.arange(V.shape[0])), vals


_COARSE_TOL = 1e-3
_REFINE_BEST = 3


def estimate_rho0(
    sys: LtiSystem,
    starts: int = 16,
    seed: int = 0,
    refine_tol: float = 1e-9,
    return_direction: bool = False,
):
    """Estimate ``rho_0 = min sigma_1(Theta_z)`` over unit directions ``(xi, eta)``.

    Nelder-Mead runs from ``starts`` seeded uniform points on the sphere plus
    every coordinate direction. The best few coarse results are refined to
    ``refine_tol`` and the smallest value found is returned. Being a local
    search, this estimates the true infimum from above.
    """
    if not sys.is_controllable():
        raise UncontrollableError("(A, B) is not controllable; the infimum of sigma_1(Theta_z) is 0")
    if starts < 0:
        raise ValidationError("starts must be nonnegative")
    if not refine_tol > 0:
        raise ValidationError("refine_tol must be positive")
    f = _ThetaObjective(sys)
    p = f.p
    rng = make_rng(seed)
    inits = np.vstack([np.eye(p), _sphere_samples(rng, starts, p)])
    V1, F1 = _local_search(f, inits, max(refine_tol, _COARSE_TOL), step=0.2, maxiter=200 * p)
    best = np.argsort(F1, kind="stable")[:_REFINE_BEST]
    V2, F2 = _local_search(f, V1[best], refine_tol, step=0.01, maxiter=1000 * p)
    V2, F2 = _local_search(f, V2, refine_tol, step=1e-4, maxiter=1000 * p)
    i = int(np.argmin(F2))
    value = float(min(F2[i], F1.min()))
    direction = V2[i] if F2[i] <= F1.min() else V1[int(np.argmin(F1))]
    if return_direction:
        return value, ExtendedDirection.from_head(direction, sys.n)
    return value


def _sphere_grid_3(step: float) -> np.ndarray:
    # z and -z give the same sigma, so half the azimuth range suffices
    theta = np.arange(0.0, math.pi + step / 2, step)
    phi = np.arange(0.0, math.pi, step)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)


def rho0_sphere_grid(sys: LtiSystem, step: float = 0.01, refine: int = 5, chunk: int = 20000) -> float:
    """Brute-force ``rho_0`` for ``n + m = 3``: dense angle grid, then local refinement.

    Serves as an independent check on :func:`estimate_rho0`; each grid point
    is evaluated with a full SVD of the explicitly built ``Theta_z``.
    """
    if sys.n + sys.m != 3:
        raise ValidationError("the sphere grid is only implemented for n + m = 3")
    if not 0 < step <= 0.01 + 1e-15:
        raise ValidationError("grid step must be in (0, 0.01] rad")
    M = build_M(sys)
    L = M.shape[0]
    grid = _sphere_grid_3(step)
    Z = np.zeros((grid.shape[0], L))
    Z[:, :3] = grid
    vals = np.empty(grid.shape[0])
    for lo in range(0, Z.shape[0], chunk):
        rows = [Z[lo : lo + chunk]]
        for _ in range(sys.n):
            rows.append(rows[-1] @ M)
        Th = np.stack(rows, axis=1)
        vals[lo : lo + chunk] = np.linalg.svd(Th, compute_uv=False)[:, -1]

    def f(v):
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return np.inf
        return sigma_theta(sys, ExtendedDirection.from_head(v / nrm, sys.n))

    best = float(vals.min())
    for i in np.argsort(vals)[:refine]:
        res = minimize(f, grid[i], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


def required_pe_level(delta: float, rho: float, n: int) -> float:
    """PE level ``delta * sqrt(n+1) / rho`` that guarantees ``sigma_1 >= delta``."""
    if not (delta > 0 and rho > 0 and n > 0):
        raise ValidationError("delta, rho and n must all be positive")
    return delta * math.sqrt(n + 1) / rho


def certified_delta(alpha: float, rho: float, n: int) -> float:
    if alpha < 0 or not rho > 0 or n < 1:
        raise ValidationError("need alpha >= 0, rho > 0, n >= 1")
    return alpha * rho / math.sqrt(n + 1)


def _align_state(u: Signal, x: Signal) -> Signal:
    # datasets carry x(T) as well; drop it so x and u cover the same window
    T = u.length
    if x.length == T + 1:
        return x.window(x.first_index, x.first_index + T - 1)
    if x.length != T:
        raise DimensionError(f"state length {x.length} does not match input length {T} (or {T + 1})")
    return x


def certify(u: Signal, x: Signal, rho: float, n: int) -> RobustnessCertificate:
    """Certified and actual smallest singular value of ``[H_1(x); H_1(u)]``."""
    if not rho > 0:
        raise ValidationError("rho must be positive")
    if n < 1 or x.dim != n:
        raise DimensionError(f"state dimension {x.dim} does not match n={n}")
    x = _align_state(u, x)
    if u.length < n + 1:
        raise DimensionError(f"need T >= n+1 = {n + 1}, got T={u.length}")
    alpha = pe_check(u, n + 1).alpha
    return RobustnessCertificate(
        alpha=alpha,
        rho=float(rho),
        n=n,
        delta_cert=certified_delta(alpha, rho, n),
        delta_actual=linalg.min_singular_value(stack_state_input(x, u)),
    )


def interlacing_gap(u: Signal, x: Signal, n: int) -> tuple[float, float]:
    """``(sigma_1(H_{n+1}(u)), sigma_{n+1}([H_1(x_[0,T-n-1]); H_{n+1}(u)]))``.

    Removing the ``n`` state rows can only push singular values down, so the
    first entry never exceeds the second.
    """
    x = _align_state(u, x)
    T = u.length
    if T < n + 1:
        raise DimensionError(f"need T >= n+1 = {n + 1}, got T={T}")
    Hu = hankel(u, n + 1)
    Hx = hankel(x.window(x.first_index, x.first_index + T - n - 1), 1)
    stacked = np.vstack([Hx, Hu])
    s = linalg.singular_values(stacked)
    if s.size < n + 1:
        raise DimensionError(f"stacked matrix has only {s.size} singular values, need {n + 1}")
    return linalg.min_singular_value(Hu), float(s[n])
