"""Boundary values of transforms and an FBI-slope probe of their analytic wave front.

The probe at ``(x0, xi_hat)`` is

    W(lam) = dx^n sum_t u(t) exp(-lam |t - x0|^2 / 2) exp(+i lam <xi_hat, t>)

and the direction is called singular when ``log|W|`` decays slower than
``-delta * lam``.  The ``+i`` phase matches the Fourier convention under
which the boundary value ``u`` has its spectrum in ``C*``: with
``u(t) = int_{C*} H(eta) exp(-i<eta,t>)``, the window picks up ``eta = lam xi_hat``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .cones import PolyhedralCone
from .distributions import ExpGrowthDistribution
from .errors import DivergenceError, GeometryError, UnsupportedDimensionError
from .reports import BoundReport
from .transform import FourierLaplace, QuadratureSpec, decay_rate

LEAK_TOL = 1e-8


def _axes(x_grid) -> tuple[np.ndarray, ...]:
    if isinstance(x_grid, np.ndarray) and x_grid.ndim == 1:
        return (x_grid,)
    return tuple(np.asarray(a, dtype=float) for a in x_grid)


def _sample(f, axes, yc) -> np.ndarray:
    if hasattr(f, "on_grid"):
        return np.asarray(f.on_grid(axes, yc))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1) - 1j * np.asarray(yc)
    return np.asarray(f(pts), dtype=complex).reshape(mesh[0].shape)


@dataclass(frozen=True)
class Translated:
    """``z -> f(z - a)``: the transform of the density times ``exp(i<xi, a>)``.

    Moves every singular point of the boundary value by ``+a``.
    """

    f: object
    a: np.ndarray

    def __call__(self, z):
        return self.f(np.asarray(z, dtype=complex) - self.a)

    def on_grid(self, axes, yc):
        shifted = [np.asarray(ax) - aj for ax, aj in zip(axes, self.a)]
        return _sample(self.f, shifted, yc)

    @property
    def V(self):
        return getattr(self.f, "V", None)


def translated(f, a) -> Translated:
    return Translated(f, np.atleast_1d(np.asarray(a, dtype=float)))


@dataclass(frozen=True, eq=False)
class BoundarySignal:
    x_axes: tuple[np.ndarray, ...]
    rungs: tuple[np.ndarray, ...] = field(repr=False)
    eps_ladder: tuple[float, ...]
    y_hat: np.ndarray
    cauchy: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.x_axes)

    @property
    def values(self) -> np.ndarray:
        """The rung closest to the real space."""
        return self.rungs[-1]

    @property
    def spacing(self) -> np.ndarray:
        return np.array([ax[1] - ax[0] for ax in self.x_axes])


def boundary_value(f, y_hat, x_grid, eps_ladder, *, meta: ExpGrowthDistribution | None = None,
                   away_from=None, away_radius: float = 0.5) -> BoundarySignal:
    """Sample ``u_eps(x) = f(x - i eps y_hat)`` on every rung of a decreasing ladder.

    ``cauchy[j]`` is the sup difference between rungs ``j`` and ``j+1``, taken
    over grid points farther than ``away_radius`` from each point in ``away_from``.
    """
    axes = _axes(x_grid)
    n = len(axes)
    y_hat = np.atleast_1d(np.asarray(y_hat, dtype=float))
    ladder = tuple(float(e) for e in eps_ladder)
    if len(y_hat) != n:
        raise ValueError("direction and grid dimensions differ")
    if not ladder or any(e <= 0 for e in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("the eps ladder must be positive and strictly decreasing")
    V = meta or getattr(f, "V", None)
    if V is not None:
        for e in ladder:
            if decay_rate(V.support, e * y_hat, V.k) <= 0:
                raise DivergenceError(f"rung eps={e}: eps*c does not exceed k={V.k}")
    rungs = tuple(_sample(f, axes, e * y_hat) for e in ladder)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    mask = np.ones(mesh[0].shape, dtype=bool)
    for p in np.atleast_2d(away_from) if away_from is not None else []:
        mask &= np.linalg.norm(pts - np.asarray(p, dtype=float), axis=-1) > away_radius
    cauchy = tuple(float(np.abs(a - b)[mask].max()) if mask.any() else 0.0
                   for a, b in zip(rungs, rungs[1:]))
    return BoundarySignal(axes, rungs, ladder, y_hat, cauchy)


def boundary_value_of(V: ExpGrowthDistribution, y_hat, x_grid, eps_ladder,
                      q: QuadratureSpec | None = None, **kw) -> BoundarySignal:
    """Convenience: build one transform evaluator sized for all rungs and sample it."""
    axes = _axes(x_grid)
    y_hat = np.atleast_1d(np.asarray(y_hat, dtype=float))
    for e in eps_ladder:
        if decay_rate(V.support, e * y_hat, V.k) <= 0:
            raise DivergenceError(f"rung eps={e}: eps*c does not exceed k={V.k}")
    x_max = max(float(np.abs(ax).max()) for ax in axes)
    f = FourierLaplace(V, q or QuadratureSpec(eps=1e-9), x_max=x_max,
                       yc=np.outer(eps_ladder, y_hat))
    return boundary_value(f, y_hat, axes, eps_ladder, meta=V, **kw)


@dataclass(frozen=True)
class DecayProfile:
    x0: np.ndarray
    xi_hat: np.ndarray
    lambdas: np.ndarray = field(repr=False)
    log_abs_w: np.ndarray = field(repr=False)
    slope: float

    def as_rows(self) -> list[tuple[float, float]]:
        return list(zip(self.lambdas.tolist(), self.log_abs_w.tolist()))


def fbi_decay_profile(u: BoundarySignal, x0, xi_hat, lambda_grid) -> DecayProfile:
    lam = np.asarray(lambda_grid, dtype=float)
    if lam.ndim != 1 or len(lam) < 8 or np.any(np.diff(lam) <= 0) or lam[0] <= 0:
        raise ValueError("lambda grid must be positive, increasing, with at least 8 values")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    xi_hat = np.atleast_1d(np.asarray(xi_hat, dtype=float))
    n = u.dim
    if len(x0) != n or len(xi_hat) != n:
        raise ValueError("dimension mismatch")
    d = min(min(x0[j] - ax[0], ax[-1] - x0[j]) for j, ax in enumerate(u.x_axes))
    if d <= 0:
        raise GeometryError("x0 is not inside the grid")
    leak = math.exp(-lam[0] * d * d / 2)
    if leak > LEAK_TOL:
        raise GeometryError(f"Gaussian window mass at the grid edge is {leak:.2e} (> {LEAK_TOL})")
    vol = float(np.prod(u.spacing))
    W = np.empty(len(lam), dtype=complex)
    for i, L in enumerate(lam):
        acc = u.values
        # contract one axis at a time with its separable kernel
        for j, ax in enumerate(u.x_axes):
            ker = np.exp(-L * (ax - x0[j]) ** 2 / 2 + 1j * L * xi_hat[j] * ax)
            acc = np.tensordot(ker, acc, axes=([0], [0]))
        W[i] = vol * acc
    logw = np.log(np.maximum(np.abs(W), 1e-300))
    upper = slice(len(lam) // 2, None)
    slope = float(np.polyfit(lam[upper], logw[upper], 1)[0])
    return DecayProfile(x0, xi_hat, lam, logw, slope)


def probe_directions(n: int, count: int) -> np.ndarray:
    """Evenly spread Euclidean unit directions (``+1, -1`` when ``n = 1``)."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        th = 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(th), np.sin(th)])
    raise UnsupportedDimensionError("wave-front scans are limited to n <= 2")


def direction_spacing(directions) -> float:
    """Largest l1 gap between a normalized direction and its nearest neighbour (0 in 1-d)."""
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    if d.shape[1] == 1:
        return 0.0
    d = d / np.abs(d).sum(axis=1, keepdims=True)
    dist = np.abs(d[:, None, :] - d[None, :, :]).sum(axis=-1)
    np.fill_diagonal(dist, np.inf)
    return float(dist.min(axis=1).max())


@dataclass(frozen=True)
class WaveFrontEstimate:
    base_point: np.ndarray
    directions: np.ndarray = field(repr=False)
    decay_rates: np.ndarray
    threshold: float
    lambda_max: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.decay_rates)):
            raise ValueError("decay rates must be finite")

    @property
    def singular_mask(self) -> np.ndarray:
        return self.decay_rates > -self.threshold

    @property
    def singular_set(self) -> np.ndarray:
        return self.directions[self.singular_mask]

    def reclassified(self, threshold: float) -> WaveFrontEstimate:
        return WaveFrontEstimate(self.base_point, self.directions, self.decay_rates,
                                 threshold, self.lambda_max)


def wavefront_estimate(u: BoundarySignal, x_points, direction_count: int, lambda_grid,
                       delta_threshold: float = 0.05) -> list[WaveFrontEstimate]:
    dirs = probe_directions(u.dim, direction_count)
    out = []
    for x0 in np.atleast_2d(np.asarray(x_points, dtype=float).reshape(-1, u.dim)):
        slopes = np.array([fbi_decay_profile(u, x0, d, lambda_grid).slope for d in dirs])
        out.append(WaveFrontEstimate(x0, dirs, slopes, delta_threshold, float(np.max(lambda_grid))))
    return out


def l1_distance_to_cone(d, cone: PolyhedralCone) -> float:
    """l1 distance from the l1-normalized ``d`` to the l1 cross-section of ``cone`` (exact LP)."""
    d = np.asarray(d, dtype=float)
    d = d / np.abs(d).sum()
    n = len(d)
    best = math.inf
    for P in cone.cross_section_pieces:
        m = len(P)
        # variables: lambda (m), s (n); min sum s, |d - P^T lambda| <= s, sum lambda = 1
        c = np.concatenate([np.zeros(m), np.ones(n)])
        A = np.block([[P.T, -np.eye(n)], [-P.T, -np.eye(n)]])
        b = np.concatenate([d, -d])
        Aeq = np.concatenate([np.ones(m), np.zeros(n)])[None, :]
        res = linprog(c, A_ub=A, b_ub=b, A_eq=Aeq, b_eq=[1.0], bounds=(0, None), method="highs")
        if res.status == 0:
            best = min(best, float(res.fun))
    return best


def cone_containment_check(estimates: list[WaveFrontEstimate], Cstar: PolyhedralCone,
                           angular_tol: float) -> BoundReport:
    worst = 0.0
    offenders = []
    for est in estimates:
        for d in est.singular_set:
            dist = l1_distance_to_cone(d, Cstar)
            worst = max(worst, dist)
            if dist > angular_tol + 1e-12:
                offenders.append((est.base_point.tolist(), d.tolist()))
    return BoundReport("wavefront_containment", worst, angular_tol, passed=not offenders,
                       inputs={"offenders": offenders,
                               "singular_count": sum(len(e.singular_set) for e in estimates)})
