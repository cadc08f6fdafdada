"""Recovering the cone-supported density from its transform, and the checks built on it.

With ``P(iz) = (-i)^|gamma| z^gamma`` the quotient ``f/P`` sampled on the
slice ``Im z = -yc`` is the inverse Fourier transform of
``exp(-<xi,yc>) h(xi)``.  A windowed FFT of those samples, multiplied back by
``exp(<xi,yc>)``, returns ``h``.

The window is a flat top with Gaussian shoulders (an indicator convolved
with a Gaussian).  Its transform is ``sinc * Gaussian``, so windowing blurs
``h`` only near its jumps (the cone boundary) and leaves no polynomial bias
on smooth parts.  A guard band around the boundary is excluded from checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .cones import PolyhedralCone
from .distributions import ExpGrowthDistribution
from .errors import DivergenceError, PreconditionError, WindowError
from .reports import BoundReport
from .transform import FourierLaplace, QuadratureSpec, cone_l2_norm_sq, decay_rate

NOISE_REL = 1e-4


def select_gamma(N: int, n: int) -> tuple[int, ...]:
    """``gamma_j = N + 2``: then ``(1+|z|)^N / |z^gamma|`` decays like ``(1+|z|)^(-n-1)``."""
    if N < 0 or n < 1:
        raise ValueError("need N >= 0 and n >= 1")
    return (N + 2,) * n


@dataclass(frozen=True)
class SourceMeta:
    """What the recovery needs to know about the source: ``P`` and the convergence data."""

    gamma: tuple[int, ...]
    k: float = 0.0
    support: PolyhedralCone | None = None

    @classmethod
    def of(cls, meta) -> SourceMeta:
        if isinstance(meta, SourceMeta):
            return meta
        if isinstance(meta, ExpGrowthDistribution):
            return cls(meta.gamma, meta.k, meta.support)
        return cls(*meta)

    def check(self, yc) -> None:
        if self.support is not None and decay_rate(self.support, yc, self.k) <= 0:
            raise DivergenceError(f"yc = {np.asarray(yc).tolist()} is outside the convergence region")


def flat_top_window(x, L: float, taper: float | None = None) -> np.ndarray:
    """``1_[-L1, L1] * Gaussian(taper)`` with ``L1 = L - 6.5 taper`` (negligible at ``|x| = L``)."""
    tau = L / 16 if taper is None else taper
    L1 = L - 6.5 * tau
    if L1 <= 0:
        raise WindowError("taper too wide for the window")
    s = math.sqrt(2) * tau
    x = np.asarray(x, dtype=float)
    return 0.5 * (special.erf((x + L1) / s) - special.erf((x - L1) / s))


@dataclass(frozen=True)
class WindowSpec:
    L: float = 128.0
    M: int = 2048
    taper: float | None = None

    def __post_init__(self):
        if self.M % 4:
            raise ValueError("M must be a multiple of 4")

    @property
    def tau(self) -> float:
        return self.L / 16 if self.taper is None else self.taper

    @property
    def dx(self) -> float:
        return 2 * self.L / self.M

    @property
    def flat(self) -> float:
        return self.L - 6.5 * self.tau

    @property
    def guard(self) -> float:
        return 5.0 / self.tau

    def halved(self) -> WindowSpec:
        return WindowSpec(self.L / 2, self.M // 2, self.tau / 2)


def _grid_samples(f, axes, yc) -> np.ndarray:
    """``f(x - i yc)`` on a tensor grid; uses ``f.on_grid`` when the evaluator offers it."""
    if hasattr(f, "on_grid"):
        return np.asarray(f.on_grid(axes, yc))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1) - 1j * np.asarray(yc)
    return np.asarray(f(pts), dtype=complex).reshape(mesh[0].shape)


def _P(axes, yc, gamma) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    out = np.full(mesh[0].shape, (-1j) ** sum(gamma), dtype=complex)
    for j, g in enumerate(gamma):
        if g:
            out *= (mesh[j] - 1j * yc[j]) ** g
    return out


@dataclass(frozen=True, eq=False)
class RecoveredDensity:
    """``h`` on the frequency grid ``xi_axes[0] x ... x xi_axes[n-1]``.

    ``F`` is the windowed spectrum ``exp(-<xi,yc>) h``; ``trusted`` marks points
    outside the guard band, inside half the Nyquist band, and where the
    ``exp(<xi,yc>)`` amplification keeps roundoff below the noise floor.
    """

    xi_axes: tuple[np.ndarray, ...]
    values: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)
    trusted: np.ndarray = field(repr=False)
    yc_used: np.ndarray
    window: WindowSpec
    imag_residual: float
    window_change: float

    @property
    def dim(self) -> int:
        return len(self.xi_axes)

    @property
    def xi_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.xi_axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    @property
    def h_max(self) -> float:
        v = np.abs(self.values[self.trusted])
        return float(v.max()) if v.size else 0.0

    @property
    def noise_floor(self) -> float:
        return NOISE_REL * self.h_max

    def outside_support_max(self, support: PolyhedralCone) -> float:
        """Largest trusted ``|h|`` at frequencies outside ``support``."""
        out = self.trusted & ~support.contains(self.xi_points)
        v = np.abs(self.values[out])
        return float(v.max()) if v.size else 0.0


def _spectrum(s: np.ndarray, w: WindowSpec) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """``F(xi) = dx^n sum s(x) e^{i<xi,x>}`` on ``xi = q pi / L``, ``q = -M/2 .. M/2-1``."""
    n = s.ndim
    M, L, dx = w.M, w.L, w.dx
    q = np.arange(-M // 2, M // 2)
    xi = q * math.pi / L
    # sum_m s_m e^{i xi_q (-L + m dx)} = e^{-i xi_q L} * M * ifft(s)[q]
    F = np.fft.fftshift(np.fft.ifftn(s)) * M**n * dx**n
    phase = np.exp(-1j * xi * L)
    for j in range(n):
        shape = [1] * n
        shape[j] = M
        F = F * phase.reshape(shape)
    return (xi,) * n, F


def _recover_from_samples(s_full, P_full, w: WindowSpec, yc, support) -> tuple:
    n = s_full.ndim
    core = tuple(slice(0, w.M) for _ in range(n))
    x = -w.L + w.dx * np.arange(w.M)
    win = flat_top_window(x, w.L, w.tau)
    W = win
    for _ in range(n - 1):
        W = np.multiply.outer(W, win)
    s = s_full[core] / P_full[core]
    axes, F = _spectrum(s * W, w)
    mesh = np.meshgrid(*axes, indexing="ij")
    expo = sum(m * y for m, y in zip(mesh, yc))
    h = np.exp(np.minimum(expo, 700.0)) * F
    half_nyq = math.pi / (2 * w.dx)
    trusted = np.all(np.abs(np.stack(mesh)) <= half_nyq, axis=0)
    if support is not None:
        trusted &= np.abs(support.signed_margin(np.stack(mesh, axis=-1))) >= w.guard
    noise_abs = 1e-12 * w.dx**n * float(np.abs(s).sum())
    band = trusted & (expo < 60)
    hmax = float(np.abs(h[band]).max()) if band.any() else 0.0
    if noise_abs > 0 and hmax > 0:
        trusted &= np.exp(np.minimum(expo, 700.0)) * noise_abs <= 0.1 * NOISE_REL * hmax
    return axes, F, h, trusted, s


def recover_density(f, meta, yc, window: WindowSpec | None = None, *,
                    boundary_tol: float = 5e-2) -> RecoveredDensity:
    """Windowed inverse of the transform on the slice ``Im z = -yc``.

    ``f`` maps points (m, n) to values, or offers ``on_grid(axes, yc)``.
    ``meta`` is a :class:`SourceMeta`, a distribution, or ``(gamma, k[, support])``.
    """
    meta = SourceMeta.of(meta)
    yc = np.atleast_1d(np.asarray(yc, dtype=float))
    n = len(yc)
    w = window or WindowSpec()
    meta.check(yc)
    if any(g and abs(y) < 1e-6 for g, y in zip(meta.gamma, yc)):
        raise PreconditionError("P(iz) vanishes on the slice: a component of yc is 0")
    x = -w.L + w.dx * np.arange(w.M + 1)
    axes = (x,) * n
    s_full = _grid_samples(f, axes, yc)
    P_full = _P(axes, yc, meta.gamma)
    return _recover(s_full, P_full, w, yc, meta, boundary_tol)


def _boundary_ratio(q: np.ndarray) -> float:
    peak = float(np.abs(q).max())
    if peak == 0.0:
        return 0.0
    edge = 0.0
    for j in range(q.ndim):
        edge = max(edge, float(np.abs(np.take(q, [0, -1], axis=j)).max()))
    return edge / peak


def _recover(s_full, P_full, w: WindowSpec, yc, meta: SourceMeta, boundary_tol: float,
             with_change: bool = True) -> RecoveredDensity:
    n = s_full.ndim
    ratio = _boundary_ratio(s_full / P_full)
    if ratio > boundary_tol:
        raise WindowError(f"|f/P| at the window edge is {ratio:.3g} of its peak (tol {boundary_tol})")
    axes, F, h, trusted, _ = _recover_from_samples(s_full, P_full, w, yc, meta.support)
    change = 0.0
    if with_change:
        # same spacing, half the window: compare on the shared (even) frequencies
        half = w.halved()
        off = w.M // 4
        sub = tuple(slice(off, off + half.M + 1) for _ in range(n))
        _, _, h2, tr2, _ = _recover_from_samples(s_full[sub], P_full[sub], half, yc, meta.support)
        even = tuple(slice(0, None, 2) for _ in range(n))
        common = trusted[even] & tr2
        if common.any():
            change = float(np.abs(h[even] - h2)[common].max())
    imag = float(np.abs(h.imag[trusted]).max()) if trusted.any() else 0.0
    return RecoveredDensity(axes, h.real.copy(), F, trusted, yc, w, imag, change)


def y_independence_check(f, meta, yc1, yc2, window: WindowSpec | None = None,
                         tol: float = 1e-3) -> BoundReport:
    meta = SourceMeta.of(meta)
    meta.check(yc1)
    meta.check(yc2)
    r1 = recover_density(f, meta, yc1, window)
    r2 = recover_density(f, meta, yc2, window)
    floor = max(r1.noise_floor, r2.noise_floor)
    mask = r1.trusted & r2.trusted & (np.abs(r1.values) > floor)
    if not mask.any():
        diff = 0.0
    else:
        diff = float(np.abs(r1.values - r2.values)[mask].max()) / max(r1.h_max, r2.h_max)
    return BoundReport("y_independence", diff, tol, passed=bool(diff < tol),
                       inputs={"yc1": np.asarray(yc1), "yc2": np.asarray(yc2),
                               "points": int(mask.sum()), "noise_floor": floor})


def _evaluator(V: ExpGrowthDistribution, w: WindowSpec, ycs, q: QuadratureSpec | None):
    return FourierLaplace(V, q, x_max=w.L, yc=np.atleast_2d(ycs))


def parseval_check(V: ExpGrowthDistribution, yc, window: WindowSpec | None = None,
                   q: QuadratureSpec | None = None, tol: float = 1e-2,
                   f=None) -> BoundReport:
    """``(2 pi)^-n int_{C*} |e^{-<xi,yc>} h|^2`` against ``int |f/P|^2 dx``.

    The spatial side is a trapezoid sum over ``[-L, L]^n``; its ``1/L`` tail is
    removed by Richardson extrapolation against the half window.
    """
    w = window or WindowSpec()
    yc = np.atleast_1d(np.asarray(yc, dtype=float))
    n = V.dim
    SourceMeta.of(V).check(yc)
    lhs_raw, lhs_err = cone_l2_norm_sq(V, yc, q)
    lhs = (2 * math.pi) ** (-n) * lhs_raw
    f = f or _evaluator(V, w, yc, q)
    x = -w.L + w.dx * np.arange(w.M + 1)
    axes = (x,) * n
    s = _grid_samples(f, axes, yc) / _P(axes, yc, V.gamma)
    full = _trapezoid(np.abs(s) ** 2, w.dx)
    off = w.M // 4
    sub = tuple(slice(off, off + w.M // 2 + 1) for _ in range(n))
    half = _trapezoid(np.abs(s[sub]) ** 2, w.dx)
    rhs = 2 * full - half
    scale = max(abs(lhs), abs(rhs))
    rel = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return BoundReport("parseval", rel, tol, quadrature_error_estimate=lhs_err / max(scale, 1e-300),
                       passed=bool(rel < tol),
                       inputs={"yc": yc, "cone_side": lhs, "window_side": rhs,
                               "window_side_raw": full, "L": w.L, "M": w.M})


def _trapezoid(a: np.ndarray, dx: float) -> float:
    out = a
    for _ in range(a.ndim):
        out = np.trapezoid(out, dx=dx, axis=0)
    return float(out)


def reconstruct(rec: RecoveredDensity, gamma, z) -> np.ndarray:
    """``P(iz) F^-1[e^{-<xi,yc'>} h](x)`` at points ``z = x - i yc'`` (m, n).

    A frequency is dropped when its amplification ``exp(<xi, yc - yc'>)``
    would lift the aliasing level above ``1e-6`` of the spectrum peak (or
    exceeds ``e^18``).  The aliasing level is read off the last 5% of the
    band next to the Nyquist frequency.  For
    ``yc' >= yc`` componentwise this only touches ``xi`` outside the cone.
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    n = rec.dim
    xi = rec.xi_points.reshape(-1, n)
    F = rec.spectrum.reshape(-1)
    dxi = (math.pi / rec.window.L) ** n
    absF = np.abs(F)
    outer = np.abs(xi).max(axis=1) >= 0.95 * math.pi / rec.window.dx
    alias = float(absF[outer].max()) if outer.any() else 0.0
    cap = 18.0
    if alias > 0:
        cap = min(cap, math.log(1e-6 * float(absF.max()) / alias))
    out = np.empty(len(z), dtype=complex)
    for i, zi in enumerate(z):
        ycp = -zi.imag
        expo = xi @ (rec.yc_used - ycp)
        keep = expo <= max(cap, 0.0)
        vals = F[keep] * np.exp(expo[keep]) * np.exp(-1j * (xi[keep] @ zi.real))
        P = (-1j) ** sum(gamma) * np.prod(zi ** np.asarray(gamma))
        out[i] = P * (2 * math.pi) ** (-n) * dxi * vals.sum()
    return out


def default_test_points(yc, n_points: int = 10, x_extent: float = 3.0) -> np.ndarray:
    yc = np.atleast_1d(np.asarray(yc, dtype=float))
    n = len(yc)
    xs = np.linspace(-x_extent, x_extent, n_points)
    lift = 1 + 0.5 * np.arange(n_points) / max(n_points - 1, 1)
    pts = np.empty((n_points, n), dtype=complex)
    for i in range(n_points):
        pts[i] = xs[i] * np.linspace(1.0, 0.5, n) - 1j * yc * lift[i]
    return pts


def roundtrip_reconstruct(V: ExpGrowthDistribution, yc, z_test=None,
                          window: WindowSpec | None = None, q: QuadratureSpec | None = None,
                          tol: float = 1e-2) -> list[BoundReport]:
    """Transform, recover ``h`` at ``yc``, transform back at (possibly higher) ``yc'``."""
    w = window or WindowSpec()
    yc = np.atleast_1d(np.asarray(yc, dtype=float))
    z_test = default_test_points(yc) if z_test is None else np.atleast_2d(np.asarray(z_test, dtype=complex))
    if np.any(np.abs(z_test.real) > w.flat):
        raise WindowError("test points must lie inside the flat part of the window")
    f = _evaluator(V, w, np.vstack([yc, -z_test.imag]), q)
    rec = recover_density(f, V, yc, w)
    f2 = reconstruct(rec, V.gamma, z_test)
    f1 = f(z_test)
    rows = []
    for z, a, b in zip(z_test, f1, f2):
        err = abs(b - a) / abs(a) if a != 0 else abs(b)
        rows.append(BoundReport("roundtrip", err, tol, passed=bool(err < tol),
                                inputs={"z": z, "f": a, "f_reconstructed": b}))
    return rows


def uniqueness_witness(V1: ExpGrowthDistribution, V2: ExpGrowthDistribution, yc,
                       window: WindowSpec | None = None, factor: float = 10.0) -> BoundReport:
    """Distinct sources must give recovered densities that differ beyond the noise floor."""
    w = window or WindowSpec()
    yc = np.atleast_1d(np.asarray(yc, dtype=float))
    r1 = recover_density(_evaluator(V1, w, yc, None), V1, yc, w)
    r2 = recover_density(_evaluator(V2, w, yc, None), V2, yc, w)
    mask = r1.trusted & r2.trusted
    diff = float(np.abs(r1.values - r2.values)[mask].max()) if mask.any() else 0.0
    floor = max(r1.noise_floor, r2.noise_floor, r1.window_change, r2.window_change)
    return BoundReport("uniqueness", factor * floor, diff, passed=bool(diff > factor * floor),
                       inputs={"noise_floor": floor})
