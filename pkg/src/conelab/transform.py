"""Fourier-Laplace transform of cone-supported densities and the bounds it obeys.

Sign convention: a tube point is ``z = x - i*yc`` with ``yc`` in the compact
subcone ``C'``.  Then ``|exp(-i<xi,z>)| = exp(-<xi,yc>)`` decays on ``C*`` and

    f(z) = (2 pi)^-n (-i)^|gamma| z^gamma  int_{C*} exp(k|xi|_1) g(xi) exp(-i<xi,z>) dxi

converges whenever ``k < min_{xi in C*, |xi|_1=1} <xi, yc>``.

Integrals over ``C*`` use l1-polar coordinates ``xi = t*w`` with ``|w|_1 = 1``:
the cross-section is split into simplices, each simplex ``S`` with vertex
matrix ``V`` contributes ``|det V| int_S int_0^R t^(n-1) F(t w) dt dw``.  The
radial factor is composite Gauss-Legendre on ``[0, R]``, the simplex factor a
collapsed (Duffy) Gauss-Legendre product.  ``R`` comes from an analytic tail
bound, so truncation error is bounded rather than guessed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate

from .cones import PolyhedralCone
from .distributions import ExpGrowthDistribution, density_sup_bound
from .errors import DivergenceError, GeometryError, QuadratureSpecError
from .indicators import CompactConvexSet, indicator_cone_normalized
from .reports import BoundReport

_CHUNK = 1 << 21


def sphere_area(n: int) -> float:
    """Euclidean area of the unit sphere in R^n (``S^0 = 2``)."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True)
class TubePoint:
    x: np.ndarray
    yc: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "yc", np.atleast_1d(np.asarray(self.yc, dtype=float)))

    @property
    def z(self) -> np.ndarray:
        return self.x - 1j * self.yc

    @classmethod
    def from_z(cls, z) -> TubePoint:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return cls(z.real, -z.imag)


@dataclass(frozen=True)
class TubeDomain:
    """``R^n - i(C' minus the closed l1-ball of radius r)``."""

    cone: PolyhedralCone
    r: float = 0.0

    def contains(self, p: TubePoint) -> bool:
        return bool(self.cone.contains(p.yc)) and float(np.abs(p.yc).sum()) > self.r

    def grid(self, x_values, yc_values) -> list[TubePoint]:
        pts = [TubePoint(x, yc) for yc in np.atleast_2d(yc_values) for x in np.atleast_2d(x_values)]
        bad = [p for p in pts if not self.contains(p)]
        if bad:
            raise GeometryError(f"{len(bad)} grid points lie outside the tube")
        return pts


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution of the polar product rule.

    ``None`` panel counts and radius are sized automatically from the decay
    rate, the oscillation range and the density catalog entry.
    """

    eps: float = 1e-10
    radius: float | None = None
    radial_order: int = 16
    radial_panels: int | None = None
    angular_order: int = 8
    angular_panels: int | None = None
    max_nodes: int = 6_000_000

    def refined(self) -> QuadratureSpec:
        if self.radial_panels is None or self.angular_panels is None:
            raise ValueError("resolve the spec before refining it")
        return replace(self, radial_panels=2 * self.radial_panels,
                       angular_panels=2 * self.angular_panels)


# --- polar product rule ----------------------------------------------------


@lru_cache(maxsize=64)
def _gauss(p: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(p)
    return (x + 1) / 2, w / 2


def _composite(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    return (edges[:-1, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


def _simplex_rule(d: int, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric-free rule on the standard d-simplex: points ``mu`` (m, d), weights."""
    if d == 0:
        return np.zeros((1, 0)), np.ones(1)
    u, wu = _composite(0.0, 1.0, panels, order)
    grids = np.meshgrid(*([u] * d), indexing="ij")
    wgrids = np.meshgrid(*([wu] * d), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    mu = np.empty_like(U)
    rem = np.ones(len(U))
    for i in range(d):
        mu[:, i] = rem * U[:, i]
        rem = rem * (1 - U[:, i])
    # Jacobian of the collapsed map: prod_i (1 - u_i)^(d - 1 - i)
    jac = np.ones(len(U))
    for i in range(d):
        jac *= (1 - U[:, i]) ** (d - 1 - i)
    return mu, W * jac


def polar_rule(cone: PolyhedralCone, radius: float, radial_panels: int, radial_order: int,
               angular_panels: int, angular_order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``xi`` (m, n) and weights for ``int_{C* , |xi|_1 <= R} F(xi) dxi``."""
    n = cone.dim
    if not cone.is_full_dimensional:
        return np.zeros((0, n)), np.zeros(0)
    t, wt = _composite(0.0, radius, radial_panels, radial_order)
    wt = wt * t ** (n - 1)
    mu, wmu = _simplex_rule(n - 1, angular_panels, angular_order)
    nodes, weights = [], []
    for S in cone.simplices:
        det = abs(np.linalg.det(S))
        omega = S[0] + mu @ (S[1:] - S[0])
        nodes.append((t[:, None, None] * omega[None, :, :]).reshape(-1, n))
        weights.append((wt[:, None] * (det * wmu)[None, :]).ravel())
    return np.vstack(nodes), np.concatenate(weights)


def decay_rate(cone: PolyhedralCone, yc, k: float) -> float:
    """``min over |xi|_1 = 1 in C*`` of ``<xi, yc> - k`` (exact: vertex scan)."""
    vals = cone.cross_section_vertices @ np.asarray(yc, dtype=float).T
    return float(np.min(vals)) - k


def _radial_tail(n: int, power: int, rate: float, envelope, R: float) -> float:
    p = n + power

    def integrand(t):
        return t ** (p - 1) * math.exp(-rate * t) * float(envelope(t))

    val, _ = integrate.quad(integrand, R, np.inf, limit=200, epsabs=0.0, epsrel=1e-6)
    return max(val, 0.0)


def _radial_total(n: int, power: int, rate: float, envelope) -> float:
    return _radial_tail(n, power, rate, envelope, 0.0)


def choose_radius(n: int, power: int, rate: float, envelope, eps: float) -> float:
    """Smallest ``R`` (to 1%) with ``tail(R) <= eps * total``."""
    total = _radial_total(n, power, rate, envelope)
    if total == 0.0:
        return 1.0
    target = eps * total
    lo, hi = 0.0, max(1.0, (n + power) / rate)
    while _radial_tail(n, power, rate, envelope, hi) > target:
        lo, hi = hi, 2 * hi
        if hi > 1e7:
            raise QuadratureSpecError("no radius satisfies the tail rule")
    while hi - lo > 0.01 * hi:
        mid = (lo + hi) / 2
        if _radial_tail(n, power, rate, envelope, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True, eq=False)
class ConeRule:
    """A resolved quadrature rule over ``C*`` with its certified tail."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    spec: QuadratureSpec
    tail_fraction: float
    total_bound: float


def build_rule(cone: PolyhedralCone, rate: float, envelope, power: int, osc_radial: float,
               osc_angular: float, smooth_radius: float | None, q: QuadratureSpec) -> ConeRule:
    """Size and build the polar rule.

    ``rate``: guaranteed exponential decay along every ray.  ``envelope``:
    bound on the remaining radial factor.  ``power``: extra polynomial degree
    of the integrand (derivative moments).  ``osc_*``: upper bounds on the
    frequency of the integrand along rays and across simplex coordinates.
    """
    n = cone.dim
    if rate <= 0:
        raise DivergenceError(f"no decay along some direction of the cone (rate {rate:.3g})")
    total = cone.polar_measure * _radial_total(n, power, rate, envelope)
    if q.radius is None:
        R = choose_radius(n, power, rate, envelope, q.eps)
    else:
        R = q.radius
        if cone.polar_measure * _radial_tail(n, power, rate, envelope, R) > q.eps * total:
            raise QuadratureSpecError(f"radius {R} violates the tail rule at eps={q.eps}")
    tail = cone.polar_measure * _radial_tail(n, power, rate, envelope, R)
    Pr = q.radial_panels
    if Pr is None:
        h = min(10.0 / max(osc_radial, 1e-12), R / 4)
        if smooth_radius is not None:
            h = min(h, smooth_radius)
        Pr = max(4, math.ceil(R / h))
    Pa = q.angular_panels
    if Pa is None:
        Pa = 1 if n == 1 else max(2, math.ceil(1.5 * osc_angular / rate))
    count = Pr * q.radial_order * len(cone.simplices) * (Pa * q.angular_order) ** (n - 1)
    if count > q.max_nodes:
        raise QuadratureSpecError(f"rule needs {count} nodes (max_nodes={q.max_nodes})")
    spec = replace(q, radius=R, radial_panels=Pr, angular_panels=Pa)
    nodes, weights = polar_rule(cone, R, Pr, q.radial_order, Pa, q.angular_order)
    return ConeRule(nodes, weights, spec, tail / total if total else 0.0, total)


def _edge_spread(cone: PolyhedralCone, v) -> float:
    """max over simplex edges ``e`` of ``|<e, v>|`` for a vector or rows of vectors."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    best = 0.0
    for S in cone.simplices:
        E = S[1:] - S[0]
        if E.size:
            best = max(best, float(np.abs(E @ v.T).max()))
    return best


def _edge_l1(cone: PolyhedralCone) -> float:
    """Longest simplex edge in the l1 norm (bounds ``|<e, x>|`` by ``|x|_inf``)."""
    return max((float(np.abs(S[1:] - S[0]).sum(axis=1).max()) for S in cone.simplices
                if len(S) > 1), default=0.0)


def _split_axis(ax: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``ax[a*B + b] = coarse[a] + fine[b]`` for uniform axes (padded); trivial split otherwise."""
    m = len(ax)
    if m < 16:
        return ax, np.zeros(1)
    dx = (ax[-1] - ax[0]) / (m - 1)
    if not np.allclose(np.diff(ax), dx, rtol=1e-9, atol=1e-12 * max(1.0, abs(dx))):
        return ax, np.zeros(1)
    B = int(math.ceil(math.sqrt(m)))
    A = -(-m // B)
    return ax[0] + B * dx * np.arange(A), dx * np.arange(B)


# --- the transform ---------------------------------------------------------


def _region(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, TubePoint):
        points = [points]
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], TubePoint):
        z = np.array([p.z for p in points])
    else:
        z = np.atleast_2d(np.asarray(points, dtype=complex))
    return z.real, -z.imag


class FourierLaplace:
    """Transform of ``V`` frozen onto one quadrature rule.

    The rule is sized for a region of tube points (the ``x`` extent and the
    set of ``yc`` values it will be evaluated on); with the rule fixed the
    evaluator is an exponential sum, i.e. exactly entire in ``z``.
    """

    def __init__(self, V: ExpGrowthDistribution, q: QuadratureSpec | None = None, *,
                 region=None, x_max: float | None = None, yc=None, moment: int = 0,
                 _rule: ConeRule | None = None):
        self.V = V
        self.n = V.dim
        q = q or QuadratureSpec()
        if region is not None:
            xr, yr = _region(region)
            x_max = float(np.abs(xr).max()) if x_max is None else x_max
            yc = yr if yc is None else yc
        if yc is None:
            raise ValueError("need the yc values the evaluator will be used on")
        self.yc_region = np.atleast_2d(np.asarray(yc, dtype=float))
        self.x_max = float(x_max or 0.0)
        self.moment = moment
        cone = V.support
        rates = [decay_rate(cone, y, V.k) for y in self.yc_region]
        self.rate = min(rates)
        if self.rate <= 0:
            raise DivergenceError(
                f"k = {V.k} is not below min <xi, yc> over the cross-section of C*")
        if _rule is None:
            ymax = float(np.max(cone.cross_section_vertices @ self.yc_region.T))
            osc_r = self.x_max + ymax + V.k + V.g.variation + 1.0
            osc_a = _edge_l1(cone) * (self.x_max + V.g.variation) \
                + _edge_spread(cone, self.yc_region)
            _rule = build_rule(cone, self.rate, lambda t: V.g.envelope(t, self.n), moment,
                               osc_r, osc_a, V.g.smooth_radius, q)
        self.rule = _rule
        xi = self.rule.nodes
        self._xi = xi
        self._base = self.rule.weights * V.g(xi) if len(xi) else np.zeros(0)
        self._kxi = V.k * np.abs(xi).sum(axis=1)
        self._pref = (2 * math.pi) ** (-self.n) * (-1j) ** V.order

    def refined(self) -> FourierLaplace:
        spec = self.rule.spec.refined()
        return FourierLaplace(self.V, spec, x_max=self.x_max, yc=self.yc_region,
                              moment=self.moment)

    def _check(self, z: np.ndarray):
        yc = -z.imag
        rates = np.min(yc @ self.V.support.cross_section_vertices.T, axis=-1) - self.V.k
        if np.any(rates < self.rate * (1 - 1e-9)):
            raise DivergenceError("evaluation point decays slower than the rule was sized for")

    def moment_sum(self, z, alpha=None) -> np.ndarray:
        """``int exp(k|xi|) g(xi) (-i xi)^alpha exp(-i<xi,z>) dxi`` at points ``z`` (m, n)."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        self._check(z)
        base = self._base
        if alpha is not None and any(alpha):
            base = base * np.prod((-1j * self._xi) ** np.asarray(alpha), axis=1)
        out = np.zeros(len(z), dtype=complex)
        step = max(1, _CHUNK // max(len(z), 1))
        for s in range(0, len(self._xi), step):
            xi = self._xi[s:s + step]
            E = np.exp(self._kxi[s:s + step, None] - 1j * (xi @ z.T))
            out += base[s:s + step] @ E
        return out

    def __call__(self, z) -> np.ndarray | complex:
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        z2 = np.atleast_2d(z)
        val = self._pref * np.prod(z2 ** np.asarray(self.V.gamma), axis=1) * self.moment_sum(z2)
        return complex(val[0]) if single else val

    def derivative(self, z, beta) -> np.ndarray | complex:
        """``D^beta_z f`` by Leibniz over ``z^gamma`` and the moment integrals."""
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        z2 = np.atleast_2d(z)
        beta = tuple(int(b) for b in beta)
        gamma = self.V.gamma
        total = np.zeros(len(z2), dtype=complex)
        for alpha in np.ndindex(*[b + 1 for b in beta]):
            coef = 1.0
            poly = np.ones(len(z2), dtype=complex)
            for j in range(self.n):
                a, b, g = alpha[j], beta[j], gamma[j]
                if a > g:
                    coef = 0.0
                    break
                coef *= math.comb(b, a) * math.perm(g, a)
                poly = poly * z2[:, j] ** (g - a)
            if coef == 0.0:
                continue
            rest = tuple(b - a for a, b in zip(alpha, beta))
            total += coef * poly * self.moment_sum(z2, rest)
        val = self._pref * total
        return complex(val[0]) if single else val

    def on_grid(self, x_axes, yc) -> np.ndarray:
        """``f(x - i yc)`` on the tensor grid ``x_axes[0] x ... x x_axes[n-1]``.

        The exponential factorizes over coordinates, and on a uniform axis
        ``x0 + (a*B + b)*dx`` it splits again into a coarse and a fine factor.
        The node sum is then one matrix product (coarse x nodes x fine) per
        node chunk, with far fewer complex exponentials than grid points.
        """
        yc = np.asarray(yc, dtype=float)
        axes = [np.asarray(a, dtype=float) for a in x_axes]
        self._check((0j - 1j * yc)[None, :])
        shape = tuple(len(a) for a in axes)
        splits = [_split_axis(a) for a in axes]
        n_coarse = int(np.prod([len(c) for c, _ in splits]))
        n_fine = int(np.prod([len(f) for _, f in splits]))
        out = np.zeros((n_coarse, n_fine), dtype=complex)
        amp = self._base * np.exp(self._kxi - self._xi @ yc)
        step = max(1, _CHUNK // max(n_coarse, n_fine, 1))
        for s in range(0, len(self._xi), step):
            xi = self._xi[s:s + step]
            left = amp[s:s + step, None]
            right = np.ones((len(xi), 1), dtype=complex)
            for j, (coarse, fine) in enumerate(splits):
                ec = np.exp(-1j * xi[:, j:j + 1] * coarse[None, :])
                ef = np.exp(-1j * xi[:, j:j + 1] * fine[None, :])
                left = (left[:, :, None] * ec[:, None, :]).reshape(len(xi), -1)
                right = (right[:, :, None] * ef[:, None, :]).reshape(len(xi), -1)
            out += left.T @ right
        # (coarse_0, ..., coarse_{n-1}, fine_0, ...) -> (coarse_0, fine_0, coarse_1, ...)
        dims = [len(c) for c, _ in splits] + [len(f) for _, f in splits]
        n = self.n
        out = out.reshape(dims).transpose([i for j in range(n) for i in (j, n + j)])
        out = out.reshape([len(c) * len(f) for c, f in splits])
        out = out[tuple(slice(0, m) for m in shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        zpoly = np.ones(shape, dtype=complex)
        for j, g in enumerate(self.V.gamma):
            if g:
                zpoly = zpoly * (mesh[j] - 1j * yc[j]) ** g
        return self._pref * zpoly * out

    def tail_bound(self, z) -> np.ndarray:
        """Absolute bound on the truncated radial tail at ``z``."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        mag = (2 * math.pi) ** (-self.n) * np.prod(np.abs(z) ** np.asarray(self.V.gamma), axis=1)
        return mag * self.rule.tail_fraction * self.rule.total_bound


def laplace_transform_with_error(V: ExpGrowthDistribution, z: TubePoint,
                                 q: QuadratureSpec | None = None) -> tuple[complex, float]:
    """Value and error estimate (refinement difference plus certified tail)."""
    f = FourierLaplace(V, q, region=z)
    val = f(z.z)
    ref = f.refined()(z.z)
    return val, abs(ref - val) + float(f.tail_bound(z.z)[0])


def laplace_transform(V: ExpGrowthDistribution, z: TubePoint,
                      q: QuadratureSpec | None = None) -> complex:
    return FourierLaplace(V, q, region=z)(z.z)


def laplace_derivative(V: ExpGrowthDistribution, z: TubePoint, beta,
                       q: QuadratureSpec | None = None) -> complex:
    f = FourierLaplace(V, q, region=z, moment=sum(beta))
    return f.derivative(z.z, beta)


# --- bound checks ----------------------------------------------------------


def growth_bound_check(V: ExpGrowthDistribution, tube: TubeDomain | PolyhedralCone,
                       grid: list[TubePoint], q: QuadratureSpec | None = None) -> list[BoundReport]:
    """Fit ``K`` in ``|f(z)| <= K (1+|z|)^N exp(h_{C*}(yc))`` with ``N = |gamma|``.

    Besides the per-point rows, the last row compares the fitted constant
    with the a-priori one obtained from the radial integral:
    ``(2 pi)^-n M sum|det V| (n-1)! / rate^n``.
    """
    if not grid:
        raise ValueError("empty grid")
    if isinstance(tube, PolyhedralCone):
        tube = TubeDomain(tube)
    outside = [p for p in grid if not tube.contains(p)]
    if outside:
        raise GeometryError(f"{len(outside)} grid points are not in the tube")
    f = FourierLaplace(V, q, region=grid)
    z = np.array([p.z for p in grid])
    vals = f(z)
    err = np.abs(f.refined()(z) - vals) + f.tail_bound(z)
    N = V.order
    weight = (1 + np.abs(z).sum(axis=1)) ** N * np.exp(
        np.array([indicator_cone_normalized(V.support, p.yc) for p in grid]))
    ratio = np.abs(vals) / weight
    K = float(ratio.max())
    rows = [
        BoundReport("growth", float(abs(v)), K * w, quadrature_error_estimate=float(e),
                    inputs={"x": p.x, "yc": p.yc, "K": K, "N": N})
        for v, w, e, p in zip(vals, weight, err, grid)
    ]
    n = V.dim
    K_prior = (2 * math.pi) ** (-n) * density_sup_bound(V) * V.support.polar_measure \
        * math.factorial(n - 1) / f.rate ** n
    rows.append(BoundReport("growth_constant", K, K_prior,
                            quadrature_error_estimate=float(err.max() / weight.min()),
                            inputs={"N": N, "rate": f.rate}))
    return rows


def l2_bound_check(V: ExpGrowthDistribution, y, c, q: QuadratureSpec | None = None) -> BoundReport:
    """``int_{C*} |exp(-<xi,y>) h(xi)|^2 <= M^2 S^{n-1} (n-1)! (2c|y|_1 - 2k)^-n``."""
    y = np.asarray(y, dtype=float)
    cval = float(c)
    n = V.dim
    if cval * np.abs(y).sum() - V.k <= 0:
        raise DivergenceError(f"k = {V.k} >= c|y|_1 = {cval * np.abs(y).sum():.6g}")
    lhs, err = cone_l2_norm_sq(V, y, q)
    M = density_sup_bound(V)
    rhs = M**2 * sphere_area(n) * math.factorial(n - 1) * (2 * cval * np.abs(y).sum() - 2 * V.k) ** (-n)
    return BoundReport("l2", lhs, rhs, quadrature_error_estimate=err,
                       inputs={"y": y, "c": cval, "k": V.k, "n": n})


def cone_l2_norm_sq(V: ExpGrowthDistribution, y, q: QuadratureSpec | None = None) -> tuple[float, float]:
    """``int_{C*} |exp(-<xi,y>) exp(k|xi|) g(xi)|^2 dxi`` with an error estimate."""
    q = q or QuadratureSpec()
    cone = V.support
    n = V.dim
    rate = 2 * decay_rate(cone, y, V.k)
    if rate <= 0:
        raise DivergenceError("the squared density does not decay on the cone")

    def env(t):
        return V.g.envelope(t, n) ** 2

    ymax = float(np.max(cone.cross_section_vertices @ np.asarray(y)))
    osc_r = 2 * (ymax + V.k + V.g.variation) + 1.0
    osc_a = 2 * _edge_spread(cone, y) + 2 * _edge_l1(cone) * V.g.variation
    rule = build_rule(cone, rate, env, 0, osc_r, osc_a, V.g.smooth_radius, q)

    def integrate_rule(r: ConeRule) -> float:
        xi = r.nodes
        vals = np.exp(2 * V.k * np.abs(xi).sum(axis=1) - 2 * xi @ y) * V.g(xi) ** 2
        return float(np.sum(r.weights * vals))

    val = integrate_rule(rule)
    spec = rule.spec.refined()
    fine = integrate_rule(build_rule(cone, rate, env, 0, osc_r, osc_a, V.g.smooth_radius, spec))
    return val, abs(fine - val) + rule.tail_fraction * rule.total_bound


# --- holomorphy -------------------------------------------------------------


def _as_evaluator(f):
    def call(z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(f(z), dtype=complex)
    return call


def holomorphy_check(f, z0, rho: float, tube: TubeDomain | None = None,
                     edge_nodes: int = 24, step: float = 1e-5) -> BoundReport:
    """Contour integrals over axis-aligned squares and Cauchy-Riemann residuals.

    ``f`` maps an array of points (m, n) to m complex values.  For each
    coordinate ``j`` the square has side ``rho`` and is centred at ``z0``.
    """
    z0 = np.atleast_1d(np.asarray(z0.z if isinstance(z0, TubePoint) else z0, dtype=complex))
    n = len(z0)
    if tube is not None:
        yc = -z0.imag
        corners = np.array(np.meshgrid(*[[-rho, rho]] * n)).reshape(n, -1).T
        inside = all(tube.cone.contains(yc + c) for c in corners)
        if not inside or np.sum(np.maximum(np.abs(yc) - rho, 0.0)) <= tube.r:
            raise GeometryError("the polydisc around z0 leaves the tube")
    ev = _as_evaluator(f)
    f0 = complex(ev(z0[None, :])[0])
    scale = max(1.0, abs(f0))
    x, w = _gauss(edge_nodes)
    h = rho / 2
    corners = [complex(-h, -h), complex(h, -h), complex(h, h), complex(-h, h)]
    morera, cr = 0.0, 0.0
    for j in range(n):
        pts, wts = [], []
        for a, b in zip(corners, corners[1:] + corners[:1]):
            pts.append(a + (b - a) * x)
            wts.append((b - a) * w)
        pts = np.concatenate(pts)
        wts = np.concatenate(wts)
        Z = np.tile(z0, (len(pts), 1))
        Z[:, j] += pts
        morera = max(morera, abs(np.sum(wts * ev(Z))))
        d = step * max(1.0, abs(z0[j]))
        Z = np.tile(z0, (4, 1))
        Z[:, j] += np.array([d, -d, 1j * d, -1j * d])
        fv = ev(Z)
        dfdx = (fv[0] - fv[1]) / (2 * d)
        dfdy = (fv[2] - fv[3]) / (2 * d)
        cr = max(cr, abs(dfdx + 1j * dfdy) / 2)
    tol = 1e-6 * scale
    return BoundReport("holomorphy", max(morera, cr), tol, passed=bool(morera < tol and cr < tol),
                       inputs={"z0": z0, "rho": rho, "morera": morera, "cauchy_riemann": cr})


# --- tube seminorms ---------------------------------------------------------


@dataclass(frozen=True)
class SeminormEstimate:
    """Grid lower bound of ``sup (1+|z|)^N |phi(z)|`` and the same on every other point."""

    value: float
    coarse_value: float

    def __float__(self):
        return self.value

    @property
    def refinement_change(self) -> float:
        return self.value - self.coarse_value


def strip_grid(K: CompactConvexSet, x_extent: float, nx: int, ny: int) -> np.ndarray:
    """Points ``x + i y`` with ``x`` in ``[-X, X]^n`` and ``y`` in ``K`` (tensor grid)."""
    n = K.dim
    xs = np.linspace(-x_extent, x_extent, nx)
    if K.is_box:
        ys = [np.linspace(-K.k, K.k, ny)] * n
        Y = np.array(np.meshgrid(*ys, indexing="ij")).reshape(n, -1).T
    else:
        lam = np.linspace(0, 1, ny)
        V = K.vertices
        Y = np.vstack([V, *[(1 - a) * V[i] + a * V[j] for a in lam
                            for i in range(len(V)) for j in range(i + 1, len(V))]])
    X = np.array(np.meshgrid(*[xs] * n, indexing="ij")).reshape(n, -1).T
    return (X[:, None, :] + 1j * Y[None, :, :]).reshape(-1, n)


def tube_seminorm(phi, K: CompactConvexSet, N: int, grid) -> SeminormEstimate:
    z = np.atleast_2d(np.asarray(grid, dtype=complex))
    if z.shape[1] != K.dim:
        raise ValueError("dimension mismatch")
    vals = np.abs(_as_evaluator(phi)(z)) * (1 + np.abs(z).sum(axis=1)) ** N
    vals = np.nan_to_num(vals, nan=np.inf)
    return SeminormEstimate(float(vals.max()), float(vals[::2].max()))
