"""Distributions of exponential growth ``V = D^gamma [exp(k|xi|_1) g(xi)]`` on a cone.

The derivative ``D^gamma`` is never applied to samples of the density; it only
enters the transform as the polynomial factor ``(-i)^|gamma| z^gamma``.
``g`` comes from a small closed-form catalog so that ``sup |g|`` and the
radial decay envelopes used by the quadrature tail rule are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cones import PolyhedralCone, cone_from_literal, cone_to_literal
from .errors import ConfigError, DivergenceError
from .reports import BoundReport

KINDS = ("constant", "exp_decay", "gaussian", "rational", "cosine")


@dataclass(frozen=True)
class BoundedDensity:
    kind: str
    amplitude: float = 1.0
    rate: float = 1.0
    frequency: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "exp_decay" and not self.rate > 0:
            raise ValueError("exp_decay needs a positive rate")
        object.__setattr__(self, "frequency", tuple(float(f) for f in self.frequency))

    @classmethod
    def constant(cls, a: float = 1.0) -> BoundedDensity:
        return cls("constant", amplitude=float(a))

    @classmethod
    def exp_decay(cls, beta: float) -> BoundedDensity:
        return cls("exp_decay", rate=float(beta))

    @classmethod
    def gaussian(cls) -> BoundedDensity:
        return cls("gaussian")

    @classmethod
    def rational(cls) -> BoundedDensity:
        return cls("rational")

    @classmethod
    def cosine(cls, frequency) -> BoundedDensity:
        return cls("cosine", frequency=tuple(np.atleast_1d(frequency)))

    def scaled(self, a: float) -> BoundedDensity:
        return replace(self, amplitude=self.amplitude * a)

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        a = self.amplitude
        if self.kind == "constant":
            return np.full(xi.shape[:-1], a)
        if self.kind == "exp_decay":
            return a * np.exp(-self.rate * np.abs(xi).sum(axis=-1))
        if self.kind == "gaussian":
            return a * np.exp(-(xi**2).sum(axis=-1))
        if self.kind == "rational":
            return a / (1.0 + (xi**2).sum(axis=-1))
        return a * np.cos(xi @ np.asarray(self.frequency))

    def sup(self) -> float:
        return abs(self.amplitude)

    def envelope(self, t, n: int) -> np.ndarray:
        """Upper bound of ``|g(t w)|`` over ``|w|_1 = 1`` (uses ``|w|_2^2 >= 1/n``)."""
        t = np.asarray(t, dtype=float)
        a = abs(self.amplitude)
        if self.kind == "exp_decay":
            return a * np.exp(-self.rate * t)
        if self.kind == "gaussian":
            return a * np.exp(-(t**2) / n)
        if self.kind == "rational":
            return a / (1.0 + t**2 / n)
        return np.full(t.shape, a)

    @property
    def variation(self) -> float:
        """Rough inverse length scale of ``g`` along rays (sizes quadrature panels)."""
        if self.kind == "exp_decay":
            return self.rate
        if self.kind in ("gaussian", "rational"):
            return 2.0
        if self.kind == "cosine":
            return float(np.abs(self.frequency).max())
        return 0.0

    @property
    def smooth_radius(self) -> float | None:
        """Distance from the real axis of the nearest complex singularity in ``t``."""
        return 1.0 if self.kind == "rational" else None


@dataclass(frozen=True)
class DensitySum:
    """Finite linear combination of catalog densities."""

    terms: tuple[BoundedDensity, ...]

    def __call__(self, xi) -> np.ndarray:
        return sum(t(xi) for t in self.terms)

    def scaled(self, a: float) -> DensitySum:
        return DensitySum(tuple(t.scaled(a) for t in self.terms))

    def sup(self) -> float:
        return float(sum(t.sup() for t in self.terms))

    def envelope(self, t, n: int) -> np.ndarray:
        return sum(term.envelope(t, n) for term in self.terms)

    @property
    def variation(self) -> float:
        return max(t.variation for t in self.terms)

    @property
    def smooth_radius(self) -> float | None:
        radii = [t.smooth_radius for t in self.terms if t.smooth_radius is not None]
        return min(radii) if radii else None


@dataclass(frozen=True)
class ExpGrowthDistribution:
    gamma: tuple[int, ...]
    k: float
    g: BoundedDensity | DensitySum
    support: PolyhedralCone = field(repr=False)

    def __post_init__(self):
        gamma = tuple(int(x) for x in self.gamma)
        if len(gamma) != self.support.dim or any(x < 0 for x in gamma):
            raise ValueError("gamma must be a multi-index of the cone dimension")
        if not self.k >= 0:
            raise ValueError("k must be nonnegative")
        if self.support.is_open:
            raise ValueError("the support cone must be closed")
        object.__setattr__(self, "gamma", gamma)

    @property
    def dim(self) -> int:
        return self.support.dim

    @property
    def order(self) -> int:
        return sum(self.gamma)

    def scaled(self, a: float) -> ExpGrowthDistribution:
        return replace(self, g=self.g.scaled(a))

    def with_gamma(self, gamma) -> ExpGrowthDistribution:
        return replace(self, gamma=tuple(gamma))


def density_eval(V: ExpGrowthDistribution, xi) -> np.ndarray | float:
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != V.dim:
        raise ValueError("dimension mismatch")
    inside = V.support.contains(xi)
    vals = np.where(inside, np.exp(V.k * np.abs(xi).sum(axis=-1)) * V.g(xi), 0.0)
    return vals if np.ndim(vals) else float(vals)


def density_sup_bound(V: ExpGrowthDistribution) -> float:
    return V.g.sup()


def pointwise_decay_bound(V: ExpGrowthDistribution, y, c, xi) -> BoundReport:
    """``|exp(-<xi,y>) h(xi)| <= M exp((k - c|y|_1)|xi|_1)``."""
    y = np.asarray(y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    cval = float(c)
    rate = cval * np.abs(y).sum() - V.k
    if rate <= 0:
        raise DivergenceError(f"k = {V.k} >= c|y|_1 = {cval * np.abs(y).sum():.6g}")
    lhs = abs(np.exp(-xi @ y) * density_eval(V, xi))
    rhs = density_sup_bound(V) * np.exp(-rate * np.abs(xi).sum())
    return BoundReport(
        "pointwise",
        float(lhs),
        float(rhs),
        quadrature_error_estimate=1e-12 * max(float(rhs), 1e-300),
        inputs={"y": y, "xi": xi, "c": cval},
    )


def density_from_literal(lit: dict) -> BoundedDensity | DensitySum:
    try:
        kind = lit["kind"]
        if kind == "sum":
            return DensitySum(tuple(density_from_literal(t) for t in lit["terms"]))
        amp = float(lit.get("amplitude", 1.0))
        if kind == "constant":
            return BoundedDensity("constant", amplitude=float(lit.get("a", 1.0)) * amp)
        if kind == "exp_decay":
            return BoundedDensity("exp_decay", amplitude=amp, rate=float(lit["beta"]))
        if kind == "cosine":
            return BoundedDensity("cosine", amplitude=amp, frequency=tuple(lit["frequency"]))
        return BoundedDensity(kind, amplitude=amp)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad density literal {lit!r}: {exc}") from exc


def density_to_literal(g) -> dict:
    if isinstance(g, DensitySum):
        return {"kind": "sum", "terms": [density_to_literal(t) for t in g.terms]}
    d = {"kind": g.kind, "amplitude": g.amplitude}
    if g.kind == "exp_decay":
        d["beta"] = g.rate
    if g.kind == "cosine":
        d["frequency"] = list(g.frequency)
    return d


def distribution_from_literal(lit: dict) -> ExpGrowthDistribution:
    """``{"gamma": [..], "k": r, "g": {...}, "support": cone literal}``."""
    try:
        support = cone_from_literal(lit["support"])
        if support.is_open:
            raise ConfigError("distribution support must be a closed cone")
        gamma = lit.get("gamma", [0] * support.dim)
        return ExpGrowthDistribution(tuple(gamma), float(lit.get("k", 0.0)),
                                     density_from_literal(lit["g"]), support)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad distribution literal: {exc}") from exc


def distribution_to_literal(V: ExpGrowthDistribution) -> dict:
    return {"gamma": list(V.gamma), "k": V.k, "g": density_to_literal(V.g),
            "support": cone_to_literal(V.support)}


def catalog(n: int = 1) -> dict[str, ExpGrowthDistribution]:
    """Named fixtures used by tests, scripts and the acceptance suite."""
    C = PolyhedralCone.orthant(n)
    g1 = BoundedDensity.constant(1.0)
    out = {
        "heaviside": ExpGrowthDistribution((0,) * n, 0.0, g1, C),
        "heaviside_k": ExpGrowthDistribution((0,) * n, 0.5, g1, C),
        "exp_decay": ExpGrowthDistribution((0,) * n, 0.0, BoundedDensity.exp_decay(1.0), C),
        "gaussian": ExpGrowthDistribution((0,) * n, 0.0, BoundedDensity.gaussian(), C),
        "rational": ExpGrowthDistribution((0,) * n, 0.25, BoundedDensity.rational(), C),
        "cosine": ExpGrowthDistribution((0,) * n, 0.0, BoundedDensity.cosine([2.0] * n), C),
    }
    out["heaviside_gamma1"] = out["heaviside"].with_gamma((1,) * n)
    return out
