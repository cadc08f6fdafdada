"""Indicator (support-type) functions ``h_K(xi) = sup_{x in K} |<xi, x>|``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import PolyhedralCone, cross_section
from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class CompactConvexSet:
    """Either the box ``[-k, k]^n`` or the convex hull of a vertex list."""

    dim: int
    k: float | None = None
    vertices: np.ndarray | None = None

    def __post_init__(self):
        if (self.k is None) == (self.vertices is None):
            raise ValueError("give exactly one of k (box) or vertices (polytope)")
        if self.k is not None and not self.k > 0:
            raise ValueError("box half-width must be positive")
        if self.vertices is not None:
            v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
            if v.shape[1] != self.dim or len(v) == 0:
                raise ValueError("polytope vertices have the wrong shape")
            object.__setattr__(self, "vertices", v)

    @classmethod
    def box(cls, k: float, n: int) -> CompactConvexSet:
        return cls(dim=n, k=float(k))

    @classmethod
    def polytope(cls, vertices) -> CompactConvexSet:
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        return cls(dim=v.shape[1], vertices=v)

    @property
    def is_box(self) -> bool:
        return self.k is not None

    def corner_points(self) -> np.ndarray:
        if self.is_box:
            return self.k * np.array(np.meshgrid(*[[-1.0, 1.0]] * self.dim)).reshape(self.dim, -1).T
        return self.vertices


def set_from_literal(lit: dict, n: int) -> CompactConvexSet:
    """``{"box": k}`` or ``{"polytope": [[...], ...]}``."""
    if "box" in lit:
        return CompactConvexSet.box(float(lit["box"]), n)
    if "polytope" in lit:
        K = CompactConvexSet.polytope(lit["polytope"])
        if K.dim != n:
            raise ConfigError("polytope dimension mismatch")
        return K
    raise ConfigError(f"bad set literal: {lit!r}")


def indicator_compact(K: CompactConvexSet, xi) -> np.ndarray | float:
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != K.dim:
        raise ValueError("dimension mismatch")
    if K.is_box:
        out = K.k * np.abs(xi).sum(axis=-1)
    else:
        out = np.abs(xi @ K.vertices.T).max(axis=-1)
    return out if np.ndim(out) else float(out)


def indicator_cone_normalized(Cstar: PolyhedralCone, y) -> np.ndarray | float:
    """``max |<xi, y>|`` over the l1 cross-section of ``C*``.

    ``|<., y>|`` is convex, so the maximum over each polytope piece of the
    cross-section sits at one of its vertices.
    """
    y = np.asarray(y, dtype=float)
    out = np.abs(y @ Cstar.cross_section_vertices.T).max(axis=-1)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class MixedIndicatorResult:
    finite: bool
    value: float
    variant: str
    slopes: np.ndarray = field(repr=False)
    directions: np.ndarray = field(repr=False)

    @property
    def max_slope(self) -> float:
        return float(self.slopes.max())


def mixed_indicator(
    K: CompactConvexSet,
    Cstar: PolyhedralCone,
    y,
    variant: str = "signed",
    tol: float = 1e-12,
    n_samples: int = 256,
) -> MixedIndicatorResult:
    """Finiteness of ``sup_{xi in C*} |h_K(xi) - <xi, y>|`` (or without the bars).

    Along the ray ``t * xi_hat`` the expression is ``t * slope(xi_hat)`` with
    ``slope = h_K(xi_hat) - <xi_hat, y>``, so the sup over the cone is 0 or
    infinite.  ``literal`` needs every slope to vanish, ``signed`` needs every
    slope to be ``<= 0``.  Slopes are reported for the cross-section
    vertices plus a sample of interior directions.
    """
    if variant not in ("literal", "signed"):
        raise ValueError("variant must be 'literal' or 'signed'")
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != K.dim or Cstar.dim != K.dim:
        raise ValueError("dimension mismatch")
    dirs = Cstar.cross_section_vertices
    if not K.is_box:
        # h_K is only piecewise linear on the pieces; add interior samples
        dirs = np.vstack([dirs, cross_section(Cstar, n_samples).points])
    slopes = indicator_compact(K, dirs) - dirs @ y
    slopes = np.atleast_1d(slopes)
    scale = tol * max(1.0, float(np.abs(y).sum()), float(np.abs(indicator_compact(K, dirs)).max()))
    if variant == "literal":
        finite = bool(np.all(np.abs(slopes) <= scale))
    else:
        finite = bool(np.all(slopes <= scale))
    return MixedIndicatorResult(finite, 0.0 if finite else float("inf"), variant, slopes, dirs)


def in_C_K(K: CompactConvexSet, Cstar: PolyhedralCone, y, variant: str = "signed") -> bool:
    return mixed_indicator(K, Cstar, y, variant).finite
