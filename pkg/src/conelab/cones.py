"""Finitely generated convex cones with vertex at the origin.

A cone carries its generators (V-representation) and lazily derives inward
facet normals (H-representation).  Everything that measures "directions" uses
the l1 norm, so the cross-section of a cone is the set
``{x in C : |x|_1 = 1}``.  Inside a single closed orthant ``|x|_1`` is linear,
so the cross-section splits into one convex polytope per orthant; those
pieces and their vertices are what the exact routines below work with.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import Delaunay
from scipy.stats import qmc

from .errors import ConfigError, PreconditionError, UnsupportedDimensionError

MAX_DIM = 4
_RANK_TOL = 1e-10
_FEAS_TOL = 1e-12


def _l1_normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.abs(v).sum(axis=-1, keepdims=True)


def _l2_normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _unique_directions(vecs, tol=1e-9) -> np.ndarray:
    out: list[np.ndarray] = []
    for v in vecs:
        u = v / np.linalg.norm(v)
        if not any(np.linalg.norm(u - w) < tol for w in out):
            out.append(u)
    return np.array(out)


def _null_vector(rows: np.ndarray) -> np.ndarray | None:
    """Unit vector spanning the null space of ``rows`` if it is one-dimensional."""
    n = rows.shape[1]
    _, s, vt = np.linalg.svd(rows)
    scale = max(s[0], 1.0) if s.size else 1.0
    rank = int(np.sum(s > _RANK_TOL * scale))
    if rank != n - 1:
        return None
    return vt[-1]


def _rays_from_halfspaces(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Extreme rays of the pointed cone ``{x : A x >= 0}`` by brute-force enumeration."""
    n = A.shape[1]
    A = _l2_normalize(A)
    if n == 1:
        cands = [np.array([1.0]), np.array([-1.0])]
    else:
        cands = []
        for idx in itertools.combinations(range(A.shape[0]), n - 1):
            v = _null_vector(A[list(idx)])
            if v is not None:
                cands.extend([v, -v])
    rays = [v for v in cands if np.all(A @ v >= -tol)]
    if not rays:
        return np.zeros((0, n))
    return _unique_directions(rays)


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """Convex cone ``{sum_i a_i g_i : a_i >= 0}``.

    ``normals`` may be supplied when the H-representation is already known
    (this is how duals are built); otherwise it is derived from the
    generators on first use.
    """

    generators: np.ndarray
    is_open: bool = False
    normals: np.ndarray | None = None

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if g.size == 0:
            raise ValueError("a cone needs at least one generator")
        if np.any(np.abs(g).sum(axis=1) == 0):
            raise ValueError("generators must be nonzero")
        object.__setattr__(self, "generators", g)
        if self.normals is not None:
            nm = np.atleast_2d(np.asarray(self.normals, dtype=float))
            if nm.shape[1] != g.shape[1]:
                raise ValueError("normals and generators differ in dimension")
            nm = _l2_normalize(nm)
            if np.any(nm @ _l2_normalize(g).T < -1e-12):
                raise ValueError("a generator violates a supplied facet normal")
            object.__setattr__(self, "normals", nm)

    # construction helpers -------------------------------------------------

    @classmethod
    def orthant(cls, n: int, is_open: bool = False) -> PolyhedralCone:
        return cls(np.eye(n), is_open=is_open)

    @classmethod
    def light_cone(cls, n_rays: int = 16, is_open: bool = True) -> PolyhedralCone:
        """Inner polyhedral approximation of ``{y_1 > (y_2^2 + y_3^2)^(1/2)}``."""
        th = 2 * np.pi * np.arange(n_rays) / n_rays
        gens = np.column_stack([np.ones(n_rays), np.cos(th), np.sin(th)])
        return cls(gens, is_open=is_open)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def scaled(self, factors) -> PolyhedralCone:
        f = np.asarray(factors, dtype=float).reshape(-1, 1)
        return PolyhedralCone(self.generators * f, is_open=self.is_open)

    # H-representation -----------------------------------------------------

    @cached_property
    def _span(self) -> tuple[np.ndarray, np.ndarray]:
        g = _l2_normalize(self.generators)
        _, s, vt = np.linalg.svd(g)
        rank = int(np.sum(s > _RANK_TOL * s[0]))
        return vt[:rank].T, vt[rank:].T

    @cached_property
    def equations(self) -> np.ndarray:
        """Unit normals ``u`` of the orthogonal complement of the span (``<u,x> = 0``)."""
        if self.normals is not None:
            return np.zeros((0, self.dim))
        return self._span[1].T.copy()

    @cached_property
    def facet_normals(self) -> np.ndarray:
        """Unit inward normals, ``<nu, x> >= 0`` on the cone."""
        if self.normals is not None:
            return self.normals
        if self.dim > MAX_DIM:
            raise UnsupportedDimensionError(f"dimension {self.dim} > {MAX_DIM}")
        basis, _ = self._span
        d = basis.shape[1]
        gc = _l2_normalize(self.generators) @ basis
        found = []
        if d == 1:
            t = gc[:, 0]
            if np.all(t > 0) or np.all(t < 0):
                found.append(np.sign(t[0]) * np.ones(1))
        else:
            for idx in itertools.combinations(range(gc.shape[0]), d - 1):
                v = _null_vector(gc[list(idx)])
                if v is None:
                    continue
                vals = gc @ v
                if np.all(vals >= -1e-10):
                    found.append(v)
                elif np.all(vals <= 1e-10):
                    found.append(-v)
        if not found:
            return np.zeros((0, self.dim))
        return _unique_directions([basis @ v for v in found])

    @property
    def constraint_rows(self) -> np.ndarray:
        """All inequality rows ``A`` with ``C = {x : A x >= 0}`` (equations doubled)."""
        return np.vstack([self.facet_normals, self.equations, -self.equations])

    # membership -----------------------------------------------------------

    def contains(self, x, tol: float = _FEAS_TOL) -> np.ndarray | bool:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError("dimension mismatch")
        scale = np.linalg.norm(x, axis=-1)
        ok = np.ones(x.shape[:-1], dtype=bool)
        if self.equations.size:
            ok &= np.all(np.abs(x @ self.equations.T) <= tol * scale[..., None], axis=-1)
        if self.facet_normals.size:
            vals = x @ self.facet_normals.T
            if self.is_open:
                ok &= np.all(vals > 0, axis=-1)
            else:
                ok &= np.all(vals >= -tol * scale[..., None], axis=-1)
        elif self.is_open:
            ok &= scale > 0
        return ok if ok.ndim else bool(ok)

    def signed_margin(self, x) -> np.ndarray:
        """``min_j <nu_j, x>`` over unit facet normals; positive strictly inside."""
        x = np.asarray(x, dtype=float)
        rows = self.constraint_rows
        if rows.size == 0:
            return np.full(x.shape[:-1], np.inf)
        return np.min(x @ rows.T, axis=-1)

    # l1 cross-section -----------------------------------------------------

    @cached_property
    def cross_section_pieces(self) -> list[np.ndarray]:
        """Vertices (l1-normalized) of ``C`` intersected with each closed orthant."""
        n = self.dim
        if n > MAX_DIM:
            raise UnsupportedDimensionError(f"dimension {n} > {MAX_DIM}")
        rows = self.constraint_rows
        pieces = []
        for signs in itertools.product((1.0, -1.0), repeat=n):
            A = np.vstack([rows, np.diag(signs)])
            rays = _rays_from_halfspaces(A)
            if len(rays):
                pieces.append(_l1_normalize(rays))
        return pieces

    @cached_property
    def cross_section_vertices(self) -> np.ndarray:
        allv = np.vstack(self.cross_section_pieces)
        return _l1_normalize(_unique_directions(allv))

    @cached_property
    def simplices(self) -> list[np.ndarray]:
        """Decomposition of the cross-section into simplices.

        Each entry is a ``(k+1, n)`` vertex array of a k-simplex, with k the
        largest affine dimension found among the pieces.
        """
        out = []
        for P in self.cross_section_pieces:
            out.extend(_triangulate(P))
        kmax = max(len(s) for s in out)
        return [s for s in out if len(s) == kmax]

    @property
    def is_full_dimensional(self) -> bool:
        return len(self.simplices[0]) == self.dim

    @cached_property
    def polar_measure(self) -> float:
        """``sum |det V|`` over full-dimensional simplices: ``vol{x in C: |x|_1 <= 1} * n!``."""
        if not self.is_full_dimensional:
            return 0.0
        return float(sum(abs(np.linalg.det(s)) for s in self.simplices))


def _triangulate(P: np.ndarray) -> list[np.ndarray]:
    if len(P) == 1:
        return [P]
    c = P.mean(axis=0)
    _, s, vt = np.linalg.svd(P - c)
    k = int(np.sum(s > 1e-10 * max(s[0], 1.0)))
    if k == 0:
        return [P[:1]]
    coords = (P - c) @ vt[:k].T
    if k == 1:
        order = np.argsort(coords[:, 0])
        return [P[[order[0], order[-1]]]]
    tri = Delaunay(coords)
    return [P[simplex] for simplex in tri.simplices]


@dataclass(frozen=True)
class CrossSection:
    cone: PolyhedralCone
    points: np.ndarray


@dataclass(frozen=True)
class VladimirovConstant:
    """``c`` with ``<xi, y> >= c |xi|_1 |y|_1`` on ``C* x C'``."""

    value: float
    attaining_pair: tuple[np.ndarray, np.ndarray]

    def __float__(self):
        return self.value


def dual_cone(C: PolyhedralCone) -> PolyhedralCone:
    """Closed dual cone ``{xi : <xi, x> >= 0 for all x in C}``."""
    if C.dim > MAX_DIM:
        raise UnsupportedDimensionError(f"dimension {C.dim} > {MAX_DIM}")
    gens = C.constraint_rows
    if gens.size == 0:
        raise PreconditionError("the dual of the whole space is {0}")
    return PolyhedralCone(gens, is_open=False, normals=C.generators)


def contains_point(C: PolyhedralCone, x) -> bool:
    return bool(C.contains(np.asarray(x, dtype=float)))


def is_compact_subcone(Cp: PolyhedralCone, C: PolyhedralCone, margin: float = 1e-9) -> bool:
    if Cp.dim != C.dim:
        raise ValueError("dimension mismatch")
    g = _l1_normalize(Cp.generators)
    if C.equations.size and np.any(np.abs(g @ C.equations.T) > 1e-12):
        return False
    if C.facet_normals.size == 0:
        return True
    return bool(np.all(g @ C.facet_normals.T >= margin))


def vladimirov_constant(Cp: PolyhedralCone, Cstar: PolyhedralCone) -> VladimirovConstant:
    """Exact minimum of ``<xi, y>`` over l1-normalized ``xi in C*``, ``y in C'``.

    A bilinear form on a product of polytopes is minimized at a vertex pair,
    so it suffices to scan cross-section vertices of both cones.
    """
    A = Cstar.cross_section_vertices
    B = Cp.cross_section_vertices
    P = A @ B.T
    i, j = np.unravel_index(np.argmin(P), P.shape)
    c = float(P[i, j])
    if c <= 0:
        raise PreconditionError(f"C' is not compact in the dual of C* (min pairing {c:.3g})")
    return VladimirovConstant(min(c, 1.0), (A[i].copy(), B[j].copy()))


def cross_section(C: PolyhedralCone, m: int, seed: int = 0) -> CrossSection:
    """``m`` l1-normalized directions spread over the cross-section.

    One-dimensional cross-sections get evenly spaced points by arc length,
    endpoints included.  Higher-dimensional ones get the vertices first and
    then scrambled Halton points mapped into the simplices, weighted by area.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    simplices = C.simplices
    k = len(simplices[0]) - 1
    if k == 0:
        verts = np.vstack(simplices)
        return CrossSection(C, verts[np.arange(m) % len(verts)])
    if k == 1:
        segs = simplices
        if C.dim == 2:
            ang = [np.arctan2(*s.mean(axis=0)[::-1]) for s in segs]
            segs = [segs[i] for i in np.argsort(ang)]
            segs = [s if s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0] > 0 else s[::-1] for s in segs]
        lens = np.array([np.linalg.norm(s[1] - s[0]) for s in segs])
        cum = np.concatenate([[0.0], np.cumsum(lens)])
        u = np.linspace(0.0, cum[-1], m) if m > 1 else np.array([cum[-1] / 2])
        pts = []
        for ui in u:
            i = min(int(np.searchsorted(cum, ui, side="right")) - 1, len(segs) - 1)
            t = (ui - cum[i]) / lens[i]
            pts.append(segs[i][0] + t * (segs[i][1] - segs[i][0]))
        return CrossSection(C, _l1_normalize(np.array(pts)))
    verts = C.cross_section_vertices
    if m <= len(verts):
        return CrossSection(C, verts[:m])
    rest = m - len(verts)
    vols = np.array([_simplex_volume(s) for s in simplices])
    sampler = qmc.Halton(d=k + 1, scramble=True, seed=seed)
    u = sampler.random(rest)
    which = np.searchsorted(np.cumsum(vols) / vols.sum(), u[:, 0], side="right")
    which = np.minimum(which, len(simplices) - 1)
    bary = _simplex_from_cube(u[:, 1:])
    pts = np.einsum("ij,ijk->ik", bary, np.array(simplices)[which])
    return CrossSection(C, _l1_normalize(np.vstack([verts, pts])))


def _simplex_volume(S: np.ndarray) -> float:
    E = S[1:] - S[0]
    return float(np.sqrt(max(np.linalg.det(E @ E.T), 0.0)))


def _simplex_from_cube(u: np.ndarray) -> np.ndarray:
    """Map points of the unit k-cube to barycentric coordinates (sorted-spacings map)."""
    s = np.sort(u, axis=1)
    s = np.hstack([np.zeros((len(u), 1)), s, np.ones((len(u), 1))])
    return np.diff(s, axis=1)


def sample_points(C: PolyhedralCone, m: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of ``C`` as Dirichlet combinations of its generators."""
    w = rng.dirichlet(np.ones(len(C.generators)), size=m)
    return w @ C.generators


def cone_from_literal(lit: dict) -> PolyhedralCone:
    """``{"dim": n, "generators": [[...], ...], "open": bool}``."""
    try:
        gens = np.asarray(lit["generators"], dtype=float)
        n = int(lit.get("dim", gens.shape[1]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad cone literal: {lit!r}") from exc
    if gens.ndim != 2 or gens.shape[1] != n:
        raise ConfigError(f"generators do not have dimension {n}")
    return PolyhedralCone(gens, is_open=bool(lit.get("open", False)))


def cone_to_literal(C: PolyhedralCone) -> dict:
    return {"dim": C.dim, "generators": C.generators.tolist(), "open": C.is_open}


def dual_oracle_mismatches(C: PolyhedralCone, D: PolyhedralCone, m: int,
                           rng: np.random.Generator, tol: float = 1e-9,
                           n_inner: int = 10_000) -> int:
    """Directions on which ``D`` and a sampling oracle for ``C*`` disagree.

    Membership in ``D`` is decided from a fresh H-representation derived from
    ``D``'s generators, so the check covers the enumerated dual generators and
    not only the normals they were built from.  The oracle tests
    ``<xi, x> >= -tol |xi| |x|`` on ``n_inner`` random points of ``C`` plus
    its generators.
    """
    xi = rng.standard_normal((m, C.dim))
    xs = np.vstack([C.generators, sample_points(C, n_inner, rng)])
    xs = _l2_normalize(xs)
    xn = _l2_normalize(xi)
    # row blocks keep the pairing matrix small
    worst = np.concatenate([np.min(xn[s:s + 16] @ xs.T, axis=1) for s in range(0, m, 16)])
    oracle = worst >= -tol
    claimed = PolyhedralCone(D.generators).contains(xi, tol=tol)
    return int(np.sum(oracle != claimed))


def separation_margins(Cp: PolyhedralCone, Cstar: PolyhedralCone, c: float, m: int,
                       rng: np.random.Generator) -> np.ndarray:
    """``<xi, y> - c |xi|_1 |y|_1`` on ``m`` random pairs from ``C* x C'``."""
    xi = _l1_normalize(sample_points(Cstar, m, rng))
    y = _l1_normalize(sample_points(Cp, m, rng))
    return np.einsum("ij,ij->i", xi, y) - c
