"""JSON experiment configs, parsed into dataclasses.

Every scenario config is a JSON object with ``"scenario"`` and an optional
``"seed"``; the remaining keys are scenario-specific (see the ``*Config``
classes).  Malformed input raises :class:`ConfigError`, which the CLI maps to
exit code 2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cones import PolyhedralCone, cone_from_literal, dual_cone
from .distributions import ExpGrowthDistribution, distribution_from_literal
from .errors import ConfigError, ConelabError
from .pws import WindowSpec
from .transform import QuadratureSpec

SCENARIOS = ("dual", "vladimirov", "laplace", "bounds", "verify-pws", "wavefront")


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _need(d: dict, key: str):
    if key not in d:
        raise ConfigError(f"missing key {key!r}")
    return d[key]


def _vec(v, n: int | None = None, what: str = "vector") -> np.ndarray:
    try:
        a = np.atleast_1d(np.asarray(v, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what}: {v!r}") from exc
    if a.ndim != 1 or (n is not None and len(a) != n):
        raise ConfigError(f"{what} must have {n} components")
    return a


def _vecs(v, n: int, what: str) -> np.ndarray:
    try:
        a = np.asarray(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what}: {v!r}") from exc
    if a.ndim == 1 and n == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[1] != n:
        raise ConfigError(f"{what} must be a list of {n}-vectors")
    return a


def _linspace(lit, what: str) -> np.ndarray:
    """``{"start": a, "stop": b, "num": m}`` or an explicit list."""
    if isinstance(lit, dict):
        try:
            return np.linspace(float(lit["start"]), float(lit["stop"]), int(lit["num"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad {what}: {lit!r}") from exc
    return _vec(lit, what=what)


def _cone(lit) -> PolyhedralCone:
    try:
        return cone_from_literal(lit)
    except ConfigError:
        raise
    except (ValueError, ConelabError) as exc:
        raise ConfigError(f"bad cone literal: {exc}") from exc


def _quadrature(lit: dict | None) -> QuadratureSpec:
    if not lit:
        return QuadratureSpec()
    allowed = set(QuadratureSpec.__dataclass_fields__)
    extra = set(lit) - allowed
    if extra:
        raise ConfigError(f"unknown quadrature keys {sorted(extra)}")
    return QuadratureSpec(**lit)


@dataclass(frozen=True)
class DualConfig:
    cone: PolyhedralCone
    samples: int = 10_000


@dataclass(frozen=True)
class VladimirovConfig:
    cone_prime: PolyhedralCone
    dual: PolyhedralCone
    samples: int = 1_000


@dataclass(frozen=True)
class GridConfig:
    """Product of ``x`` points and ``yc`` points (both lists of n-vectors)."""

    x: np.ndarray
    yc: np.ndarray

    @classmethod
    def parse(cls, lit: dict, n: int) -> GridConfig:
        return cls(_vecs(_need(lit, "x"), n, "grid x"), _vecs(_need(lit, "yc"), n, "grid yc"))

    def points(self) -> np.ndarray:
        return np.array([x - 1j * y for y in self.yc for x in self.x])


@dataclass(frozen=True)
class LaplaceConfig:
    distribution: ExpGrowthDistribution
    grid: GridConfig
    quadrature: QuadratureSpec
    tolerance: float = 1e-6


@dataclass(frozen=True)
class BoundsConfig:
    which: str
    distribution: ExpGrowthDistribution
    cone_prime: PolyhedralCone | None
    y: np.ndarray
    xi: np.ndarray
    grid: GridConfig | None
    quadrature: QuadratureSpec


@dataclass(frozen=True)
class PwsConfig:
    distribution: ExpGrowthDistribution
    yc1: np.ndarray
    yc2: np.ndarray
    window: WindowSpec
    test_points: np.ndarray | None
    other: ExpGrowthDistribution | None
    quadrature: QuadratureSpec


@dataclass(frozen=True)
class WavefrontConfig:
    distribution: ExpGrowthDistribution
    y_hat: np.ndarray
    eps_ladder: tuple[float, ...]
    x_axes: tuple[np.ndarray, ...]
    x_points: np.ndarray
    lambda_grid: np.ndarray
    delta: float
    direction_count: int
    angular_tol: float | None
    translate: np.ndarray | None


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    seed: int
    params: object
    raw: dict = field(repr=False)


def _distribution(lit) -> ExpGrowthDistribution:
    if not isinstance(lit, dict):
        raise ConfigError("distribution must be an object")
    return distribution_from_literal(lit)


def _parse_dual(d: dict) -> DualConfig:
    return DualConfig(_cone(_need(d, "cone")), int(d.get("samples", 10_000)))


def _parse_vladimirov(d: dict) -> VladimirovConfig:
    Cp = _cone(_need(d, "cone_prime"))
    if "dual" in d:
        Cs = _cone(d["dual"])
    else:
        Cs = dual_cone(_cone(_need(d, "cone")))
    if Cs.dim != Cp.dim:
        raise ConfigError("cone dimensions differ")
    return VladimirovConfig(Cp, Cs, int(d.get("samples", 1_000)))


def _parse_laplace(d: dict) -> LaplaceConfig:
    V = _distribution(_need(d, "distribution"))
    return LaplaceConfig(V, GridConfig.parse(_need(d, "grid"), V.dim), _quadrature(d.get("quadrature")),
                         float(d.get("tolerance", 1e-6)))


def _parse_bounds(d: dict) -> BoundsConfig:
    which = _need(d, "which")
    if which not in ("pointwise", "l2", "growth"):
        raise ConfigError(f"unknown bound {which!r}")
    V = _distribution(_need(d, "distribution"))
    n = V.dim
    Cp = _cone(d["cone_prime"]) if "cone_prime" in d else None
    if Cp is not None and Cp.dim != n:
        raise ConfigError("cone_prime dimension mismatch")
    y = _vecs(d.get("y", []), n, "y") if d.get("y") else np.zeros((0, n))
    xi = _vecs(d.get("xi", []), n, "xi") if d.get("xi") else np.zeros((0, n))
    grid = GridConfig.parse(d["grid"], n) if "grid" in d else None
    if which in ("pointwise", "l2") and (Cp is None or not len(y)):
        raise ConfigError(f"{which} bounds need cone_prime and y")
    if which == "pointwise" and not len(xi):
        raise ConfigError("pointwise bounds need xi")
    if which == "growth" and grid is None:
        raise ConfigError("growth bounds need a grid")
    return BoundsConfig(which, V, Cp, y, xi, grid, _quadrature(d.get("quadrature")))


def _parse_pws(d: dict) -> PwsConfig:
    V = _distribution(_need(d, "distribution"))
    n = V.dim
    w = d.get("window", {})
    try:
        window = WindowSpec(float(w.get("L", 128.0)), int(w.get("M", 2048)), w.get("taper"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad window: {exc}") from exc
    tp = d.get("test_points")
    test = None
    if tp is not None:
        re = _vecs([p["x"] for p in tp], n, "test x")
        im = _vecs([p["yc"] for p in tp], n, "test yc")
        test = re - 1j * im
    other = _distribution(d["other"]) if "other" in d else None
    if other is not None and other.dim != n:
        raise ConfigError("other distribution has the wrong dimension")
    return PwsConfig(V, _vec(_need(d, "yc1"), n, "yc1"), _vec(_need(d, "yc2"), n, "yc2"),
                     window, test, other, _quadrature(d.get("quadrature")))


def _parse_wavefront(d: dict) -> WavefrontConfig:
    V = _distribution(_need(d, "distribution"))
    n = V.dim
    xg = _need(d, "x_grid")
    axes = tuple(_linspace(a, "x_grid axis") for a in (xg if isinstance(xg, list) else [xg] * n))
    if len(axes) != n:
        raise ConfigError("x_grid needs one axis per dimension")
    ladder = tuple(float(e) for e in _need(d, "eps_ladder"))
    tol = d.get("angular_tol")
    tr = d.get("translate")
    return WavefrontConfig(
        V, _vec(d.get("y_hat", [1.0] * n), n, "y_hat"), ladder, axes,
        _vecs(_need(d, "x_points"), n, "x_points"), _linspace(_need(d, "lambda_grid"), "lambda_grid"),
        float(d.get("delta", 0.05)), int(d.get("direction_count", 2 if n == 1 else 8)),
        None if tol is None else float(tol), None if tr is None else _vec(tr, n, "translate"))


_PARSERS = {
    "dual": _parse_dual, "vladimirov": _parse_vladimirov, "laplace": _parse_laplace,
    "bounds": _parse_bounds, "verify-pws": _parse_pws, "wavefront": _parse_wavefront,
}


def parse_config(raw: dict, scenario: str | None = None, seed: int | None = None) -> ExperimentConfig:
    scen = scenario or raw.get("scenario")
    if scen not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scen!r}")
    if raw.get("scenario", scen) != scen:
        raise ConfigError(f"config is for {raw['scenario']!r}, not {scen!r}")
    try:
        params = _PARSERS[scen](raw)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, ConelabError) as exc:
        raise ConfigError(f"invalid {scen} config: {exc}") from exc
    s = raw.get("seed", 0) if seed is None else seed
    return ExperimentConfig(scen, int(s), params, raw)


def load_config(path: str | Path, scenario: str | None = None, seed: int | None = None) -> ExperimentConfig:
    return parse_config(load_json(path), scenario, seed)
