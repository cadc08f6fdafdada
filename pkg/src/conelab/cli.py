"""``conelab`` command line: config-driven verification scenarios.

Exit codes: 0 when every check passes, 1 when a check fails (precondition
and divergence errors count as failed checks), 2 for config/schema errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .cones import (
    PolyhedralCone,
    dual_cone,
    dual_oracle_mismatches,
    separation_margins,
    vladimirov_constant,
)
from .config import SCENARIOS, ExperimentConfig, GridConfig, load_json, parse_config
from .distributions import pointwise_decay_bound
from .errors import ConelabError, ConfigError
from .pws import recover_density, parseval_check, roundtrip_reconstruct, uniqueness_witness, y_independence_check
from .reports import BoundReport, _plain
from .transform import FourierLaplace, TubeDomain, TubePoint, growth_bound_check, l2_bound_check
from .wavefront import (
    boundary_value,
    cone_containment_check,
    direction_spacing,
    probe_directions,
    translated,
    wavefront_estimate,
    fbi_decay_profile,
)


@dataclass
class Table:
    header: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (dict, list)):
        return json.dumps(_plain(v), sort_keys=True)
    return v


@dataclass
class RunReport:
    scenario: str
    checks: list[BoundReport]
    table: Table | None = None
    extra: dict = field(default_factory=dict)
    plots: dict[str, Table] = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def data(self) -> dict:
        """Everything except timing: byte-stable for a fixed config and seed."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.as_row() for c in self.checks],
            "extra": _plain(self.extra),
            "config": self.config,
        }

    def to_json(self) -> str:
        d = self.data()
        d["timing"] = self.timing
        d["versions"] = versions()
        return json.dumps(d, indent=2, sort_keys=False) + "\n"


def versions() -> dict:
    return {"conelab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _failed(name: str, exc: Exception) -> BoundReport:
    return BoundReport(name, float("nan"), float("nan"), passed=False,
                       inputs={"error": type(exc).__name__, "message": str(exc)})


CHECK_COLUMNS = ["name", "lhs", "rhs", "margin", "quadrature_error_estimate", "passed", "inputs"]


def _check_table(checks: list[BoundReport]) -> Table:
    return Table(CHECK_COLUMNS, [[r[h] for h in CHECK_COLUMNS] for r in (c.as_row() for c in checks)])


BLOCK = 64


def _blocks(n: int) -> list[slice]:
    # fixed block size, so the floating-point result does not depend on --threads
    return [slice(a, min(a + BLOCK, n)) for a in range(0, n, BLOCK)]


def _pmap(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# --- scenarios --------------------------------------------------------------


def _run_dual(p, rng, threads) -> RunReport:
    C = p.cone
    D = dual_cone(C)
    mism = dual_oracle_mismatches(C, D, p.samples, rng)
    DD = dual_cone(D)
    closure = PolyhedralCone(C.generators)
    inv = bool(np.all(closure.contains(DD.generators, tol=1e-9))
               and np.all(PolyhedralCone(DD.generators).contains(C.generators, tol=1e-9)))
    checks = [
        BoundReport("dual_oracle", float(mism), 0.0, passed=mism == 0, inputs={"samples": p.samples}),
        BoundReport("dual_involution", 0.0 if inv else 1.0, 0.0, passed=inv),
    ]
    extra = {"dual_generators": D.generators, "dual_normals": D.facet_normals}
    return RunReport("dual", checks, extra=extra)


def _run_vladimirov(p, rng, threads) -> RunReport:
    c = vladimirov_constant(p.cone_prime, p.dual)
    margins = separation_margins(p.cone_prime, p.dual, c.value, p.samples, rng)
    check = BoundReport("separation", -float(margins.min()), 1e-12,
                        inputs={"samples": p.samples, "c": c.value})
    extra = {"value": c.value, "attaining_pair": list(c.attaining_pair)}
    return RunReport("vladimirov", [check], extra=extra)


def _run_laplace(p, rng, threads) -> RunReport:
    V = p.distribution
    z = p.grid.points()
    f = FourierLaplace(V, p.quadrature, region=z)
    fine = f.refined()

    def cell(sl):
        v = f(z[sl])
        return v, np.abs(fine(z[sl]) - v) + f.tail_bound(z[sl])

    parts = _pmap(cell, _blocks(len(z)), threads)
    vals = np.concatenate([a for a, _ in parts])
    errs = np.concatenate([b for _, b in parts])
    n = V.dim
    header = [f"x{j}" for j in range(n)] + [f"yc{j}" for j in range(n)] + ["re", "im", "quad_err"]
    rows = [list(zi.real) + list(-zi.imag) + [v.real, v.imag, e] for zi, v, e in zip(z, vals, errs)]
    mag = np.abs(vals)
    rel = float(np.max(np.where(mag > 0, errs / np.maximum(mag, 1e-300), 0.0)))
    check = BoundReport("relative_quadrature_error", rel, p.tolerance,
                        inputs={"points": len(z), "nodes": len(f.rule.nodes), "eps": p.quadrature.eps})
    return RunReport("laplace", [check], table=Table(header, rows),
                     extra={"spec": f.rule.spec.__dict__})


def _tube_points(grid: GridConfig) -> list[TubePoint]:
    return [TubePoint(x, y) for y in grid.yc for x in grid.x]


def _run_bounds(p, rng, threads) -> RunReport:
    V = p.distribution
    checks: list[BoundReport] = []
    if p.which in ("pointwise", "l2"):
        try:
            c = vladimirov_constant(p.cone_prime, V.support)
        except ConelabError as exc:
            checks.append(_failed("vladimirov", exc))
            c = None
        if c is not None:
            for y in p.y:
                try:
                    if p.which == "pointwise":
                        checks.extend(pointwise_decay_bound(V, y, c.value, xi) for xi in p.xi)
                    else:
                        checks.append(l2_bound_check(V, y, c.value, p.quadrature))
                except ConelabError as exc:
                    checks.append(_failed(p.which, exc))
    else:
        tube = TubeDomain(p.cone_prime if p.cone_prime is not None else dual_cone(V.support))
        try:
            checks.extend(growth_bound_check(V, tube, _tube_points(p.grid), p.quadrature))
        except ConelabError as exc:
            checks.append(_failed("growth", exc))
    return RunReport("bounds", checks, table=_check_table(checks), extra={"which": p.which})


def _run_pws(p, rng, threads) -> RunReport:
    V = p.distribution
    w = p.window
    checks: list[BoundReport] = []
    extra: dict = {}
    ycs = [p.yc1, p.yc2]
    if p.test_points is not None:
        ycs.extend(-p.test_points.imag)
    try:
        f = FourierLaplace(V, p.quadrature, x_max=w.L, yc=np.array(ycs))
    except ConelabError as exc:
        return RunReport("verify-pws", [_failed("transform", exc)])
    steps = [
        ("y_independence", lambda: [y_independence_check(f, V, p.yc1, p.yc2, w)]),
        ("parseval", lambda: [parseval_check(V, p.yc1, w, p.quadrature, f=f)]),
        ("roundtrip", lambda: roundtrip_reconstruct(V, p.yc1, p.test_points, w, p.quadrature)),
    ]
    for name, step in steps:
        try:
            checks.extend(step())
        except ConelabError as exc:
            checks.append(_failed(name, exc))
    try:
        rec = recover_density(f, V, p.yc1, w)
        outside = rec.outside_support_max(V.support)
        checks.append(BoundReport("support_recovery", outside, rec.noise_floor,
                                  inputs={"guard": w.guard, "window_change": rec.window_change}))
        extra["recovered"] = {"trusted_points": int(rec.trusted.sum()), "h_max": rec.h_max,
                              "imag_residual": rec.imag_residual}
    except ConelabError as exc:
        checks.append(_failed("support_recovery", exc))
    if p.other is not None:
        try:
            checks.append(uniqueness_witness(V, p.other, p.yc1, w))
        except ConelabError as exc:
            checks.append(_failed("uniqueness", exc))
    return RunReport("verify-pws", checks, extra=extra)


def _run_wavefront(p, rng, threads) -> RunReport:
    V = p.distribution
    x_max = max(float(np.abs(a).max()) for a in p.x_axes)
    if p.translate is not None:
        x_max += float(np.abs(p.translate).max())
    try:
        f = FourierLaplace(V, None, x_max=x_max, yc=np.outer(p.eps_ladder, p.y_hat))
        ev = translated(f, p.translate) if p.translate is not None else f
        u = boundary_value(ev, p.y_hat, p.x_axes, p.eps_ladder, meta=V)
    except ConelabError as exc:
        return RunReport("wavefront", [_failed("boundary_value", exc)])
    lam = p.lambda_grid
    try:
        parts = _pmap(lambda x0: wavefront_estimate(u, x0, p.direction_count, lam, p.delta),
                      [x0[None, :] for x0 in p.x_points], threads)
    except ConelabError as exc:
        return RunReport("wavefront", [_failed("fbi", exc)])
    est = [e for part in parts for e in part]
    n = V.dim
    dirs = probe_directions(n, p.direction_count)
    tol = 2 * direction_spacing(dirs) if p.angular_tol is None else p.angular_tol
    check = cone_containment_check(est, V.support, tol)
    header = [f"x0_{j}" for j in range(n)] + [f"xi_hat_{j}" for j in range(n)] + ["slope", "singular_flag"]
    rows = []
    plots = {}
    for i, e in enumerate(est):
        for j, (d, s, flag) in enumerate(zip(e.directions, e.decay_rates, e.singular_mask)):
            rows.append(list(e.base_point) + list(d) + [s, bool(flag)])
            prof = fbi_decay_profile(u, e.base_point, d, lam)
            plots[f"probe_{i:03d}_{j:02d}"] = Table(["lambda", "log_abs_w"],
                                                   [list(r) for r in prof.as_rows()])
    extra = {"cauchy": list(u.cauchy), "angular_tol": tol, "delta": p.delta,
             "lambda_max": float(lam.max())}
    return RunReport("wavefront", [check], table=Table(header, rows), extra=extra, plots=plots)


_RUNNERS = {
    "dual": _run_dual, "vladimirov": _run_vladimirov, "laplace": _run_laplace,
    "bounds": _run_bounds, "verify-pws": _run_pws, "wavefront": _run_wavefront,
}


def run(cfg: ExperimentConfig, threads: int = 1) -> RunReport:
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    try:
        report = _RUNNERS[cfg.scenario](cfg.params, rng, threads)
    except ConfigError:
        raise
    except ConelabError as exc:
        report = RunReport(cfg.scenario, [_failed(cfg.scenario, exc)])
    if report.table is None:
        report.table = _check_table(report.checks)
    report.timing = {"seconds": time.perf_counter() - t0}
    report.config = cfg.raw
    report.seed = cfg.seed
    return report


def write_outputs(report: RunReport, out: Path | None) -> list[Path]:
    """CSV scenarios write the table to ``out`` and the report beside it."""
    if out is None:
        sys.stdout.write(report.to_json())
        return []
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if report.table is not None and out.suffix != ".json":
        out.write_text(report.table.to_csv(), encoding="utf-8")
        rep = out.with_suffix(".report.json")
        written.append(out)
    else:
        rep = out
    rep.write_text(report.to_json(), encoding="utf-8")
    written.append(rep)
    if report.plots:
        pdir = out.with_name(out.stem + "_profiles")
        pdir.mkdir(exist_ok=True)
        for name, tab in report.plots.items():
            (pdir / f"{name}.csv").write_text(tab.to_csv(), encoding="utf-8")
        written.append(pdir)
    return written


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario config (JSON)")
    common.add_argument("--out", help="output file (CSV or JSON depending on the scenario)")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads for independent cells")
    ap = argparse.ArgumentParser(prog="conelab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"conelab {__version__}")
    sub = ap.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name, parents=[common])
        if name == "laplace":
            sp.add_argument("--grid", help="grid JSON ({\"x\": [...], \"yc\": [...]}) overriding the config")
        if name == "bounds":
            sp.add_argument("--which", choices=("pointwise", "l2", "growth"))
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.threads < 1:
        ap.error("--threads must be >= 1")
    try:
        raw = load_json(args.config)
        if getattr(args, "grid", None):
            raw = dict(raw, grid=load_json(args.grid))
        if getattr(args, "which", None):
            raw = dict(raw, which=args.which)
        cfg = parse_config(raw, args.scenario, args.seed)
        report = run(cfg, args.threads)
    except ConfigError as exc:
        print(f"conelab: config error: {exc}", file=sys.stderr)
        return 2
    write_outputs(report, Path(args.out) if args.out else None)
    for c in report.checks:
        status = "PASS" if c.ok else "FAIL"
        detail = c.inputs.get("message", "") if not c.ok else ""
        print(f"{status} {c.name} lhs={c.lhs:.6g} rhs={c.rhs:.6g} {detail}".rstrip(), file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
