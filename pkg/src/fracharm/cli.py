"""Command line runner: ``fracharm {minimize,extend,stability,blowup,selftest}``.

Exit codes: 0 ok, 2 configuration error, 3 non-convergence, 4 failed
internal check.  Artifacts carry the resolved configuration and a content
hash; they do not depend on ``--threads``.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, config as cfgmod, cs_extension as cse, solver, variation
from ._accel import BACKEND, set_threads
from .energy import (
    LatticeMap,
    LineGrid,
    assemble,
    energy,
    localized_energy,
    read_lattice_csv,
    write_lattice_csv,
)
from .errors import ConfigError, FracharmError, ProjectionFailure, Stalled
from .io import write_csv, write_json
from .manifold import from_name
from .riesz import gamma_s, unit_masses

log = logging.getLogger("fracharm")

EXIT_OK, EXIT_CONFIG, EXIT_NOCONV, EXIT_CHECK = 0, 2, 3, 4


def _grid(cfg) -> LineGrid:
    return LineGrid(cfg["window_left"], cfg["window_right"], cfg["h"], cfg["R"])


def _target(cfg):
    if cfg["target"] == "pointpair":
        return from_name("pointpair")
    return from_name("sphere", cfg["target_dim"])


def _exterior(cfg) -> LatticeMap:
    grid = _grid(cfg)
    kind = cfg["exterior"]
    if kind == "constant":
        return LatticeMap.constant(grid, cfg["exterior_a"])
    if kind == "jump":
        return LatticeMap.jump(grid, cfg["exterior_a"], cfg["exterior_b"], cfg["exterior_at"])
    u = read_lattice_csv(cfg["exterior_csv"])
    if not u.grid.same_as(grid):
        raise ConfigError("lattice CSV does not match window/h/R", field="exterior_csv")
    return u


def _solve(cfg):
    m = _target(cfg)
    ext = _exterior(cfg)
    u0 = solver.initial_map(ext, m, cfg["init"], cfg["seed"])
    K = assemble(ext.grid, cfg["s"])
    opts = solver.SolverOptions(
        max_iters=cfg["max_iters"],
        grad_tol=cfg["grad_tol"],
        step0=cfg["step0"],
        armijo_c=cfg["armijo_c"],
        backtrack=cfg["backtrack"],
        seed=cfg["seed"],
        jitter=cfg["jitter"],
    )
    return solver.minimize(u0, K, m, cfg["s"], opts), K, m


def run_minimize(cfg, out: Path) -> int:
    try:
        report, K, m = _solve(cfg)
    except (Stalled, ProjectionFailure) as exc:
        report = exc.report
        write_lattice_csv(report.final_map, out / "map.csv", cfg)
        write_json(out / "report.json", report.to_dict(), cfg)
        log.error("%s", exc)
        return EXIT_NOCONV
    payload = report.to_dict()
    u = report.final_map
    payload["localized_energy"] = localized_energy(u, u.grid.window, K, cfg["s"])
    if m.kind == "pointpair":
        flips = solver.flip_search(u, K, cfg["s"])
        payload["best_flip_cell"] = flips.best_cell
        payload["best_flip_delta"] = flips.best_delta
    else:
        payload["max_adjacent_jump"] = solver.max_adjacent_jump(u)
    write_lattice_csv(u, out / "map.csv", cfg)
    write_json(out / "report.json", payload, cfg)
    log.info("%s after %d iterations, energy %.12g", report.termination, report.iterations, report.final_energy)
    return EXIT_OK if report.converged else EXIT_NOCONV


def _half_grid(cfg, refine=1) -> cse.HalfRectGrid:
    return cse.HalfRectGrid(cfg["ext_x0"], cfg["ext_x1"], cfg["ext_Y"], cfg["ext_dx"] / refine, cfg["ext_dy"] / refine)


def run_extend(cfg, out: Path) -> int:
    u = _exterior(cfg)
    s = cfg["s"]
    v = cse.poisson_extend(u, _half_grid(cfg), s)
    cse.write_field_csv(v, out / "field.csv", cfg)
    ymin = cfg["residual_ymin"]
    xr = (cfg["ext_x0"] + ymin, cfg["ext_x1"] - ymin)
    coarse = cse.weighted_residual(v, s, y_min=ymin, x_range=xr)
    fine = cse.weighted_residual(cse.poisson_extend(u, _half_grid(cfg, 2), s), s, y_min=ymin, x_range=xr)
    rate = math.log2(coarse / fine) if coarse > 0 and fine > 0 else math.inf
    mass = cse.kernel_mass_at(u, s, v.grid.xs, np.full(v.grid.nx, v.grid.dy))
    resid = {
        "residual_coarse": coarse,
        "residual_fine": fine,
        "observed_rate": rate,
        "dx_coarse": v.grid.dx,
        "y_min": ymin,
        "max_kernel_mass_error": float(np.abs(mass - 1.0).max()),
        "sup_trace": float(np.abs(u.values).max()),
        "sup_field": float(np.abs(v.values).max()),
    }
    write_json(out / "residual.json", resid, cfg)
    prof = cse.density_profile(v, cfg["density_center"], cfg["probe_radii"], s)
    prof.to_csv(out / "profile.csv", cfg)
    return EXIT_OK


def run_stability(cfg, out: Path) -> int:
    rows = variation.stability_rows(cfg["stability_s"], cfg["stability_angles"])
    variation.write_stability_csv(out / "stability.csv", rows, cfg)
    ok = all(r[7] == 1 for r in rows) and all(r[5] < 0 for r in rows)
    ok = ok and all(r[4] == 0.0 for r in rows if r[2] == 0.0)
    if not ok:
        log.error("stability table failed an internal check")
        return EXIT_CHECK
    return EXIT_OK


def _blowup_map(cfg):
    src = cfg["blowup_source"]
    if src == "csv":
        return read_lattice_csv(cfg["input_map"]), None
    if src == "exterior":
        return _exterior(cfg), None
    report, _, _ = _solve(cfg)
    return report.final_map, report


def run_blowup(cfg, out: Path) -> int:
    s = cfg["s"]
    try:
        u, report = _blowup_map(cfg)
    except (Stalled, ProjectionFailure) as exc:
        log.error("%s", exc)
        return EXIT_NOCONV
    if report is not None and not report.converged:
        log.error("minimization did not converge (%s)", report.termination)
        return EXIT_NOCONV
    m = _target(cfg)
    v = cse.poisson_extend(u, _half_grid(cfg), s)
    thr = cfg["threshold"] or analysis.default_threshold(s)
    sing = analysis.singular_set(u, v, thr, cfg["probe_points"], cfg["probe_radii"], s)
    ref = LineGrid(-1.0, 1.0, u.grid.h, min(u.grid.R, 2.0))
    rows, tangents = [], []
    for x0 in cfg["probe_points"]:
        fit = analysis.holder_exponent(u, x0, cfg["holder_radii"])
        try:
            seq = analysis.blowup_sequence(u, x0, cfg["blowup_scales"], ref)
            tc = analysis.tangent_classify(seq, m, cfg["tangent_tol"])
        except FracharmError as exc:
            tc = analysis.TangentClass("unresolved")
            log.warning("tangent map at %g: %s", x0, exc)
        tangents.append({"x0": x0, **tc.to_dict()})
        rows.append([x0, fit.exponent, fit.slope, fit.residual, tc.kind])
    payload = sing.to_dict()
    payload["tangent_maps"] = tangents
    payload["holder"] = [dict(zip(["x0", "exponent", "slope", "fit_residual"], r[:4])) for r in rows]
    write_json(out / "singular_set.json", payload, cfg)
    write_csv(out / "exponents.csv", ["x0", "exponent", "slope", "fit_residual", "tangent"], rows, cfg)
    return EXIT_OK


def _selftest_checks():
    """Small invariant suite; each entry is (name, passed, detail)."""
    out = []
    I1, I2, I3 = unit_masses(0.25)
    out.append(("unit masses at s=1/4", abs(I1 - 4 * (2 - math.sqrt(2))) < 1e-12 and abs(I2 - 4) < 1e-12 and abs(I3 - 4 * (math.sqrt(2) - 1)) < 1e-12, [I1, I2, I3]))
    worst = max(abs(variation.coefficients(s).identity_residual) for s in np.linspace(0.02, 0.48, 20))
    out.append(("I2 = I1 + I3", worst < 1e-12, worst))
    d2 = variation.second_variation_antipodal(0.25)
    out.append(("antipodal second variation", abs(d2 + 1.86956) < 1e-5 and d2 < 0, d2))
    g = LineGrid(-1.0, 1.0, 1.0 / 16.0, 2.0)
    u = LatticeMap.jump(g, [1.0, 0.0], [-1.0, 0.0])
    E = energy(u, assemble(g, 0.25), 0.25)
    out.append(("jump energy", abs(E - 16 * math.sqrt(2) * gamma_s(0.25)) < 1e-9, E))
    c = LatticeMap.constant(g, [0.6, 0.8])
    v = cse.poisson_extend(c, cse.HalfRectGrid(-1, 1, 1, 0.125, 0.125), 0.25)
    err = float(np.abs(v.values - np.array([0.6, 0.8])).max())
    out.append(("extension of constants", err < 1e-10, err))
    return out


def run_selftest(cfg, out: Path) -> int:
    checks = _selftest_checks()
    rows = [[name, int(ok), detail if not isinstance(detail, list) else ";".join(format(x, ".17g") for x in detail)] for name, ok, detail in checks]
    write_csv(out / "selftest.csv", ["check", "passed", "value"], rows, cfg)
    for name, ok, _ in checks:
        log.info("%s %s", "PASS" if ok else "FAIL", name)
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_CHECK


COMMANDS = {
    "minimize": run_minimize,
    "extend": run_extend,
    "stability": run_stability,
    "blowup": run_blowup,
    "selftest": run_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracharm", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = cfgmod.load(args.config) if args.config else cfgmod.defaults()
        if args.seed is not None:
            cfg["seed"] = args.seed
        cfgmod.validate(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    set_threads(args.threads)
    log.info("backend %s, threads %d", BACKEND, args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    resolved = dict(cfg, command=args.command)
    try:
        return COMMANDS[args.command](resolved, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
