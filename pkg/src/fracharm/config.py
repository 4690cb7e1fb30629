"""Flat ``key = value`` experiment configuration.

One setting per line, ``#`` starts a comment.  Every key is typed and
unknown or repeated keys are rejected with the offending line number.
Lists are comma separated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _int(text):
    return int(text)


def _floats(text):
    if not text.strip():
        return []
    return [_float(p) for p in text.split(",")]


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _path(text):
    return text


@dataclass(frozen=True)
class Key:
    parse: object
    default: object
    help: str = ""


SCHEMA = {
    # problem
    "s": Key(_float, 0.25, "fractional order in (0, 1/2)"),
    "window_left": Key(_float, -1.0),
    "window_right": Key(_float, 1.0),
    "h": Key(_float, 1.0 / 32.0, "cell size"),
    "R": Key(_float, 2.0, "truncation radius"),
    "target": Key(_choice("sphere", "pointpair"), "sphere"),
    "target_dim": Key(_int, 2, "ambient dimension of the sphere target"),
    "exterior": Key(_choice("constant", "jump", "csv"), "jump"),
    "exterior_a": Key(_floats, [1.0, 0.0], "value right of the jump (or the constant)"),
    "exterior_b": Key(_floats, [-1.0, 0.0], "value left of the jump"),
    "exterior_at": Key(_float, 0.0, "jump position"),
    "exterior_csv": Key(_path, "", "lattice CSV for exterior = csv"),
    # solver
    "init": Key(_choice("copy", "geodesic", "random"), "copy"),
    "max_iters": Key(_int, 5000),
    "grad_tol": Key(_float, 1e-7),
    "step0": Key(_float, 1.0),
    "armijo_c": Key(_float, 1e-4),
    "backtrack": Key(_float, 0.5),
    "jitter": Key(_float, 1e-3),
    "seed": Key(_int, 0),
    # extension
    "ext_x0": Key(_float, -1.5),
    "ext_x1": Key(_float, 1.5),
    "ext_Y": Key(_float, 1.5),
    "ext_dx": Key(_float, 1.0 / 32.0),
    "ext_dy": Key(_float, 1.0 / 32.0),
    "residual_ymin": Key(_float, 0.25, "lower edge of the residual sub-rectangle"),
    "density_center": Key(_float, 0.0),
    "probe_radii": Key(_floats, [0.125, 0.25, 0.5]),
    # stability table
    "stability_s": Key(_floats, [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]),
    "stability_angles": Key(_floats, [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8], "phi with a = (cos phi, sin phi)"),
    # blow-up
    "blowup_source": Key(_choice("exterior", "minimize", "csv"), "minimize"),
    "input_map": Key(_path, "", "lattice CSV for blowup_source = csv"),
    "probe_points": Key(_floats, [-0.5, -0.25, -0.0625, 0.0, 0.0625, 0.25, 0.5]),
    "threshold": Key(_float, 0.0, "density threshold; 0 means half the jump density"),
    "blowup_scales": Key(_floats, [0.25, 0.125, 0.0625]),
    "tangent_tol": Key(_float, 0.25),
    "holder_radii": Key(_floats, [0.0625, 0.125, 0.25, 0.5]),
}


def defaults() -> dict:
    return {k: (list(v.default) if isinstance(v.default, list) else v.default) for k, v in SCHEMA.items()}


def parse_text(text: str) -> dict:
    cfg = defaults()
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", line=lineno, field=key)
        if key in seen:
            raise ConfigError(f"repeated key (first set on line {seen[key]})", line=lineno, field=key)
        seen[key] = lineno
        try:
            cfg[key] = SCHEMA[key].parse(value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r}: {exc}", line=lineno, field=key) from None
    validate(cfg, seen)
    return cfg


def load(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_text(text)


def validate(cfg: dict, lines: dict | None = None) -> None:
    """Cross-field checks.  ``lines`` maps keys to their source line."""
    lines = lines or {}

    def fail(msg, key):
        raise ConfigError(msg, line=lines.get(key), field=key)

    if not 0.0 < cfg["s"] < 0.5:
        fail(f"s must lie in (0, 1/2), got {cfg['s']}", "s")
    if not cfg["h"] > 0:
        fail("h must be positive", "h")
    if not cfg["window_left"] < cfg["window_right"]:
        fail("empty window", "window_right")
    if not cfg["R"] > max(abs(cfg["window_left"]), abs(cfg["window_right"])):
        fail("R must lie beyond the window", "R")
    for key in ("window_left", "window_right", "R"):
        k = (cfg[key] + cfg["R"]) / cfg["h"] if key != "R" else 2 * cfg["R"] / cfg["h"]
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            # blame whichever of the involved keys was written last
            involved = [x for x in ("h", key) if x in lines]
            fail("h must divide the window and the truncation", max(involved, key=lines.get) if involved else "h")
    if cfg["target"] == "pointpair":
        for key in ("exterior_a", "exterior_b"):
            if len(cfg[key]) != 1 or abs(abs(cfg[key][0]) - 1.0) > 1e-12:
                fail("point-pair data must be +1 or -1", key)
    else:
        if cfg["target_dim"] < 2:
            fail("sphere target needs ambient dimension >= 2", "target_dim")
        for key in ("exterior_a", "exterior_b"):
            v = cfg[key]
            if len(v) != cfg["target_dim"]:
                fail(f"needs {cfg['target_dim']} components", key)
            if abs(math.fsum(x * x for x in v) - 1.0) > 1e-12:
                fail("must be a unit vector", key)
    for key in ("exterior_csv", "input_map"):
        needed = (key == "exterior_csv" and cfg["exterior"] == "csv") or (
            key == "input_map" and cfg["blowup_source"] == "csv"
        )
        if needed:
            if not cfg[key]:
                fail("a file is required here", key)
            if not Path(cfg[key]).is_file():
                fail(f"file not found: {cfg[key]}", key)
    for key in ("max_iters",):
        if cfg[key] <= 0:
            fail("must be positive", key)
    for key in ("grad_tol", "step0", "ext_dx", "ext_dy", "ext_Y", "tangent_tol"):
        if not cfg[key] > 0:
            fail("must be positive", key)
    for key in ("armijo_c", "backtrack"):
        if not 0 < cfg[key] < 1:
            fail("must lie in (0, 1)", key)
    if cfg["jitter"] < 0:
        fail("must be nonnegative", "jitter")
    if cfg["threshold"] < 0:
        fail("must be nonnegative", "threshold")
    if not cfg["ext_x0"] < cfg["ext_x1"]:
        fail("empty extension range", "ext_x1")
    for key in ("probe_radii", "blowup_scales", "holder_radii"):
        if any(r <= 0 for r in cfg[key]) or not cfg[key]:
            fail("needs positive entries", key)
    for s in cfg["stability_s"]:
        if not 0 < s < 0.5:
            fail(f"order {s} outside (0, 1/2)", "stability_s")
    for phi in cfg["stability_angles"]:
        if not 0 <= phi < math.pi / 2:
            fail(f"angle {phi} outside [0, pi/2)", "stability_angles")


def render(cfg: dict) -> str:
    """Canonical text form; ``parse_text(render(cfg)) == cfg``."""
    out = []
    for key in SCHEMA:
        v = cfg[key]
        if isinstance(v, list):
            v = ", ".join(format(x, ".17g") for x in v)
        elif isinstance(v, float):
            v = format(v, ".17g")
        out.append(f"{key} = {v}")
    return "\n".join(out) + "\n"
