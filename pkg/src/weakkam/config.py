"""Line-oriented experiment configuration.

Format: one `key = value` per line, `#` comments, blank lines ignored.
Keys use dotted section prefixes (grid.n, discount.lambda_schedule, ...).
Unknown keys and malformed values are rejected with their line numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


_DEFAULT_SCHEDULE = "1e-1,4.6415888336127775e-2,2.1544346900318832e-2," \
                    "1e-2,4.6415888336127775e-3,2.1544346900318832e-3,1e-3"

# key -> (type tag, default).  "auto" is an allowed value wherever the
# default is "auto"; it is resolved during the run.
_SCHEMA = {
    "preset": ("choice:example1,example2,custom", "example1"),
    "seed": ("int", "0"),
    "grid.n": ("int", "256"),
    "grid.circumference": ("float", "1.0"),
    "grid.dt": ("autofloat", "auto"),
    "hamiltonian.v_max": ("autofloat", "auto"),
    "hamiltonian.p_max": ("autofloat", "auto"),
    "potential.file": ("path", ""),
    "discount.a": ("aspec", "cos2pix"),
    "discount.A": ("autofloat", "auto"),
    "discount.class_index": ("int", "0"),
    "discount.lambda_schedule": ("floatlist", _DEFAULT_SCHEDULE),
    "discount.tol_fix": ("float", "1e-10"),
    "discount.max_iters": ("int", "200000"),
    "tolerances.tol_aubry": ("autofloat", "auto"),
    "tolerances.tol_class": ("autofloat", "auto"),
    "tolerances.tol_fixed": ("autofloat", "auto"),
    "orbit.steps": ("autofloat", "auto"),
    "output.dir": ("path", "out"),
}

_ASPEC_RE = re.compile(r"^(cos2pix|neg_cos2pix|const\(\s*[-+0-9.eE]+\s*\)|file:.+)$")


@dataclass
class ExperimentConfig:
    """Parsed, defaulted experiment configuration (raw string values)."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get_float(self, key):
        return float(self.values[key])

    def get_int(self, key):
        return int(self.values[key])

    def is_auto(self, key):
        return self.values[key] == "auto"

    def get_float_or_auto(self, key, auto_value):
        return auto_value if self.is_auto(key) else float(self.values[key])

    @property
    def lambda_schedule(self):
        return [float(s) for s in self.values["discount.lambda_schedule"].split(",")]


def _check_value(key, value, line_no):
    kind = _SCHEMA[key][0]
    try:
        if kind.startswith("choice:"):
            allowed = kind.split(":", 1)[1].split(",")
            if value not in allowed:
                raise ValueError(f"must be one of {allowed}")
        elif kind == "int":
            int(value)
        elif kind == "float":
            v = float(value)
            if v != v or v in (float("inf"), float("-inf")):
                raise ValueError("must be finite")
        elif kind == "autofloat":
            if value != "auto":
                v = float(value)
                if v != v or v in (float("inf"), float("-inf")):
                    raise ValueError("must be finite or 'auto'")
        elif kind == "floatlist":
            vals = [float(s) for s in value.split(",")]
            if not vals:
                raise ValueError("empty list")
            for v in vals:
                if v != v or abs(v) == float("inf"):
                    raise ValueError("entries must be finite")
        elif kind == "aspec":
            if not _ASPEC_RE.match(value):
                raise ValueError(
                    "expected cos2pix, neg_cos2pix, const(<c>), or file:<path>"
                )
        elif kind == "path":
            pass
        else:  # pragma: no cover
            raise AssertionError(kind)
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: bad value for {key!r}: {exc}") from None


def parse_config(text):
    """Parse configuration text, fill defaults, and validate values."""
    values = {}
    errors = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {line_no}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            errors.append(f"line {line_no}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"line {line_no}: duplicate key {key!r}")
            continue
        try:
            _check_value(key, value, line_no)
        except ConfigError as exc:
            errors.append(str(exc))
            continue
        values[key] = value
    if errors:
        raise ConfigError("; ".join(errors))
    for key, (_, default) in _SCHEMA.items():
        values.setdefault(key, default)
    cfg = ExperimentConfig(values=values)
    _validate_consistency(cfg)
    return cfg


def _validate_consistency(cfg):
    if cfg.get_int("grid.n") < 4:
        raise ConfigError(f"grid.n must be >= 4, got {cfg.get_int('grid.n')}")
    if cfg.get_float("grid.circumference") <= 0.0:
        raise ConfigError("grid.circumference must be positive")
    sched = cfg.lambda_schedule
    if any(l <= 0.0 for l in sched):
        raise ConfigError("lambda schedule entries must be positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ConfigError("lambda schedule must be strictly decreasing")
    if cfg.get_float("discount.tol_fix") <= 0.0:
        raise ConfigError("discount.tol_fix must be positive")
    if cfg.get_int("discount.max_iters") < 1:
        raise ConfigError("discount.max_iters must be >= 1")
    if cfg.get_int("discount.class_index") < 0:
        raise ConfigError("discount.class_index must be >= 0")
    if cfg["preset"] == "custom" and not cfg["potential.file"]:
        raise ConfigError("custom preset requires potential.file")


def resolve_a(cfg, grid):
    """Node samples of the discount coefficient a from its catalog spec."""
    import numpy as np

    spec = cfg["discount.a"]
    w = 2.0 * np.pi / grid.circumference
    if spec == "cos2pix":
        return np.cos(w * grid.positions)
    if spec == "neg_cos2pix":
        return -np.cos(w * grid.positions)
    if spec.startswith("const("):
        return np.full(grid.n, float(spec[len("const("):-1]))
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        vals = np.loadtxt(path, dtype=float).reshape(-1)
        if vals.shape[0] != grid.n:
            raise ConfigError(
                f"a samples file has {vals.shape[0]} entries, grid has {grid.n}"
            )
        return vals
    raise ConfigError(f"unrecognized a spec {spec!r}")  # pragma: no cover
