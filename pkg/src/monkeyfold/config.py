"""Run configuration: a flat ``key = value`` file.

Lines starting with ``#`` (or trailing ``# ...``) are comments. Every key
is optional; unknown keys are errors. Angles are given in degrees::

    n = 65
    preset = test1, test2, test3, test4   # or a single name, or "all"
    gamma2 = 1.2                          # overrides one weight of a single preset
    count = 250
    seed = 1
    height = 40
    region = -160:-45:-70:-10, -170:-50:90:180
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .objective import PRESETS
from .optimizer import MSParams
from .protein_problem import AllowedRegion, PerturbationSettings


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True)
class RunConfig:
    n: int = 65
    weight_sets: tuple = (("test2", PRESETS["test2"]),)
    th: float = 4.30
    c: float = 5.50
    count: int = 1
    ms: MSParams = field(default_factory=MSParams)
    region: AllowedRegion = field(default_factory=AllowedRegion)
    moves: PerturbationSettings = field(default_factory=PerturbationSettings)
    seed: int = 0
    out_dir: str = "simulations"
    workers: int = 0  # 0 = decide from CPU count

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError("n must be >= 3")
        if self.count < 1:
            raise ConfigError("count must be >= 1")
        if not self.weight_sets:
            raise ConfigError("at least one weight triplet is required")
        if not (self.th > 0 and self.c > 0):
            raise ConfigError("th and c must be positive")

    @property
    def weights(self):
        return self.weight_sets[0][1]

    def seed_for(self, index):
        return self.seed + index

    @property
    def total(self):
        return self.count * len(self.weight_sets)


_MS_KEYS = {f.name for f in fields(MSParams)} - {"epsilon", "rng_seed"}
_INT_KEYS = {"n", "count", "seed", "workers", "window_max", "height", "climb_ups",
             "memory_size", "starting_trees", "max_trees"}
_FLOAT_KEYS = {"gamma1", "gamma2", "gamma3", "th", "c", "better_branch_prob",
               "climb_up_prob", "epsilon_deg", "sigma_deg"}
KEYS = _INT_KEYS | _FLOAT_KEYS | {"preset", "region", "out_dir"}


def parse_presets(value):
    names = [v.strip() for v in value.split(",") if v.strip()]
    if names == ["all"]:
        names = list(PRESETS)
    unknown = [v for v in names if v not in PRESETS]
    if unknown or not names:
        raise ValueError(f"unknown preset(s) {', '.join(unknown) or value!r}; choose from {', '.join(PRESETS)} or all")
    return tuple((name, PRESETS[name]) for name in names)


def parse_region(value):
    boxes = []
    for chunk in value.split(","):
        parts = chunk.strip().split(":")
        if len(parts) != 4:
            raise ValueError(f"region box {chunk.strip()!r} needs phi_lo:phi_hi:psi_lo:psi_hi")
        boxes.append(tuple(float(p) for p in parts))
    return AllowedRegion.from_degrees(boxes)


def parse_config(text, overrides=None) -> RunConfig:
    """Parse config ``text``; ``overrides`` (key -> raw string or value)
    take precedence over the file, as command line flags do."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno)
        raw[key] = (value, lineno)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")
        if key == "preset":
            for g in ("gamma1", "gamma2", "gamma3"):
                raw.pop(g, None)
        raw[key] = (str(value), None)

    values = {}
    for key, (value, lineno) in raw.items():
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                v = float(value)
                if not math.isfinite(v):
                    raise ValueError("value must be finite")
                values[key] = v
            elif key == "preset":
                values[key] = parse_presets(value)
            elif key == "region":
                values[key] = parse_region(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None

    try:
        return _build(values, raw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build(values, raw):
    weight_sets = values.get("preset", RunConfig.weight_sets)
    gammas = {k: values[k] for k in ("gamma1", "gamma2", "gamma3") if k in values}
    if gammas:
        if len(weight_sets) > 1:
            line = min(raw[k][1] or 0 for k in gammas) or None
            raise ConfigError("gamma overrides need a single preset", line)
        g = dict(zip(("gamma1", "gamma2", "gamma3"), weight_sets[0][1]))
        g.update(gammas)
        weight_sets = (("custom", (g["gamma1"], g["gamma2"], g["gamma3"])),)

    ms = MSParams()
    ms_kw = {k: values[k] for k in _MS_KEYS if k in values}
    if "epsilon_deg" in values:
        ms_kw["epsilon"] = math.radians(values["epsilon_deg"])
    ms = replace(ms, **ms_kw)

    moves = PerturbationSettings()
    mv_kw = {}
    if "sigma_deg" in values:
        mv_kw["sigma"] = math.radians(values["sigma_deg"])
    if "window_max" in values:
        mv_kw["window_max"] = values["window_max"]
    moves = replace(moves, **mv_kw)

    kw = {k: values[k] for k in ("n", "th", "c", "count", "seed", "out_dir", "workers") if k in values}
    if "region" in values:
        kw["region"] = values["region"]
    return RunConfig(weight_sets=weight_sets, ms=ms, moves=moves, **kw)


def load_config(path=None, overrides=None) -> RunConfig:
    text = ""
    if path is not None:
        with open(path) as fh:
            text = fh.read()
    return parse_config(text, overrides)
