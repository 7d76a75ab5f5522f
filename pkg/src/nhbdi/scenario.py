"""Scenario definition, validation and scenario-file IO (JSON or TOML)."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import tomli_w

from .exceptions import ConfigError, UndefinedReproductionError
from .rates import Constant, RaisedCosine, RateFunction, Segment

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

__all__ = [
    "Scenario",
    "running_example",
    "homogeneous",
    "effective_reproduction",
    "mean_infectious_period",
    "load_scenario",
    "parse_scenario",
    "scenario_to_dict",
    "dump_scenario",
    "preset_path",
    "PRESETS",
]

MAX_GRID_STEPS = 10**7


@dataclass(frozen=True)
class Scenario:
    """A complete model instance.

    ``lam``, ``mu`` and ``nu`` are the infection, recovery and external-arrival
    rates; ``i0`` the initial number of infectious individuals.  The remaining
    fields configure the numerics (horizon ``t_end``, grid step ``dt``, PMF
    truncation ``k_max``) and the Monte Carlo (``replications``, ``master_seed``).
    """

    lam: RateFunction
    mu: RateFunction
    nu: RateFunction
    i0: int = 1
    t_end: float = 500.0
    dt: float = 0.01
    k_max: int = 400_000
    replications: int = 100_000
    master_seed: int = 20210122
    window: float = field(default=5.0)

    def __post_init__(self):
        if int(self.i0) != self.i0 or self.i0 < 0:
            raise ConfigError(f"i0 must be a nonnegative integer, got {self.i0!r}")
        object.__setattr__(self, "i0", int(self.i0))
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError(f"t_end must be positive and finite, got {self.t_end}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end / self.dt > MAX_GRID_STEPS:
            raise ConfigError(f"grid too fine: t_end/dt = {self.t_end / self.dt:.3g} > 1e7")
        if int(self.k_max) != self.k_max or self.k_max < self.i0:
            raise ConfigError(f"k_max must be an integer >= i0, got {self.k_max}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError(f"replications must be a positive integer, got {self.replications}")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ConfigError("seed must fit in 64 unsigned bits")
        if not self.window > 0:
            raise ConfigError("lookahead window must be positive")

    @property
    def is_bd(self) -> bool:
        """True when there are no external arrivals (pure birth-death)."""
        return self.nu.is_zero

    def growth_rate(self, t):
        """Net growth rate ``a(t) = lambda(t) - mu(t)``."""
        return self.lam(t) - self.mu(t)

    def with_overrides(self, **kw) -> "Scenario":
        """Copy with selected fields replaced; ``delay_d`` rewrites the infection-rate transition."""
        delay = kw.pop("delay_d", None)
        kw = {k: v for k, v in kw.items() if v is not None}
        sc = replace(self, **kw)
        if delay is not None:
            sc = replace(sc, lam=sc.lam.with_delay(float(delay)))
        return sc


def running_example(delay: float = 10.0, nu0: float = 0.0, i0: int = 1, **kw) -> Scenario:
    """The decree scenario: lambda drops from 0.3 to 0.06 starting at day 50, mu = 0.1."""
    return Scenario(
        lam=RateFunction.step(0.3, 0.06, 50.0, delay),
        mu=RateFunction.constant(0.1),
        nu=RateFunction.constant(nu0),
        i0=i0,
        **kw,
    )


def homogeneous(lam: float, mu: float, nu: float = 0.0, i0: int = 1, **kw) -> Scenario:
    return Scenario(
        lam=RateFunction.constant(lam),
        mu=RateFunction.constant(mu),
        nu=RateFunction.constant(nu),
        i0=i0,
        **kw,
    )


def effective_reproduction(sc: Scenario, t: float) -> float:
    """``R(t) = lambda(t) / mu(t)``."""
    mu = sc.mu(t)
    if mu == 0:
        raise UndefinedReproductionError(f"mu({t}) = 0: reproduction number undefined")
    return sc.lam(t) / mu


def mean_infectious_period(sc: Scenario, t: float) -> float:
    """``tau(t) = 1 / mu(t)`` in days."""
    mu = sc.mu(t)
    if mu == 0:
        raise UndefinedReproductionError(f"mu({t}) = 0: infectious period undefined")
    return 1.0 / mu


# ---------------------------------------------------------------------------
# file format

_TOP_KEYS = {"lambda", "mu", "nu", "i0", "t_end", "dt", "k_max", "replications", "seed", "window"}
_RATE_KEYS = {"segments"}
_SEG_KEYS = {
    "constant": {"t_start", "t_end", "shape", "level"},
    "raised_cosine": {"t_start", "t_end", "shape", "from", "to"},
}


def _check_keys(obj: Any, allowed: set[str], where: str, required: set[str] = frozenset()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a table/object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing key(s) {sorted(missing)}")


def _number(obj, key, where, kind=float):
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"{where}.{key}: expected an integer, got {value!r}")
    return kind(value)


def _parse_rate(obj: Any, where: str) -> RateFunction:
    _check_keys(obj, _RATE_KEYS, where, {"segments"})
    raw = obj["segments"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where}.segments: expected a non-empty list")
    segs = []
    for i, seg in enumerate(raw):
        w = f"{where}.segments[{i}]"
        if not isinstance(seg, dict) or "shape" not in seg:
            raise ConfigError(f"{w}: each segment needs a 'shape'")
        shape = seg["shape"]
        if shape not in _SEG_KEYS:
            raise ConfigError(f"{w}.shape: unknown shape {shape!r} (constant | raised_cosine)")
        required = _SEG_KEYS[shape] - ({"t_end"} if i == len(raw) - 1 else set())
        _check_keys(seg, _SEG_KEYS[shape], w, required)
        t_start = _number(seg, "t_start", w)
        t_end = _number(seg, "t_end", w) if "t_end" in seg else math.inf
        if shape == "constant":
            body = Constant(_number(seg, "level", w))
        else:
            body = RaisedCosine(_number(seg, "from", w), _number(seg, "to", w))
        segs.append(Segment(t_start, t_end, body))
    try:
        return RateFunction(tuple(segs))
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_scenario(data: dict) -> Scenario:
    """Build a Scenario from the decoded JSON/TOML document (strict keys)."""
    _check_keys(data, _TOP_KEYS, "scenario", {"lambda", "mu", "nu", "i0"})
    kw: dict[str, Any] = {}
    for key, attr, kind in [
        ("t_end", "t_end", float),
        ("dt", "dt", float),
        ("k_max", "k_max", int),
        ("replications", "replications", int),
        ("seed", "master_seed", int),
        ("window", "window", float),
    ]:
        if key in data:
            kw[attr] = _number(data, key, "scenario", kind)
    return Scenario(
        lam=_parse_rate(data["lambda"], "lambda"),
        mu=_parse_rate(data["mu"], "mu"),
        nu=_parse_rate(data["nu"], "nu"),
        i0=_number(data, "i0", "scenario", int),
        **kw,
    )


def _rate_to_dict(rate: RateFunction) -> dict:
    out = []
    for seg in rate.segments:
        item: dict[str, Any] = {"t_start": seg.t_start}
        if math.isfinite(seg.t_end):
            item["t_end"] = seg.t_end
        if isinstance(seg.shape, Constant):
            item["shape"] = "constant"
            item["level"] = seg.shape.level
        else:
            item["shape"] = "raised_cosine"
            item["from"] = seg.shape.from_level
            item["to"] = seg.shape.to_level
        out.append(item)
    return {"segments": out}


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "i0": sc.i0,
        "t_end": sc.t_end,
        "dt": sc.dt,
        "k_max": sc.k_max,
        "replications": sc.replications,
        "seed": sc.master_seed,
        "window": sc.window,
        "lambda": _rate_to_dict(sc.lam),
        "mu": _rate_to_dict(sc.mu),
        "nu": _rate_to_dict(sc.nu),
    }


def dump_scenario(sc: Scenario, path) -> Path:
    """Write ``sc`` as TOML or JSON, chosen by the file extension."""
    path = Path(path)
    data = scenario_to_dict(sc)
    if path.suffix.lower() == ".toml":
        path.write_text(tomli_w.dumps(data))
    elif path.suffix.lower() == ".json":
        path.write_text(json.dumps(data, indent=2) + "\n")
    else:
        raise ConfigError(f"unsupported scenario extension {path.suffix!r} (.toml or .json)")
    return path


PRESETS = (
    "running_example",
    "running_example_d0",
    "running_example_d5",
    "running_example_d10",
    "running_example_bdi",
    "homogeneous_small",
)


def preset_path(name: str) -> Path:
    """Path of a bundled scenario file, by stem or file name."""
    stem = Path(name).stem
    if stem not in PRESETS:
        raise ConfigError(f"no bundled scenario {name!r}; available: {', '.join(PRESETS)}")
    return Path(str(resources.files("nhbdi").joinpath("scenarios", f"{stem}.toml")))


def load_scenario(path) -> Scenario:
    """Read a scenario file; a bare preset name resolves to the bundled copy.

    Decode errors are re-raised as ConfigError carrying line/column information.
    """
    p = Path(path)
    if not p.exists():
        if p.parent == Path(".") and Path(p.name).stem in PRESETS:
            p = preset_path(p.name)
        else:
            raise ConfigError(f"{path}: no such scenario file")
    text = p.read_text()
    suffix = p.suffix.lower()
    try:
        if suffix == ".toml":
            data = tomllib.loads(text)
        elif suffix == ".json":
            data = json.loads(text)
        else:
            raise ConfigError(f"{p}: unsupported extension {suffix!r} (.toml or .json)")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except tomllib.TOMLDecodeError as exc:
        line, col = getattr(exc, "lineno", None), getattr(exc, "colno", None)
        if line is not None:
            raise ConfigError(f"{p}:{line}:{col}: {getattr(exc, 'msg', exc)}") from None
        raise ConfigError(f"{p}: {exc}") from None
    try:
        return parse_scenario(data)
    except ConfigError as exc:
        raise ConfigError(f"{p}: {exc}") from None
