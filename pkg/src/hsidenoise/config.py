"""INI-style run configuration.

Sections and keys::

    [solver]  lam gamma rho0 rho_max kappa epsilon t_max patch_rows patch_cols
              stride_rows stride_cols mode literal_l_update threads deterministic
    [tv]      tau_x tau_y tau_z
    [noise]   case_id seed gaussian_variance variance_as_sigma deadline_bands
              deadline_count deadline_width stripe_bands stripe_count
              stripe_values snr_range salt_pepper_density
              impulse_density_range nominal_bands clip
    [metrics] pixel normalize

Pairs are written ``a, b``; an empty value means "use the default".
Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .noisegen import NoiseSpec
from .solver import SolverConfig
from .sstv import TvWeights

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config", "dump_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(1))
    pixel: Optional[tuple] = None
    normalize: bool = True


_SOLVER_KEYS = [f.name for f in dataclasses.fields(SolverConfig) if f.name != "weights"]
_TV_KEYS = ["tau_x", "tau_y", "tau_z"]
_NOISE_KEYS = [f.name for f in dataclasses.fields(NoiseSpec)]
_METRIC_KEYS = ["pixel", "normalize"]
_SECTIONS = {"solver": _SOLVER_KEYS, "tv": _TV_KEYS, "noise": _NOISE_KEYS, "metrics": _METRIC_KEYS}

_BOOL = {"true": True, "yes": True, "on": True, "1": True,
         "false": False, "no": False, "off": False, "0": False}


def _field_types(cls):
    return {f.name: f.default if f.default is not dataclasses.MISSING else None
            for f in dataclasses.fields(cls)}


def _to_bool(text, key):
    try:
        return _BOOL[text.lower()]
    except KeyError:
        raise ConfigError(f"{key}: expected a boolean, got {text!r}") from None


def _to_pair(text, key, conv=float):
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'a, b', got {text!r}")
    try:
        return tuple(conv(t) for t in parts)
    except ValueError:
        raise ConfigError(f"{key}: bad number in {text!r}") from None


def _convert(text, template, key):
    """Convert ``text`` to the type of the default value ``template``."""
    try:
        if isinstance(template, bool):
            return _to_bool(text, key)
        if isinstance(template, int):
            return int(text)
        if isinstance(template, float):
            return float(text)
        if isinstance(template, tuple):
            conv = int if all(isinstance(v, int) for v in template) else float
            return _to_pair(text, key, conv)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    return text


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")

    def items(section):
        return parser[section].items() if parser.has_section(section) else []

    solver_defaults = _field_types(SolverConfig)
    solver_kw = {}
    for key, value in items("solver"):
        if value.strip():
            solver_kw[key] = _convert(value.strip(), solver_defaults[key], f"solver.{key}")
    tv_defaults = dataclasses.asdict(TvWeights())
    tv_kw = {k: _convert(v.strip(), tv_defaults[k], f"tv.{k}") for k, v in items("tv") if v.strip()}

    noise_defaults = _field_types(NoiseSpec)
    noise_kw = {"case_id": 1}
    for key, value in items("noise"):
        value = value.strip()
        if not value:
            continue
        if key == "case_id":
            noise_kw[key] = _convert(value, 0, f"noise.{key}")
        elif key == "gaussian_variance":
            noise_kw[key] = _convert(value, 0.0, f"noise.{key}")
        elif key == "snr_range":
            noise_kw[key] = _to_pair(value, f"noise.{key}")
        else:
            noise_kw[key] = _convert(value, noise_defaults[key], f"noise.{key}")

    pixel = None
    normalize = True
    for key, value in items("metrics"):
        value = value.strip()
        if key == "pixel" and value:
            pixel = _to_pair(value, "metrics.pixel", int)
        elif key == "normalize" and value:
            normalize = _to_bool(value, "metrics.normalize")

    try:
        return RunConfig(
            solver=SolverConfig(weights=TvWeights(**tv_kw), **solver_kw),
            noise=NoiseSpec(**noise_kw),
            pixel=pixel,
            normalize=normalize,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _format(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ", ".join(_format(v) for v in value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    """Canonical text: every key present, fixed order, ``repr`` floats."""
    solver = dataclasses.asdict(cfg.solver)
    weights = solver.pop("weights")
    noise = dataclasses.asdict(cfg.noise)
    sections = {
        "solver": {k: solver[k] for k in _SOLVER_KEYS},
        "tv": {k: weights[k] for k in _TV_KEYS},
        "noise": {k: noise[k] for k in _NOISE_KEYS},
        "metrics": {"pixel": cfg.pixel, "normalize": cfg.normalize},
    }
    lines = []
    for name, values in sections.items():
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {_format(v)}".rstrip() for k, v in values.items())
        lines.append("")
    return "\n".join(lines)
