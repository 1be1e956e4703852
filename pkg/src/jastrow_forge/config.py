"""TOML run configurations.

A config has a required ``[model]`` table and optional ``[physics]``,
``[verify]``, ``[oracle]`` and ``[sample]`` tables; a stage runs only when
its table is present. Example::

    [model]
    family = "power_law"       # power_law | exp_abs | gaussian | sinh_pow | hyper_gaussian
    n_particles = 5
    lambda = 2.0               # pair parameters: lambda, g, ell, n
    confinement = "harmonic"   # free | harmonic | anharmonic | lattice
    convention = "paper"       # verbatim | paper

    [physics]
    omega = 1.0                # hbar = mass = 1 unless given

    [verify]
    n_configs = 200
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import (
    Anharmonic,
    Convention,
    Free,
    Harmonic,
    Lattice,
    PolynomialEnvelope,
    ValidatedModel,
    build_model,
)
from .errors import ValidationError
from .oracle_grid import GridSpec
from .pair_functions import FAMILIES

# toml key -> dataclass field, per family
PAIR_KEYS = {
    "power_law": {"lambda": "lam"},
    "exp_abs": {"g": "g"},
    "gaussian": {"g": "g"},
    "sinh_pow": {"lambda": "lam", "ell": "ell"},
    "hyper_gaussian": {"g": "g", "n": "n"},
}


class ConfigError(ValidationError):
    """Malformed or incomplete config; the message names the offending field."""


@dataclass(frozen=True)
class VerifyCfg:
    n_configs: int = 200
    seed: int = 0
    box_halfwidth: float = 5.0
    threshold: float = 1e-9


@dataclass(frozen=True)
class OracleCfg:
    points: int = 256
    halfwidth: float = 8.0
    energy_tol: float = 5e-3
    overlap_min: float = 0.999
    tol: float = 1e-9


@dataclass(frozen=True)
class SampleCfg:
    n_steps: int = 60000
    n_burnin: int = 10000
    step_size: float = 0.5
    seed: int = 0
    thin: int = 5
    bins: int = 200
    halfwidth: float = 6.0
    chains: int = 1
    energy_tol: float = 1e-9
    variance_max: float = 1e-16
    position_variance: Optional[float] = None


@dataclass(frozen=True)
class RunConfig:
    path: Path
    raw: dict
    model: ValidatedModel
    verify: Optional[VerifyCfg] = None
    oracle: Optional[OracleCfg] = None
    sample: Optional[SampleCfg] = None
    extra: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.path.stem


def _need(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"missing field '{where}.{key}'")
    return table[key]


def _number(value, where: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{where}' must be a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"field '{where}' must be an integer, got {value!r}")
        return int(value)
    return float(value)


def _table(raw: dict, name: str, cls, required=False):
    if name not in raw:
        if required:
            raise ConfigError(f"missing table '[{name}]'")
        return None
    tbl = raw[name]
    if not isinstance(tbl, dict):
        raise ConfigError(f"'{name}' must be a table")
    kwargs = {}
    fields = cls.__dataclass_fields__
    for key, value in tbl.items():
        if key not in fields:
            raise ConfigError(f"unknown field '{name}.{key}'")
        default = fields[key].default
        kind = int if isinstance(default, int) and not isinstance(default, bool) else float
        kwargs[key] = _number(value, f"{name}.{key}", kind)
    return cls(**kwargs)


def _confinement(m: dict, n: int):
    kind = m.get("confinement", "free")
    if kind == "free":
        return Free()
    if kind == "harmonic":
        return Harmonic()
    if kind == "lattice":
        if "sites" in m:
            sites = [_number(s, "model.sites") for s in m["sites"]]
            return Lattice(tuple(sites))
        a = _number(_need(m, "spacing", "model"), "model.spacing")
        first = _number(m.get("first_site", 1), "model.first_site", int)
        return Lattice.regular(n, a, first)
    if kind == "anharmonic":
        if "quartic" in m:
            return Anharmonic(PolynomialEnvelope.quartic(_number(m["quartic"], "model.quartic")))
        coeffs = _need(m, "envelope", "model")
        return Anharmonic(PolynomialEnvelope(tuple(_number(c, "model.envelope") for c in coeffs)))
    raise ConfigError(f"field 'model.confinement' has unknown value {kind!r}")


def model_from_table(raw: dict) -> ValidatedModel:
    m = _table_dict(raw, "model")
    family = _need(m, "family", "model")
    if family not in FAMILIES:
        raise ConfigError(f"field 'model.family' has unknown value {family!r}")
    n = _number(_need(m, "n_particles", "model"), "model.n_particles", int)
    kwargs = {}
    for key, attr in PAIR_KEYS[family].items():
        v = _need(m, key, "model")
        kwargs[attr] = _number(v, f"model.{key}", int if attr == "n" else float)
    pair = FAMILIES[family](**kwargs)
    phys = raw.get("physics", {})
    for key in phys:
        if key not in ("hbar", "mass", "omega"):
            raise ConfigError(f"unknown field 'physics.{key}'")
    conv = m.get("convention", "verbatim")
    if conv not in ("verbatim", "paper"):
        raise ConfigError(f"field 'model.convention' has unknown value {conv!r}")
    return build_model(
        pair,
        n,
        _confinement(m, n),
        hbar=_number(phys.get("hbar", 1.0), "physics.hbar"),
        mass=_number(phys.get("mass", 1.0), "physics.mass"),
        omega=_number(phys.get("omega", 1.0), "physics.omega"),
        convention=Convention(conv),
    )


def _table_dict(raw, name):
    if name not in raw:
        raise ConfigError(f"missing table '[{name}]'")
    if not isinstance(raw[name], dict):
        raise ConfigError(f"'{name}' must be a table")
    return raw[name]


def parse_config(data: dict, path: Path = Path("<memory>")) -> RunConfig:
    return RunConfig(
        path=Path(path),
        raw=data,
        model=model_from_table(data),
        verify=_table(data, "verify", VerifyCfg),
        oracle=_table(data, "oracle", OracleCfg),
        sample=_table(data, "sample", SampleCfg),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(data, path)


def grid_for(model: ValidatedModel, cfg: OracleCfg) -> GridSpec:
    center = 0.0
    conf = model.confinement
    if isinstance(conf, Lattice):
        center = 0.5 * (min(conf.sites) + max(conf.sites))
    return GridSpec(halfwidth=cfg.halfwidth, points=cfg.points, center=center)


def echo(raw: dict) -> dict[str, Any]:
    """Plain-dict copy of the parsed TOML, for manifests."""
    return {k: (echo(v) if isinstance(v, dict) else v) for k, v in raw.items()}
