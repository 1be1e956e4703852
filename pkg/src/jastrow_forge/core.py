"""Shared domain types: physical constants, confinements, model specs.

Natural units (hbar = m = 1) are the defaults, but every formula in the
package carries hbar and m explicitly so tests can vary them.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import pair_functions as pfm
from .errors import (
    InconsistentEnvelope,
    InvalidConfiguration,
    NonPositiveConstant,
    SiteCountMismatch,
    UnsupportedConventionForFamily,
    ValidationError,
)
from .pair_functions import HyperGaussian, PairFunctionSpec


@dataclass(frozen=True)
class PhysParams:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise NonPositiveConstant(f"hbar must be > 0, got {self.hbar}")
        if not self.mass > 0:
            raise NonPositiveConstant(f"mass must be > 0, got {self.mass}")
        if not self.omega >= 0:
            raise NonPositiveConstant(f"omega must be >= 0, got {self.omega}")

    @property
    def hbar2_m(self) -> float:
        """Kinetic prefactor hbar**2/m."""
        return self.hbar**2 / self.mass

    @property
    def alpha(self) -> float:
        """Inverse squared oscillator length m*omega/hbar."""
        return self.mass * self.omega / self.hbar

    @property
    def oscillator_length(self) -> float:
        if self.omega == 0:
            return 1.0
        return math.sqrt(self.hbar / (self.mass * self.omega))


class Configuration:
    """Read-only ordered particle positions."""

    __slots__ = ("positions",)

    def __init__(self, positions):
        x = np.array(positions, dtype=float).reshape(-1)
        if x.size < 1:
            raise InvalidConfiguration("configuration needs at least one particle")
        if not np.all(np.isfinite(x)):
            raise InvalidConfiguration("configuration contains non-finite coordinates")
        x.flags.writeable = False
        self.positions = x

    def __len__(self):
        return self.positions.size

    def __array__(self, dtype=None, copy=None):
        return self.positions if dtype is None else self.positions.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, Configuration) and np.array_equal(
            self.positions, other.positions
        )

    def __hash__(self):
        return hash(self.positions.tobytes())

    def __repr__(self):
        return f"Configuration({self.positions.tolist()})"


# --- confinements ----------------------------------------------------------


@dataclass(frozen=True)
class CallableEnvelope:
    """Log-envelope v(x) given by three callables (value, first, second derivative)."""

    v: Callable[[np.ndarray], np.ndarray]
    dv: Callable[[np.ndarray], np.ndarray]
    d2v: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PolynomialEnvelope:
    """Log-envelope ``v(x) = sum_k coeffs[k] * x**k``.

    This is the form the compiled kernels accept; use
    :class:`CallableEnvelope` for anything else.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def quartic(cls, c: float) -> "PolynomialEnvelope":
        """``v(x) = -c x**4``."""
        return cls((0.0, 0.0, 0.0, 0.0, -c))

    @classmethod
    def harmonic(cls, params: PhysParams) -> "PolynomialEnvelope":
        """``v(x) = -(m omega / 2 hbar) x**2``, the Gaussian trap written as an envelope."""
        return cls((0.0, 0.0, -0.5 * params.alpha))

    def v(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def dv(self, x):
        d = np.polynomial.polynomial.polyder(self.coeffs) if len(self.coeffs) > 1 else [0.0]
        return np.polynomial.polynomial.polyval(x, d)

    def d2v(self, x):
        d = np.polynomial.polynomial.polyder(self.coeffs, 2) if len(self.coeffs) > 2 else [0.0]
        return np.polynomial.polynomial.polyval(x, d)


Envelope = Union[CallableEnvelope, PolynomialEnvelope]


@dataclass(frozen=True)
class Free:
    kind = "free"


@dataclass(frozen=True)
class Harmonic:
    kind = "harmonic"


@dataclass(frozen=True)
class Anharmonic:
    envelope: Envelope
    kind = "anharmonic"


@dataclass(frozen=True)
class Lattice:
    sites: tuple
    spacing: Optional[float] = None
    kind = "lattice"

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(float(s) for s in self.sites))

    @classmethod
    def regular(cls, n: int, a: float, first: int = 1) -> "Lattice":
        """Sites ``x_i = i * a`` for ``i = first, ..., first + n - 1``."""
        return cls(tuple(i * a for i in range(first, first + n)), a)


Confinement = Union[Free, Harmonic, Anharmonic, Lattice]


class Convention(str, enum.Enum):
    """Where constant terms of the potentials are booked.

    ``VERBATIM`` keeps them inside V2, V3, V2L (trapped eigenvalue N hbar omega / 2).
    ``PAPER_CATALOG`` moves them into the quoted ground-state energy.
    """

    VERBATIM = "verbatim"
    PAPER_CATALOG = "paper"


@dataclass(frozen=True)
class ModelSpec:
    pair: PairFunctionSpec
    confinement: Confinement = field(default_factory=Free)
    n_particles: int = 2
    params: PhysParams = field(default_factory=PhysParams)
    convention: Convention = Convention.VERBATIM


@dataclass(frozen=True)
class ValidatedModel:
    """A :class:`ModelSpec` that passed :func:`validate_model`.

    ``sabotage`` flips the sign of named potential terms (``"v3"``, ``"v2l"``)
    and exists only for mutation testing.
    """

    spec: ModelSpec
    sabotage: frozenset = frozenset()

    @property
    def pair(self) -> PairFunctionSpec:
        return self.spec.pair

    @property
    def confinement(self) -> Confinement:
        return self.spec.confinement

    @property
    def n(self) -> int:
        return self.spec.n_particles

    @property
    def params(self) -> PhysParams:
        return self.spec.params

    @property
    def convention(self) -> Convention:
        return self.spec.convention

    def with_sabotage(self, *terms: str) -> "ValidatedModel":
        unknown = set(terms) - {"v3", "v2l"}
        if unknown:
            raise ValueError(f"unknown sabotage terms {sorted(unknown)}")
        return ValidatedModel(self.spec, self.sabotage | frozenset(terms))


_PROBES = (-1.3, -0.4, 0.2, 0.9, 1.7)


def _check_envelope(env) -> None:
    x = np.array(_PROBES)
    h = 1e-5
    fd1 = (np.asarray(env.v(x + h)) - np.asarray(env.v(x - h))) / (2 * h)
    fd2 = (np.asarray(env.dv(x + h)) - np.asarray(env.dv(x - h))) / (2 * h)
    d1 = np.asarray(env.dv(x), dtype=float)
    d2 = np.asarray(env.d2v(x), dtype=float)
    if not np.allclose(fd1, d1, rtol=1e-5, atol=1e-6):
        raise InconsistentEnvelope("envelope dv disagrees with finite differences of v")
    if not np.allclose(fd2, d2, rtol=1e-5, atol=1e-6):
        raise InconsistentEnvelope("envelope d2v disagrees with finite differences of dv")


def paper_catalog_supported(pair: PairFunctionSpec) -> bool:
    return not (isinstance(pair, HyperGaussian) and pair.n not in (1, 2))


def validate_model(spec: ModelSpec) -> ValidatedModel:
    """Check every cross-field invariant of ``spec``.

    Raises a :class:`~jastrow_forge.errors.ValidationError` subclass naming
    the violated invariant. Field-level checks (positive constants, family
    parameter ranges) already run at construction time.
    """
    if not isinstance(spec.params, PhysParams):
        raise ValidationError("params must be a PhysParams")
    if not isinstance(spec.pair, tuple(pfm.FAMILIES.values())):
        raise ValidationError(f"unknown pair function {spec.pair!r}")
    n = spec.n_particles
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"n_particles must be a positive integer, got {n!r}")
    conf = spec.confinement
    if isinstance(conf, Lattice):
        if len(conf.sites) != n:
            raise SiteCountMismatch(
                f"lattice has {len(conf.sites)} sites but n_particles = {n}"
            )
        if not all(math.isfinite(s) for s in conf.sites):
            raise ValidationError("lattice sites must be finite")
    elif isinstance(conf, Anharmonic):
        _check_envelope(conf.envelope)
    elif not isinstance(conf, (Free, Harmonic)):
        raise ValidationError(f"unknown confinement {conf!r}")
    lam = getattr(spec.pair, "lam", None)
    if lam is not None and 0 < lam < 1:
        warnings.warn(
            f"lambda = {lam} gives an attractive lambda(lambda-1) pair term", stacklevel=2
        )
    conv = Convention(spec.convention)
    if conv is Convention.PAPER_CATALOG and not paper_catalog_supported(spec.pair):
        raise UnsupportedConventionForFamily(
            f"no closed-form catalog energy for {spec.pair!r}; use the verbatim convention"
        )
    if conv is not spec.convention:
        spec = ModelSpec(spec.pair, spec.confinement, n, spec.params, conv)
    return ValidatedModel(spec)


def build_model(
    pair: PairFunctionSpec,
    n: int,
    confinement: Optional[Confinement] = None,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
    omega: float = 0.0,
    convention: Union[Convention, str] = Convention.VERBATIM,
) -> ValidatedModel:
    """Shorthand for ``validate_model(ModelSpec(...))``."""
    spec = ModelSpec(
        pair,
        confinement if confinement is not None else Free(),
        n,
        PhysParams(hbar, mass, omega),
        Convention(convention),
    )
    return validate_model(spec)


def as_positions(c) -> np.ndarray:
    """Positions as a float array of shape ``(N,)`` or ``(B, N)``."""
    if isinstance(c, Configuration):
        return c.positions
    return np.asarray(c, dtype=float)


def random_configurations(
    rng: np.random.Generator, n: int, count: int, halfwidth: float, exclusion: float
) -> tuple:
    """Uniform draws in ``[-halfwidth, halfwidth]**n`` with pair separations ``>= exclusion``.

    Returns ``(configs, draws)``. Used by sweeps; kept here so every module
    draws the same way.
    """
    accepted = []
    draws = 0
    batch = max(count, 16)
    while sum(len(a) for a in accepted) < count:
        x = rng.uniform(-halfwidth, halfwidth, size=(batch, n))
        draws += batch
        if n > 1:
            d = np.abs(x[:, :, None] - x[:, None, :])
            d[:, np.arange(n), np.arange(n)] = np.inf
            ok = d.reshape(batch, -1).min(axis=1) >= exclusion
            x = x[ok]
        accepted.append(x)
        if draws >= 100 * count and sum(len(a) for a in accepted) < count:
            break
    out = np.concatenate(accepted)[:count]
    return out, draws


def sites_array(model: ValidatedModel) -> np.ndarray:
    conf = model.confinement
    if isinstance(conf, Lattice):
        return np.asarray(conf.sites, dtype=float)
    return np.zeros(model.n)


def is_trapped(conf: Confinement) -> bool:
    return isinstance(conf, (Harmonic, Lattice))
