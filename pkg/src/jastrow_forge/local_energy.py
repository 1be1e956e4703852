"""Log-domain wavefunction, its derivatives, and local-energy verification.

The local energy uses ``lap(Psi)/Psi = |grad ln Psi|^2 + lap(ln Psi)`` so
``Psi`` itself is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import factorial

import numpy as np
from scipy.special import logsumexp

from .core import (
    Anharmonic,
    Configuration,
    Harmonic,
    Lattice,
    ValidatedModel,
    as_positions,
    random_configurations,
)
from .errors import (
    CoincidentParticles,
    ConfinementMismatch,
    NodeConfiguration,
    NotACuspedModel,
    RejectionStarvation,
    TooManyParticlesForSymmetrization,
)
from .hamiltonian import _as_batch, expected_eigenvalue, pair_indices, total_potential
from .pair_functions import NODE, ExpAbs, canonical

MAX_SYMMETRIZED = 8


@lru_cache(maxsize=None)
def _incidence(n: int) -> np.ndarray:
    # (P, N): +1 at particle i, -1 at particle j of pair (i, j)
    i, j = pair_indices(n)
    m = np.zeros((len(i), n))
    m[np.arange(len(i)), i] = 1.0
    m[np.arange(len(i)), j] = -1.0
    return m


def envelope_terms(model: ValidatedModel, x: np.ndarray):
    """One-body log-envelope value, first and second derivative per particle."""
    conf = model.confinement
    if isinstance(conf, (Harmonic, Lattice)):
        a = model.params.alpha
        dx = x - np.asarray(conf.sites) if isinstance(conf, Lattice) else x
        return -0.5 * a * dx * dx, -a * dx, np.full_like(dx, -a)
    if isinstance(conf, Anharmonic):
        env = conf.envelope
        return (
            np.asarray(env.v(x), dtype=float),
            np.asarray(env.dv(x), dtype=float),
            np.asarray(env.d2v(x), dtype=float),
        )
    z = np.zeros_like(x)
    return z, z, z


def _pair_separations(x):
    i, j = pair_indices(x.shape[-1])
    return x[:, i] - x[:, j]


def _require_distinct(model, xij):
    if np.any(xij == 0):
        if model.pair.cusp().hard_core:
            raise NodeConfiguration("configuration sits on a hard-core node")
        raise CoincidentParticles("two particles share a position")


def log_psi(model: ValidatedModel, c):
    """``ln|Psi_0|`` = envelope + sum of ``ln f(x_ij)``.

    A single configuration on a hard-core node gives :data:`NODE`; a batch
    gives ``-inf`` in those rows.
    """
    x, single = _as_batch(c)
    env, _, _ = envelope_terms(model, x)
    xij = _pair_separations(x)
    hit = np.zeros(x.shape[0], dtype=bool)
    if model.pair.cusp().hard_core:
        hit = np.any(xij == 0, axis=-1)
        xij = np.where(xij == 0, 1.0, xij)
    val = np.sum(env, axis=-1) + np.sum(model.pair.log_f(xij), axis=-1)
    val = np.where(hit, -np.inf, val)
    if single:
        return NODE if hit[0] else float(val[0])
    return val


def grad_log_psi(model: ValidatedModel, c) -> np.ndarray:
    """Gradient of ``ln|Psi_0|``; shape follows the input."""
    x, single = _as_batch(c)
    xij = _pair_separations(x)
    _require_distinct(model, xij)
    _, d_env, _ = envelope_terms(model, x)
    g = d_env + model.pair.dlog_f(xij) @ _incidence(x.shape[-1])
    return g[0] if single else g


def laplacian_log_psi(model: ValidatedModel, c):
    x, single = _as_batch(c)
    xij = _pair_separations(x)
    _require_distinct(model, xij)
    _, _, d2_env = envelope_terms(model, x)
    lap = np.sum(d2_env, axis=-1) + 2.0 * np.sum(model.pair.d2log_f(xij), axis=-1)
    return float(lap[0]) if single else lap


@dataclass(frozen=True)
class LocalEnergyReport:
    e_loc: float
    expected: float
    abs_dev: float
    rel_dev: float


def kinetic_local(model: ValidatedModel, c):
    """``-(hbar^2/2m) lap(Psi)/Psi`` at ``c``."""
    x, single = _as_batch(c)
    g = grad_log_psi(model, x)
    lap = laplacian_log_psi(model, x)
    kin = -0.5 * model.params.hbar2_m * (np.sum(g * g, axis=-1) + lap)
    return float(kin[0]) if single else kin


def local_energies(model: ValidatedModel, x: np.ndarray) -> np.ndarray:
    """Vectorized ``H Psi / Psi`` over a batch of shape ``(B, N)``."""
    x = np.asarray(x, dtype=float)
    return kinetic_local(model, x) + total_potential(model, x).total


def _rel(abs_dev, expected):
    return abs_dev / np.maximum(1.0, np.abs(expected))


def local_energy(model: ValidatedModel, c) -> LocalEnergyReport:
    x = as_positions(c)
    e = float(local_energies(model, x[None, :])[0])
    expected = expected_eigenvalue(model)
    dev = abs(e - expected)
    return LocalEnergyReport(e, expected, dev, float(_rel(dev, expected)))


@dataclass(frozen=True, eq=False)
class VerificationSweep:
    n_configs: int
    max_rel_dev: float
    mean_rel_dev: float
    worst_config: Configuration
    rng_seed: int
    expected: float
    e_loc: np.ndarray
    rel_dev: np.ndarray
    configs: np.ndarray

    def same_as(self, other: "VerificationSweep") -> bool:
        return (
            self.n_configs == other.n_configs
            and self.max_rel_dev == other.max_rel_dev
            and self.mean_rel_dev == other.mean_rel_dev
            and self.worst_config == other.worst_config
            and self.rng_seed == other.rng_seed
            and np.array_equal(self.e_loc, other.e_loc)
            and np.array_equal(self.configs, other.configs)
        )


def verify_sweep(
    model: ValidatedModel,
    n: int,
    seed: int = 0,
    box_halfwidth: float = 5.0,
    exclusion: float | None = None,
) -> VerificationSweep:
    """Local-energy deviations over ``n`` uniform random configurations.

    Configurations with any pair closer than ``exclusion`` (default
    ``1e-3 * box_halfwidth``) are redrawn. If fewer than 1% of draws survive
    :class:`RejectionStarvation` is raised.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if exclusion is None:
        exclusion = 1e-3 * box_halfwidth
    rng = np.random.default_rng(seed)
    configs, draws = random_configurations(rng, model.n, n, box_halfwidth, exclusion)
    if len(configs) < n:
        raise RejectionStarvation(
            f"only {len(configs)} of {draws} draws respected exclusion {exclusion}"
        )
    e = local_energies(model, configs)
    expected = expected_eigenvalue(model)
    rel = _rel(np.abs(e - expected), expected)
    worst = int(np.argmax(rel))
    return VerificationSweep(
        n_configs=n,
        max_rel_dev=float(rel[worst]),
        mean_rel_dev=float(np.mean(rel)),
        worst_config=Configuration(configs[worst]),
        rng_seed=seed,
        expected=expected,
        e_loc=e,
        rel_dev=rel,
        configs=configs,
    )


@dataclass(frozen=True)
class CuspReport:
    pair: tuple
    h: float
    measured_jump: float
    expected_jump: float
    rel_mismatch: float


def cusp_check(model: ValidatedModel, c_base, pair=(0, 1), h: float = 1e-6) -> CuspReport:
    """Measure the jump of ``d ln Psi / d x_i`` as particle ``i`` crosses particle ``j``.

    Particle ``i`` is placed on top of ``j`` and displaced by ``+-h``; the
    jump is the difference of the two one-sided slopes.
    """
    if not isinstance(canonical(model.pair), ExpAbs):
        raise NotACuspedModel(f"{model.pair!r} has no contact cusp")
    i, j = pair
    x = np.array(as_positions(c_base), dtype=float)
    x[i] = x[j]
    probe = np.repeat(x[None, :], 3, axis=0)
    probe[:, i] += np.array([-h, 0.0, h])
    lm, l0, lp = log_psi(model, probe)
    measured = (lp - l0) / h - (l0 - lm) / h
    expected = model.pair.cusp().jump
    mismatch = abs(measured - expected) / max(abs(expected), 1.0)
    return CuspReport((i, j), h, float(measured), float(expected), float(mismatch))


def symmetrized_log_psi(model: ValidatedModel, c):
    """``ln|Psi|`` of the lattice state summed over all N! site assignments."""
    conf = model.confinement
    if not isinstance(conf, Lattice):
        raise ConfinementMismatch("symmetrization needs a lattice confinement")
    x = as_positions(c)
    n = x.size
    if n > MAX_SYMMETRIZED:
        raise TooManyParticlesForSymmetrization(
            f"N = {n} would need {factorial(n)} permutations (limit N <= {MAX_SYMMETRIZED})"
        )
    sites = np.asarray(conf.sites)
    perms = np.array(list(permutations(range(n))))
    dx = x[None, :] - sites[perms]
    wells = -0.5 * model.params.alpha * np.sum(dx * dx, axis=-1)
    xij = _pair_separations(x[None, :])[0]
    if model.pair.cusp().hard_core and np.any(xij == 0):
        return NODE
    return float(logsumexp(wells) + np.sum(model.pair.log_f(xij)))
