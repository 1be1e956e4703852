"""Pointwise potentials of the parent Hamiltonians and the closed-form energy catalog.

All potential functions accept a single configuration (shape ``(N,)``,
returns a float) or a batch (shape ``(B, N)``, returns shape ``(B,)``).
Contact (delta-function) parts of cusped pair functions are not pointwise
values and never appear here; see :func:`jastrow_forge.pair_functions.cusp`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .core import (
    Anharmonic,
    Convention,
    Harmonic,
    Lattice,
    ValidatedModel,
    as_positions,
    is_trapped,
)
from .errors import CoincidentParticles, ConfinementMismatch, UnsupportedConventionForFamily
from .pair_functions import ExpAbs, GaussianPair, PowerLaw, SinhPow, canonical


@lru_cache(maxsize=None)
def pair_indices(n: int):
    """``(I, J)`` for all pairs ``i < j`` in row-major order."""
    i, j = np.triu_indices(n, 1)
    return i, j


@lru_cache(maxsize=None)
def triple_pair_indices(n: int):
    """For each triple ``i < j < k``: positions of (ij), (ik), (jk) in the pair list."""
    where = {}
    for p, (i, j) in enumerate(zip(*pair_indices(n))):
        where[int(i), int(j)] = p
    tri = [(where[i, j], where[i, k], where[j, k]) for i, j, k in combinations(range(n), 3)]
    if not tri:
        empty = np.zeros(0, dtype=int)
        return empty, empty, empty
    a = np.array(tri, dtype=int)
    return a[:, 0], a[:, 1], a[:, 2]


def _as_batch(c):
    x = as_positions(c)
    single = x.ndim == 1
    return (x[None, :] if single else x), single


def _out(v, single):
    return float(v[0]) if single else v


def _separations(x):
    i, j = pair_indices(x.shape[-1])
    xij = x[:, i] - x[:, j]
    if np.any(xij == 0):
        raise CoincidentParticles("two particles share a position")
    return xij


def _sign(model, term):
    return -1.0 if term in model.sabotage else 1.0


# --- potential components ---------------------------------------------------


def _v2(model, x):
    xij = _separations(x)
    d = model.pair.dlog_f(xij)
    return model.params.hbar2_m * np.sum(model.pair.d2log_f(xij) + d * d, axis=-1)


def _v3(model, x):
    ij, ik, jk = triple_pair_indices(x.shape[-1])
    if ij.size == 0:
        return np.zeros(x.shape[0])
    d = model.pair.dlog_f(_separations(x))
    dij, dik, djk = d[:, ij], d[:, ik], d[:, jk]
    s = np.sum(dij * dik - dij * djk + dik * djk, axis=-1)
    return _sign(model, "v3") * model.params.hbar2_m * s


def _v2l(model, x):
    conf = model.confinement
    if not isinstance(conf, (Harmonic, Lattice)):
        raise ConfinementMismatch("V2L needs a harmonic or lattice confinement")
    xij = _separations(x)
    lever = xij
    if isinstance(conf, Lattice):
        s = np.asarray(conf.sites)
        i, j = pair_indices(x.shape[-1])
        lever = xij - (s[i] - s[j])
    p = model.params
    return -_sign(model, "v2l") * p.hbar * p.omega * np.sum(lever * model.pair.dlog_f(xij), axis=-1)


def _one_body(model, x):
    conf = model.confinement
    p = model.params
    if isinstance(conf, Harmonic):
        return 0.5 * p.mass * p.omega**2 * np.sum(x * x, axis=-1)
    if isinstance(conf, Lattice):
        dx = x - np.asarray(conf.sites)
        return 0.5 * p.mass * p.omega**2 * np.sum(dx * dx, axis=-1)
    if isinstance(conf, Anharmonic):
        env = conf.envelope
        dv = np.asarray(env.dv(x), dtype=float)
        return 0.5 * p.hbar2_m * np.sum(np.asarray(env.d2v(x), dtype=float) + dv * dv, axis=-1)
    return np.zeros(x.shape[0])


def _cross(model, x):
    conf = model.confinement
    if not isinstance(conf, Anharmonic):
        raise ConfinementMismatch("cross term needs an anharmonic confinement")
    xij = _separations(x)
    i, j = pair_indices(x.shape[-1])
    dv = np.asarray(conf.envelope.dv(x), dtype=float)
    return model.params.hbar2_m * np.sum((dv[:, i] - dv[:, j]) * model.pair.dlog_f(xij), axis=-1)


def v2_pointwise(model: ValidatedModel, c):
    """Two-body potential ``(hbar^2/m) sum_{i<j} f''/f`` via ``(ln f)'' + ((ln f)')^2``."""
    x, single = _as_batch(c)
    return _out(_v2(model, x), single)


def v3_pointwise(model: ValidatedModel, c):
    """Three-body potential; zero for fewer than three particles."""
    x, single = _as_batch(c)
    return _out(_v3(model, x), single)


def v2l_pointwise(model: ValidatedModel, c):
    """Trap-induced long-range two-body potential.

    Harmonic: ``-hbar omega sum x_ij f'/f``. Lattice: the lever arm is the
    displacement ``x_ij - (x_i^0 - x_j^0)`` instead of ``x_ij``.
    """
    x, single = _as_batch(c)
    return _out(_v2l(model, x), single)


def one_body(model: ValidatedModel, c):
    x, single = _as_batch(c)
    return _out(_one_body(model, x), single)


def cross_anharmonic(model: ValidatedModel, c):
    """``(hbar^2/m) sum_{i<j} [v'(x_i) - v'(x_j)] f'(x_ij)/f(x_ij)``."""
    x, single = _as_batch(c)
    return _out(_cross(model, x), single)


@dataclass(frozen=True)
class PotentialBreakdown:
    v2: float
    v3: float
    v2l: float
    one_body: float
    cross_anharmonic: float
    total: float


def total_potential(model: ValidatedModel, c) -> PotentialBreakdown:
    """All potential terms at ``c``, summed in a fixed order.

    Under the paper-catalog convention the constant part of each term is
    removed from that term (V2 and V3 for the free-space families, V2L for
    the Calogero trap), so the totals of the two conventions differ by
    exactly ``energy_catalog(model).constant_offset``.
    """
    x, single = _as_batch(c)
    zeros = np.zeros(x.shape[0])
    v2 = _v2(model, x)
    v3 = _v3(model, x)
    trapped = is_trapped(model.confinement)
    v2l = _v2l(model, x) if trapped else zeros
    ob = _one_body(model, x)
    cross = _cross(model, x) if isinstance(model.confinement, Anharmonic) else zeros
    if model.convention is Convention.PAPER_CATALOG:
        c2, c3, c2l = component_constants(model)
        v2 = v2 - c2
        v3 = v3 - c3
        v2l = v2l - c2l
    total = v2 + v3
    total = total + v2l
    total = total + ob
    total = total + cross
    if single:
        return PotentialBreakdown(
            float(v2[0]), float(v3[0]), float(v2l[0]), float(ob[0]), float(cross[0]), float(total[0])
        )
    return PotentialBreakdown(v2, v3, v2l, ob, cross, total)


# --- energy bookkeeping -----------------------------------------------------


def component_constants(model: ValidatedModel):
    """Constant parts ``(c2, c3, c2l)`` sitting inside V2, V3, V2L.

    These are read off the potentials term by term; :func:`energy_catalog`
    quotes the closed-form energies independently and the two are checked
    against each other in the tests.
    """
    pf = canonical(model.pair)
    n = model.n
    pairs = n * (n - 1) / 2
    triples = n * (n - 1) * (n - 2) / 6
    k = model.params.hbar2_m
    c2 = c3 = c2l = 0.0
    if isinstance(pf, ExpAbs):
        c2 = k * pf.g**2 * pairs
        c3 = k * pf.g**2 * triples
    elif isinstance(pf, GaussianPair):
        c2 = k * 2.0 * pf.g * pairs
    elif isinstance(pf, SinhPow):
        c2 = k * pf.lam**2 / pf.ell**2 * pairs
        c3 = k * pf.lam**2 / pf.ell**2 * triples
    elif isinstance(pf, PowerLaw):
        if is_trapped(model.confinement):
            c2l = -model.params.hbar * model.params.omega * pf.lam * pairs
    else:
        raise UnsupportedConventionForFamily(f"no catalog constants for {model.pair!r}")
    return c2, c3, c2l


@dataclass(frozen=True)
class EnergyCatalogEntry:
    family: str
    e0_free: float
    e0_trapped: float
    constant_offset: float


def verbatim_eigenvalue(model: ValidatedModel) -> float:
    """``N hbar omega / 2`` for harmonic and lattice traps, zero otherwise."""
    if is_trapped(model.confinement):
        return 0.5 * model.n * model.params.hbar * model.params.omega
    return 0.0


def energy_catalog(model: ValidatedModel) -> EnergyCatalogEntry:
    """Closed-form ground-state energies for the cataloged families.

    ``e0_free`` is the free-space energy with all constants moved out of the
    potentials; ``e0_trapped`` is the eigenvalue of the model under its own
    confinement in the paper-catalog convention. ``constant_offset`` is
    ``e0_trapped`` minus the verbatim eigenvalue.
    """
    pf = canonical(model.pair)
    n = model.n
    p = model.params
    hw = p.hbar * p.omega
    k = p.hbar2_m
    conf = model.confinement
    if isinstance(pf, PowerLaw):
        e0 = 0.0
        family = "calogero"
        if is_trapped(conf):
            trapped = 0.5 * hw * n * (1.0 + pf.lam * (n - 1))
            if isinstance(conf, Lattice):
                family = "quantum_solid_calogero"
        else:
            trapped = e0
    elif isinstance(pf, ExpAbs):
        family = "lieb_liniger_coulomb"
        e0 = -(pf.g**2) * k * n * (n * n - 1) / 6.0
        trapped = e0 + 0.5 * n * hw if is_trapped(conf) else e0
    elif isinstance(pf, GaussianPair):
        family = "gaussian"
        e0 = -pf.g * n * (n - 1) * k
        trapped = 0.5 * n * hw + e0 if is_trapped(conf) else e0
    elif isinstance(pf, SinhPow):
        family = "hyperbolic"
        e0 = -(pf.lam**2) * k / (6.0 * pf.ell**2) * n * (n * n - 1)
        trapped = 0.5 * n * hw + e0 if is_trapped(conf) else e0
    else:
        raise UnsupportedConventionForFamily(
            f"{model.pair!r} has genuine three-body terms and no closed-form energy"
        )
    return EnergyCatalogEntry(family, e0, trapped, trapped - verbatim_eigenvalue(model))


def expected_eigenvalue(model: ValidatedModel) -> float:
    """Eigenvalue of the analytic state under the model's own convention."""
    if model.convention is Convention.PAPER_CATALOG:
        return energy_catalog(model).e0_trapped
    return verbatim_eigenvalue(model)


def quantum_solid_calogero_potential(model: ValidatedModel, c):
    """The lattice Calogero Hamiltonian written out in closed form.

    ``sum (m w^2/2) dx_i^2 + sum_{i<j} [(hbar^2/m) lam(lam-1)/x_ij^2
    + hbar w lam (x_i^0 - x_j^0)/x_ij]``, i.e. paper-catalog bookkeeping.
    Kept separate from :func:`total_potential` so the two can be compared.
    """
    pf = model.pair
    conf = model.confinement
    if not isinstance(pf, PowerLaw) or not isinstance(conf, Lattice):
        raise ConfinementMismatch("needs a power-law pair function on a lattice")
    x, single = _as_batch(c)
    p = model.params
    s = np.asarray(conf.sites)
    i, j = pair_indices(x.shape[-1])
    xij = _separations(x)
    dx = x - s
    wells = 0.5 * p.mass * p.omega**2 * np.sum(dx * dx, axis=-1)
    pair = p.hbar2_m * pf.lam * (pf.lam - 1.0) / xij**2 + p.hbar * p.omega * pf.lam * (s[i] - s[j]) / xij
    return _out(wells + np.sum(pair, axis=-1), single)


CATALOG = [
    {
        "id": "calogero",
        "family": "power_law",
        "params": ["lambda"],
        "pair_function": "|x|^lambda",
        "e0_free": "0",
        "e0_trapped": "(hbar w/2) N [1 + lambda (N-1)]",
        "long_range": "V2L = -hbar w lambda N(N-1)/2 (constant)",
        "notes": "V3 = 0; lambda = 1 is the Tonks-Girardeau gas; paper convention moves V2L into the energy",
    },
    {
        "id": "lieb_liniger_coulomb",
        "family": "exp_abs",
        "params": ["g"],
        "pair_function": "exp(g|x|)",
        "e0_free": "-g^2 hbar^2 N(N^2-1)/(6m)",
        "e0_trapped": "-g^2 hbar^2 N(N^2-1)/(6m) + N hbar w/2",
        "long_range": "V2L = -hbar w g sum|x_ij|",
        "notes": "contact term (hbar^2/m) 2g delta(x_ij) from the cusp; constants of V2, V3 moved into E0",
    },
    {
        "id": "gaussian",
        "family": "gaussian",
        "params": ["g"],
        "pair_function": "exp(g x^2)",
        "e0_free": "-g N(N-1) hbar^2/m",
        "e0_trapped": "N hbar w/2 - g N(N-1) hbar^2/m",
        "long_range": "V2L = -2 hbar w g sum x_ij^2",
        "notes": "V3 = (hbar^2/m) g^2 (2N-4) sum x_ij^2 is two-body in form",
    },
    {
        "id": "hyperbolic",
        "family": "sinh_pow",
        "params": ["lambda", "ell"],
        "pair_function": "sinh(x/ell)^lambda",
        "e0_free": "-lambda^2 hbar^2 N(N^2-1)/(6 m ell^2)",
        "e0_trapped": "N hbar w/2 - lambda^2 hbar^2 N(N^2-1)/(6 m ell^2)",
        "long_range": "V2L = -hbar w lambda sum (x_ij/ell) coth(x_ij/ell)",
        "notes": "hard core; bosonic for even lambda; constants of V2, V3 moved into E0",
    },
    {
        "id": "hyper_gaussian",
        "family": "hyper_gaussian",
        "params": ["g", "n"],
        "pair_function": "exp(g|x|^n)",
        "e0_free": "0 (verbatim only)",
        "e0_trapped": "N hbar w/2 (verbatim only)",
        "long_range": "V2L = -hbar w g n sum |x_ij|^n",
        "notes": "genuine three-body interactions for n not in {1, 2}; no paper-catalog energy",
    },
    {
        "id": "quantum_solid_calogero",
        "family": "power_law",
        "params": ["lambda", "spacing"],
        "pair_function": "|x|^lambda with lattice wells",
        "e0_free": "0",
        "e0_trapped": "(N hbar w/2) [1 + lambda (N-1)]",
        "long_range": "hbar w lambda (x_i^0 - x_j^0)/x_ij (Coulomb-like)",
        "notes": "Nosanov-Jastrow state; wells (m w^2/2)(x_i - x_i^0)^2",
    },
]
