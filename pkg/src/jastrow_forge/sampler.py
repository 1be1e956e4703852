"""Metropolis sampling of ``|Psi_0|^2`` with single-particle moves.

Random numbers are drawn up front from a PCG64 generator seeded by the
config, then handed to the kernel, so a chain is a pure function of
``(model, config, c0)`` whichever kernel backend runs it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .core import Anharmonic, Configuration, Convention, Free, Lattice, ValidatedModel, as_positions
from .errors import NodeConfiguration, StuckChain, UnboundModel, ValidationError
from .hamiltonian import energy_catalog, pair_indices
from .local_energy import log_psi


@dataclass(frozen=True)
class SamplerConfig:
    """Chain settings. ``step_size`` and ``halfwidth`` are in oscillator lengths.

    ``n_steps`` counts single-particle proposals including burn-in. The step
    size is tuned toward 30-60% acceptance during burn-in and frozen after.
    """

    n_steps: int
    n_burnin: int = 0
    step_size: float = 0.5
    seed: int = 0
    thin: int = 1
    bins: int = 200
    halfwidth: float = 6.0
    exclusion: float = 1e-6
    autotune: bool = True

    def __post_init__(self):
        if not self.n_steps > self.n_burnin >= 0:
            raise ValidationError("need n_steps > n_burnin >= 0")
        if not self.step_size > 0:
            raise ValidationError("step_size must be > 0")
        if self.thin < 1:
            raise ValidationError("thin must be >= 1")
        if self.bins < 1:
            raise ValidationError("bins must be >= 1")


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    values: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def integral(self) -> float:
        return float(np.sum(self.values * np.diff(self.edges)))


@dataclass(frozen=True, eq=False)
class SampleStats:
    acceptance_rate: float
    energy_mean: float
    energy_variance: float
    density: Histogram
    pair_dist: Histogram
    n_samples: int
    n_energy_discarded: int
    out_of_range: int
    step_size: float
    position_mean: float
    position_variance: float
    position_variance_stderr: float
    positions: np.ndarray
    energies: np.ndarray

    def same_as(self, other: "SampleStats") -> bool:
        return (
            self.acceptance_rate == other.acceptance_rate
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.energies, other.energies)
            and np.array_equal(self.density.values, other.density.values)
            and np.array_equal(self.pair_dist.values, other.pair_dist.values)
        )


def length_scale(model: ValidatedModel) -> float:
    """Oscillator length, or 1 for an anharmonic trap without omega."""
    conf = model.confinement
    if isinstance(conf, Free) or (model.params.omega == 0 and not isinstance(conf, Anharmonic)):
        raise UnboundModel("|Psi_0|^2 is not normalizable without a trap")
    return model.params.oscillator_length if model.params.omega > 0 else 1.0


def default_start(model: ValidatedModel) -> np.ndarray:
    if isinstance(model.confinement, Lattice):
        return np.array(model.confinement.sites, dtype=float)
    ell = length_scale(model)
    n = model.n
    return ell * (np.arange(n) - 0.5 * (n - 1)) * (2.0 / max(n, 2))


def _center(model: ValidatedModel) -> float:
    if isinstance(model.confinement, Lattice):
        s = model.confinement.sites
        return 0.5 * (min(s) + max(s))
    return 0.0


def _range(model: ValidatedModel, cfg: SamplerConfig):
    half = cfg.halfwidth * length_scale(model)
    if isinstance(model.confinement, Lattice):
        s = model.confinement.sites
        half += 0.5 * (max(s) - min(s))
    c = _center(model)
    return c - half, c + half


def _normalized_hist(values, lo, hi, bins, total):
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    inside = counts.sum()
    width = np.diff(edges)
    if inside == 0:
        return Histogram(edges, np.zeros(bins)), int(np.size(values))
    return Histogram(edges, counts * (total / (inside * width))), int(np.size(values) - inside)


def _batch_stderr_of_variance(y: np.ndarray, batches: int = 50) -> float:
    if y.size < 2 * batches:
        return float("nan")
    mu = y.mean()
    chunks = np.array_split((y - mu) ** 2, batches)
    bv = np.array([c.mean() for c in chunks])
    return float(bv.std(ddof=1) / np.sqrt(batches))


def summarize(model, cfg, positions, energies, accepted, proposals, step) -> SampleStats:
    """Statistics of recorded samples (shared by single and pooled chains)."""
    n = model.n
    if model.convention is Convention.PAPER_CATALOG:
        energies = energies + energy_catalog(model).constant_offset
    i, j = pair_indices(n)
    sep = np.abs(positions[:, i] - positions[:, j])
    keep = np.ones(len(positions), dtype=bool)
    if model.pair.cusp().has_cusp and sep.size:
        keep = sep.min(axis=1) >= cfg.exclusion
    kept = energies[keep]
    lo, hi = _range(model, cfg)
    density, out_d = _normalized_hist(positions.ravel(), lo, hi, cfg.bins, float(n))
    pair_dist, _ = _normalized_hist(sep.ravel(), 0.0, hi - lo, cfg.bins, n * (n - 1) / 2)
    # pooled per-particle statistics; meaningful as a width for N = 1 and harmonic traps
    flat = positions.ravel()
    pos_mean = float(flat.mean())
    ser = positions.mean(axis=1) if n > 1 else flat
    return SampleStats(
        acceptance_rate=accepted / proposals if proposals else 0.0,
        energy_mean=float(kept.mean()) if kept.size else float("nan"),
        energy_variance=float(kept.var()) if kept.size else float("nan"),
        density=density,
        pair_dist=pair_dist,
        n_samples=len(positions),
        n_energy_discarded=int((~keep).sum()),
        out_of_range=out_d,
        step_size=step,
        position_mean=pos_mean,
        position_variance=float(flat.var()),
        position_variance_stderr=_batch_stderr_of_variance(ser),
        positions=positions,
        energies=kept,
    )


def _draws(seed: int, n: int):
    rng = np.random.default_rng(seed)
    disp = rng.uniform(-1.0, 1.0, n)
    acc = rng.random(n)
    return disp, acc


def _chain(model, cfg, c0, prefer):
    km = kernels.pack(model)
    length_scale(model)
    x = np.array(as_positions(c0) if c0 is not None else default_start(model), dtype=float)
    if x.size != model.n:
        raise ValidationError(f"start configuration has {x.size} particles, model has {model.n}")
    if not np.isfinite(float(log_psi(model, Configuration(x)))):
        raise NodeConfiguration("chain must start off the nodes of Psi_0")
    disp, acc = _draws(cfg.seed, cfg.n_steps)
    step = cfg.step_size * length_scale(model)
    none_x = np.zeros((0, model.n))
    none_e = np.zeros(0)
    # burn-in in chunks so the step size can be tuned between them
    done = 0
    chunk = max(50 * model.n, cfg.n_burnin // 20, 1)
    while done < cfg.n_burnin:
        m = min(chunk, cfg.n_burnin - done)
        a = kernels.metropolis(x, km, disp[done:done + m], acc[done:done + m], step, 0,
                               none_x, none_e, prefer)
        if cfg.autotune:
            rate = a / m
            if rate < 0.3:
                step *= 0.7
            elif rate > 0.6:
                step *= 1.3
        done += m
    prod = cfg.n_steps - cfg.n_burnin
    n_rec = prod // cfg.thin
    out_x = np.zeros((n_rec, model.n))
    out_e = np.zeros(n_rec)
    accepted = kernels.metropolis(x, km, disp[done:], acc[done:], step, cfg.thin, out_x, out_e,
                                  prefer)
    return out_x, out_e, accepted, prod, step


def run_chain(model: ValidatedModel, cfg: SamplerConfig, c0=None,
              prefer: Optional[str] = None) -> SampleStats:
    """One Metropolis chain; raises :class:`StuckChain` below 1% acceptance."""
    out_x, out_e, accepted, prod, step = _chain(model, cfg, c0, prefer)
    stats = summarize(model, cfg, out_x, out_e, accepted, prod, step)
    if stats.acceptance_rate < 0.01:
        raise StuckChain(f"acceptance rate {stats.acceptance_rate:.4f} below 0.01")
    return stats


@dataclass(frozen=True, eq=False)
class MultiChainResult:
    merged: SampleStats
    chain_energy_means: tuple
    chain_acceptance: tuple
    energy_mean_spread: float


def multi_chain(model: ValidatedModel, cfg: SamplerConfig, n_chains: int, c0=None,
                prefer: Optional[str] = None) -> MultiChainResult:
    """Independent chains with seeds ``seed + i``, pooled in chain order."""
    if n_chains < 1:
        raise ValidationError("n_chains must be >= 1")
    xs, es, acc, props, means, rates = [], [], 0, 0, [], []
    step = cfg.step_size
    for i in range(n_chains):
        c = SamplerConfig(**{**cfg.__dict__, "seed": cfg.seed + i})
        out_x, out_e, a, p, step = _chain(model, c, c0, prefer)
        single = summarize(model, c, out_x, out_e, a, p, step)
        if single.acceptance_rate < 0.01:
            raise StuckChain(f"chain {i}: acceptance rate {single.acceptance_rate:.4f} below 0.01")
        means.append(single.energy_mean)
        rates.append(single.acceptance_rate)
        xs.append(out_x)
        es.append(out_e)
        acc += a
        props += p
    merged = summarize(model, cfg, np.concatenate(xs), np.concatenate(es), acc, props, step)
    return MultiChainResult(merged, tuple(means), tuple(rates), float(max(means) - min(means)))
