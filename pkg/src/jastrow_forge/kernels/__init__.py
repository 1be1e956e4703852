"""Hot inner loops with a compiled backend and a pure-Python fallback.

The compiled extension ``_ckernel`` is used when it imports and the model
can be expressed in plain numbers (every confinement except a callable
anharmonic envelope). Set ``JASTROW_FORGE_PURE=1`` to force the fallback.
Both backends consume the same pre-drawn random numbers, so chains agree
across backends up to libm rounding.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..core import Anharmonic, Harmonic, Lattice, PolynomialEnvelope, ValidatedModel
from . import _pykernel

try:
    if os.environ.get("JASTROW_FORGE_PURE"):
        raise ImportError("pure-Python backend forced")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"


@dataclass(frozen=True, eq=False)
class KernelModel:
    fam: int
    p1: float
    p2: float
    conf: int
    alpha: float
    hbar2_m: float
    hw: float
    mw2: float
    s3: float
    s2l: float
    sites: np.ndarray
    poly: np.ndarray
    envelope: object = None


def pack(model: ValidatedModel) -> KernelModel:
    """Flatten a validated model into the numbers the kernels read."""
    fam, p1, p2 = model.pair.kernel_params
    conf = model.confinement
    p = model.params
    sites = np.zeros(model.n)
    poly = np.zeros(1)
    envelope = None
    if isinstance(conf, Harmonic):
        code = _pykernel.HARMONIC
    elif isinstance(conf, Lattice):
        code = _pykernel.LATTICE
        sites = np.asarray(conf.sites, dtype=float)
    elif isinstance(conf, Anharmonic):
        if isinstance(conf.envelope, PolynomialEnvelope):
            code = _pykernel.POLY
            poly = np.asarray(conf.envelope.coeffs, dtype=float)
        else:
            code = _pykernel.CALLABLE
            envelope = conf.envelope
    else:
        code = _pykernel.FREE
    return KernelModel(
        fam=fam,
        p1=p1,
        p2=p2,
        conf=code,
        alpha=p.alpha,
        hbar2_m=p.hbar2_m,
        hw=p.hbar * p.omega,
        mw2=p.mass * p.omega**2,
        s3=-1.0 if "v3" in model.sabotage else 1.0,
        s2l=-1.0 if "v2l" in model.sabotage else 1.0,
        sites=np.ascontiguousarray(sites),
        poly=np.ascontiguousarray(poly),
        envelope=envelope,
    )


def backend_for(km: KernelModel, prefer: str | None = None):
    """Kernel module to use for ``km``; ``prefer`` is ``"cython"`` or ``"python"``."""
    if prefer == "python":
        return _pykernel
    compiled_ok = _ckernel is not None and km.conf != _pykernel.CALLABLE
    if prefer == "cython" and not compiled_ok:
        raise RuntimeError("compiled kernel unavailable for this model")
    return _ckernel if compiled_ok else _pykernel


def log_psi(x, km: KernelModel, prefer: str | None = None) -> float:
    return backend_for(km, prefer).log_psi(np.ascontiguousarray(x, dtype=float), km)


def local_energy(x, km: KernelModel, prefer: str | None = None) -> float:
    return backend_for(km, prefer).local_energy(np.ascontiguousarray(x, dtype=float), km)


def metropolis(x, km, disp, acc_u, step, thin, out_x, out_e, prefer=None) -> int:
    """Run ``len(disp)`` single-particle moves in place; see ``_pykernel.metropolis``."""
    return backend_for(km, prefer).metropolis(x, km, disp, acc_u, step, thin, out_x, out_e)
