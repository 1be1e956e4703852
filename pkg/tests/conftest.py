import numpy as np
import pytest

from jastrow_forge.core import Convention, Harmonic, Lattice, build_model
from jastrow_forge.pair_functions import ExpAbs, GaussianPair, HyperGaussian, PowerLaw, SinhPow

SMOOTH_PAIRS = [
    PowerLaw(1.0),
    PowerLaw(2.0),
    PowerLaw(3.0),
    GaussianPair(-0.3),
    GaussianPair(0.3),
    SinhPow(1.0, 1.0),
    SinhPow(2.0, 1.0),
    HyperGaussian(-0.2, 3.0),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def harmonic(pair, n, convention=Convention.VERBATIM, omega=1.0, **kw):
    return build_model(pair, n, Harmonic(), omega=omega, convention=convention, **kw)


def lattice(pair, n, a=2.0, convention=Convention.VERBATIM, omega=1.0):
    return build_model(pair, n, Lattice.regular(n, a), omega=omega, convention=convention)


def spread_config(rng, n, box=3.0, gap=1e-2):
    """Random positions with every pair at least ``gap`` apart."""
    while True:
        x = rng.uniform(-box, box, n)
        s = np.sort(x)
        if n < 2 or np.min(np.diff(s)) > gap:
            return x


__all__ = ["SMOOTH_PAIRS", "harmonic", "lattice", "spread_config", "ExpAbs"]
