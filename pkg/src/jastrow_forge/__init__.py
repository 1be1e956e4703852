"""Parent Hamiltonians for confined one-dimensional Jastrow ground states."""
from .core import (
    Anharmonic,
    CallableEnvelope,
    Configuration,
    Convention,
    Free,
    Harmonic,
    Lattice,
    ModelSpec,
    PhysParams,
    PolynomialEnvelope,
    ValidatedModel,
    build_model,
    validate_model,
)
from .pair_functions import NODE, ExpAbs, GaussianPair, HyperGaussian, PowerLaw, SinhPow

__version__ = "0.1.0"
