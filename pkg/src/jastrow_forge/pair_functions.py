"""Pair correlation families f(x) and their log-derivatives.

Everything downstream consumes ``ln f``, ``(ln f)'`` and ``(ln f)''`` only;
``f`` itself is never formed, so hyperbolic pair functions stay finite far
beyond the point where ``sinh`` overflows.

The methods on each family are vectorized and unchecked (they may return
``inf``/``nan`` at zero separation). The module-level functions
:func:`log_f`, :func:`dlog_f`, :func:`d2log_f` add the node handling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationAtNode, NonPositiveConstant, ValidationError

LN2 = math.log(2.0)

# integer family codes shared with the compiled kernels
POWER_LAW, EXP_ABS, GAUSSIAN, SINH_POW, HYPER_GAUSSIAN = range(5)


class NegInfinity:
    """Marker for ``ln|f| = -inf`` at an exact node of a hard-core pair function."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __float__(self):
        return float("-inf")

    def __repr__(self):
        return "NODE"

    def __reduce__(self):
        return (NegInfinity, ())


NODE = NegInfinity()


def is_node(value) -> bool:
    return value is NODE


@dataclass(frozen=True)
class CuspDescriptor:
    has_cusp: bool
    jump: float
    hard_core: bool


def _log_abs_sinh(u):
    # ln|sinh u| = |u| - ln 2 + ln(1 - e^{-2|u|}), overflow-free
    a = np.abs(u)
    with np.errstate(divide="ignore"):
        return a - LN2 + np.log(-np.expm1(-2.0 * a))


def _csch2(u):
    a = np.abs(u)
    with np.errstate(divide="ignore", over="ignore"):
        return (2.0 * np.exp(-a) / -np.expm1(-2.0 * a)) ** 2


@dataclass(frozen=True)
class PowerLaw:
    """Calogero pair function ``|x|**lam``."""

    lam: float

    family = "power_law"
    code = POWER_LAW

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValidationError(f"power_law: lambda must be >= 0, got {self.lam}")

    @property
    def kernel_params(self):
        return (self.code, float(self.lam), 0.0)

    def log_f(self, x):
        if self.lam == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            return self.lam * np.log(np.abs(x))

    def dlog_f(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.lam / np.asarray(x, dtype=float)

    def d2log_f(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.lam / (x * x)

    def cusp(self):
        return CuspDescriptor(False, 0.0, self.lam > 0)


@dataclass(frozen=True)
class ExpAbs:
    """Lieb-Liniger / McGuire pair function ``exp(g |x|)``."""

    g: float

    family = "exp_abs"
    code = EXP_ABS

    @property
    def kernel_params(self):
        return (self.code, float(self.g), 0.0)

    def log_f(self, x):
        return self.g * np.abs(x)

    def dlog_f(self, x):
        return self.g * np.sign(x)

    def d2log_f(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def cusp(self):
        return CuspDescriptor(self.g != 0, 2.0 * self.g, False)


@dataclass(frozen=True)
class GaussianPair:
    """``exp(g x**2)``; ``g < 0`` is the usual Monte Carlo Gaussian."""

    g: float

    family = "gaussian"
    code = GAUSSIAN

    @property
    def kernel_params(self):
        return (self.code, float(self.g), 0.0)

    def log_f(self, x):
        x = np.asarray(x, dtype=float)
        return self.g * (x * x)

    def dlog_f(self, x):
        return 2.0 * self.g * np.asarray(x, dtype=float)

    def d2log_f(self, x):
        return np.full_like(np.asarray(x, dtype=float), 2.0 * self.g)

    def cusp(self):
        return CuspDescriptor(False, 0.0, False)


@dataclass(frozen=True)
class SinhPow:
    """Hyperbolic pair function ``|sinh(x/ell)|**lam``.

    For odd integer ``lam`` the signed ``sinh(x/ell)**lam`` is odd under
    exchange (fermionic). Only ``|f|`` enters here, so such parameters are
    accepted numerically but the bosonic reading no longer applies.
    """

    lam: float
    ell: float

    family = "sinh_pow"
    code = SINH_POW

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValidationError(f"sinh_pow: lambda must be >= 0, got {self.lam}")
        if not self.ell > 0:
            raise NonPositiveConstant(f"sinh_pow: ell must be > 0, got {self.ell}")

    @property
    def kernel_params(self):
        return (self.code, float(self.lam), float(self.ell))

    def log_f(self, x):
        if self.lam == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.lam * _log_abs_sinh(np.asarray(x, dtype=float) / self.ell)

    def dlog_f(self, x):
        u = np.asarray(x, dtype=float) / self.ell
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.lam / (self.ell * np.tanh(u))

    def d2log_f(self, x):
        u = np.asarray(x, dtype=float) / self.ell
        return -self.lam / self.ell**2 * _csch2(u)

    def cusp(self):
        return CuspDescriptor(False, 0.0, self.lam > 0)


@dataclass(frozen=True)
class HyperGaussian:
    """``exp(g |x|**n)`` for real ``n >= 1``."""

    g: float
    n: float

    family = "hyper_gaussian"
    code = HYPER_GAUSSIAN

    def __post_init__(self):
        if not self.n >= 1:
            raise ValidationError(f"hyper_gaussian: n must be >= 1, got {self.n}")

    @property
    def kernel_params(self):
        return (self.code, float(self.g), float(self.n))

    def log_f(self, x):
        return self.g * np.abs(x) ** self.n

    def dlog_f(self, x):
        x = np.asarray(x, dtype=float)
        return self.g * self.n * np.abs(x) ** (self.n - 1.0) * np.sign(x)

    def d2log_f(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.g * self.n * (self.n - 1.0) * a ** (self.n - 2.0)

    def cusp(self):
        if self.n == 1:
            return CuspDescriptor(self.g != 0, 2.0 * self.g, False)
        return CuspDescriptor(False, 0.0, False)

    def canonical(self):
        """The named family this reduces to, if any."""
        if self.n == 1:
            return ExpAbs(self.g)
        if self.n == 2:
            return GaussianPair(self.g)
        return self


PairFunctionSpec = Union[PowerLaw, ExpAbs, GaussianPair, SinhPow, HyperGaussian]

FAMILIES = {
    "power_law": PowerLaw,
    "exp_abs": ExpAbs,
    "gaussian": GaussianPair,
    "sinh_pow": SinhPow,
    "hyper_gaussian": HyperGaussian,
}


def canonical(pf: PairFunctionSpec) -> PairFunctionSpec:
    return pf.canonical() if isinstance(pf, HyperGaussian) else pf


def _is_scalar(x) -> bool:
    return np.ndim(x) == 0


def _check_nonzero(x):
    if np.any(np.asarray(x) == 0):
        raise EvaluationAtNode("log-derivative requested at zero separation")


def log_f(pf: PairFunctionSpec, x):
    """``ln|f(x)|``.

    A hard-core family evaluated at exactly ``x == 0`` returns :data:`NODE`
    for scalar input and raises :class:`EvaluationAtNode` for array input.
    """
    if pf.cusp().hard_core and np.any(np.asarray(x) == 0):
        if _is_scalar(x):
            return NODE
        raise EvaluationAtNode("array contains a node of a hard-core pair function")
    out = pf.log_f(x)
    return float(out) if _is_scalar(x) else out


def dlog_f(pf: PairFunctionSpec, x):
    """``f'(x)/f(x)``, odd in ``x``; undefined at ``x == 0``."""
    _check_nonzero(x)
    out = pf.dlog_f(x)
    return float(out) if _is_scalar(x) else out


def d2log_f(pf: PairFunctionSpec, x):
    """``(ln f)''(x)``, even in ``x``. Contact delta terms are not included."""
    _check_nonzero(x)
    out = pf.d2log_f(x)
    return float(out) if _is_scalar(x) else out


def cusp(pf: PairFunctionSpec) -> CuspDescriptor:
    return pf.cusp()
