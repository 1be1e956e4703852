import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jastrow_forge import pair_functions as pf
from jastrow_forge.errors import EvaluationAtNode, NonPositiveConstant, ValidationError
from jastrow_forge.pair_functions import (
    NODE,
    ExpAbs,
    GaussianPair,
    HyperGaussian,
    PowerLaw,
    SinhPow,
    is_node,
)

nonzero = st.floats(min_value=1e-3, max_value=6.0).flatmap(
    lambda a: st.sampled_from([a, -a])
)

FAMILY_CASES = [
    PowerLaw(2.0),
    PowerLaw(0.5),
    ExpAbs(-0.7),
    GaussianPair(0.4),
    SinhPow(2.0, 1.3),
    SinhPow(3.0, 0.7),
    HyperGaussian(-0.2, 3.0),
    HyperGaussian(0.1, 2.5),
]


@pytest.mark.parametrize("p", FAMILY_CASES, ids=repr)
@settings(max_examples=60, deadline=None)
@given(x=nonzero)
def test_log_f_even_and_derivative_odd(p, x):
    assert p.log_f(x) == pytest.approx(p.log_f(-x), rel=1e-14, abs=1e-14)
    assert p.dlog_f(x) == pytest.approx(-p.dlog_f(-x), rel=1e-14, abs=1e-14)
    assert p.d2log_f(x) == pytest.approx(p.d2log_f(-x), rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("p", FAMILY_CASES, ids=repr)
@settings(max_examples=40, deadline=None)
@given(x=st.floats(min_value=0.05, max_value=4.0))
def test_derivatives_match_central_differences(p, x):
    h = 1e-5 * max(1.0, x)
    fd1 = (p.log_f(x + h) - p.log_f(x - h)) / (2 * h)
    fd2 = (p.dlog_f(x + h) - p.dlog_f(x - h)) / (2 * h)
    assert p.dlog_f(x) == pytest.approx(fd1, rel=1e-6, abs=1e-6)
    assert p.d2log_f(x) == pytest.approx(fd2, rel=1e-6, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(g=st.floats(-2, 2), x=nonzero)
def test_hyper_gaussian_coincides_with_special_families(g, x):
    for n, other in ((1.0, ExpAbs(g)), (2.0, GaussianPair(g))):
        hg = HyperGaussian(g, n)
        assert hg.log_f(x) == pytest.approx(other.log_f(x), rel=1e-13, abs=1e-13)
        assert hg.dlog_f(x) == pytest.approx(other.dlog_f(x), rel=1e-13, abs=1e-13)
        assert hg.d2log_f(x) == pytest.approx(other.d2log_f(x), rel=1e-13, abs=1e-13)
        assert pf.canonical(hg) == other


def test_scalar_node_returns_marker_not_float():
    for p in (PowerLaw(2.0), SinhPow(2.0, 1.0)):
        v = pf.log_f(p, 0.0)
        assert is_node(v)
        assert v is NODE
        assert float(v) == -math.inf


def test_array_with_node_raises():
    with pytest.raises(EvaluationAtNode):
        pf.log_f(PowerLaw(2.0), np.array([1.0, 0.0]))


def test_derivative_at_zero_raises():
    with pytest.raises(EvaluationAtNode):
        pf.dlog_f(GaussianPair(0.1), 0.0)
    with pytest.raises(EvaluationAtNode):
        pf.d2log_f(PowerLaw(1.0), np.array([0.0]))


def test_lambda_zero_is_trivial():
    assert pf.log_f(PowerLaw(0.0), 0.0) == 0.0
    assert PowerLaw(0.0).cusp().hard_core is False


def test_sinh_is_overflow_safe():
    p = SinhPow(2.0, 1.0)
    x = 800.0
    # ln sinh(x) ~ x - ln 2 where sinh itself overflows
    assert p.log_f(x) == pytest.approx(2.0 * (x - math.log(2.0)), rel=1e-15)
    assert p.dlog_f(x) == pytest.approx(2.0, rel=1e-15)
    assert p.d2log_f(x) == 0.0
    small = 1e-8
    assert p.log_f(small) == pytest.approx(2.0 * math.log(small), rel=1e-12)


def test_odd_lambda_uses_absolute_value():
    p = SinhPow(3.0, 1.0)
    assert p.log_f(-0.5) == p.log_f(0.5)
    assert np.isfinite(p.log_f(-2.0))


def test_cusp_descriptors():
    assert ExpAbs(0.8).cusp().jump == pytest.approx(1.6)
    assert ExpAbs(-1.2).cusp().has_cusp
    assert not GaussianPair(0.3).cusp().has_cusp
    assert PowerLaw(2.0).cusp().hard_core
    assert SinhPow(2.0, 1.0).cusp().hard_core
    assert pf.cusp(HyperGaussian(0.5, 1.0)).jump == pytest.approx(1.0)


@pytest.mark.parametrize(
    "make, exc",
    [
        (lambda: PowerLaw(-1.0), ValidationError),
        (lambda: SinhPow(2.0, 0.0), NonPositiveConstant),
        (lambda: SinhPow(-1.0, 1.0), ValidationError),
        (lambda: HyperGaussian(0.1, 0.5), ValidationError),
    ],
)
def test_invalid_parameters_rejected(make, exc):
    with pytest.raises(exc):
        make()


def test_vectorized_matches_scalar():
    x = np.linspace(-3, 3, 13) + 0.01
    for p in FAMILY_CASES:
        vec = p.dlog_f(x)
        assert np.allclose(vec, [p.dlog_f(float(v)) for v in x], rtol=1e-15, atol=0)


def test_families_registry():
    assert set(pf.FAMILIES) == {"power_law", "exp_abs", "gaussian", "sinh_pow", "hyper_gaussian"}
