import numpy as np
import pytest
from conftest import harmonic, lattice

from jastrow_forge.core import Anharmonic, Convention, PolynomialEnvelope, build_model
from jastrow_forge.errors import UnboundModel, ValidationError
from jastrow_forge.oracle_grid import (
    GridSpec,
    analytic_on_grid,
    build_grid_operator,
    contact_weights,
    ground_state,
    overlap_with_analytic,
    run_oracle,
)
from jastrow_forge.pair_functions import ExpAbs, GaussianPair, HyperGaussian, PowerLaw, SinhPow

PAPER = Convention.PAPER_CATALOG


def test_grid_spec_validation():
    with pytest.raises(ValidationError):
        GridSpec(points=32)
    g = GridSpec(halfwidth=8.0, points=255)
    with pytest.raises(ValidationError):
        GridSpec(halfwidth=8.0, points=255, stagger=g.spacing)
    x1, x2 = GridSpec().axes()
    assert np.min(np.abs(x1[:, None] - x2[None, :])) > 0


def test_requires_two_bound_particles():
    with pytest.raises(ValidationError):
        build_grid_operator(harmonic(PowerLaw(2.0), 3), GridSpec(points=64))
    with pytest.raises(UnboundModel):
        build_grid_operator(build_model(PowerLaw(2.0), 2), GridSpec(points=64))


def test_contact_weights_integrate_to_one_per_line():
    g = GridSpec(points=128)
    w = contact_weights(g).reshape(128, 128)
    # away from the walls each x1 line crosses the contact once
    assert np.allclose(w[10:-10].sum(axis=1) * g.spacing, 1.0)


def test_self_overlap_is_one():
    m = harmonic(PowerLaw(2.0), 2)
    g = GridSpec(points=96)
    psi = analytic_on_grid(m, g)
    assert overlap_with_analytic(m, g, psi) == pytest.approx(1.0, abs=1e-12)


def test_ground_state_of_diagonal_matrix():
    import scipy.sparse as sp

    d = np.array([3.0, -1.0, 2.0, 5.0])
    gs = ground_state(sp.diags(d))
    assert gs.energy == pytest.approx(-1.0, abs=1e-12)
    assert abs(gs.vector[1]) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "model, want, tol",
    [
        (harmonic(PowerLaw(0.0), 2), 1.0, 1e-3),
        (harmonic(PowerLaw(2.0), 2, PAPER), 3.0, 5e-3),
        (harmonic(SinhPow(2.0, 1.0), 2, PAPER), -3.0, 5e-3),
        (harmonic(GaussianPair(-0.3), 2, PAPER), 1.6, 5e-3),
        (harmonic(HyperGaussian(-0.2, 3.0), 2), 1.0, 5e-3),
        (lattice(PowerLaw(2.0), 2, convention=PAPER), 3.0, 5e-3),
        (harmonic(ExpAbs(-0.5), 2, PAPER), 0.75, 5e-2),
    ],
    ids=["free-bosons", "calogero", "hyperbolic", "gaussian", "hyper-gaussian", "lattice",
         "contact"],
)
def test_oracle_energies(model, want, tol):
    res = run_oracle(model, GridSpec(halfwidth=8.0, points=192, center=3.0 if model.confinement.kind == "lattice" else 0.0))
    assert res.analytic_energy == pytest.approx(want)
    assert res.rel_energy_err <= tol
    assert res.overlap >= 0.999


def test_anharmonic_oracle_zero_energy():
    m = build_model(PowerLaw(2.0), 2, Anharmonic(PolynomialEnvelope.quartic(0.1)))
    res = run_oracle(m, GridSpec(halfwidth=5.0, points=192))
    assert abs(res.ground_energy) <= 5e-3
    assert res.overlap >= 0.999


def test_oracle_error_decreases_with_resolution():
    m = harmonic(PowerLaw(2.0), 2, PAPER)
    errs = [run_oracle(m, GridSpec(points=p)).rel_energy_err for p in (96, 192)]
    assert errs[1] < errs[0]
