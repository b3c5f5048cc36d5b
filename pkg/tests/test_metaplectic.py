import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symrad import metaplectic
from symrad.errors import GridTooCoarse, NotFree, PlanFailure, ValidationError
from symrad.gaussian import transformed_V
from symrad.metaplectic import (
    default_theta_candidates,
    make_spec,
    metaplectic_apply,
    plan_metaplectic,
    quadratic_fourier,
)
from symrad.states import Axis, GaussianState, fourier_transform, hermite_state, l2_norm, sample_gaussian
from symrad.symplectic import make_frame, polar_frame, rotation, standard_form

GRID = Axis(-8.0, 8.0, 256)

pytestmark = pytest.mark.filterwarnings("ignore::symrad.errors.BadCoverage")


def ground():
    return sample_gaussian(GaussianState([[1.0]], [[0.0]]), (GRID,))


def test_fourier_spec_on_ground_state():
    psi = ground()
    spec = make_spec(standard_form(1), 0)
    out = quadratic_fourier(spec, psi)
    # i^(-1/2) times the (self-dual) ground state
    assert np.abs(out.values - np.exp(-1j * math.pi / 4) * psi.values).max() < 1e-7
    F = fourier_transform(psi, axes=psi.axes)
    assert np.abs(np.abs(out.values) - np.abs(F.values)).max() < 1e-7


def test_parity_rule():
    J = standard_form(1)
    assert make_spec(J).m == 0
    assert make_spec(-J).m == 1
    with pytest.raises(ValidationError):
        make_spec(J, 1)
    with pytest.raises(NotFree):
        make_spec(np.eye(2))


def test_maslov_m_plus_two_flips_sign_exactly():
    psi = hermite_state((GRID,), order=1)
    spec = make_spec(polar_frame(1.1).U)
    a = quadratic_fourier(spec, psi).values
    b = quadratic_fourier(make_spec(spec.S, spec.m + 2), psi).values
    assert np.array_equal(b, -a)


def test_inverse_composition():
    psi = hermite_state((GRID,), order=1)
    S = polar_frame(1.0).U
    out = quadratic_fourier(make_spec(np.linalg.inv(S)), quadratic_fourier(make_spec(S), psi))
    assert np.abs(np.abs(out.values) - np.abs(psi.values)).max() < 1e-6


def test_plans():
    p = plan_metaplectic(make_frame([[0.0]], [[1.0]]))
    assert len(p.factors) == 1 and np.allclose(p.factors[0].S, standard_form(1))
    p = plan_metaplectic(make_frame([[1.0]], [[0.0]]))
    assert len(p.factors) == 2 and p.theta == pytest.approx(math.pi / 2)
    assert np.allclose(p.factors[0].S, rotation(math.pi / 2))
    p = plan_metaplectic(make_frame(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert len(p.factors) == 2
    assert np.abs(p.covered_matrix() - p.frame.U).max() <= 1e-10
    js = p.to_json()
    assert set(js) == {"theta", "factors"}
    assert set(js["factors"][0]) == {"m", "P", "Q", "R"}


def test_candidates_order():
    c = default_theta_candidates(3)
    assert c[:3] == pytest.approx([math.pi / 2, math.pi / 4, 3 * math.pi / 4])
    assert len(c) == 1 + 2 + 4


def test_plan_failure_and_bad_shift():
    f = make_frame([[1.0]], [[0.0]])
    with pytest.raises(PlanFailure):
        plan_metaplectic(f, candidates=[0.0, math.pi])
    with pytest.raises(ValidationError):
        plan_metaplectic(f, maslov_shift=1)


def test_identity_and_fourier_frames():
    psi = sample_gaussian(GaussianState([[1.7]], [[0.4]]), (GRID,))
    ident = metaplectic_apply(make_frame([[1.0]], [[0.0]]), psi)
    assert np.abs(np.abs(ident.values) - np.abs(psi.values)).max() < 1e-6
    four = metaplectic_apply(make_frame([[0.0]], [[1.0]]), psi)
    F = fourier_transform(psi, axes=psi.axes)
    assert np.abs(np.abs(four.values) - np.abs(F.values)).max() < 1e-6


@pytest.mark.parametrize("f", [polar_frame(0.4), polar_frame(2.0), make_frame([[3.0]], [[1.0]]),
                               make_frame([[-1.0]], [[0.0]])])
def test_gaussian_stays_centred_gaussian(f):
    g = GaussianState([[2.0]], [[0.0]])
    phi = metaplectic_apply(f, sample_gaussian(g, (GRID,)))
    Vp = transformed_V(g, f)[0, 0]
    x = GRID.points
    assert np.abs(phi.density() - math.sqrt(Vp / math.pi) * np.exp(-Vp * x * x)).max() < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.3, 3.0))
def test_unitarity(theta, r):
    psi = hermite_state((GRID,), order=1)
    out = metaplectic_apply(polar_frame(theta, r), psi)
    assert abs(l2_norm(out) - l2_norm(psi)) < 1e-6


def test_chirp_guard():
    spec = make_spec(rotation(0.05))
    with pytest.raises(GridTooCoarse, match="phase"):
        quadratic_fourier(spec, ground())


def test_dense_limit_guard(monkeypatch):
    ax = Axis(-6.0, 6.0, 32)
    psi = sample_gaussian(GaussianState(np.eye(2), np.zeros((2, 2))), (ax, ax))
    f = make_frame([[1.0, 0.5], [0.5, 1.0]], [[0.5, 0.2], [0.2, 0.5]])
    monkeypatch.setattr(metaplectic, "DENSE_LIMIT", 1000)
    with pytest.raises(GridTooCoarse, match="limit"):
        metaplectic_apply(f, psi)


def test_dense_path_matches_separable_path():
    """A frame with non-diagonal Q, conjugated into diagonal form, gives the same modulus."""
    ax = Axis(-6.0, 6.0, 48)
    g = GaussianState(np.eye(2), np.zeros((2, 2)))
    psi = sample_gaussian(g, (ax, ax))
    # commuting symmetric blocks sharing eigenvectors (1, 1)/sqrt2, (1, -1)/sqrt2
    A = np.array([[0.6, 0.2], [0.2, 0.6]])
    B = np.array([[0.9, -0.3], [-0.3, 0.9]])
    out = metaplectic_apply(make_frame(A, B), psi)
    # isotropic ground state: every metaplectic rotation leaves |psi| unchanged up to Lambda
    assert np.abs(np.abs(out.values) - np.abs(psi.values)).max() < 1e-6


def test_edge_warning():
    psi = sample_gaussian(GaussianState([[0.5]], [[1.5]]), (GRID,))
    with pytest.warns(Warning, match="grid edge"):
        metaplectic_apply(make_frame([[1.0]], [[0.0]]), psi)
