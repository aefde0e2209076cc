"""Tests for the general-domain generalization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballsde import ball
from ballsde.coeffs import BallModel, CoeffFn
from ballsde.domains import (
    DomainModel,
    DomainSpec,
    alpha_ratio,
    decompose_drift,
    gradient_drift,
    inward_normal_drift,
    is_function_of_h,
    sample_neighborhood,
    simulate_domain,
    validate_domain,
)
from ballsde.errors import BallSdeError, ConfigError, HypothesisViolation

SQRT2 = np.sqrt(2.0)


def ball_drift(c):
    return lambda x: -c * np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


class TestSpecs:
    def test_sphere_fields(self):
        sph = DomainSpec.sphere(3)
        x = np.array([0.1, -0.2, 0.3])
        assert sph.phi(x) == pytest.approx(1.0 - 0.14)
        assert sph.h(x) == pytest.approx(1.0 - 0.14)
        np.testing.assert_allclose(sph.grad_h(x), -2.0 * x)
        assert sph.box == (1.0, 1.0, 1.0)

    def test_ellipsoid_fields(self):
        ell = DomainSpec.ellipsoid((1.0, 2.0))
        x = np.array([0.5, 1.0])
        assert ell.phi(x) == pytest.approx(1.0 - 0.25 - 0.25)
        np.testing.assert_allclose(ell.grad_h(x), [-1.0, -0.5])

    def test_batch_evaluation(self):
        ell = DomainSpec.ellipsoid((1.0, 2.0, 0.5))
        pts = np.random.default_rng(0).uniform(-0.3, 0.3, size=(50, 3))
        single = np.array([ell.phi(p) for p in pts])
        np.testing.assert_allclose(ell.phi(pts), single)
        grads = np.array([ell.grad_h(p) for p in pts])
        np.testing.assert_allclose(ell.grad_h(pts), grads)

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            DomainSpec.sphere(1)
        with pytest.raises(ValueError):
            DomainSpec.ellipsoid((1.0,))
        with pytest.raises(ValueError):
            DomainSpec.ellipsoid((1.0, -2.0))

    def test_expression_matches_builtin(self):
        ex = DomainSpec.from_expressions(2, "1 - x1**2 - x2**2")
        sph = DomainSpec.sphere(2)
        pts = np.random.default_rng(1).uniform(-0.9, 0.9, size=(100, 2))
        np.testing.assert_allclose(ex.phi(pts), sph.phi(pts), atol=1e-14)
        # central differences on a quadratic are exact up to rounding
        np.testing.assert_allclose(ex.grad_h(pts), sph.grad_h(pts), atol=1e-9)

    def test_expression_separate_h(self):
        ex = DomainSpec.from_expressions(
            2, "1 - x1**2 - x2**2", h="(1 - x1**2 - x2**2)**2"
        )
        x = np.array([0.6, 0.0])
        assert ex.h(x) == pytest.approx(0.64**2)
        assert ex.phi(x) == pytest.approx(0.64)

    def test_expression_functions(self):
        ex = DomainSpec.from_expressions(2, "exp(-x1**2) - sqrt(abs(x2) + 0.25)")
        assert ex.phi(np.zeros(2)) == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "text",
        ["1 - q**2", "__import__('os')", "x1.real", "[1, 2]", "f(x1)", "x1 if 1 else x2"],
    )
    def test_expression_rejections(self, text):
        with pytest.raises(ConfigError):
            DomainSpec.from_expressions(2, text)

    def test_model_sigma_forms(self):
        sph = DomainSpec.sphere(2)
        scalar = DomainModel(sph, ball_drift(1.0), sigma=SQRT2)
        np.testing.assert_allclose(scalar.sigma, SQRT2 * np.eye(2))
        np.testing.assert_allclose(scalar.a_matrix, 2.0 * np.eye(2))
        default = DomainModel(sph, ball_drift(1.0))
        np.testing.assert_allclose(default.sigma, np.eye(2))
        with pytest.raises(ValueError):
            DomainModel(sph, ball_drift(1.0), sigma=np.ones((3, 3)))


# ---------------------------------------------------------------------------
# validation and sampling
# ---------------------------------------------------------------------------


class TestValidation:
    @pytest.mark.parametrize(
        "spec",
        [
            DomainSpec.sphere(2),
            DomainSpec.ellipsoid((1.0, 2.0)),
            DomainSpec.from_expressions(2, "1 - x1**2 - x2**2"),
        ],
        ids=["sphere", "ellipsoid", "expression"],
    )
    def test_builtins_validate(self, spec):
        check = validate_domain(spec, samples=500, seed=2)
        assert check.ok, check.messages

    def test_wrong_gradient_flagged(self):
        sph = DomainSpec.sphere(2)
        broken = DomainSpec(
            "broken", 2, sph.phi, sph.h, sph.grad_phi, lambda x: -np.asarray(x, float),
            box=(1.0, 1.0),
        )
        check = validate_domain(broken, samples=500, seed=2)
        assert not check.ok
        assert any("grad_h" in m for m in check.messages)

    def test_neighborhood_sampler(self):
        ell = DomainSpec.ellipsoid((1.0, 2.0))
        pts = sample_neighborhood(ell, 800, seed=9, h_max=0.05)
        hv = ell.h(pts)
        assert pts.shape == (800, 2)
        assert np.all((hv > 0.0) & (hv < 0.05))
        again = sample_neighborhood(ell, 800, seed=9, h_max=0.05)
        np.testing.assert_array_equal(pts, again)

    def test_sampler_input_validation(self):
        with pytest.raises(ValueError):
            sample_neighborhood(DomainSpec.sphere(2), 0, seed=1)


# ---------------------------------------------------------------------------
# drift decomposition and the boundary ratio
# ---------------------------------------------------------------------------


class TestDecomposition:
    def test_sphere_split_values(self):
        # b = -c x against grad h = -2x: inward component c|x|, no remainder
        m = DomainModel(DomainSpec.sphere(2), ball_drift(1.3), sigma=SQRT2)
        split = decompose_drift(m, (0.5, 0.0))
        assert split.g == pytest.approx(0.65, abs=1e-14)
        np.testing.assert_allclose(split.beta, 0.0, atol=1e-14)
        assert split.grad_h_norm == pytest.approx(1.0)

    def test_split_reconstructs_drift(self):
        ell = DomainSpec.ellipsoid((1.0, 2.0))
        drift = lambda x: inward_normal_drift(ell, 0.8)(x) + np.array([-x[1], x[0]]) * 0.1
        m = DomainModel(ell, drift, sigma=1.0)
        x = np.array([0.6, 1.2])
        split = decompose_drift(m, x)
        grad = ell.grad_h(x)
        unit = grad / np.linalg.norm(grad)
        np.testing.assert_allclose(split.g * unit + split.beta, drift(x), atol=1e-14)
        assert abs(split.beta @ grad) < 1e-12

    def test_outward_drift_raises(self):
        m = DomainModel(DomainSpec.sphere(2), lambda x: 0.5 * np.asarray(x, float))
        with pytest.raises(HypothesisViolation):
            decompose_drift(m, (0.5, 0.0))

    def test_tangential_only_drift_raises(self):
        m = DomainModel(DomainSpec.sphere(2), lambda x: np.array([-x[1], x[0]]))
        with pytest.raises(HypothesisViolation):
            decompose_drift(m, (0.5, 0.0))

    def test_vanishing_gradient_raises(self):
        m = DomainModel(DomainSpec.sphere(2), ball_drift(1.0))
        with pytest.raises(BallSdeError):
            decompose_drift(m, (0.0, 0.0))

    def test_sphere_alpha_is_ball_ratio(self):
        # the ball model with g == c, gamma == sqrt(2) reads back c/2
        for c in (0.5, 0.8284271247461903, 1.3):
            m = DomainModel(DomainSpec.sphere(2), ball_drift(c), sigma=SQRT2)
            for pt in [(1.0, 0.0), (0.0, -1.0), (np.sqrt(0.5), np.sqrt(0.5))]:
                assert alpha_ratio(m, pt) == pytest.approx(c / 2.0, abs=1e-12)

    def test_alpha_matches_model_boundary_ratio(self):
        gamma = CoeffFn.affine(1.2, 0.3)
        g = CoeffFn.affine(0.9, 0.4)
        model = BallModel(n=2, r=0.5, gamma=gamma, g=g)
        drift = lambda x: -g(np.linalg.norm(x)) * np.asarray(x, float)
        m = DomainModel(DomainSpec.sphere(2), drift, sigma=gamma(1.0))
        assert alpha_ratio(m, (1.0, 0.0)) == pytest.approx(
            model.boundary_ratio(), abs=1e-10
        )

    def test_gradient_drift_alpha(self):
        # b = s grad h with sigma = I gives alpha = 2 s identically
        m = DomainModel(DomainSpec.sphere(2), gradient_drift(DomainSpec.sphere(2), 0.7))
        assert alpha_ratio(m, (0.9, 0.1)) == pytest.approx(1.4, abs=1e-12)
        assert alpha_ratio(m, (0.1, -0.3)) == pytest.approx(1.4, abs=1e-12)

    def test_ellipsoid_alpha_varies(self):
        # constant-strength inward drift: alpha inherits the 1/|grad h| factor
        ell = DomainSpec.ellipsoid((1.0, 2.0))
        m = DomainModel(ell, inward_normal_drift(ell, 0.9), sigma=1.0)
        a_short = alpha_ratio(m, (0.99, 0.0))
        a_long = alpha_ratio(m, (0.0, 1.98))
        assert a_short == pytest.approx(0.9 / 0.99, abs=1e-12)
        assert a_long == pytest.approx(1.8 / 0.99, abs=1e-12)
        assert a_long > 1.5 * a_short

    def test_sigma_scaling_property(self):
        m1 = DomainModel(DomainSpec.sphere(2), ball_drift(1.0), sigma=1.0)
        m2 = DomainModel(DomainSpec.sphere(2), ball_drift(1.0), sigma=2.0)
        x = (0.4, 0.5)
        assert alpha_ratio(m1, x) == pytest.approx(4.0 * alpha_ratio(m2, x))


# ---------------------------------------------------------------------------
# function-of-h detection
# ---------------------------------------------------------------------------


class TestFunctionOfH:
    def test_sphere_gradient_norm_is_function(self):
        # |grad h|^2 = 4|x|^2 = 4(1 - h) on the sphere
        sph = DomainSpec.sphere(2)
        field = lambda x: 4.0 * (1.0 - sph.h(x))
        rep = is_function_of_h(sph, field, samples=8000, seed=21)
        assert rep.is_function
        assert rep.max_spread <= rep.tolerance

    def test_ellipsoid_gradient_norm_is_not(self):
        ell = DomainSpec.ellipsoid((1.0, 2.0))
        field = lambda x: np.sum(np.asarray(ell.grad_h(x)) ** 2, axis=-1)
        rep = is_function_of_h(ell, field, samples=8000, seed=22)
        assert not rep.is_function
        assert rep.max_spread > rep.tolerance

    def test_nonlinear_function_of_h_detected(self):
        sph = DomainSpec.sphere(2)
        rep = is_function_of_h(sph, lambda x: np.exp(-sph.h(x)), samples=8000, seed=23)
        assert rep.is_function

    def test_coordinate_field_is_not(self):
        sph = DomainSpec.sphere(2)
        rep = is_function_of_h(
            sph, lambda x: np.asarray(x, float)[..., 0], samples=8000, seed=24
        )
        assert not rep.is_function


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


class TestSimulation:
    def test_matches_ball_scheme_in_interior(self):
        # until a projection triggers, the domain stepper and the ball
        # stepper consume the same draws and produce identical states
        c = 1.0
        bm = BallModel(n=2, r=0.5, gamma=CoeffFn.constant(SQRT2), g=CoeffFn.constant(c))
        dm = DomainModel(DomainSpec.sphere(2), ball_drift(c), sigma=SQRT2)
        traj = ball.simulate(bm, (0.2, -0.1), T=0.05, dt=1e-3, seed=77)
        states = simulate_domain(dm, (0.2, -0.1), T=0.05, dt=1e-3, seed=77)
        assert np.max(np.sqrt(np.sum(traj.states**2, axis=-1))) < 1.0
        np.testing.assert_allclose(states, traj.states, atol=1e-14)

    def test_boundary_start_pure_drift_first_step(self):
        c = 0.8
        dm = DomainModel(DomainSpec.sphere(2), ball_drift(c), sigma=SQRT2)
        states = simulate_domain(dm, (1.0, 0.0), T=0.01, dt=1e-3, seed=3)
        np.testing.assert_allclose(states[1], [1.0 - c * 1e-3, 0.0], atol=1e-15)

    def test_stays_in_closed_domain(self):
        dm = DomainModel(DomainSpec.sphere(2), ball_drift(1.0), sigma=SQRT2)
        states = simulate_domain(dm, (1.0, 0.0), T=1.0, dt=1e-3, seed=5)
        assert states.shape == (1001, 2)
        assert np.min(DomainSpec.sphere(2).phi(states)) >= -1e-10

    def test_ellipsoid_stays_inside(self):
        ell = DomainSpec.ellipsoid((1.0, 2.0))
        dm = DomainModel(ell, inward_normal_drift(ell, 1.0), sigma=1.0)
        states = simulate_domain(dm, (0.0, 2.0), T=0.5, dt=1e-3, seed=6)
        assert np.min(ell.phi(states)) >= -1e-10

    def test_deterministic(self):
        dm = DomainModel(DomainSpec.sphere(2), ball_drift(1.0), sigma=SQRT2)
        a = simulate_domain(dm, (0.5, 0.5), T=0.2, dt=1e-3, seed=11)
        b = simulate_domain(dm, (0.5, 0.5), T=0.2, dt=1e-3, seed=11)
        np.testing.assert_array_equal(a, b)

    def test_input_validation(self):
        dm = DomainModel(DomainSpec.sphere(2), ball_drift(1.0))
        with pytest.raises(ValueError):
            simulate_domain(dm, (0.1, 0.2, 0.3), T=1.0, dt=0.1, seed=0)
        with pytest.raises(ValueError):
            simulate_domain(dm, (2.0, 0.0), T=1.0, dt=0.1, seed=0)
        with pytest.raises(ValueError):
            simulate_domain(dm, (0.1, 0.2), T=0.0, dt=0.1, seed=0)
        with pytest.raises(ValueError):
            simulate_domain(dm, (0.1, 0.2), T=1.0, dt=-0.1, seed=0)


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    cx=st.floats(-0.65, 0.65),
    cy=st.floats(-0.65, 0.65),
    level=st.floats(0.1, 3.0),
    swirl=st.floats(-1.0, 1.0),
)
def test_decomposition_round_trip(cx, cy, level, swirl):
    """g and beta always reassemble to the drift, with beta tangential."""
    if cx * cx + cy * cy < 1e-4:
        return
    sph = DomainSpec.sphere(2)
    drift = lambda x: inward_normal_drift(sph, level)(x) + swirl * np.array([-x[1], x[0]])
    m = DomainModel(sph, drift, sigma=1.0)
    x = np.array([cx, cy])
    split = decompose_drift(m, x)
    grad = sph.grad_h(x)
    unit = grad / np.linalg.norm(grad)
    np.testing.assert_allclose(split.g * unit + split.beta, drift(x), atol=1e-12)
    assert split.g == pytest.approx(level, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(c=st.floats(0.2, 2.5), gam=st.floats(0.5, 2.0))
def test_alpha_reads_ratio(c, gam):
    """For the ball drift the ratio is c / gamma^2 at every boundary point."""
    m = DomainModel(DomainSpec.sphere(2), ball_drift(c), sigma=gam)
    assert alpha_ratio(m, (0.0, 1.0)) == pytest.approx(c / gam**2, rel=1e-12)
