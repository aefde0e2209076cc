"""Boundary chart: mapping identities, projector algebra, chart simulation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ks_2samp

from ballsde.ball import sample_terminal_states
from ballsde.coeffs import BallModel, CoeffFn
from ballsde.radial import RadialModel, sample_terminal
from ballsde.transform import (
    A_matrix,
    A_sqrt,
    TransformedTrajectory,
    forward_map,
    inverse_map,
    sample_transformed_terminal,
    simulate_transformed,
)

SQ2 = math.sqrt(2.0)


def constant_model(c=1.0, n=2):
    return BallModel(n, 0.5, CoeffFn.constant(SQ2), CoeffFn.constant(c))


class TestMaps:
    def test_north_pole(self):
        v, y = forward_map((0.0, 0.0, 1.0))
        assert v == 0.0
        np.testing.assert_array_equal(y, [0.0, 0.0])

    def test_forward_values(self):
        x = np.array([0.3, 0.0, 0.4])
        v, y = forward_map(x)
        assert v == pytest.approx(1 - 0.25, rel=1e-15)
        np.testing.assert_allclose(y, [0.6, 0.0], rtol=1e-15)

    def test_round_trip_on_chart_region(self):
        gen = np.random.default_rng(1)
        for _ in range(500):
            y = gen.standard_normal(2)
            y *= gen.uniform(0.0, 0.5) / np.linalg.norm(y)
            v = gen.uniform(0.0, 0.99)
            x = inverse_map(v, y)
            v2, y2 = forward_map(x)
            assert abs(v2 - v) < 1e-14
            assert np.max(np.abs(y2 - y)) < 1e-14

    def test_inverse_lands_in_upper_hemisphere(self):
        x = inverse_map(0.19, [0.6, 0.0])
        assert x[-1] > 0
        assert np.sum(x * x) == pytest.approx(1 - 0.19, rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            forward_map((0.0, 0.0))
        with pytest.raises(ValueError):
            inverse_map(1.5, [0.0])
        with pytest.raises(ValueError):
            inverse_map(0.5, [0.8, 0.8])


class TestProjector:
    def test_square_root_identity(self):
        gen = np.random.default_rng(2)
        for _ in range(300):
            y = gen.standard_normal(3)
            y *= gen.uniform(0.0, 0.999) / np.linalg.norm(y)
            S = A_sqrt(y)
            np.testing.assert_allclose(S @ S, A_matrix(y), atol=1e-14)

    def test_eigenvalues(self):
        y = np.array([0.3, 0.0, -0.4])
        s2 = float(y @ y)
        ev = np.sort(np.linalg.eigvalsh(A_matrix(y)))
        np.testing.assert_allclose(ev, [1 - s2, 1.0, 1.0], atol=1e-14)
        ev_sqrt = np.sort(np.linalg.eigvalsh(A_sqrt(y)))
        np.testing.assert_allclose(ev_sqrt, [math.sqrt(1 - s2), 1.0, 1.0], atol=1e-14)

    def test_quadratic_form_identity(self):
        # <A(y) xi, xi> = |xi|^2 - <y, xi>^2
        gen = np.random.default_rng(3)
        for _ in range(200):
            y = gen.standard_normal(2) * 0.4
            xi = gen.standard_normal(2)
            got = float(xi @ A_matrix(y) @ xi)
            want = float(xi @ xi) - float(y @ xi) ** 2
            assert got == pytest.approx(want, rel=1e-13, abs=1e-14)

    def test_ellipticity_on_chart_region(self):
        gen = np.random.default_rng(4)
        for _ in range(200):
            y = gen.standard_normal(3)
            y *= gen.uniform(0.0, 0.5) / np.linalg.norm(y)
            xi = gen.standard_normal(3)
            assert float(xi @ A_matrix(y) @ xi) >= 0.75 * float(xi @ xi) - 1e-12

    def test_singular_input_rejected(self):
        with pytest.raises(ValueError):
            A_sqrt([1.0, 0.0])
        with pytest.raises(ValueError):
            A_sqrt([0.8, 0.8])


class TestSimulation:
    def test_deterministic(self):
        m = constant_model()
        a = simulate_transformed(m, (0.0, 1.0), 0.5, 1e-3, seed=5)
        b = simulate_transformed(m, (0.0, 1.0), 0.5, 1e-3, seed=5)
        assert np.array_equal(a.v, b.v)
        assert np.array_equal(a.y, b.y)
        assert a.truncated == b.truncated

    def test_gap_stays_in_range(self):
        tr = simulate_transformed(constant_model(), (0.0, 1.0), 0.5, 1e-3, seed=7)
        assert tr.v.min() >= 0.0
        assert tr.v.max() <= 1.0 - 1e-6 + 1e-15

    def test_truncation_bookkeeping(self):
        # the n=2 chart is an interval of angle; a boundary-started path
        # leaves it in O(1) time, so truncation must trigger and the final
        # recorded state must be the first one outside
        tr = simulate_transformed(constant_model(), (0.0, 1.0), 5.0, 1e-3, seed=5)
        assert isinstance(tr, TransformedTrajectory)
        assert tr.truncated
        assert tr.truncation_index == len(tr.times) - 1
        assert abs(tr.y[-1, 0]) > 0.5
        assert np.all(np.abs(tr.y[:-1, 0]) <= 0.5)

    def test_start_validation(self):
        m = constant_model()
        with pytest.raises(ValueError):
            simulate_transformed(m, (0.0, -1.0), 0.1, 1e-3, 0)  # lower hemisphere
        with pytest.raises(ValueError):
            simulate_transformed(m, (0.9, 0.1), 0.1, 1e-3, 0)  # outside chart
        with pytest.raises(ValueError):
            simulate_transformed(m, (0.0, 1.0), -0.1, 1e-3, 0)

    def test_csv_layout(self, tmp_path):
        tr = simulate_transformed(constant_model(), (0.0, 1.0), 0.02, 1e-3, seed=9)
        path = tmp_path / "chart.csv"
        tr.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# model:")
        assert lines[4] == "t,v,y_1,truncated"
        assert lines[5].split(",") == ["0.0", "0.0", "0.0", "0"]
        flags = [int(line.rsplit(",", 1)[1]) for line in lines[5:]]
        assert sum(flags) == (1 if tr.truncated else 0)


class TestTerminalSampler:
    def test_deterministic_and_finite(self):
        m = constant_model()
        a = sample_transformed_terminal(m, (0.0, 1.0), 0.3, 1e-3, seed=11, replicas=500)
        b = sample_transformed_terminal(m, (0.0, 1.0), 0.3, 1e-3, seed=11, replicas=500)
        assert np.array_equal(a.v, b.v)
        assert np.all(np.isfinite(a.v))
        assert 0.0 <= a.truncated_fraction <= 1.0

    def test_gap_law_matches_other_representations(self):
        # terminal gap from three independent simulations of the same law:
        # full ball process, scalar gap diffusion, chart pair
        m = constant_model()
        R, T, dt = 8000, 0.5, 1e-3
        X = sample_terminal_states(m, (1.0, 0.0), T, dt, seed=101, replicas=R)
        ball_gaps = np.maximum(0.0, 1.0 - np.sum(X * X, axis=1))
        radial_v = sample_terminal(RadialModel.from_ball(m), 0.0, T, dt, seed=102, replicas=R)
        chart = sample_transformed_terminal(m, (0.0, 1.0), T, dt, seed=103, replicas=R)
        assert ks_2samp(ball_gaps, radial_v).statistic < 0.035
        assert ks_2samp(ball_gaps, chart.v).statistic < 0.035
        assert ks_2samp(radial_v, chart.v).statistic < 0.035

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_transformed_terminal(constant_model(), (0.0, 1.0), 0.1, 1e-3, 0, 0)


@settings(max_examples=50, deadline=None)
@given(
    y1=st.floats(-0.35, 0.35),
    y2=st.floats(-0.35, 0.35),
    v=st.floats(0.0, 0.99),
)
def test_round_trip_property(y1, y2, v):
    y = np.array([y1, y2])
    x = inverse_map(v, y)
    v2, y2_ = forward_map(x)
    assert abs(v2 - v) < 1e-13
    assert np.max(np.abs(y2_ - y)) < 1e-13
    assert x[-1] >= 0.0


@settings(max_examples=50, deadline=None)
@given(s=st.floats(0.0, 0.98), angle=st.floats(0.0, 2 * math.pi))
def test_projector_determinant(s, angle):
    # det A = 1 - |y|^2 and det A^{1/2} = sqrt(1 - |y|^2)
    y = math.sqrt(s) * np.array([math.cos(angle), math.sin(angle)])
    assert np.linalg.det(A_matrix(y)) == pytest.approx(1 - s, abs=1e-12)
    assert np.linalg.det(A_sqrt(y)) == pytest.approx(math.sqrt(1 - s), abs=1e-12)
