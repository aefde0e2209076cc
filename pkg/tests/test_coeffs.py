"""Tests for coefficient functions, the ball model, and threshold constants."""

import json
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballsde.coeffs import (
    BallModel,
    CoeffFn,
    epsilon_for_p,
    optimal_exponent,
    required_ratio,
)
from ballsde.errors import InfeasibleError

P_STAR = 1.0 - sqrt(2.0) / 4.0
F_STAR = sqrt(2.0) - 1.0


# ---------------------------------------------------------------------------
# coefficient functions
# ---------------------------------------------------------------------------


class TestCoeffFn:
    def test_constant(self):
        f = CoeffFn.constant(2.5)
        assert f(0.0) == 2.5 and f(1.0) == 2.5
        np.testing.assert_array_equal(f(np.linspace(0, 1, 7)), np.full(7, 2.5))
        assert f.derivative(0.3) == 0.0
        assert f.lipschitz_constant() == 0.0
        assert f.min_value() == f.max_value() == 2.5

    def test_affine_is_intercept_plus_slope_times_u(self):
        f = CoeffFn.affine(1.2, 0.3)
        assert f(0.0) == pytest.approx(1.2)
        assert f(1.0) == pytest.approx(1.5)
        assert f(0.4) == pytest.approx(1.2 + 0.3 * 0.4)
        assert f.derivative(0.7) == pytest.approx(0.3)
        assert f.lipschitz_constant() == pytest.approx(0.3)

    def test_table_interpolates(self):
        f = CoeffFn.table([(0.0, 1.0), (0.5, 2.0), (1.0, 1.5)])
        assert f(0.25) == pytest.approx(1.5)
        assert f(0.75) == pytest.approx(1.75)
        us = np.linspace(0, 1, 101)
        np.testing.assert_allclose(f(us), np.interp(us, f.knots, f.values))

    def test_table_sorts_input(self):
        f = CoeffFn.table([(1.0, 3.0), (0.0, 1.0), (0.5, 2.0)])
        assert f.knots == (0.0, 0.5, 1.0)
        assert f(0.5) == 2.0

    def test_pieces_and_piece_at(self):
        f = CoeffFn.table([(0.0, 1.0), (0.5, 2.0), (1.0, 1.5)])
        pieces = f.pieces()
        assert len(pieces) == 2
        u0, u1, a, b = pieces[0]
        assert (u0, u1) == (0.0, 0.5)
        assert a + b * 0.25 == pytest.approx(f(0.25))
        # an interior knot belongs to the piece on its right
        assert f.piece_at(0.5) == pieces[1]
        assert f.derivative(0.5) == pytest.approx(pieces[1][3])

    def test_derivative_array(self):
        f = CoeffFn.table([(0.0, 1.0), (0.5, 2.0), (1.0, 1.5)])
        got = f.derivative(np.array([0.1, 0.5, 0.9]))
        np.testing.assert_allclose(got, [2.0, -1.0, -1.0])

    def test_out_of_range_rejected(self):
        f = CoeffFn.constant(1.0)
        with pytest.raises(ValueError):
            f(1.5)
        with pytest.raises(ValueError):
            f(np.array([0.2, -0.3]))
        with pytest.raises(ValueError):
            f.piece_at(2.0)

    @pytest.mark.parametrize(
        "bad",
        [
            lambda: CoeffFn.constant(0.0),
            lambda: CoeffFn.constant(-1.0),
            lambda: CoeffFn.affine(1.0, -2.0),  # hits 0 inside [0, 1]
            lambda: CoeffFn.table([(0.0, 1.0), (1.0, np.inf)]),
            lambda: CoeffFn.table([(0.1, 1.0), (1.0, 1.0)]),  # knots must span [0, 1]
            lambda: CoeffFn.table([(0.0, 1.0), (0.0, 2.0), (1.0, 1.0)]),
            lambda: CoeffFn("cubic", (0.0, 1.0), (1.0, 1.0)),
        ],
    )
    def test_invalid_construction(self, bad):
        with pytest.raises(ValueError):
            bad()

    @pytest.mark.parametrize(
        "f",
        [
            CoeffFn.constant(1.7),
            CoeffFn.affine(0.9, 0.4),
            CoeffFn.table([(0.0, 1.0), (0.3, 2.0), (1.0, 0.5)]),
        ],
        ids=["constant", "affine", "table"],
    )
    def test_serialization_round_trip(self, f):
        spec = f.to_dict()
        json.dumps(spec)  # must be plain data
        assert CoeffFn.from_dict(spec) == f

    def test_from_dict_errors(self):
        with pytest.raises(ValueError):
            CoeffFn.from_dict({"value": 1.0})
        with pytest.raises(ValueError):
            CoeffFn.from_dict({"kind": "spline"})
        with pytest.raises(ValueError):
            CoeffFn.from_dict({"kind": "table", "points": ["0.0-1.0"]})


@settings(max_examples=60, deadline=None)
@given(
    values=st.lists(st.floats(0.1, 5.0), min_size=2, max_size=6),
    u=st.floats(0.0, 1.0),
    w=st.floats(0.0, 1.0),
)
def test_lipschitz_bound_holds(values, u, w):
    """|f(u) - f(w)| <= L |u - w| for the advertised constant L."""
    knots = np.linspace(0.0, 1.0, len(values))
    f = CoeffFn.table(zip(knots, values))
    lhs = abs(f(u) - f(w))
    assert lhs <= f.lipschitz_constant() * abs(u - w) + 1e-12


@settings(max_examples=60, deadline=None)
@given(
    intercept=st.floats(0.1, 3.0),
    slope=st.floats(0.0, 2.0),
    u=st.floats(0.0, 1.0),
)
def test_affine_evaluates_exactly(intercept, slope, u):
    f = CoeffFn.affine(intercept, slope)
    assert f(u) == pytest.approx(intercept + slope * u, rel=1e-14, abs=1e-14)


# ---------------------------------------------------------------------------
# ball model
# ---------------------------------------------------------------------------


class TestBallModel:
    def test_derived_quantities(self):
        m = BallModel(3, 0.5, CoeffFn.constant(sqrt(2.0)), CoeffFn.affine(0.9, 0.4))
        assert m.gamma_sq(0.3) == pytest.approx(2.0)
        assert m.ratio(1.0) == pytest.approx(1.3 / 2.0)
        assert m.boundary_ratio() == pytest.approx(0.65)
        us = np.linspace(0, 1, 11)
        np.testing.assert_allclose(m.ratio(us), (0.9 + 0.4 * us) / 2.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n": 1},
            {"n": 2, "r": 0.0},
            {"n": 2, "r": 1.5},
        ],
    )
    def test_invalid_construction(self, kwargs):
        base = {
            "n": 2,
            "r": 0.5,
            "gamma": CoeffFn.constant(1.0),
            "g": CoeffFn.constant(1.0),
        }
        base.update(kwargs)
        with pytest.raises(ValueError):
            BallModel(**base)

    def test_serialization_round_trip(self):
        m = BallModel(
            2, 0.25, CoeffFn.table([(0.0, 1.0), (0.4, 2.0), (1.0, 1.2)]), CoeffFn.constant(0.7)
        )
        spec = m.to_dict()
        json.dumps(spec)
        assert BallModel.from_dict(spec) == m

    def test_from_dict_missing_key(self):
        with pytest.raises(ValueError):
            BallModel.from_dict({"n": 2, "r": 0.5})


# ---------------------------------------------------------------------------
# threshold constants
# ---------------------------------------------------------------------------


class TestRequiredRatio:
    def test_hand_computed_values(self):
        assert required_ratio(0.75) == pytest.approx(0.5, abs=1e-15)
        assert required_ratio(0.6) == pytest.approx(0.425, abs=1e-15)
        assert required_ratio(0.9) == pytest.approx(1.7, abs=1e-12)
        assert required_ratio(0.55) == pytest.approx(0.45555555555555555, abs=1e-15)

    def test_minimum_value_and_location(self):
        assert required_ratio(P_STAR) == pytest.approx(F_STAR, abs=1e-15)

    @pytest.mark.parametrize("p", [0.5, 1.0, 0.2, 1.3])
    def test_domain_enforced(self, p):
        with pytest.raises(ValueError):
            required_ratio(p)

    def test_optimal_exponent_constants(self):
        p, value = optimal_exponent()
        assert abs(p - P_STAR) < 1e-9
        assert abs(value - F_STAR) < 1e-9
        assert optimal_exponent() is optimal_exponent()  # cached

    def test_sweep_of_49_exponents_stays_above_minimum(self):
        ps = np.linspace(0.51, 0.99, 49)
        vals = np.array([required_ratio(p) for p in ps])
        assert np.all(vals >= F_STAR - 1e-15)
        # convex with the minimum strictly inside
        assert np.argmin(vals) not in (0, len(ps) - 1)
        d2 = np.diff(vals, 2)
        assert np.all(d2 > 0.0)


@settings(max_examples=80, deadline=None)
@given(p=st.floats(0.5 + 1e-6, 1.0 - 1e-6))
def test_required_ratio_dominates_minimum(p):
    value = required_ratio(p)
    assert value >= F_STAR - 1e-15
    if abs(p - P_STAR) > 1e-6:
        assert value > F_STAR


# ---------------------------------------------------------------------------
# shell width for the p-power condition
# ---------------------------------------------------------------------------


class TestEpsilonForP:
    def test_constant_model_hits_cap(self):
        m = BallModel(2, 0.5, CoeffFn.constant(sqrt(2.0)), CoeffFn.constant(1.5))
        assert epsilon_for_p(m, 0.55) == 0.5
        assert epsilon_for_p(m, 0.55, cap=0.25) == 0.25

    def test_affine_crossing_width(self):
        # g/gamma^2 = 0.05 + 0.5 u crosses the level 1 - p = 0.45 at u = 0.8
        m = BallModel(2, 0.5, CoeffFn.constant(1.0), CoeffFn.affine(0.05, 0.5))
        assert epsilon_for_p(m, 0.55) == pytest.approx(0.2, abs=1e-9)

    def test_table_crossing_width(self):
        g = CoeffFn.table([(0.0, 0.1), (0.6, 0.1), (1.0, 0.9)])
        m = BallModel(2, 0.5, CoeffFn.constant(1.0), g)
        assert epsilon_for_p(m, 0.55) == pytest.approx(0.225, abs=1e-9)

    def test_boundary_failure_is_infeasible(self):
        m = BallModel(2, 0.5, CoeffFn.constant(sqrt(2.0)), CoeffFn.constant(0.8))
        with pytest.raises(InfeasibleError):
            epsilon_for_p(m, 0.55)

    def test_bad_cap(self):
        m = BallModel(2, 0.5, CoeffFn.constant(1.0), CoeffFn.constant(1.0))
        with pytest.raises(ValueError):
            epsilon_for_p(m, 0.75, cap=0.7)

    def test_monotone_in_p(self):
        # larger p weakens the requirement 1 - p, so the width cannot shrink
        m = BallModel(2, 0.5, CoeffFn.constant(1.0), CoeffFn.affine(0.05, 0.5))
        widths = [epsilon_for_p(m, p) for p in (0.51, 0.55, 0.6, 0.7)]
        assert all(a <= b + 1e-12 for a, b in zip(widths, widths[1:]))


@settings(max_examples=40, deadline=None)
@given(
    c=st.floats(0.9, 3.0),
    p=st.floats(0.51, 0.95),
)
def test_epsilon_feasible_for_generous_constants(c, p):
    """Constant models above the requirement always certify a full cap."""
    m = BallModel(2, 0.5, CoeffFn.constant(1.0), CoeffFn.constant(c))
    assert epsilon_for_p(m, p) == 0.5
