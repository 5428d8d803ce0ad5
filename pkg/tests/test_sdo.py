"""Numeric central-path machinery: instances, solver, tracer, verdicts.

Hand-checked fixtures:

* identity instance (A = [I], b = (n), C = I): the central point is
  X = I, y = 1 - mu, S = mu*I for every mu, so limits, decay orders,
  and derivative verdicts are all known in closed form.
* elliptope instance: X_12(mu) is the root of
  2T^3 + (2 - mu/2)T^2 - (mu + 2)T - 2 in (-1, 0); at mu = 1 the root of
  2T^3 + 1.5T^2 - 3T - 2 (bisection oracle below). The other path
  coordinates follow from X*S = mu*I with
  S = C - diag(y), y = (4T - mu, 2/T + 1, 2/T + 1).
* kl02 instance n = 4: coordinate decay orders are the dyadic ladder
  (1/4, 1/2, 3/4, 1) laid out in the table asserted below; the slowest
  coordinate y_2 decays like mu^(1/4).
"""

import math

import numpy as np
import pytest

from puiseuxpath.errors import (
    ConstantCoordinateError,
    InfeasibleInstanceError,
    InputError,
    InsufficientSamplesError,
    ParseError,
)
from puiseuxpath.sdo import (
    CentralPathSample,
    SDOInstance,
    builtin_instance,
    central_point,
    elliptope_instance,
    fit_order,
    fit_order_raw,
    identity_instance,
    kl02_instance,
    load_instance,
    trace_path,
    verify_reparametrization,
)


def elliptope_root(mu: float) -> float:
    """Bisection on 2T^3 + (2 - mu/2)T^2 - (mu + 2)T - 2 over (-1, 0)."""

    def g(t):
        return 2 * t**3 + (2 - mu / 2) * t**2 - (mu + 2) * t - 2

    lo, hi = -1.0, 0.0
    assert g(lo) > 0 > g(hi)
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestInstances:
    def test_identity_shape(self):
        inst = identity_instance(3)
        assert inst.n == 3 and inst.m == 1
        assert np.array_equal(inst.A[0], np.eye(3))
        assert inst.b[0] == 3.0
        assert np.array_equal(inst.C, np.eye(3))
        assert inst.dim == 1 + 2 * 9

    def test_elliptope_shape(self):
        inst = elliptope_instance()
        assert inst.n == 3 and inst.m == 3
        for i in range(3):
            expected = np.zeros((3, 3))
            expected[i, i] = 1.0
            assert np.array_equal(inst.A[i], expected)
        assert list(inst.b) == [1.0, 1.0, 1.0]
        # objective 4x - 4y - 2z with off-diagonal pairs sharing the weight
        assert np.array_equal(
            inst.C, np.array([[0, 2, -2], [2, 0, -1], [-2, -1, 0]], dtype=float)
        )

    def test_kl02_shape(self):
        inst = kl02_instance(4)
        assert inst.n == 4 and inst.m == 4
        # constraint j pins S's arrow entry: S[0,j] = y_j for j < n
        A1 = np.zeros((4, 4))
        A1[0, 1] = A1[1, 0] = -1.0
        assert np.array_equal(inst.A[0], A1)
        A2 = np.zeros((4, 4))
        A2[0, 2] = A2[2, 0] = -1.0
        A2[1, 1] = -1.0
        assert np.array_equal(inst.A[1], A2)
        A4 = np.zeros((4, 4))
        A4[3, 3] = -1.0
        assert np.array_equal(inst.A[3], A4)
        assert list(inst.b) == [0.0, 0.0, 0.0, -1.0]
        E11 = np.zeros((4, 4))
        E11[0, 0] = 1.0
        assert np.array_equal(inst.C, E11)

    def test_asymmetric_constraint_rejected(self):
        A = np.zeros((2, 2))
        A[0, 1] = 1.0
        with pytest.raises(InputError):
            SDOInstance([A], [0.0], np.eye(2))

    def test_dependent_constraints_rejected(self):
        with pytest.raises(InputError):
            SDOInstance([np.eye(2), 2 * np.eye(2)], [2.0, 4.0], np.eye(2))

    def test_text_roundtrip(self):
        for inst in (identity_instance(2), elliptope_instance(), kl02_instance(3)):
            again = SDOInstance.from_text(inst.to_text(), name=inst.name)
            assert again.n == inst.n and again.m == inst.m
            for Ai, Bi in zip(inst.A, again.A):
                assert np.array_equal(Ai, Bi)
            assert np.array_equal(inst.b, again.b)
            assert np.array_equal(inst.C, again.C)

    def test_from_text_with_comments(self):
        text = """
        # tiny instance
        2 1
        1 0  0 1  # A_1 = I
        2
        1 0
        0 1
        """
        inst = SDOInstance.from_text(text, name="tiny")
        assert inst.n == 2 and inst.m == 1
        assert np.array_equal(inst.A[0], np.eye(2))
        assert inst.b[0] == 2.0
        assert np.array_equal(inst.C, np.eye(2))
        assert inst.name == "tiny"

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            SDOInstance.from_text("2 1\n1 0 0 1")  # missing b and C
        with pytest.raises(ParseError):
            SDOInstance.from_text("2 x\n")
        good = identity_instance(2).to_text()
        with pytest.raises(ParseError):
            SDOInstance.from_text(good + " 7")  # trailing token

    def test_builtin_registry(self):
        assert builtin_instance("elliptope").m == 3
        assert builtin_instance("elliptope_3").n == 3
        assert builtin_instance("identity_4").n == 4
        assert builtin_instance("kl02_5").n == 5
        with pytest.raises(InputError):
            builtin_instance("mystery")

    def test_load_instance_builtin_name_with_extension(self):
        inst = load_instance("identity_3.sdo")
        assert inst.n == 3 and inst.m == 1

    def test_load_instance_file_wins(self, tmp_path):
        path = tmp_path / "identity_3.sdo"
        path.write_text(identity_instance(4).to_text())
        assert load_instance(str(path)).n == 4

    def test_load_instance_unknown(self):
        with pytest.raises(InputError):
            load_instance("no_such_instance")

    def test_coordinate_labels(self):
        inst = identity_instance(2)
        labels = inst.coordinate_labels()
        assert len(labels) == inst.dim
        assert labels[0] == "X[0,0]"
        assert labels[4] == "y[0]"
        assert labels[5] == "S[0,0]"


class TestCentralPoint:
    def test_identity_closed_form(self):
        inst = identity_instance(3)
        for mu in (1.0, 0.3, 1e-4):
            s = central_point(inst, mu)
            assert np.allclose(s.X, np.eye(3), atol=1e-9)
            assert abs(s.y[0] - (1 - mu)) < 1e-9
            assert np.allclose(s.S, mu * np.eye(3), atol=1e-9)
            assert s.residual <= 1e-11

    def test_elliptope_at_mu_one(self):
        t = elliptope_root(1.0)
        s = central_point(elliptope_instance(), 1.0)
        assert abs(s.X[0, 1] - t) < 1e-9
        assert abs(s.X[0, 2] + t) < 1e-9
        assert abs(s.X[1, 2] + t * (2 * t + 1) / (t + 2)) < 1e-9
        assert abs(s.y[0] - (4 * t - 1.0)) < 1e-9
        assert abs(s.y[1] - (2 / t + 1)) < 1e-9
        assert abs(s.y[2] - (2 / t + 1)) < 1e-9
        # S = C - sum y_i A_i on the dual feasible path
        S = elliptope_instance().C - np.diag(s.y)
        assert np.allclose(s.S, S, atol=1e-9)

    def test_elliptope_small_mu_tracks_cubic(self):
        mu = 1e-6
        s = central_point(elliptope_instance(), mu)
        assert abs(s.X[0, 1] - elliptope_root(mu)) < 1e-8

    def test_iterates_stay_positive_definite(self):
        s = central_point(elliptope_instance(), 0.01)
        np.linalg.cholesky(s.X.astype(np.float64))
        np.linalg.cholesky(s.S.astype(np.float64))

    def test_duality_gap_identity(self):
        for mu in (1.0, 0.125, 1e-5):
            s = central_point(elliptope_instance(), mu)
            assert abs(s.duality_gap() - 3 * mu) <= 1e-8 * 3

    def test_warm_start(self):
        inst = elliptope_instance()
        a = central_point(inst, 0.5)
        b = central_point(inst, 0.4, start=a)
        assert b.residual <= 1e-11
        assert abs(b.X[0, 1] - elliptope_root(0.4)) < 1e-9

    def test_infeasible_instance_signaled(self):
        bad = SDOInstance([np.eye(3)], [-3.0], np.eye(3), name="infeasible")
        with pytest.raises(InfeasibleInstanceError):
            central_point(bad, 0.5)

    def test_bad_mu(self):
        with pytest.raises(InputError):
            central_point(identity_instance(2), 0.0)

    def test_coords_layout(self):
        s = central_point(identity_instance(2), 0.25)
        v = s.coords
        assert v.shape == (identity_instance(2).dim,)
        assert abs(v[0] - 1.0) < 1e-9  # X[0,0]
        assert abs(v[4] - 0.75) < 1e-9  # y
        assert abs(v[5] - 0.25) < 1e-9  # S[0,0]


@pytest.fixture(scope="module")
def identity_trace():
    return trace_path(identity_instance(3), 1.0, 1e-8, 0.5)


@pytest.fixture(scope="module")
def elliptope_trace():
    return trace_path(elliptope_instance(), 1.0, 1e-8, 0.5)


@pytest.fixture(scope="module")
def kl02_trace():
    return trace_path(kl02_instance(4), 1.0, 1e-8, 0.5)


class TestTracePath:
    def test_grid(self, identity_trace):
        mus = identity_trace.mus
        assert len(mus) == 27
        assert mus[0] == 1.0
        assert all(b < a for a, b in zip(mus, mus[1:]))
        assert mus[-1] >= 1e-8 * (1 - 1e-9)

    def test_identity_limits(self, identity_trace):
        lim = identity_trace.limits
        assert np.allclose(lim[:9].reshape(3, 3), np.eye(3), atol=1e-9)
        assert abs(lim[9] - 1.0) < 1e-9  # y -> 1
        assert np.max(np.abs(lim[10:])) < 1e-7  # S -> 0

    def test_identity_orders(self, identity_trace):
        from fractions import Fraction

        assert identity_trace.order_estimates[9] == Fraction(1)  # y
        assert identity_trace.order_estimates[10] == Fraction(1)  # S[0,0]
        assert identity_trace.order_estimates[0] is None  # constant X[0,0]

    def test_elliptope_limits(self, elliptope_trace):
        lim = elliptope_trace.limits
        X_star = np.array([[1, -1, 1], [-1, 1, -1], [1, -1, 1]], dtype=float)
        assert abs(lim[1] - (-1.0)) < 1e-5
        assert np.max(np.abs(lim[:9].reshape(3, 3) - X_star)) < 1e-4
        assert np.allclose(lim[9:12], [-4.0, -1.0, -1.0], atol=1e-4)

    def test_elliptope_orders(self, elliptope_trace):
        from fractions import Fraction

        half = Fraction(1, 2)
        assert elliptope_trace.order_estimates[1] == half  # X[0,1]
        assert elliptope_trace.order_estimates[9] == half  # y[0]
        assert elliptope_trace.order_estimates[0] is None  # X[0,0] constant

    def test_kl02_order_table(self, kl02_trace):
        from fractions import Fraction

        est = kl02_trace.order_estimates
        expected = {
            2: Fraction(3, 4),   # X[0,2]
            3: Fraction(1, 2),   # X[0,3]
            5: Fraction(3, 4),   # X[1,1]
            10: Fraction(1, 2),  # X[2,2]
            11: Fraction(1, 4),  # X[2,3]
            17: Fraction(1, 4),  # y[1]
            18: Fraction(1, 2),  # y[2]
            19: Fraction(1),     # y[3]
            22: Fraction(1, 4),  # S[0,2]
            25: Fraction(1, 4),  # S[1,1]
            35: Fraction(1),     # S[3,3]
        }
        for idx, q in expected.items():
            assert est[idx] == q, f"coordinate {idx}"
        # identically-zero and pinned coordinates never get an exponent
        for idx, limit in ((1, 0.0), (15, 1.0), (20, 1.0)):
            assert est[idx] is None
            assert abs(kl02_trace.limits[idx] - limit) < 1e-6

    def test_gap_identity_on_samples(self, elliptope_trace):
        for s in elliptope_trace.samples:
            gap = float(np.tensordot(s.X, s.S, axes=2))
            assert abs(gap - 3 * s.mu) <= 1e-8 * 3

    def test_residuals_below_tolerance(self, elliptope_trace):
        assert all(s.residual <= 1e-11 for s in elliptope_trace.samples)

    def test_bad_grid(self):
        with pytest.raises(InputError):
            trace_path(identity_instance(2), 1e-4, 1.0, 0.5)
        with pytest.raises(InputError):
            trace_path(identity_instance(2), 1.0, 1e-4, 1.5)


class TestFitOrder:
    def test_raw_slope_near_half(self):
        tr = trace_path(elliptope_instance(), 1.0, 1e-8, 0.5)
        raw = fit_order_raw(tr, 1)
        assert abs(raw - 0.5) < 0.05

    def test_snap_denominator_bound(self):
        tr = trace_path(elliptope_instance(), 1.0, 1e-8, 0.5)
        from fractions import Fraction

        assert fit_order(tr, 1, max_denominator=16) == Fraction(1, 2)

    def test_constant_coordinate(self):
        tr = trace_path(identity_instance(3), 1.0, 1e-8, 0.5)
        with pytest.raises(ConstantCoordinateError):
            fit_order(tr, 0)

    def test_too_few_samples(self):
        tr = trace_path(identity_instance(3), 1.0, 0.1, 0.5)
        with pytest.raises(InsufficientSamplesError):
            fit_order(tr, 9)


class TestVerifyReparametrization:
    def test_identity_rho_one_exactly_flat(self):
        rep = verify_reparametrization(identity_instance(3), 1)
        assert rep.bounded
        # y = 1 - mu: first derivative is exactly 1, second exactly 0
        assert np.allclose(rep.d1[:, 9], 1.0, atol=1e-6)
        assert rep.d2[:, 9].max() < 1e-5
        assert rep.d1[:, 0].max() < 1e-6  # X[0,0] frozen at 1

    def test_elliptope_rho_one_unbounded(self):
        rep = verify_reparametrization(elliptope_instance(), 1)
        assert not rep.bounded
        assert not rep.coordinate_bounded[1]
        # derivative of a sqrt-like coordinate grows like mu^(-1/2)
        assert abs(rep.growth[1] - (-0.5)) < 0.1

    def test_elliptope_rho_two_bounded(self):
        rep = verify_reparametrization(elliptope_instance(), 2)
        assert rep.bounded

    def test_input_validation(self):
        with pytest.raises(InputError):
            verify_reparametrization(identity_instance(2), 0)
        with pytest.raises(InputError):
            verify_reparametrization(identity_instance(2), 1, window=(0.5, 0.25))
        with pytest.raises(InsufficientSamplesError):
            verify_reparametrization(identity_instance(2), 1, window=(0.2, 0.25))
