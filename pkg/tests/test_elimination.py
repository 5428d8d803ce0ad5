"""Exact elimination: the central-path system projected to plane curves.

Hand-checked fixtures:

* identity instance: X = I, y = 1 - mu, S = mu*I, so X_11 eliminates to
  V - 1, S_11 to V - mu, and y to (V - 1)(V - 1 + mu) (the resultant
  chain drags in a co-centered extraneous branch at V = 1).
* elliptope X_12: the exact path satisfies
  2T^3 + (2 - mu/2)T^2 - (mu + 2)T - 2 = 0, so the eliminant must be
  divisible by that cubic.
* kl02 n = 3: the path has x_12 = y_1 = 0 identically, x_02 = -y_2 and
  2 y_2^2 = mu, y_3 = 3mu/2 (substitute into X*S = mu*I and read off
  the diagonal), so the minimal curves below come out in closed form.
"""

from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from puiseuxpath.elimination import (
    MPoly,
    canonical_coordinates,
    central_system,
    coordinate_variable,
    eliminate_coordinate,
)
from puiseuxpath.errors import (
    EliminationBlowUpError,
    ExtraneousVanishingError,
    InputError,
)
from puiseuxpath.polynomials import parse_bipoly
from puiseuxpath.sdo import (
    elliptope_instance,
    identity_instance,
    kl02_instance,
    trace_path,
)

F_ELL = parse_bipoly("2*T^3 + (2 - 1/2*mu)*T^2 - (mu + 2)*T - 2")


class TestMPoly:
    def test_arithmetic(self):
        x = MPoly.variable(3, 1)
        y = MPoly.variable(3, 2)
        p = x * x - y.scale(Fraction(2))  # x^2 - 2y
        assert p.deg(1) == 2 and p.deg(2) == 1
        assert p.terms[(0, 2, 0)] == 1
        assert p.terms[(0, 0, 1)] == -2

    def test_pow(self):
        x = MPoly.variable(2, 1)
        p = (x + MPoly.const(2, 1)) ** 3  # (x + 1)^3
        assert p.terms[(0, 2)] == 3
        assert p.terms[(0, 0)] == 1

    def test_substitute(self):
        x = MPoly.variable(3, 1)
        y = MPoly.variable(3, 2)
        p = x * x + y  # x^2 + y
        q = p.substitute(1, y - MPoly.const(3, 1))  # x := y - 1
        # (y - 1)^2 + y = y^2 - y + 1
        assert q.terms == {(0, 0, 2): 1, (0, 0, 1): -1, (0, 0, 0): 1}

    def test_coeffs_in(self):
        x = MPoly.variable(2, 1)
        p = (x * x).scale(Fraction(2)) + MPoly.const(2, 5)
        lo, mid, hi = p.coeffs_in(1)
        assert lo.terms == {(0, 0): 5}
        assert mid.is_zero()
        assert hi.terms == {(0, 0): 2}


class TestCentralSystem:
    def test_counts(self):
        inst = elliptope_instance()
        polys, layout = central_system(inst)
        k = inst.n * (inst.n + 1) // 2
        assert len(polys) == inst.m + k + inst.n * inst.n
        assert layout["nv"] == 1 + 2 * k + inst.m

    def test_identity_path_is_a_zero(self):
        # substitute X = I, y = 1 - mu, S = mu*I; every equation vanishes
        inst = identity_instance(3)
        polys, layout = central_system(inst)
        nv = layout["nv"]
        mu = MPoly.variable(nv, 0)
        one = MPoly.const(nv, 1)
        subs = {}
        for i in range(3):
            for j in range(i, 3):
                subs[layout["xvar"](i, j)] = (
                    one if i == j else MPoly.const(nv, 0)
                )
                subs[layout["svar"](i, j)] = (
                    mu if i == j else MPoly.const(nv, 0)
                )
        subs[layout["yvar"](0)] = one - mu
        for p in polys:
            for var, expr in subs.items():
                p = p.substitute(var, expr)
            assert p.is_zero()

    def test_canonical_coordinates(self):
        inst = identity_instance(3)
        assert canonical_coordinates(inst) == [
            0, 1, 2, 4, 5, 8, 9, 10, 11, 12, 14, 15, 18,
        ]

    def test_coordinate_variable_bounds(self):
        inst = identity_instance(2)
        _, layout = central_system(inst)
        with pytest.raises(InputError):
            coordinate_variable(inst, inst.dim, layout)
        # mirrored entries share one variable
        assert coordinate_variable(inst, 1, layout) == coordinate_variable(
            inst, 2, layout
        )


class TestEliminateCoordinate:
    def test_identity_x11(self):
        assert eliminate_coordinate(identity_instance(3), 0) == parse_bipoly(
            "V - 1"
        )

    def test_identity_s11(self):
        assert eliminate_coordinate(identity_instance(3), 10) == parse_bipoly(
            "V - mu"
        )

    def test_identity_y(self):
        P = eliminate_coordinate(identity_instance(3), 9)
        assert P == parse_bipoly("V^2 + (mu - 2)*V + (1 - mu)")
        # the true branch 1 - mu is a factor
        assert P.pseudo_rem(parse_bipoly("V - 1 + mu")).is_zero()

    def test_elliptope_x12_divisible_by_cubic(self):
        P = eliminate_coordinate(elliptope_instance(), 1)
        assert P.deg_v == 5
        assert P.pseudo_rem(F_ELL).is_zero()

    def test_kl02_3_exact_curves(self):
        inst = kl02_instance(3)
        tr = trace_path(inst, 1.0, 1e-8, 0.5)
        assert eliminate_coordinate(inst, 10, trace=tr) == parse_bipoly(
            "2*V^2 - mu"
        )  # y_2
        assert eliminate_coordinate(inst, 2, trace=tr) == parse_bipoly(
            "2*V^2 - mu"
        )  # X_13
        assert eliminate_coordinate(inst, 11, trace=tr) == parse_bipoly(
            "V - 3/2*mu"
        )  # y_3

    def test_identically_zero_coordinate(self):
        # kl02 X_12 vanishes along the whole path
        assert eliminate_coordinate(kl02_instance(3), 5) == parse_bipoly("V")

    def test_kl02_4_blows_up_fast(self):
        with pytest.raises(EliminationBlowUpError, match="cap"):
            eliminate_coordinate(kl02_instance(4), 17)

    def test_degree_cap_env_override(self, monkeypatch):
        monkeypatch.setenv("PUISEUXPATH_DEGREE_CAP", "4")
        with pytest.raises(EliminationBlowUpError):
            eliminate_coordinate(elliptope_instance(), 1)

    def test_validation_gate(self):
        # a trace that disagrees with the instance must be rejected
        inst = identity_instance(3)
        tr = trace_path(inst, 1.0, 1e-6, 0.25)
        values = tr.values.copy()
        values[:, 9] += 0.3
        fake = SimpleNamespace(samples=tr.samples, values=values)
        with pytest.raises(ExtraneousVanishingError, match="misses"):
            eliminate_coordinate(inst, 9, trace=fake)

    def test_out_of_range_coordinate(self):
        with pytest.raises(InputError):
            eliminate_coordinate(identity_instance(2), 99)
