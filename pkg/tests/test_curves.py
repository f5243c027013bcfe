"""Curve invariants: Legendrian checks, rotation numbers, stabilization,
framings, and twisting numbers."""

import math
import random
from fractions import Fraction

import pytest

from engelkit.chart import Chart
from engelkit.curves import (
    CurveError,
    FramingWord,
    ParamCurve,
    framing_action,
    front_contact_form,
    front_cusp_count,
    front_rotation_number,
    front_tb,
    front_writhe,
    is_legendrian,
    projectivized_winding_oracle,
    rotation_number,
    stabilize,
    tb_from_framings,
    twisting_number,
    unknot_fixture,
    winding_number,
)
from engelkit.forms import VectorFieldExpr
from engelkit.scalar import PiAffine, ZERO, cos_of, num, sin_of, sym


@pytest.fixture(scope="module")
def unknot():
    return unknot_fixture()


class TestFixture:
    def test_invariants(self, unknot):
        alpha = front_contact_form(unknot.chart)
        assert is_legendrian(unknot, alpha).verified
        assert unknot.immersion_check().verified
        assert front_cusp_count(unknot) == 2
        assert front_writhe(unknot) == 0
        assert front_tb(unknot) == -1
        assert front_rotation_number(unknot) == 0

    def test_non_legendrian_refuted(self):
        ch = front_chart = unknot_fixture().chart
        diag = ParamCurve.smooth(
            ch, {"t": sym("u"), "z": sym("u"), "x": ZERO},
            closed=False, period_2pi=False, hi=Fraction(1),
        )
        alpha = front_contact_form(ch)
        assert is_legendrian(diag, alpha).verdict == "refuted"


class TestStabilize:
    def test_positive(self, unknot):
        s = stabilize(unknot, 1)
        alpha = front_contact_form(unknot.chart)
        assert is_legendrian(s, alpha).verified
        assert s.immersion_check().verified
        assert front_rotation_number(s) == 1
        assert front_cusp_count(s) == 4
        assert front_tb(s) == -2

    def test_negative(self, unknot):
        s = stabilize(unknot, -1)
        assert front_rotation_number(s) == -1
        assert front_tb(s) == -2

    def test_bottom_strand(self, unknot):
        s = stabilize(unknot, 1, window=(Fraction(17, 4), Fraction(19, 4)))
        assert front_rotation_number(s) == 1
        assert front_tb(s) == -2

    def test_composition_commutes_in_invariants(self, unknot):
        w1 = (Fraction(9, 8), Fraction(11, 8))
        w2 = (Fraction(13, 8), Fraction(15, 8))
        pm = stabilize(stabilize(unknot, 1, window=w1), -1, window=w2)
        mp = stabilize(stabilize(unknot, -1, window=w1), 1, window=w2)
        assert front_rotation_number(pm) == front_rotation_number(mp) == 0
        assert front_tb(pm) == front_tb(mp) == -3
        pp = stabilize(stabilize(unknot, 1, window=w1), 1, window=w2)
        assert front_rotation_number(pp) == 2

    def test_window_errors(self, unknot):
        with pytest.raises(CurveError):
            stabilize(unknot, 1, window=(Fraction(1, 4), Fraction(3, 4)))  # curved
        with pytest.raises(CurveError):
            stabilize(unknot, 2)


class TestRotationNumber:
    def test_reparametrization_invariance(self, unknot):
        rng = random.Random(11)
        s = stabilize(unknot, 1)
        base = front_rotation_number(s)
        for _ in range(3):
            shift = Fraction(rng.randrange(1, 12), 2)
            assert front_rotation_number(s.shifted(shift)) == base

    def test_orientation_flips(self, unknot):
        ch = unknot.chart
        x = sym("x")
        e1 = VectorFieldExpr.make(ch, {"x": 1})
        e2 = VectorFieldExpr.make(ch, {"t": 1, "z": x})
        s = stabilize(unknot, 1)
        r = rotation_number(s, (e1, e2))
        # flipping the frame orientation flips the sign
        assert rotation_number(s, (e2, e1)) == -r
        # reversing the curve flips the sign
        assert front_rotation_number(s.reversed()) == -r

    def test_winding_stability(self):
        # doubling the sample count does not change a stable result
        fn = lambda u: (math.cos(3 * u), math.sin(3 * u))
        assert winding_number(fn, 0.0, 2 * math.pi) == 3
        fn2 = lambda u: (math.cos(u) + 0.3, -math.sin(u))
        assert winding_number(fn2, 0.0, 2 * math.pi) == -1


class TestFramings:
    def test_action_group_law(self):
        f = FramingWord("gamma", 0)
        assert framing_action(0, f) == f
        assert framing_action(1, framing_action(1, f)) == framing_action(2, f)

    def test_tb_from_framings(self, unknot):
        fs = FramingWord("unknot", 0)
        fc = FramingWord("unknot", front_tb(unknot))
        assert tb_from_framings(fc, fs) == -1
        assert tb_from_framings(fs, fs) == 0
        # stabilization shifts the result by -1
        s = stabilize(unknot, 1)
        fc2 = FramingWord("unknot", front_tb(s))
        assert tb_from_framings(fc2, fs) == tb_from_framings(fc, fs) - 1
        with pytest.raises(CurveError):
            tb_from_framings(FramingWord("a", 0), FramingWord("b", 0))


def _fiber_fixture(k: int, eps=Fraction(0)):
    from engelkit.prolong import build_r1, lift_field, piece_fields

    handle = build_r1(k=k, eps=eps)
    piece = handle.pieces[0]
    chart4, w, x, beta = piece_fields(piece, eps, k)
    f1 = lift_field(piece.c1, chart4)
    f2 = lift_field(piece.c2, chart4)
    return chart4, w, x, f1, f2


class TestTwisting:
    def test_fiber_degree(self):
        for k in (1, 2, 3):
            chart4, w, x, f1, f2 = _fiber_fixture(k)
            res = twisting_number(
                w, x, (f1, f2), {"x": 0.0, "y1": 0.0, "y2": 0.0, "t": 0.0},
                2 * math.pi, closed=True,
            )
            assert res.closed_degree == 2 * k
            # independent oracle: double-angle winding of the (cos, sin) pair
            oracle = projectivized_winding_oracle(
                lambda u: (math.cos(k * u), math.sin(k * u)), 0.0, 2 * math.pi
            )
            assert oracle == 2 * k == res.closed_degree

    def test_interval_additivity(self):
        chart4, w, x, f1, f2 = _fiber_fixture(2)
        start = {"x": 0.0, "y1": 0.0, "y2": 0.0, "t": 0.0}
        full = twisting_number(w, x, (f1, f2), start, 2 * math.pi)
        half1 = twisting_number(w, x, (f1, f2), start, math.pi)
        mid = {"x": 0.0, "y1": 0.0, "y2": 0.0, "t": math.pi}
        half2 = twisting_number(w, x, (f1, f2), mid, math.pi)
        assert abs(full.total_angle - half1.total_angle - half2.total_angle) < 1e-6

    def test_standard_engel_leaf(self):
        ch = Chart.build("r4", ["w", "x", "y", "z"],
                         bounds={c: (-1, 1) for c in "wxyz"})
        x_ = sym("x")
        wf = VectorFieldExpr.make(ch, {"w": 1})
        xgen = VectorFieldExpr.make(ch, {"y": 1, "z": x_, "x": sym("w")})
        f1 = VectorFieldExpr.make(ch, {"y": 1, "z": x_})
        f2 = VectorFieldExpr.make(ch, {"x": 1})
        res = twisting_number(wf, xgen, (f1, f2),
                              {"w": 0.0, "x": 0.0, "y": 0.0, "z": 0.0}, 1.0)
        assert res.half_turns == 0
        assert abs(res.total_angle - math.atan(1.0)) < 1e-3
