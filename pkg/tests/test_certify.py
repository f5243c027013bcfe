"""Interval certification: verdicts, witnesses, and the fuzzed soundness
property that a verified claim never hides a rational zero."""

import random
from fractions import Fraction

from engelkit.certify import (
    CertifyOptions,
    certify_nonvanishing,
    certify_nowhere_zero,
    interval_eval,
    point_sign,
)
from engelkit.chart import Chart
from engelkit.scalar import cos_of, num, sin_of, sym

x, y, t = sym("x"), sym("y"), sym("t")


def box_chart(**bounds):
    return Chart.build("box", list(bounds), bounds=bounds)


def test_verified_depth_zero():
    cert = certify_nonvanishing(1 + x**2, box_chart(x=(-1, 1)))
    assert cert.verified and cert.sign == 1 and cert.depth == 0


def test_refuted_with_exact_witness():
    cert = certify_nonvanishing(x, box_chart(x=(-1, 1)))
    assert cert.verdict == "refuted"
    assert cert.witness["x"] == 0


def test_refuted_by_sign_change():
    ch = Chart.build("c", ["t"], bounds={}, periodic=["t"])
    cert = certify_nonvanishing(cos_of(t), ch)
    assert cert.verdict == "refuted"
    assert cert.witness_pair is not None
    lo, hi = cert.witness_pair
    assert point_sign(cos_of(t), lo) < 0 < point_sign(cos_of(t), hi)


def test_constraint_domain():
    ch = Chart.build(
        "disc", ["x", "y"], bounds={"x": (-1, 1), "y": (-1, 1)},
        constraints=[1 - x**2 - y**2],
    )
    cert = certify_nonvanishing(x**2 + y**2 - 2, ch)
    assert cert.verified and cert.sign == -1


def test_annulus_contact_coefficient():
    q = sym("q")
    ch = Chart.build("ann", ["q"], bounds={"q": (Fraction(1, 4), 4)})
    cert = certify_nonvanishing(cos_of(q) ** 2 + sin_of(q) ** 2, ch)
    assert cert.verified and cert.depth == 0


def test_nowhere_zero_tuple():
    ch = box_chart(x=(-1, 1), y=(-1, 1))
    # (x, y) vanish together at the origin
    cert = certify_nowhere_zero([x, y], ch)
    assert cert.verdict == "refuted"
    assert cert.witness == {"x": 0, "y": 0}
    # (x, 1 + y^2): second component never vanishes
    cert2 = certify_nowhere_zero([x, 1 + y**2], ch)
    assert cert2.verified
    # (sin t, cos t) never vanish together
    ch2 = Chart.build("circ", ["t"], bounds={}, periodic=["t"])
    cert3 = certify_nowhere_zero([sin_of(t), cos_of(t)], ch2)
    assert cert3.verified


def test_interval_eval_soundness():
    e = x * x - x + num(1, 4)
    enc = interval_eval(e, {"x": (Fraction(0), Fraction(1))})
    # true range is [0, 1/4]; the naive enclosure must contain it and stay
    # within the dependency-widened bound [-3/4, 5/4]
    assert enc[0] <= 0 and enc[1] >= 0.25
    assert enc[0] >= -0.7500001 and enc[1] <= 1.2500001


def test_fuzz_no_false_verification():
    """A verified certificate never coexists with a rational zero."""
    rng = random.Random(4)
    ch = box_chart(x=(-2, 2), y=(-2, 2))
    for _ in range(60):
        # build a polynomial with a known rational root (x - a)(...) + optional offset
        a = Fraction(rng.randrange(-3, 4), rng.randrange(1, 4))
        c = rng.randrange(0, 2)
        e = (x - num(a)) * (1 + y**2) + num(c)
        cert = certify_nonvanishing(e, ch, opts=CertifyOptions(max_depth=8))
        if c == 0 and -2 <= a <= 2:
            assert cert.verdict != "verified"
        if cert.verdict == "verified":
            for _ in range(40):
                p = {
                    "x": Fraction(rng.randrange(-8, 9), 4),
                    "y": Fraction(rng.randrange(-8, 9), 4),
                }
                v = e.eval_exact(p)
                assert not v.is_zero()


def test_point_sign_escalation():
    # a value tiny but nonzero: sin(1/2)^2 + cos(1/2)^2 - 1 + 1/2^40
    e = sin_of(t) ** 2 + cos_of(t) ** 2 - 1 + num(1, 2**40)
    s = point_sign(e, {"t": Fraction(1, 2)})
    assert s == 1
