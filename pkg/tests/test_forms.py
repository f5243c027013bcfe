"""Exterior calculus: identities on random data plus the worked examples."""

import random
from fractions import Fraction

import pytest

from engelkit.chart import Chart
from engelkit.forms import (
    CoordMap,
    FormExpr,
    VectorFieldExpr,
    annihilator_of_fields,
    exterior_derivative,
    interior_product,
    lie_bracket,
    proportional_forms,
    pullback,
    pushforward,
    wedge,
)
from engelkit.scalar import ExprError, cos_of, num, sin_of, sym


def r4():
    return Chart.build("r4", ["w", "x", "y", "z"], bounds={c: (-1, 1) for c in "wxyz"})


def rng_expr(rng, chart):
    syms = [sym(c) for c in chart.coords]
    e = num(rng.randrange(-2, 3))
    for _ in range(rng.randrange(1, 4)):
        choice = rng.randrange(3)
        if choice == 0:
            e = e + rng.randrange(-2, 3) * syms[rng.randrange(len(syms))]
        elif choice == 1:
            e = e * syms[rng.randrange(len(syms))]
        else:
            e = e + sin_of(syms[rng.randrange(len(syms))])
    return e


def rng_form(rng, chart, degree):
    from itertools import combinations

    coeffs = {}
    for idx in combinations(range(chart.dim), degree):
        if rng.random() < 0.7:
            coeffs[idx] = rng_expr(rng, chart)
    return FormExpr.make(chart, degree, coeffs)


def test_spec_examples():
    ch = r4()
    x = sym("x")
    alpha = FormExpr.one_form(ch, {"z": 1, "y": -x})
    da = exterior_derivative(alpha)
    assert da == FormExpr.make(ch, 2, {(1, 2): num(-1)})  # -dx^dy
    top = wedge(alpha, da)
    # -dz^dx^dy = -dx^dy^dz
    assert top == FormExpr.make(ch, 3, {(1, 2, 3): num(-1)})
    assert interior_product(
        VectorFieldExpr.make(ch, {"z": 1}), FormExpr.make(ch, 2, {(1, 3): num(-1)})
    ) == FormExpr.one_form(ch, {"x": 1})  # i_dz (dz^dx) = dx


def test_dd_zero_random():
    rng = random.Random(7)
    ch = r4()
    for _ in range(20):
        k = rng.randrange(0, 3)
        w = rng_form(rng, ch, k)
        assert exterior_derivative(exterior_derivative(w)).is_zero()


def test_leibniz_random():
    rng = random.Random(8)
    ch = r4()
    for _ in range(12):
        k = rng.randrange(0, 2)
        a = rng_form(rng, ch, k)
        b = rng_form(rng, ch, rng.randrange(0, 3 - k))
        lhs = exterior_derivative(wedge(a, b))
        rhs = wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)).scale(
            num((-1) ** k)
        )
        assert (lhs - rhs).is_zero()


def test_jacobi_identity_random():
    rng = random.Random(9)
    ch = r4()
    for _ in range(8):
        fields = [
            VectorFieldExpr(ch, tuple(rng_expr(rng, ch) for _ in range(4)))
            for _ in range(3)
        ]
        u, v, w = fields
        total = (
            lie_bracket(u, lie_bracket(v, w))
            + lie_bracket(v, lie_bracket(w, u))
            + lie_bracket(w, lie_bracket(u, v))
        )
        assert total.is_zero()


def test_bracket_antisymmetry_and_bilinearity():
    ch = r4()
    x, w = sym("x"), sym("w")
    v = VectorFieldExpr.make(ch, {"y": 1, "z": x, "x": w})
    u = VectorFieldExpr.make(ch, {"w": 1, "x": x * w})
    assert lie_bracket(v, v).is_zero()
    assert (lie_bracket(v, u) + lie_bracket(u, v)).is_zero()
    s = lie_bracket(v.scale(num(3)), u)
    assert s == lie_bracket(v, u).scale(num(3))


def test_pullback_identity_and_functoriality():
    ch = r4()
    rng = random.Random(10)
    ident = CoordMap.identity(ch)
    for _ in range(6):
        w = rng_form(rng, ch, rng.randrange(1, 3))
        assert pullback(ident, w) == w
    # pullback of a wedge is the wedge of pullbacks
    x, y = sym("x"), sym("y")
    comps = {"w": sym("w") + x, "x": x, "y": y - x, "z": sym("z")}
    phi = CoordMap.make(ch, ch, comps)
    a = rng_form(rng, ch, 1)
    b = rng_form(rng, ch, 1)
    assert pullback(phi, wedge(a, b)) == wedge(pullback(phi, a), pullback(phi, b))


def test_pushforward_theta_rotation():
    """The twist map sends the first disc direction to the rotated frame."""
    ch = Chart.build(
        "r1", ["x", "y1", "y2", "t"],
        bounds={"x": (-1, 1), "y1": (-1, 1), "y2": (-1, 1)}, periodic=["t"],
    )
    x, y1, y2, t = sym("x"), sym("y1"), sym("y2"), sym("t")
    ct, st = cos_of(t), sin_of(t)
    comps = {"x": x, "y1": ct * y1 - st * y2, "y2": st * y1 + ct * y2, "t": t}
    inv = {"x": x, "y1": ct * y1 + st * y2, "y2": -st * y1 + ct * y2, "t": t}
    phi = CoordMap(ch, ch, CoordMap.make(ch, ch, comps).comps,
                   CoordMap.make(ch, ch, inv))
    v = VectorFieldExpr.make(ch, {"y1": 1})
    out = pushforward(phi, v)
    assert out == VectorFieldExpr.make(ch, {"y1": ct, "y2": st})


def test_pullback_fixed_coordinate():
    ch = r4()
    x, y1, y2, t = sym("w"), sym("x"), sym("y"), sym("z")
    # f fixes the second coordinate; pullback of its differential is itself
    comps = {"w": sym("w"), "x": sym("x"), "y": -sym("y") - 4 * sym("w") * sym("x"),
             "z": -sym("z")}
    phi = CoordMap.make(ch, ch, comps)
    dx = FormExpr.one_form(ch, {"x": 1})
    assert pullback(phi, dx) == dx


def test_pushforward_requires_inverse():
    ch = r4()
    phi = CoordMap.make(ch, ch, {c: sym(c) for c in ch.coords})
    with pytest.raises(ExprError):
        pushforward(phi, VectorFieldExpr.make(ch, {"w": 1}))


def test_annihilator():
    ch = r4()
    x, w = sym("x"), sym("w")
    fields = [
        VectorFieldExpr.make(ch, {"w": 1}),
        VectorFieldExpr.make(ch, {"y": 1, "z": x, "x": w}),
        VectorFieldExpr.make(ch, {"x": 1}),
    ]
    ann = annihilator_of_fields(fields)
    for f in fields:
        assert ann(f).is_zero()
    expected = FormExpr.one_form(ch, {"z": 1, "y": -x})
    factor = proportional_forms(ann, expected)
    assert factor is not None


def test_degree_errors():
    ch = r4()
    vol = FormExpr.volume(ch)
    with pytest.raises(ExprError):
        exterior_derivative(vol)
    with pytest.raises(ExprError):
        wedge(vol, FormExpr.one_form(ch, {"x": 1}))
