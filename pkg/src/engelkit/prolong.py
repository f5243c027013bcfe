"""Prolongation-type Engel structures and the model round-handle catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import iv

from .chart import Chart, Face, LevelSetFace, coordinate_face, graph_face
from .certify import (
    Certificate,
    CertifyOptions,
    REFUTED,
    VERIFIED,
    certify_nonvanishing,
    certify_nowhere_zero,
)
from .curves import CurvePiece, ParamCurve, rotation_number
from .forms import (
    CoordMap,
    FormExpr,
    VectorFieldExpr,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    proportional_forms,
    pullback,
    pushforward,
    sum_of_squares,
    wedge,
    wedge_fields_coeffs,
)
from .scalar import PiAffine, ScalarExpr, ZERO, as_expr, cos_of, num, sin_of, sym
from .structures import (
    Distribution,
    EngelCertificate,
    intersection_line_field,
    is_contact,
    is_engel,
    transversality,
)


class ModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lifting a 3-chart to N x S^1
# ---------------------------------------------------------------------------


def lift_chart(base: Chart, t: str = "t") -> Chart:
    if t in base.coords:
        raise ModelError(f"coordinate {t} already present")
    return Chart(
        base.name + "xS1",
        base.coords + (t,),
        dict(base.bounds, **{t: Chart.build("_", [t], periodic=[t]).bounds[t]}),
        base.constraints,
        base.periodic + (t,),
    )


def lift_field(v: VectorFieldExpr, chart4: Chart) -> VectorFieldExpr:
    return VectorFieldExpr(chart4, v.comps + (ZERO,))


def lift_form(w: FormExpr, chart4: Chart) -> FormExpr:
    return FormExpr.make(chart4, w.degree, dict(w.coeffs))


# ---------------------------------------------------------------------------
# perturbed prolongation
# ---------------------------------------------------------------------------


@dataclass
class ProlongationResult:
    distribution: Distribution
    w: VectorFieldExpr
    x: VectorFieldExpr
    beta: FormExpr
    contact_cert: Certificate
    frame_cert: Certificate
    engel: Optional[EngelCertificate]


def prolongation_engel_certificate(
    chart4: Chart,
    w: VectorFieldExpr,
    x: VectorFieldExpr,
    c1: VectorFieldExpr,
    c2: VectorFieldExpr,
    beta: FormExpr,
    opts: CertifyOptions = None,
) -> EngelCertificate:
    """Engel certificate specialized to prolongation-type spans.

    Since the contact field preserves ker(alpha), the bracket [W, X] stays in
    the span of (W, C1, C2), so W ^ X ^ [W,X] = g * (W ^ C1 ^ C2) for a
    scalar g.  The rank-3 condition splits into a t-independent frame
    certificate and a single scalar nonvanishing certificate; the
    even-contact form has t-independent coefficients.  Falls back to the
    generic certificate when the factorization does not hold exactly.
    """
    from .scalar import try_divide

    z = lie_bracket(w, x)
    full = wedge_fields_coeffs([w, x, z])
    base = wedge_fields_coeffs([w, c1, c2])
    g = None
    for idx, b in base.items():
        if b.is_zero():
            continue
        cand = try_divide(full[idx], b)
        if cand is None:
            continue
        if all((full[j] - cand * base[j]).is_zero() for j in full):
            g = cand
            break
    if g is None:
        dist = Distribution(chart4, (w, x), True, None)
        return is_engel(dist, opts=opts)
    frame_cert = certify_nowhere_zero(
        list(base.values()), chart4, claim=f"(W, C1, C2) frame on {chart4.name}", opts=opts
    )
    g_cert = certify_nonvanishing(
        g, chart4, claim=f"bracket-pairing scalar on {chart4.name}", opts=opts
    )
    if frame_cert.verified:
        rank3 = g_cert
    else:
        rank3 = frame_cert
    three = wedge(beta, exterior_derivative(beta))
    ec = certify_nowhere_zero(
        list(three.coeffs.values()),
        chart4,
        claim=f"even-contact condition on {chart4.name}",
        opts=opts,
    )
    from .forms import annihilator_of_fields

    return EngelCertificate(
        claim=f"Engel condition on {chart4.name} (prolongation form)",
        rank3=rank3,
        even_contact=ec,
        annihilator=annihilator_of_fields([w, x, z]),
    )


def perturbed_prolongation(
    alpha: FormExpr,
    v: VectorFieldExpr,
    c1: VectorFieldExpr,
    c2: VectorFieldExpr,
    eps: Fraction,
    k: int,
    t: str = "t",
    certify: bool = True,
    opts: CertifyOptions = None,
) -> ProlongationResult:
    """The span of W = d_t + eps*V and X_k = cos(kt) C1 + sin(kt) C2.

    ``alpha`` is a contact form on the 3-dimensional base; C1, C2 must frame
    its kernel.  The even-contact annihilator alpha - eps*alpha(V) dt is
    attached, and the Engel certificate is attempted when ``certify``.
    """
    base = alpha.chart
    eps = Fraction(eps)
    if not alpha.coeffs.get((0,), ZERO).free_symbols() <= set(base.coords):
        raise ModelError("alpha must live on the base chart")
    if not (alpha(c1).is_zero() and alpha(c2).is_zero()):
        raise ModelError("frame fields are not tangent to ker(alpha)")
    contact_cert = is_contact(alpha, opts=opts) if certify else Certificate("contact", VERIFIED)
    frame_cert = (
        certify_nowhere_zero(
            list(wedge_fields_coeffs([c1, c2]).values()),
            base,
            claim="kernel frame independence",
            opts=opts,
        )
        if certify
        else Certificate("frame", VERIFIED)
    )
    if certify and not frame_cert.verified:
        raise ModelError("frame degenerate: C1, C2 dependent somewhere")
    if k == 0 and eps != 0 and certify:
        dep = certify_nowhere_zero(
            list(wedge_fields_coeffs([c1, lie_bracket(v, c1)]).values()),
            base,
            claim="C1 and [V, C1] independence (k = 0)",
            opts=opts,
        )
        if not dep.verified:
            raise ModelError("k = 0 requires C1 and [V, C1] independent everywhere")

    chart4 = lift_chart(base, t)
    tt = sym(t)
    w = lift_field(v, chart4).scale(num(eps)) + VectorFieldExpr.make(chart4, {t: 1})
    x = lift_field(c1, chart4).scale(cos_of(k * tt)) + lift_field(c2, chart4).scale(
        sin_of(k * tt)
    )
    dist = Distribution(chart4, (w, x), True, None)
    av = alpha(v)
    beta = lift_form(alpha, chart4) + FormExpr.one_form(chart4, {t: -num(eps) * av})
    engel = None
    if certify:
        engel = prolongation_engel_certificate(
            chart4, w, x, lift_field(c1, chart4), lift_field(c2, chart4), beta, opts=opts
        )
    return ProlongationResult(dist, w, x, beta, contact_cert, frame_cert, engel)


# ---------------------------------------------------------------------------
# model handles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaceSpec:
    face: Face
    direction: str  # "out" | "in"


@dataclass(frozen=True)
class ModelPiece:
    """One chart piece of a model handle carrying prolongation data."""

    name: str
    base: Chart
    alpha: FormExpr
    v: VectorFieldExpr
    c1: VectorFieldExpr
    c2: VectorFieldExpr
    faces: Tuple[FaceSpec, ...] = ()


@dataclass(frozen=True)
class ContactPiece:
    """A 3-dimensional contact ingredient (index-3 handle pieces)."""

    name: str
    chart: Chart
    alpha: FormExpr
    v: VectorFieldExpr
    x: VectorFieldExpr
    faces: Tuple[FaceSpec, ...] = ()


@dataclass(frozen=True)
class RotationCheck:
    name: str
    expected: int


@dataclass(frozen=True)
class ModelHandle:
    model_id: str
    index: int
    eps: Fraction
    k: int
    params: Dict[str, object]
    pieces: Tuple[ModelPiece, ...]
    contact_pieces: Tuple[ContactPiece, ...] = ()
    rotation_checks: Tuple[RotationCheck, ...] = ()
    notes: Tuple[str, ...] = ()
    flip_fields: bool = False  # push all fields through a stored diffeo
    maps: Tuple = ()  # applied coordinate maps (history)


def _smoothstep(e: ScalarExpr) -> ScalarExpr:
    """C1 step 0 -> 1 on [0, 1] as a cubic in the given expression."""
    return 3 * e**2 - 2 * e**3


# -- R1 ---------------------------------------------------------------------


def _r1_base() -> Tuple[Chart, FormExpr, VectorFieldExpr, VectorFieldExpr, VectorFieldExpr]:
    ch = Chart.build(
        "h1",
        ["x", "y1", "y2"],
        bounds={"x": (-1, 1), "y1": (-1, 1), "y2": (-1, 1)},
        constraints=[1 - sym("y1") ** 2 - sym("y2") ** 2],
    )
    x, y1, y2 = sym("x"), sym("y1"), sym("y2")
    alpha = FormExpr.one_form(ch, {"y1": -1, "x": -y2, "y2": -x * Fraction(1, 2)})
    v = VectorFieldExpr.make(
        ch, {"y1": y1 * Fraction(1, 2), "y2": y2, "x": -x * Fraction(1, 2)}
    )
    c1 = VectorFieldExpr.make(ch, {"y2": 1, "x": -1, "y1": y2 - x * Fraction(1, 2)})
    c2 = VectorFieldExpr.make(
        ch, {"y2": -1, "x": -Fraction(1, 2), "y1": (y2 + x) * Fraction(1, 2)}
    )
    return ch, alpha, v, c1, c2


def _circle_face(chart4: Chart, name: str, y1: str = "y1", y2: str = "y2") -> Face:
    """The face {y1^2 + y2^2 = 1}, parametrized by an angle coordinate."""
    rest = tuple(c for c in chart4.coords if c not in (y1, y2))
    bounds = {c: chart4.bounds[c] for c in rest}
    fchart = Chart.build(
        chart4.name + ".circle",
        rest + ("eta",),
        bounds=bounds,
        periodic=tuple(c for c in chart4.periodic if c in rest) + ("eta",),
    )
    embed = {c: sym(c) for c in rest}
    embed[y1] = cos_of(sym("eta"))
    embed[y2] = sin_of(sym("eta"))
    tight = 1 - sym(y1) ** 2 - sym(y2) ** 2
    return Face(name, chart4, fchart, embed, tight)


def build_r1(k: int, eps: Fraction = Fraction(1)) -> ModelHandle:
    ch, alpha, v, c1, c2 = _r1_base()
    chart4 = lift_chart(ch)
    faces = (
        FaceSpec(coordinate_face(chart4, "x", "upper", "x=+1"), "in"),
        FaceSpec(coordinate_face(chart4, "x", "lower", "x=-1"), "in"),
        FaceSpec(_circle_face(chart4, "y-circle"), "out"),
    )
    piece = ModelPiece("R1", ch, alpha, v, c1, c2, faces)
    checks = (
        RotationCheck("gamma+", -abs(k)),
        RotationCheck("gamma-", -abs(k)),
        RotationCheck("z-circle", 0),
    )
    return ModelHandle("R1", 1, Fraction(eps), k, {}, (piece,), (), checks)


# -- R2 ---------------------------------------------------------------------


def _r2_vector_field(ch: Chart, g1: ScalarExpr, g2: ScalarExpr) -> VectorFieldExpr:
    phi = sym("phi")
    dg1 = g1.diff("x")
    dg2 = g2.diff("x")
    return VectorFieldExpr.make(
        ch,
        {
            "r": g1,
            "phi": -(dg1 * cos_of(phi) ** 2 + dg2 * sin_of(phi) * cos_of(phi)),
            "x": g2,
        },
    )


def _r2_piece(name, x_lo, x_hi, g1, g2, cap_face: bool, inner_face: bool, a) -> ModelPiece:
    r, phi, x = sym("r"), sym("phi"), sym("x")
    cons = []
    if cap_face:
        sign = 1 if Fraction(x_hi) > 0 else -1
        cons.append(Fraction(5, 4) - r**2 * Fraction(1, 2) - sign * x)
    ch = Chart.build(
        f"h2.{name}",
        ["r", "phi", "x"],
        bounds={"r": (Fraction(1, 2), 1), "x": (x_lo, x_hi)},
        constraints=cons,
        periodic=["phi"],
    )
    alpha = FormExpr.one_form(ch, {"r": cos_of(phi), "x": sin_of(phi)})
    v = _r2_vector_field(ch, g1, g2)
    c1 = VectorFieldExpr.make(ch, {"r": sin_of(phi), "x": -cos_of(phi)})
    c2 = VectorFieldExpr.make(ch, {"phi": 1})
    chart4 = lift_chart(ch)
    faces = []
    if inner_face:
        faces.append(FaceSpec(coordinate_face(chart4, "r", "upper", f"{name}.r=1"), "in"))
    if cap_face:
        sign = 1 if Fraction(x_hi) > 0 else -1
        graph = Fraction(5, 4) - sym("r") ** 2 * Fraction(1, 2)
        if sign < 0:
            graph = -graph
        lo_r, hi_r, extra = _r2_cap_face_range(x_lo, x_hi)
        f = graph_face(
            chart4,
            "x",
            graph,
            f"{name}.cap",
            face_bounds={"r": (lo_r, hi_r)},
            orient_inward_positive=(sign > 0),
        )
        if extra is not None:
            f = Face(
                f.name,
                f.ambient,
                Chart(
                    f.chart.name,
                    f.chart.coords,
                    f.chart.bounds,
                    f.chart.constraints + (extra,),
                    f.chart.periodic,
                ),
                f.embed,
                f.tight,
            )
        faces.append(FaceSpec(f, "out"))
    return ModelPiece(name, ch, alpha, v, c1, c2, tuple(faces))


def _r2_cap_face_range(x_lo, x_hi):
    """Face r-range for the cap portion over an x-interval of the handle."""
    lo_abs = min(abs(Fraction(x_lo)), abs(Fraction(x_hi)))
    hi_abs = max(abs(Fraction(x_lo)), abs(Fraction(x_hi)))
    # |x| = 5/4 - r^2/2  <=>  r^2 = 5/2 - 2|x|
    r2_hi = Fraction(5, 2) - 2 * lo_abs
    r2_lo = Fraction(5, 2) - 2 * hi_abs
    r2_lo = max(r2_lo, Fraction(1, 4))
    r2_hi = min(r2_hi, Fraction(1))
    # rational bounds containing [sqrt(r2_lo), sqrt(r2_hi)]
    lo = Fraction(1, 2)
    hi = Fraction(1)
    extra = None
    if r2_lo > Fraction(1, 4):
        extra = sym("r") ** 2 - num(r2_lo)
    if r2_hi < 1:
        extra2 = num(r2_hi) - sym("r") ** 2
        extra = extra2 if extra is None else extra * extra2
    if extra is not None and not isinstance(extra, ScalarExpr):
        extra = as_expr(extra)
    return lo, hi, extra


def build_r2(
    k: int,
    n: int = 0,
    a: Optional[int] = None,
    eps: Optional[Fraction] = None,
    opts: CertifyOptions = None,
) -> ModelHandle:
    if k == 0:
        raise ModelError("R2 requires k != 0")
    x = sym("x")
    notes: List[str] = []
    if a is None:
        a = search_r2_a(opts=opts)
        notes.append(f"transversality scale a = {a} found by search")
    a = int(a)
    if a <= 0:
        raise ModelError("R2 requires a > 0")

    def pieces_for(aa: int) -> Tuple[ModelPiece, ...]:
        s_up = _smoothstep(4 * x - 2)
        s_dn = _smoothstep(-4 * x - 2)
        g1_up = -1 + _smoothstep(4 * x - 3)
        g1_dn = -1 + _smoothstep(-4 * x - 3)
        return (
            _r2_piece("mid", Fraction(-1, 2), Fraction(1, 2), num(-1), ZERO, False, True, aa),
            _r2_piece("g2p", Fraction(1, 2), Fraction(3, 4), num(-1), aa * s_up, False, True, aa),
            _r2_piece("g2m", Fraction(-3, 4), Fraction(-1, 2), num(-1), -aa * s_dn, False, True, aa),
            _r2_piece("g1p", Fraction(3, 4), Fraction(1), as_expr(g1_up), num(aa), True, False, aa),
            _r2_piece("g1m", Fraction(-1), Fraction(-3, 4), as_expr(g1_dn), num(-aa), True, False, aa),
            _r2_piece("capp", Fraction(1), Fraction(9, 8), ZERO, num(aa), True, False, aa),
            _r2_piece("capm", Fraction(-9, 8), Fraction(-1), ZERO, num(-aa), True, False, aa),
        )

    if eps is None:
        eps = search_model_eps(pieces_for(a), opts=opts)
        notes.append(f"prolongation scale eps = {eps} found by search")
    checks = (RotationCheck("divide", k),)
    return ModelHandle(
        "R2", 2, Fraction(eps), k, {"n": n, "a": a}, pieces_for(a), (), checks, tuple(notes)
    )


def search_r2_a(max_a: int = 8, opts: CertifyOptions = None) -> int:
    """Smallest positive integer a certifying outward transversality on the cap.

    Candidates are screened at a shallow bisection depth (a failing a has a
    genuine tangency on the face closure, so screening cheaply is sound);
    the returned value is certified at the full depth by the caller's
    verification run.
    """
    screen = CertifyOptions(max_depth=5, prec=(opts.prec if opts else 64))
    for a in range(1, max_a + 1):
        ok = True
        for name in ("g1p", "capp"):
            if name == "g1p":
                x = sym("x")
                piece = _r2_piece("g1p", Fraction(3, 4), Fraction(1),
                                  as_expr(-1 + _smoothstep(4 * x - 3)), num(a), True, False, a)
            else:
                piece = _r2_piece("capp", Fraction(1), Fraction(9, 8), ZERO, num(a), True, False, a)
            spec = piece.faces[-1]
            cert = transversality(lift_field(piece.v, lift_chart(piece.base)), spec.face, opts=screen)
            if not (cert.verified and cert.sign == -1):
                ok = False
                break
        if ok:
            return a
    raise ModelError("no a <= %d certifies the cap transversality" % max_a)


def search_model_eps(
    pieces: Sequence[ModelPiece],
    candidates: Sequence[Fraction] = (
        Fraction(1),
        Fraction(1, 2),
        Fraction(1, 4),
        Fraction(1, 16),
        Fraction(1, 64),
        Fraction(1, 256),
        Fraction(1, 1024),
        Fraction(1, 4096),
    ),
    k_probe: int = 1,
    opts: CertifyOptions = None,
) -> Fraction:
    """Largest candidate eps whose Engel certificate passes on every piece.

    Candidates are screened at a shallow depth; the chosen eps is certified
    at full depth by the caller's verification run.
    """
    screen = CertifyOptions(max_depth=6, prec=(opts.prec if opts else 64))
    for eps in candidates:
        ok = True
        for piece in pieces:
            res = perturbed_prolongation(
                piece.alpha, piece.v, piece.c1, piece.c2, eps, k_probe,
                certify=True, opts=screen,
            )
            if res.engel is None or not res.engel.verified:
                ok = False
                break
        if ok:
            return eps
    raise ModelError("no candidate eps certifies the Engel condition")


# -- R0 ---------------------------------------------------------------------


def build_r0(
    k: int,
    r0sq: Fraction = Fraction(9, 2),
    eps: Optional[Fraction] = None,
    opts: CertifyOptions = None,
) -> ModelHandle:
    """Model on the round 0-handle: overtwisted ball (squared-radius chart).

    The chart coordinate q is the squared cylindrical radius; the contact
    form is cos(q) dz + sin(q) dphi.  The cylindrical axis q = 0 is excluded
    (coordinate singularity); the certification domain starts at q = 1/4.
    """
    if k == 0:
        raise ModelError("R0 uses k != 0")
    r0sq = Fraction(r0sq)
    q, z = sym("q"), sym("z")
    ch = Chart.build(
        "h0",
        ["q", "phi", "z"],
        bounds={"q": (Fraction(1, 4), r0sq), "z": (Fraction(-21, 10), Fraction(21, 10))},
        constraints=[num(r0sq) - q - z**2],
        periodic=["phi"],
    )
    phi = sym("phi")
    alpha = FormExpr.one_form(ch, {"z": cos_of(q), "phi": sin_of(q)})
    v = VectorFieldExpr.make(ch, {"q": sin_of(2 * q) * Fraction(1, 2), "z": z})
    c1 = VectorFieldExpr.make(ch, {"z": sin_of(q), "phi": -cos_of(q)})
    c2 = VectorFieldExpr.make(ch, {"q": 1})
    chart4 = lift_chart(ch)
    sphere = LevelSetFace("sphere", chart4, num(r0sq) - sym("q") - sym("z") ** 2)
    piece = ModelPiece("R0", ch, alpha, v, c1, c2, (FaceSpec(sphere, "out"),))
    notes = [
        "axis region q < 1/4 excluded (squared-radius chart)",
        f"boundary dividing set components: {r0_dividing_components(r0sq)}",
    ]
    if eps is None:
        eps = search_model_eps((piece,), k_probe=k, opts=opts)
        notes.append(f"prolongation scale eps = {eps} found by search")
    return ModelHandle("R0", 0, Fraction(eps), k, {"r0sq": r0sq}, (piece,), (), (), tuple(notes))


def r0_dividing_components(r0sq: Fraction) -> int:
    """Component count of the boundary-sphere dividing set for the ball model.

    The transverse contact field built from the Hamiltonian z cos(q) has
    dividing set {z cos(q) = 0} on the sphere q + z^2 = r0^2: the equator
    circle plus a pair of latitude circles for every odd multiple of pi/2
    below r0^2.  The count is 1 + 2 #{j >= 0 : (2j+1) pi/2 < r0^2}.
    """
    iv.prec = 128
    count = 1
    j = 0
    while True:
        bound = iv.pi * (2 * j + 1) / 2
        target = iv.mpf(r0sq.numerator) / iv.mpf(r0sq.denominator)
        if bound.b < target.a:
            count += 2
            j += 1
        elif bound.a > target.b:
            break
        else:
            raise ModelError("r0^2 too close to an odd multiple of pi/2")
    return count


# -- D2 (connected-sum model) ------------------------------------------------


def build_d2(eps: Fraction = Fraction(1)) -> ModelHandle:
    ch = Chart.build(
        "h1",
        ["x", "y1", "y2"],
        bounds={"x": (-1, 1), "y1": (-1, 1), "y2": (-1, 1)},
        constraints=[1 - sym("y1") ** 2 - sym("y2") ** 2],
    )
    x, y1, y2 = sym("x"), sym("y1"), sym("y2")
    alpha = FormExpr.one_form(ch, {"y1": 1, "x": -y2, "y2": -x * Fraction(1, 2)})
    v = VectorFieldExpr.make(
        ch, {"y1": -y1 * Fraction(1, 2), "y2": -y2, "x": x * Fraction(1, 2)}
    )
    c1 = VectorFieldExpr.make(ch, {"y1": y2, "x": 1})
    c2 = VectorFieldExpr.make(ch, {"y1": x * Fraction(1, 2), "y2": 1})
    chart4 = lift_chart(ch)
    faces = (
        FaceSpec(coordinate_face(chart4, "x", "upper", "x=+1"), "out"),
        FaceSpec(coordinate_face(chart4, "x", "lower", "x=-1"), "out"),
        FaceSpec(_circle_face(chart4, "y-circle"), "in"),
    )
    piece = ModelPiece("D2", ch, alpha, v, c1, c2, faces)
    checks = (RotationCheck("gamma+", -1), RotationCheck("gamma-", -1))
    return ModelHandle("D2", 2, Fraction(eps), 1, {}, (piece,), (), checks)


# -- R3 ---------------------------------------------------------------------


def build_r3(
    k: int = 1,
    r0sq: Fraction = Fraction(9, 2),
    eps: Optional[Fraction] = None,
    opts: CertifyOptions = None,
) -> ModelHandle:
    """The explicit ingredients of the index-3 model.

    Contact pieces h1 and h3 with their contact fields and Legendrian
    fields, plus the boundary piece: the overtwisted-ball prolongation with
    the contact field reversed so the characteristic field enters through
    the boundary sphere.
    """
    # h1 ingredient
    ch1 = Chart.build(
        "h1",
        ["x", "y1", "y2"],
        bounds={"x": (-1, 1), "y1": (-1, 1), "y2": (-1, 1)},
        constraints=[1 - sym("y1") ** 2 - sym("y2") ** 2],
    )
    x, y1, y2 = sym("x"), sym("y1"), sym("y2")
    a1 = FormExpr.one_form(ch1, {"y1": 1, "x": y2})
    v1 = VectorFieldExpr.make(ch1, {"y2": 2 * y2, "x": -x, "y1": y1})
    x1 = VectorFieldExpr.make(ch1, {"y2": 1, "y1": y2, "x": -1})
    h1_faces = (
        FaceSpec(coordinate_face(ch1, "x", "upper", "x=+1"), "in"),
        FaceSpec(coordinate_face(ch1, "x", "lower", "x=-1"), "in"),
        FaceSpec(LevelSetFace("y-circle", ch1, 1 - y1**2 - y2**2), "out"),
    )
    h1 = ContactPiece("h1", ch1, a1, v1, x1, h1_faces)

    # h3 ingredient
    ch3 = Chart.build(
        "h3",
        ["x", "y", "z"],
        bounds={"x": (-1, 1), "y": (-1, 1), "z": (-1, 1)},
        constraints=[1 - sym("x") ** 2 - sym("y") ** 2 - sym("z") ** 2],
    )
    xx, yy, zz = sym("x"), sym("y"), sym("z")
    a3 = FormExpr.one_form(ch3, {"z": 1, "y": xx})
    v3 = VectorFieldExpr.make(ch3, {"x": -xx, "y": -2 * yy, "z": -3 * zz})
    x3 = VectorFieldExpr.make(ch3, {"x": 1, "z": xx, "y": -1})
    h3_faces = (
        FaceSpec(LevelSetFace("sphere", ch3, 1 - xx**2 - yy**2 - zz**2), "in"),
    )
    h3 = ContactPiece("h3", ch3, a3, v3, x3, h3_faces)

    # boundary piece: ball model with inward contact field
    r0 = build_r0(k, r0sq=r0sq, eps=eps if eps is not None else None, opts=opts)
    bp = r0.pieces[0]
    v_in = -bp.v
    sphere = bp.faces[0].face
    boundary = ModelPiece("boundary", bp.base, bp.alpha, v_in, bp.c1, bp.c2,
                          (FaceSpec(sphere, "in"),))
    return ModelHandle(
        "R3", 3, r0.eps, k, {"r0sq": Fraction(r0sq)}, (boundary,), (h1, h3), (),
        r0.notes,
    )


# ---------------------------------------------------------------------------
# model verification
# ---------------------------------------------------------------------------


def piece_fields(piece: ModelPiece, eps: Fraction, k: int):
    chart4 = lift_chart(piece.base)
    tt = sym("t")
    w = lift_field(piece.v, chart4).scale(num(eps)) + VectorFieldExpr.make(chart4, {"t": 1})
    x = lift_field(piece.c1, chart4).scale(cos_of(k * tt)) + lift_field(
        piece.c2, chart4
    ).scale(sin_of(k * tt))
    av = piece.alpha(piece.v)
    beta = lift_form(piece.alpha, chart4) + FormExpr.one_form(chart4, {"t": -num(eps) * av})
    return chart4, w, x, beta


@dataclass
class FaceReport:
    name: str
    expected: str
    cert: Certificate
    direction_ok: bool

    def to_jsonable(self):
        return {
            "name": self.name,
            "expected": self.expected,
            "direction_ok": self.direction_ok,
            "certificate": self.cert.to_jsonable(),
        }


@dataclass
class PieceReport:
    name: str
    engel: EngelCertificate
    beta_matches: bool
    characteristic_identity: bool
    lie_identity: bool
    faces: List[FaceReport]

    @property
    def passed(self) -> bool:
        return (
            self.engel.verified
            and self.beta_matches
            and self.characteristic_identity
            and self.lie_identity
            and all(f.cert.verified and f.direction_ok for f in self.faces)
        )

    def to_jsonable(self):
        return {
            "name": self.name,
            "engel": self.engel.to_jsonable(),
            "beta_matches": self.beta_matches,
            "characteristic_identity": self.characteristic_identity,
            "lie_identity": self.lie_identity,
            "faces": [f.to_jsonable() for f in self.faces],
            "passed": self.passed,
        }


@dataclass
class ContactPieceReport:
    name: str
    contact: Certificate
    twist_nonvanishing: Certificate  # X ^ [V, X] != 0
    faces: List[FaceReport]

    @property
    def passed(self) -> bool:
        return (
            self.contact.verified
            and self.twist_nonvanishing.verified
            and all(f.cert.verified and f.direction_ok for f in self.faces)
        )

    def to_jsonable(self):
        return {
            "name": self.name,
            "contact": self.contact.to_jsonable(),
            "twist_nonvanishing": self.twist_nonvanishing.to_jsonable(),
            "faces": [f.to_jsonable() for f in self.faces],
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    model_id: str
    eps: str
    k: int
    params: Dict[str, object]
    pieces: List[PieceReport]
    contact_pieces: List[ContactPieceReport]
    rotations: Dict[str, Dict[str, int]]
    notes: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return (
            all(p.passed for p in self.pieces)
            and all(p.passed for p in self.contact_pieces)
            and all(r["computed"] == r["expected"] for r in self.rotations.values())
        )

    def to_jsonable(self):
        return {
            "model": self.model_id,
            "eps": self.eps,
            "k": self.k,
            "params": {k: str(v) for k, v in self.params.items()},
            "pieces": [p.to_jsonable() for p in self.pieces],
            "contact_pieces": [p.to_jsonable() for p in self.contact_pieces],
            "rotations": self.rotations,
            "notes": list(self.notes),
            "passed": self.passed,
        }


def _face_direction_ok(cert: Certificate, expected: str) -> bool:
    # the tight function decreases outward, so W(g) < 0 means outward
    if not cert.verified:
        return False
    return (cert.sign == -1) == (expected == "out")


def verify_fields(
    name: str,
    chart4: Chart,
    w: VectorFieldExpr,
    x: VectorFieldExpr,
    c1: VectorFieldExpr,
    c2: VectorFieldExpr,
    beta: FormExpr,
    faces: Sequence[FaceSpec],
    opts: CertifyOptions = None,
) -> PieceReport:
    engel = prolongation_engel_certificate(chart4, w, x, c1, c2, beta, opts=opts)
    match = False
    if engel.annihilator is not None:
        match = proportional_forms(engel.annihilator, beta) is not None
    dbeta = exterior_derivative(beta)
    char_ok = beta(w).is_zero() and wedge(interior_product(w, dbeta), beta).is_zero()
    lie_ok = wedge(lie_derivative_form(w, beta), beta).is_zero()
    face_reports = []
    for spec in faces:
        cert = transversality(w, spec.face, opts=opts)
        face_reports.append(FaceReport(spec.face.name, spec.direction, cert,
                                       _face_direction_ok(cert, spec.direction)))
    return PieceReport(name, engel, match, char_ok, lie_ok, face_reports)


def verify_piece(piece: ModelPiece, eps: Fraction, k: int, opts: CertifyOptions = None) -> PieceReport:
    chart4, w, x, beta = piece_fields(piece, eps, k)
    c1 = lift_field(piece.c1, chart4)
    c2 = lift_field(piece.c2, chart4)
    return verify_fields(piece.name, chart4, w, x, c1, c2, beta, piece.faces, opts=opts)


def verify_contact_piece(piece: ContactPiece, opts: CertifyOptions = None) -> ContactPieceReport:
    contact = is_contact(piece.alpha, opts=opts)
    minors = wedge_fields_coeffs([piece.x, lie_bracket(piece.v, piece.x)])
    tw = certify_nowhere_zero(
        list(minors.values()),
        piece.chart,
        claim=f"X and [V, X] independent on {piece.chart.name}",
        opts=opts,
    )
    faces = []
    for spec in piece.faces:
        cert = transversality(piece.v, spec.face, opts=opts)
        faces.append(FaceReport(spec.face.name, spec.direction, cert,
                                _face_direction_ok(cert, spec.direction)))
    return ContactPieceReport(piece.name, contact, tw, faces)


def model_rotation(handle: ModelHandle, which: str) -> int:
    """Rotation numbers along the model's check curves."""
    if handle.model_id in ("R1", "D2"):
        return _r1_like_rotation(handle, which)
    if handle.model_id == "R2":
        if which == "divide":
            return _r2_divide_rotation(handle)
    raise ModelError(f"no rotation check {which} for model {handle.model_id}")


def _restrict_to_face(vec: VectorFieldExpr, face: Face) -> VectorFieldExpr:
    comps = tuple(face.pull_scalar(vec.comp(c)) for c in face.chart.coords)
    return VectorFieldExpr(face.chart, comps)


def _face_contact_data(chart4, w, x, beta, face, opts: CertifyOptions = None):
    """Oriented intersection line field, the face contact form, and the
    contact orientation sign derived from the even-contact orientation.

    The sign is the d(beta)-orientation of the frame (L, M) where L and M
    are the projections along W of X and [W, X]; by the orientation
    conventions (L, M) is positively oriented for the contact structure.
    """
    import numpy as np

    dist = Distribution(chart4, (w, x), True, None)
    line, cert = intersection_line_field(dist, w, x, face, opts=opts)
    if line is None:
        raise ModelError(f"transversality fails on {face.name}: {cert.notes}")
    g = face.tight
    sgn = cert.sign
    z = lie_bracket(w, x)
    m_raw = z.scale(w(g)) - w.scale(z(g))
    m_field = VectorFieldExpr(
        face.chart,
        face.project_tangent({c: m_raw.comp(c) for c in chart4.coords}),
    ).scale(num(sgn))
    inclusion = CoordMap.make(face.chart, chart4, dict(face.embed))
    beta_face = pullback(inclusion, beta)
    dbf = exterior_derivative(beta_face)
    pairing = dbf(line, m_field)

    def orientation_sign_at(point_floats) -> int:
        val = pairing.eval_float(point_floats)
        if abs(val) < 1e-9:
            raise ModelError("contact orientation pairing degenerate at sample")
        return 1 if val > 0 else -1

    return line, beta_face, orientation_sign_at


def _line_field_on_face(handle: ModelHandle, piece: ModelPiece, face: Face,
                        opts: CertifyOptions = None):
    chart4, w, x, beta = piece_fields(piece, handle.eps, handle.k)
    line, beta_face, _ = _face_contact_data(chart4, w, x, beta, face, opts=opts)
    return line, beta_face


def _rotation_with_derived_sign(chart4, w, x, beta, face, curve, field=None,
                                ref=None, opts: CertifyOptions = None) -> int:
    line, beta_face, sign_at = _face_contact_data(chart4, w, x, beta, face, opts=opts)
    p0 = curve.point(0.37)
    sigma = sign_at(p0)
    reference = ref if ref is not None else line
    measured = field if field is not None else None
    if ref is not None and field is None:
        measured = line
    return rotation_number(
        curve, reference, field=measured, contact_form=beta_face,
        orientation_sign=sigma,
    )


def _r1_like_rotation(handle: ModelHandle, which: str) -> int:
    piece = handle.pieces[0]
    chart4, w, x, beta = piece_fields(piece, handle.eps, handle.k)
    if which in ("gamma+", "gamma-"):
        side = "upper" if which == "gamma+" else "lower"
        spec = next(s for s in piece.faces if s.face.name == f"x={'+1' if side == 'upper' else '-1'}")
        face = spec.face
        curve = ParamCurve.smooth(
            face.chart, {"y1": ZERO, "y2": ZERO, "t": sym("u")}, period_2pi=True
        )
        return _rotation_with_derived_sign(chart4, w, x, beta, face, curve)
    if which == "z-circle":
        spec = next(s for s in piece.faces if s.face.name == "y-circle")
        face = spec.face
        zref = VectorFieldExpr.make(
            face.chart, {"t": sin_of(sym("eta")), "x": cos_of(sym("eta")) * Fraction(1, 2)}
        )
        curve = ParamCurve.smooth(
            face.chart, {"x": ZERO, "eta": sym("u"), "t": ZERO}, period_2pi=True
        )
        return _rotation_with_derived_sign(chart4, w, x, beta, face, curve, ref=zref)
    raise ModelError(f"unknown rotation check {which}")


def _r2_divide_rotation(handle: ModelHandle) -> int:
    """Rotation along a Legendrian divide.

    The advertised model with positive divide rotation is the involution
    pushforward of the base model; both directions go through the same
    derived-orientation pipeline.
    """
    base_k = handle.k
    internal = handle if base_k < 0 else ModelHandle(
        handle.model_id, handle.index, handle.eps, -abs(base_k), handle.params,
        handle.pieces, handle.contact_pieces, (), handle.notes,
    )
    piece = next(p for p in internal.pieces if p.name == "mid")
    spec = next(s for s in piece.faces if s.face.name.endswith("r=1"))
    face = spec.face
    if base_k < 0:
        chart4, w, x, beta = piece_fields(piece, internal.eps, internal.k)
    else:
        pm = pushforward_model(internal, "involution")
        chart4, w, x, beta = pm.chart, pm.w, pm.x, pm.beta
    curve = ParamCurve.smooth(
        face.chart,
        {"phi": PiAffine(ZERO, 1), "x": ZERO, "t": sym("u")},
        period_2pi=True,
    )
    return _rotation_with_derived_sign(chart4, w, x, beta, face, curve)


def verify_model(handle: ModelHandle, opts: CertifyOptions = None,
                 with_rotations: bool = True) -> VerificationReport:
    pieces = [verify_piece(p, handle.eps, handle.k, opts=opts) for p in handle.pieces]
    cpieces = [verify_contact_piece(p, opts=opts) for p in handle.contact_pieces]
    rotations: Dict[str, Dict[str, int]] = {}
    if with_rotations:
        for check in handle.rotation_checks:
            computed = model_rotation(handle, check.name)
            rotations[check.name] = {"computed": computed, "expected": check.expected}
    return VerificationReport(
        handle.model_id, str(handle.eps), handle.k, handle.params,
        pieces, cpieces, rotations, handle.notes,
    )


# ---------------------------------------------------------------------------
# vertical modification of a transverse collar
# ---------------------------------------------------------------------------

# Rational stand-in for a full turn: the smallest convenient rational above
# 2 pi.  Trig arguments must have rational coefficients, so the collar angle
# gains slightly more than a full turn per unit of k; all class-level
# bookkeeping (windings, half-twist counts) stays exact.
FULL_TURN = Fraction(44, 7)


@dataclass
class VerticalModification:
    chart: Chart  # boundary x collar coordinate w in [0, 1]
    distribution: Distribution
    x_field: VectorFieldExpr
    engel: EngelCertificate
    far_angle: Fraction
    half_twists_added: int
    beta: FormExpr


def vertical_modification(
    boundary: Chart,
    x0: VectorFieldExpr,
    y0: VectorFieldExpr,
    g_end: Fraction,
    k: int,
    w: str = "w",
    opts: CertifyOptions = None,
) -> VerticalModification:
    """Extend an Engel collar so the far-face line field sits at a new angle.

    ``x0``, ``y0`` frame the contact structure on the 3-dimensional boundary
    chart; the collar distribution is the span of d_w and
    cos(g(w)) X0 + sin(g(w)) Y0 with g(w) = (g_end + k full turns) w.  The
    target angle g_end is a rational number of radians; full turns use the
    rational stand-in 44/7 > 2 pi, so the strictly-increasing and
    at-least-one-turn requirements hold on the nose.
    """
    g_end = Fraction(g_end)
    # requirement: g_end + 2 pi k >= 2 pi
    if not (k >= 1 and g_end >= 0):
        iv.prec = 128
        two_pi = 2 * iv.pi
        endpoint = iv.mpf(g_end.numerator) / iv.mpf(g_end.denominator) + two_pi * k
        if endpoint.b <= two_pi.a:
            raise ModelError("endpoint angle below one full turn; increase k")
        if not endpoint.a >= two_pi.b:
            raise ModelError("endpoint angle too close to one full turn to certify")
    slope = g_end + k * FULL_TURN
    if slope <= 0:
        raise ModelError("angle function must be strictly increasing")
    if w in boundary.coords:
        raise ModelError(f"coordinate {w} already used")
    chart4 = Chart(
        boundary.name + "x[0,1]",
        boundary.coords + (w,),
        dict(boundary.bounds, **{w: (Fraction(0), Fraction(1))}),
        boundary.constraints,
        boundary.periodic,
    )
    ghat = num(slope) * sym(w)
    x0l = VectorFieldExpr(chart4, x0.comps + (ZERO,))
    y0l = VectorFieldExpr(chart4, y0.comps + (ZERO,))
    xw = x0l.scale(cos_of(ghat)) + y0l.scale(sin_of(ghat))
    wfield = VectorFieldExpr.make(chart4, {w: 1})
    dist = Distribution(chart4, (wfield, xw), True, None)
    beta = annihilator_of_fields_4(wfield, x0l, y0l)
    engel = prolongation_engel_certificate(chart4, wfield, xw, x0l, y0l, beta, opts=opts)
    half = _half_twists(slope)
    return VerticalModification(chart4, dist, xw, engel, slope, half, beta)


def annihilator_of_fields_4(*fields):
    from .forms import annihilator_of_fields

    return annihilator_of_fields(list(fields))


def _half_twists(angle: Fraction) -> int:
    """floor(angle / pi), rigorously (angle rational, so no ties)."""
    iv.prec = 128
    a = iv.mpf(angle.numerator) / iv.mpf(angle.denominator)
    n = int(float(angle) / math.pi)
    for cand in (n - 1, n, n + 1):
        lo = iv.pi * cand
        hi = iv.pi * (cand + 1)
        if lo.b <= a.a and a.b < hi.a:
            return cand
    raise ModelError("angle too close to a multiple of pi")


# ---------------------------------------------------------------------------
# contact contraction on the inner boundary of the 1-handle model
# ---------------------------------------------------------------------------


def contact_contraction(s: Fraction, x_value: int = 1):
    """The radial contraction (y1, y2) -> (s y1, s y2) of the inner boundary.

    Returns the coordinate map and verifies the exact scaling identity: the
    pullback of the boundary contact form is s times the form.
    """
    s = Fraction(s)
    if not 0 < s < 1:
        raise ModelError("contraction factor must lie in (0, 1)")
    face = Chart.build(
        f"dminusR1.x={x_value}",
        ["y1", "y2", "t"],
        bounds={"y1": (-1, 1), "y2": (-1, 1)},
        constraints=[1 - sym("y1") ** 2 - sym("y2") ** 2],
        periodic=["t"],
    )
    y1, y2 = sym("y1"), sym("y2")
    beta_minus = FormExpr.one_form(
        face,
        {"y1": -1, "t": y1 * Fraction(1, 2), "y2": -Fraction(x_value) * Fraction(1, 2)},
    )
    comps = {"y1": s * y1, "y2": s * y2, "t": sym("t")}
    inv = {"y1": y1 * Fraction(1, s), "y2": y2 * Fraction(1, s), "t": sym("t")}
    fwd = CoordMap.make(face, face, comps)
    bwd = CoordMap.make(face, face, inv)
    phi = CoordMap(face, face, fwd.comps, bwd)
    pulled = pullback(phi, beta_minus)
    if not (pulled - beta_minus.scale(num(s))).is_zero():
        raise ModelError("contraction does not scale the contact form exactly")
    return phi, beta_minus


# ---------------------------------------------------------------------------
# pushforward by the catalog diffeomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PushedModel:
    """A model piece pushed forward by a catalog diffeomorphism.

    Holds the explicit product-chart data; ``contact_orientation_flip``
    records whether the map reverses the contact orientation on the
    transverse boundary (it flips the sign of rotation numbers).
    """

    model_id: str
    map_id: str
    chart: Chart
    w: VectorFieldExpr
    x: VectorFieldExpr
    c1: VectorFieldExpr
    c2: VectorFieldExpr
    beta: FormExpr
    faces: Tuple[FaceSpec, ...]
    contact_orientation_flip: bool
    k: int
    eps: Fraction


def _push_all(phi: CoordMap, fields, beta):
    pushed = [pushforward(phi, f) for f in fields]
    inv = phi.inverse
    beta_pushed = pullback(inv, beta)
    return pushed, beta_pushed


def pushforward_model(handle: ModelHandle, map_id: str, m: int = 1) -> PushedModel:
    """Push a catalog model forward by one of its documented diffeomorphisms.

    R1: "flip"  (x, y1, y2, t) -> (x, y1, -y2 - 4 x y1, -t), restricted to a
            small tube around the core curves so the image stays in the
            chart; reverses the contact orientation.
        "theta"  the m-twist (y1, y2) rotated by angle m t; global.
    R2: "involution"  (r, phi, x, t) -> (r, phi, -x, -t) on the mid piece.
    R0/R3: "flip"  (q, phi, z, t) -> (q, -phi, z, -t).
    """
    if handle.model_id in ("R1", "D2"):
        piece = handle.pieces[0]
        chart4, w, x, beta = piece_fields(piece, handle.eps, handle.k)
        c1 = lift_field(piece.c1, chart4)
        c2 = lift_field(piece.c2, chart4)
        xx, y1, y2, tt = sym("x"), sym("y1"), sym("y2"), sym("t")
        if map_id == "flip":
            small = chart4.restricted({"y1": (Fraction(-1, 8), Fraction(1, 8)),
                                       "y2": (Fraction(-1, 8), Fraction(1, 8))})
            target = Chart.build(
                chart4.name + ".flip",
                chart4.coords,
                bounds={"x": (-1, 1), "y1": (Fraction(-1, 8), Fraction(1, 8)),
                        "y2": (Fraction(-5, 8), Fraction(5, 8))},
                periodic=("t",),
            )
            comps = {"x": xx, "y1": y1, "y2": -y2 - 4 * xx * y1, "t": -tt}
            fwd = CoordMap.make(small, target, comps)
            bwd = CoordMap.make(target, small, comps)  # involution
            phi = CoordMap(small, target, fwd.comps, bwd)
            (w2, x2, c12, c22), beta2 = _push_all(phi, (w, x, c1, c2), beta)
            faces = (
                FaceSpec(coordinate_face(target, "x", "upper", "x=+1"), "in"),
                FaceSpec(coordinate_face(target, "x", "lower", "x=-1"), "in"),
            )
            return PushedModel(handle.model_id, map_id, target, w2, x2, c12, c22,
                               beta2, faces, True, handle.k, handle.eps)
        if map_id == "theta":
            ct, st = cos_of(m * tt), sin_of(m * tt)
            comps = {"x": xx, "y1": ct * y1 - st * y2, "y2": st * y1 + ct * y2, "t": tt}
            inv_comps = {"x": xx, "y1": ct * y1 + st * y2, "y2": -st * y1 + ct * y2, "t": tt}
            fwd = CoordMap.make(chart4, chart4, comps)
            bwd = CoordMap.make(chart4, chart4, inv_comps)
            phi = CoordMap(chart4, chart4, fwd.comps, bwd)
            (w2, x2, c12, c22), beta2 = _push_all(phi, (w, x, c1, c2), beta)
            return PushedModel(handle.model_id, f"theta_{m}", chart4, w2, x2, c12, c22,
                               beta2, piece.faces, False, handle.k, handle.eps)
    if handle.model_id == "R2" and map_id == "involution":
        piece = next(p for p in handle.pieces if p.name == "mid")
        chart4, w, x, beta = piece_fields(piece, handle.eps, handle.k)
        c1 = lift_field(piece.c1, chart4)
        c2 = lift_field(piece.c2, chart4)
        rr, ph, xx, tt = sym("r"), sym("phi"), sym("x"), sym("t")
        comps = {"r": rr, "phi": ph, "x": -xx, "t": -tt}
        fwd = CoordMap.make(chart4, chart4, comps)
        bwd = CoordMap.make(chart4, chart4, comps)
        phi = CoordMap(chart4, chart4, fwd.comps, bwd)
        (w2, x2, c12, c22), beta2 = _push_all(phi, (w, x, c1, c2), beta)
        return PushedModel("R2", map_id, chart4, w2, x2, c12, c22, beta2,
                           piece.faces, True, handle.k, handle.eps)
    if handle.model_id in ("R0", "R3") and map_id == "flip":
        piece = handle.pieces[0]
        chart4, w, x, beta = piece_fields(piece, handle.eps, handle.k)
        c1 = lift_field(piece.c1, chart4)
        c2 = lift_field(piece.c2, chart4)
        qq, ph, zz, tt = sym("q"), sym("phi"), sym("z"), sym("t")
        comps = {"q": qq, "phi": -ph, "z": zz, "t": -tt}
        fwd = CoordMap.make(chart4, chart4, comps)
        bwd = CoordMap.make(chart4, chart4, comps)
        phi = CoordMap(chart4, chart4, fwd.comps, bwd)
        (w2, x2, c12, c22), beta2 = _push_all(phi, (w, x, c1, c2), beta)
        return PushedModel(handle.model_id, map_id, chart4, w2, x2, c12, c22, beta2,
                           piece.faces, True, handle.k, handle.eps)
    raise ModelError(f"no catalog diffeomorphism {map_id} for model {handle.model_id}")


def verify_pushed(pm: PushedModel, opts: CertifyOptions = None) -> PieceReport:
    return verify_fields(
        f"{pm.model_id}.{pm.map_id}", pm.chart, pm.w, pm.x, pm.c1, pm.c2,
        pm.beta, pm.faces, opts=opts,
    )


def pushed_gamma_rotation(pm: PushedModel, side: str, opts: CertifyOptions = None) -> int:
    """Rotation number along gamma(+/-) for a pushed R1-type model."""
    face_name = "x=+1" if side == "+" else "x=-1"
    spec = next(s for s in pm.faces if s.face.name == face_name)
    face = spec.face
    curve = ParamCurve.smooth(
        face.chart, {"y1": ZERO, "y2": ZERO, "t": sym("u")}, period_2pi=True
    )
    return _rotation_with_derived_sign(pm.chart, pm.w, pm.x, pm.beta, face, curve,
                                       opts=opts)


def theta_framing_shift(handle: ModelHandle, m: int) -> bool:
    """Check that the m-twist acts on normal framings of gamma(+/-) exactly
    by the integer framing action: the Jacobian block on the normal
    directions along the curves is the rotation by angle m t."""
    piece = handle.pieces[0]
    chart4, _, _, _ = piece_fields(piece, handle.eps, handle.k)
    tt, y1, y2, xx = sym("t"), sym("y1"), sym("y2"), sym("x")
    ct, st = cos_of(m * tt), sin_of(m * tt)
    comps = {"x": xx, "y1": ct * y1 - st * y2, "y2": st * y1 + ct * y2, "t": tt}
    phi = CoordMap.make(chart4, chart4, comps)
    jac = phi.jacobian()
    iy1 = chart4.coords.index("y1")
    iy2 = chart4.coords.index("y2")
    on_gamma = {"y1": ZERO, "y2": ZERO}
    block = [
        [jac[iy1][iy1].subs(on_gamma), jac[iy1][iy2].subs(on_gamma)],
        [jac[iy2][iy1].subs(on_gamma), jac[iy2][iy2].subs(on_gamma)],
    ]
    return (
        (block[0][0] - ct).is_zero()
        and (block[0][1] + st).is_zero()
        and (block[1][0] - st).is_zero()
        and (block[1][1] - ct).is_zero()
    )


def r2_involution_strip_check(handle: ModelHandle) -> bool:
    """The involution preserves the contact structure on the strip
    |x| <= 1/2 of the inner boundary: the pulled-back form is an exact
    scalar multiple of the original there."""
    piece = next(p for p in handle.pieces if p.name == "mid")
    chart4, w, x, beta = piece_fields(piece, handle.eps, handle.k)
    face = next(s.face for s in piece.faces if s.face.name.endswith("r=1"))
    inclusion = CoordMap.make(face.chart, chart4, dict(face.embed))
    beta_face = pullback(inclusion, beta)
    ph, xx, tt = sym("phi"), sym("x"), sym("t")
    comps = {"phi": ph, "x": -xx, "t": -tt}
    inv = CoordMap.make(face.chart, face.chart, comps)
    pulled = pullback(inv, beta_face)
    return proportional_forms(pulled, beta_face) is not None


_MODEL_CACHE: Dict[Tuple, ModelHandle] = {}


def build_model(model_id: str, **params) -> ModelHandle:
    builders = {"R0": build_r0, "R1": build_r1, "R2": build_r2, "R3": build_r3, "D2": build_d2}
    if model_id not in builders:
        raise ModelError(f"unknown model {model_id}")
    key = (model_id, tuple(sorted((k, str(v)) for k, v in params.items())))
    if key not in _MODEL_CACHE:
        _MODEL_CACHE[key] = builders[model_id](**params)
    return _MODEL_CACHE[key]
