"""Checkers and constructors for contact, even-contact, and Engel structures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .chart import Chart, Face
from .certify import (
    Certificate,
    CertifyOptions,
    INCONCLUSIVE,
    REFUTED,
    VERIFIED,
    certify_nonvanishing,
    certify_nowhere_zero,
    point_sign,
)
from .forms import (
    CoordMap,
    FormExpr,
    VectorFieldExpr,
    annihilator_of_fields,
    det_expr,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    pullback,
    sum_of_squares,
    wedge,
    wedge_fields_coeffs,
)
from .scalar import ScalarExpr, ZERO, as_expr, num, sym, try_divide


class SolveError(ValueError):
    """A linear solve over the expression class failed; message names the pivot."""


def _form_symbols(w: FormExpr) -> set:
    syms = set()
    for c in w.coeffs.values():
        syms |= c.free_symbols()
    return syms


# The four sign conventions used for all orientation-sensitive outputs.
ORIENTATION_CONVENTIONS = (
    "W oriented => ambient oriented by (contact orientation, W)",
    "[D,D] oriented by (X, Y, [X,Y]) for oriented generators (X, Y) of D",
    "transverse hypersurfaces oriented by the induced contact structure",
    "contact orientation followed by W-orientation equals the [D,D] orientation",
)


@dataclass(frozen=True)
class Distribution:
    """Rank-r subbundle spanned by explicit vector fields."""

    chart: Chart
    fields: Tuple[VectorFieldExpr, ...]
    oriented: bool = True
    independence: Optional[Certificate] = None

    @staticmethod
    def span(
        fields: Sequence[VectorFieldExpr],
        certify: bool = True,
        opts: CertifyOptions = None,
    ) -> "Distribution":
        chart = fields[0].chart
        cert = None
        if certify:
            minors = wedge_fields_coeffs(list(fields))
            cert = certify_nowhere_zero(
                list(minors.values()),
                chart,
                claim=f"independence of {len(fields)} spanning fields on {chart.name}",
                opts=opts,
            )
        return Distribution(chart, tuple(fields), True, cert)

    @property
    def rank(self) -> int:
        return len(self.fields)


@dataclass(frozen=True)
class EvenContactData:
    beta: FormExpr
    characteristic_field: VectorFieldExpr
    conventions: Tuple[str, ...] = ORIENTATION_CONVENTIONS


@dataclass
class EngelCertificate:
    claim: str
    rank3: Certificate
    even_contact: Certificate
    annihilator: Optional[FormExpr]

    @property
    def verdict(self) -> str:
        if self.rank3.verdict == VERIFIED and self.even_contact.verdict == VERIFIED:
            return VERIFIED
        if REFUTED in (self.rank3.verdict, self.even_contact.verdict):
            return REFUTED
        return INCONCLUSIVE

    @property
    def verified(self) -> bool:
        return self.verdict == VERIFIED

    def __bool__(self):
        return self.verified

    def to_jsonable(self) -> dict:
        return {
            "claim": self.claim,
            "verdict": self.verdict,
            "rank3": self.rank3.to_jsonable(),
            "even_contact": self.even_contact.to_jsonable(),
        }


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------


def is_contact(alpha: FormExpr, opts: CertifyOptions = None) -> Certificate:
    """alpha ^ d(alpha) nonvanishing on a 3-dimensional chart."""
    if alpha.degree != 1 or alpha.chart.dim != 3:
        raise ValueError("is_contact expects a 1-form on a 3-dimensional chart")
    top = wedge(alpha, exterior_derivative(alpha))
    coeff = top.coeffs.get((0, 1, 2), ZERO)
    return certify_nonvanishing(
        coeff, alpha.chart, claim=f"contact condition on {alpha.chart.name}", opts=opts
    )


def is_even_contact(beta: FormExpr, opts: CertifyOptions = None) -> Certificate:
    """beta ^ d(beta) nonvanishing as a 3-form on a 4-dimensional chart."""
    if beta.degree != 1 or beta.chart.dim != 4:
        raise ValueError("is_even_contact expects a 1-form on a 4-dimensional chart")
    three = wedge(beta, exterior_derivative(beta))
    return certify_nowhere_zero(
        list(three.coeffs.values()),
        beta.chart,
        claim=f"even-contact condition on {beta.chart.name}",
        opts=opts,
    )


def is_engel(dist: Distribution, opts: CertifyOptions = None) -> EngelCertificate:
    """Certify rank[D,D] = 3 and that its annihilator is even contact."""
    if dist.rank != 2 or dist.chart.dim != 4:
        raise ValueError("is_engel expects a rank-2 distribution on a 4-dim chart")
    x, y = dist.fields
    z = lie_bracket(x, y)
    minors = wedge_fields_coeffs([x, y, z])
    rank3 = certify_nowhere_zero(
        list(minors.values()),
        dist.chart,
        claim=f"rank-3 condition on {dist.chart.name}",
        opts=opts,
    )
    beta = annihilator_of_fields([x, y, z])
    ec = is_even_contact(beta, opts=opts)
    return EngelCertificate(
        claim=f"Engel condition on {dist.chart.name}",
        rank3=rank3,
        even_contact=ec,
        annihilator=beta,
    )


def characteristic_foliation(
    beta: FormExpr, normalize: Optional[str] = None
) -> VectorFieldExpr:
    """The kernel direction of d(beta) inside ker(beta), on a 4-chart.

    Computed as the volume-dual of beta ^ d(beta); no division is needed.
    When ``normalize`` names a coordinate, the field is rescaled so that
    component is exactly 1 (requires exact divisibility).
    """
    chart = beta.chart
    if beta.degree != 1 or chart.dim != 4:
        raise ValueError("characteristic_foliation expects a 1-form on a 4-chart")
    three = wedge(beta, exterior_derivative(beta))
    comps = [ZERO] * 4
    full = tuple(range(4))
    for idx, c in three.coeffs.items():
        (i,) = set(full) - set(idx)
        pos = i  # sign of dx_i ^ dx_idx = vol
        sign = (-1) ** pos
        comps[i] = sign * c
    w = VectorFieldExpr(chart, tuple(comps))
    if normalize is not None:
        pivot = w.comp(normalize)
        if pivot.is_zero():
            raise SolveError(f"normalizing component {normalize} vanishes identically")
        scaled = []
        for c in w.comps:
            q = try_divide(c, pivot)
            if q is None:
                raise SolveError(
                    f"characteristic field not expressible with {normalize}-component 1"
                )
            scaled.append(q)
        w = VectorFieldExpr(chart, tuple(scaled))
    return w


def check_W_in_D(dist: Distribution, w: VectorFieldExpr) -> Certificate:
    """Certify W ^ X ^ Y == 0 symbolically (W lies in the span of D)."""
    minors = wedge_fields_coeffs([w, *dist.fields])
    claim = f"W tangent to D on {dist.chart.name}"
    if all(m.is_zero() for m in minors.values()):
        return Certificate(claim, VERIFIED, notes="symbolic canonical zero")
    centre = dist.chart.center()
    for m in minors.values():
        if not m.is_zero():
            s = point_sign(m, centre)
            if s is not None and s != 0:
                return Certificate(claim, REFUTED, witness=centre, notes="wedge is nonzero")
    return Certificate(claim, REFUTED, notes="wedge not canonically zero")


# ---------------------------------------------------------------------------
# linear solves over the expression class
# ---------------------------------------------------------------------------


def solve_linear(rows: List[Tuple[List[ScalarExpr], ScalarExpr]], n: int) -> List[ScalarExpr]:
    """Solve a (possibly overdetermined) linear system with expression entries.

    Fraction-free elimination; pivots preferring rational constants.  Raises
    SolveError when a needed quotient does not exist in the class or the
    system is inconsistent/underdetermined.
    """
    mat = [[as_expr(c) for c in coeffs] + [as_expr(rhs)] for coeffs, rhs in rows]
    pivot_rows: List[int] = []
    pivot_cols: List[int] = []
    used = set()
    for col in range(n):
        best = None
        for r, row in enumerate(mat):
            if r in used or row[col].is_zero():
                continue
            score = (0 if row[col].is_rational() else 1, len(row[col].terms))
            if best is None or score < best[0]:
                best = (score, r)
        if best is None:
            continue
        prow = best[1]
        used.add(prow)
        pivot_rows.append(prow)
        pivot_cols.append(col)
        p = mat[prow][col]
        for r, row in enumerate(mat):
            if r == prow or row[col].is_zero():
                continue
            f = row[col]
            mat[r] = [p * row[j] - f * mat[prow][j] for j in range(n + 1)]
    if len(pivot_cols) < n:
        missing = sorted(set(range(n)) - set(pivot_cols))
        raise SolveError(f"system underdetermined; no pivot for unknowns {missing}")
    # consistency of untouched rows
    for r, row in enumerate(mat):
        if r in used:
            continue
        if any(not row[j].is_zero() for j in range(n)) or not row[n].is_zero():
            if all(row[j].is_zero() for j in range(n)) and not row[n].is_zero():
                raise SolveError("inconsistent linear system")
    # back substitution in pivot order (work from the last pivot up)
    sol: List[Optional[ScalarExpr]] = [None] * n
    for prow, pcol in sorted(zip(pivot_rows, pivot_cols), key=lambda t: -t[1]):
        rhs = mat[prow][n]
        for j in range(n):
            if j == pcol or mat[prow][j].is_zero():
                continue
            if sol[j] is None:
                raise SolveError("unexpected elimination pattern")
            rhs = rhs - mat[prow][j] * sol[j]
        q = try_divide(rhs, mat[prow][pcol])
        if q is None:
            raise SolveError(
                f"pivot minor {mat[prow][pcol]!r} does not divide; "
                "no globally expressible solution on this chart"
            )
        sol[pcol] = q
    # safety: verify
    for coeffs, rhs in rows:
        acc = ZERO
        for c, s in zip(coeffs, sol):
            acc = acc + as_expr(c) * s
        if not (acc - as_expr(rhs)).is_zero():
            raise SolveError("solution verification failed")
    return [s for s in sol]


def reeb_field(alpha: FormExpr) -> VectorFieldExpr:
    """Unique R with alpha(R) = 1 and i_R d(alpha) = 0."""
    chart = alpha.chart
    n = chart.dim
    da = exterior_derivative(alpha)
    unit = [VectorFieldExpr(chart, tuple(num(1 if j == i else 0) for j in range(n))) for i in range(n)]
    rows: List[Tuple[List[ScalarExpr], ScalarExpr]] = []
    rows.append(([alpha(unit[i]) for i in range(n)], num(1)))
    for j in range(n):
        # component j of i_R da: sum_i R^i da(e_i, e_j)
        rows.append(([da(unit[i], unit[j]) for i in range(n)], ZERO))
    sol = solve_linear(rows, n)
    return VectorFieldExpr(chart, tuple(sol))


def kernel_frame(
    alpha: FormExpr, opts: CertifyOptions = None, cert_chart: Chart = None
) -> Tuple[VectorFieldExpr, VectorFieldExpr]:
    """A global frame (E1, E2) of ker(alpha) on a 3-chart with d(alpha)(E1,E2) > 0.

    Built from cross products with a coordinate axis that is certified to be
    nowhere parallel to the coefficient vector of alpha.  ``cert_chart`` may
    extend the chart with bounded parameter symbols.
    """
    chart = alpha.chart
    ccrt = cert_chart or chart
    if chart.dim != 3 or alpha.degree != 1:
        raise ValueError("kernel_frame expects a 1-form on a 3-chart")
    b = [alpha.coeffs.get((i,), ZERO) for i in range(3)]
    chosen = None
    for axis in range(3):
        others = [b[i] for i in range(3) if i != axis]
        cert = certify_nowhere_zero(
            others, ccrt,
            claim=f"axis {chart.coords[axis]} nowhere parallel to ker annihilator",
            opts=opts,
        )
        if cert.verified:
            chosen = axis
            break
    if chosen is None:
        raise SolveError("no coordinate axis is certified non-parallel to the form")

    def cross(u, v):
        return [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]

    e = [num(1 if i == chosen else 0) for i in range(3)]
    u = cross(b, e)
    v = cross(b, u)
    e1 = VectorFieldExpr(chart, tuple(u))
    e2 = VectorFieldExpr(chart, tuple(v))
    da = exterior_derivative(alpha)
    pairing = da(e1, e2)
    cert = certify_nonvanishing(pairing, ccrt, claim="frame orientation pairing", opts=opts)
    if cert.verified and cert.sign < 0:
        e1, e2 = e2, e1
    return e1, e2


def contact_field_from_function(alpha: FormExpr, f: ScalarExpr, opts: CertifyOptions = None) -> VectorFieldExpr:
    """The contact vector field V with alpha(V) = f."""
    f = as_expr(f)
    chart = alpha.chart
    r = reeb_field(alpha)
    e1, e2 = kernel_frame(alpha, opts=opts)
    da = exterior_derivative(alpha)
    delta = da(e1, e2)
    df_e1 = e1(f)
    df_e2 = e2(f)
    y2 = try_divide(df_e1, delta)
    y1 = try_divide(-df_e2, delta)
    if y1 is None or y2 is None:
        raise SolveError("frame pairing does not divide the differentials on this chart")
    v = r.scale(f) + e1.scale(y1) + e2.scale(y2)
    # defining identities, checked symbolically
    if not (alpha(v) - f).is_zero():
        raise SolveError("contact field construction failed: alpha(V) != f")
    lv = lie_derivative_form(v, alpha)
    if not wedge(lv, alpha).is_zero():
        raise SolveError("contact field construction failed: L_V alpha not proportional")
    return v


@dataclass(frozen=True)
class RationalField:
    """A vector field with a common scalar denominator (for flows)."""

    numerator: VectorFieldExpr
    denominator: ScalarExpr

    def eval_float(self, point: Dict[str, float]) -> List[float]:
        d = self.denominator.eval_float(point)
        return [c.eval_float(point) / d for c in self.numerator.comps]

    def as_plain(self) -> Optional[VectorFieldExpr]:
        if self.denominator == num(1):
            return self.numerator
        den_size = len(self.denominator.terms)
        if any(len(c.terms) * den_size > 600 for c in self.numerator.comps):
            return None  # division attempt too costly; keep the pair
        comps = [try_divide(c, self.denominator) for c in self.numerator.comps]
        if any(c is None for c in comps):
            return None
        return VectorFieldExpr(self.numerator.chart, tuple(comps))


def gray_field(
    alpha_s: FormExpr,
    s: str = "s",
    s_range: Tuple = (0, 1),
    opts: CertifyOptions = None,
) -> RationalField:
    """The vector field Z(s) tangent to ker(alpha_s) with
    i_{Z} d(alpha_s) = -(d/ds alpha_s) on ker(alpha_s).

    The parameter s appears in the coefficients of alpha_s; the chart is the
    3-dimensional space chart.  Returned with an explicit denominator.
    """
    from .chart import with_params

    chart = alpha_s.chart
    if s in chart.coords:
        raise ValueError("the deformation parameter must not be a chart coordinate")
    cert_chart = (
        with_params(chart, {s: s_range}) if s in _form_symbols(alpha_s) else chart
    )
    adot = FormExpr.make(chart, 1, {k: c.diff(s) for k, c in alpha_s.coeffs.items()})
    e1, e2 = kernel_frame(alpha_s, opts=opts, cert_chart=cert_chart)
    da = exterior_derivative(alpha_s)
    delta = da(e1, e2)
    # Z = z1 E1 + z2 E2; da(Z,E1) = -adot(E1), da(Z,E2) = -adot(E2)
    z2_num = adot(e1)
    z1_num = -adot(e2)
    numerator = e1.scale(z1_num) + e2.scale(z2_num)
    plain = RationalField(numerator, delta).as_plain()
    if plain is not None:
        return RationalField(plain, num(1))
    return RationalField(numerator, delta)


@dataclass
class GrayFlowResult:
    points: List[Dict[str, float]]  # final positions of tracked points
    residuals: List[float]
    max_residual: float
    steps: int


def gray_flow(
    alpha_s: FormExpr,
    steps: int,
    initial_points: Sequence[Dict[str, float]],
    s: str = "s",
    s_range: Tuple[float, float] = (0.0, 1.0),
    opts: CertifyOptions = None,
) -> GrayFlowResult:
    """Integrate the time-dependent field of ``gray_field`` with fixed-step RK4.

    The flow Jacobian at each tracked point is recovered from displaced
    trajectories by a fourth-order central difference with displacement
    tied to the step size, so the reported proportionality residual between
    the pulled-back final form and the initial form converges at fourth
    order under step refinement (halving the step size divides it by about
    sixteen).  The residual is the normalized cross-product norm.
    """
    chart = alpha_s.chart
    z = gray_field(alpha_s, s=s, opts=opts)
    coords = chart.coords
    n = len(coords)
    num_comps = z.numerator.comps
    den = z.denominator

    def field(sval: float, pt: List[float]) -> List[float]:
        env = dict(zip(coords, pt))
        env[s] = sval
        d = den.eval_float(env)
        return [c.eval_float(env) / d for c in num_comps]

    s0, s1 = s_range
    h = (s1 - s0) / steps

    def flow(p: List[float]) -> List[float]:
        pt = list(p)
        sval = s0
        for _ in range(steps):
            k1 = field(sval, pt)
            k2 = field(sval + h / 2, [x + h / 2 * k for x, k in zip(pt, k1)])
            k3 = field(sval + h / 2, [x + h / 2 * k for x, k in zip(pt, k2)])
            k4 = field(sval + h, [x + h * k for x, k in zip(pt, k3)])
            pt = [x + h / 6 * (a + 2 * b + 2 * c + d)
                  for x, a, b, c, d in zip(pt, k1, k2, k3, k4)]
            sval += h
        return pt

    def alpha_vec(sval, pt):
        env = dict(zip(coords, pt))
        env[s] = sval
        return [alpha_s.coeffs.get((i,), ZERO).eval_float(env) for i in range(n)]

    delta = abs(h)
    finals = []
    residuals = []
    for p0 in initial_points:
        base = [float(p0[c]) for c in coords]
        pt = flow(base)
        jmat = [[0.0] * n for _ in range(n)]
        for j in range(n):
            shifts = {}
            for mult in (-2, -1, 1, 2):
                q = list(base)
                q[j] += mult * delta
                shifts[mult] = flow(q)
            for i in range(n):
                jmat[i][j] = (
                    -shifts[2][i] + 8 * shifts[1][i] - 8 * shifts[-1][i] + shifts[-2][i]
                ) / (12 * delta)
        a1 = alpha_vec(s1, pt)
        pulled = [sum(jmat[i][j] * a1[i] for i in range(n)) for j in range(n)]
        a0 = alpha_vec(s0, base)
        cross2 = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                cross2 += (pulled[i] * a0[j] - pulled[j] * a0[i]) ** 2
        norm = math.sqrt(sum(x * x for x in pulled)) * math.sqrt(sum(x * x for x in a0))
        residuals.append(math.sqrt(cross2) / norm if norm else float("inf"))
        finals.append(dict(zip(coords, pt)))
    return GrayFlowResult(finals, residuals, max(residuals) if residuals else 0.0, steps)


# ---------------------------------------------------------------------------
# transverse hypersurfaces
# ---------------------------------------------------------------------------


def transversality(
    w: VectorFieldExpr, face, opts: CertifyOptions = None
) -> Certificate:
    """Certify W(g) nonvanishing on the face, g the tight domain function.

    sign = -1 means W points outward (g decreases outward), +1 inward.
    Accepts parametrized faces (pullback onto the face chart) and level-set
    faces (certification constrained to the zero set).
    """
    from .chart import LevelSetFace

    if isinstance(face, LevelSetFace):
        return certify_nonvanishing(
            w(face.tight),
            face.constrained_chart(),
            claim=f"transversality of W to {face.name}",
            opts=opts,
        )
    pairing = face.pull_scalar(w(face.tight))
    return certify_nonvanishing(
        pairing, face.chart, claim=f"transversality of W to {face.name}", opts=opts
    )


def induced_contact_on_transversal(
    beta: FormExpr,
    w: VectorFieldExpr,
    face: Face,
    opts: CertifyOptions = None,
):
    """Pull back the even-contact form to a transverse face.

    Returns (form on the face chart, transversality certificate, contact
    certificate).
    """
    trans = transversality(w, face, opts=opts)
    inclusion = CoordMap.make(face.chart, beta.chart, dict(face.embed))
    induced = pullback(inclusion, beta)
    contact = None
    if trans.verified:
        contact = is_contact(induced, opts=opts)
    return induced, trans, contact


def intersection_line_field(
    dist: Distribution,
    w: VectorFieldExpr,
    x: VectorFieldExpr,
    face: Face,
    opts: CertifyOptions = None,
) -> Tuple[VectorFieldExpr, Certificate]:
    """Spanning field of TN /\\ D on a transverse face N.

    ``w`` and ``x`` are the oriented generators of D with w spanning the
    characteristic direction.  The result is oriented so that (W, L) matches
    the (w, x) orientation of D.
    """
    trans = transversality(w, face, opts=opts)
    if not trans.verified:
        return None, trans
    g = face.tight
    sgn = trans.sign
    raw = x.scale(w(g)) - w.scale(x(g))
    oriented = raw.scale(num(sgn))
    comps = face.project_tangent(
        {c: oriented.comp(c) for c in dist.chart.coords}
    )
    return VectorFieldExpr(face.chart, tuple(comps)), trans


# ---------------------------------------------------------------------------
# singular foliations on surfaces
# ---------------------------------------------------------------------------


@dataclass
class SingularPoint:
    point: Dict[str, Fraction]
    kind: str  # "elliptic" | "hyperbolic"
    sign: int  # +1 positive, -1 negative


@dataclass
class SingularFoliationReport:
    surface: CoordMap
    components: Tuple[ScalarExpr, ScalarExpr]  # pulled-back alpha = A du + B dv
    singular_points: List[SingularPoint]
    degenerate_loci: List[str]
    unresolved_boxes: int

    @property
    def nondegenerate(self) -> bool:
        return not self.degenerate_loci and self.unresolved_boxes == 0


def isolate_zeros_1d(
    expr: ScalarExpr, coord: str, lo: Fraction, hi: Fraction, depth: int = 18
) -> List[Tuple[Fraction, Fraction]]:
    """Isolating intervals for the zeros of a univariate expression.

    Uses bisection with rigorous point signs at dyadic endpoints; assumes
    simple zeros (intervals are returned when the endpoint signs differ or
    the point is an exact zero).
    """
    lo, hi = Fraction(lo), Fraction(hi)
    out: List[Tuple[Fraction, Fraction]] = []

    def sign_at(v: Fraction) -> int:
        s = point_sign(expr, {coord: v})
        if s is None:
            raise SolveError("cannot determine point sign")
        return s

    def sweep(a: Fraction, b: Fraction, sa: int, sb: int, d: int):
        if sa == 0:
            out.append((a, a))
            sa = sign_at(a + (b - a) / 16)
            a = a + (b - a) / 16
        if sb == 0:
            b2 = b - (b - a) / 16
            sweep(a, b2, sa, sign_at(b2), d)
            out.append((b, b))
            return
        if sa != sb:
            if d == 0:
                out.append((a, b))
                return
            m = (a + b) / 2
            sm = sign_at(m)
            sweep(a, m, sa, sm, d - 1)
            sweep(m, b, sm, sb, d - 1)
        else:
            # could still hide an even number of zeros; refine a bounded amount
            if d > depth - 6:
                m = (a + b) / 2
                sm = sign_at(m)
                if sm != sa:
                    sweep(a, m, sa, sm, d - 1)
                    sweep(m, b, sm, sb, d - 1)

    sweep(lo, hi, sign_at(lo), sign_at(hi), depth)
    # merge adjacent intervals
    out.sort()
    merged: List[Tuple[Fraction, Fraction]] = []
    for seg in out:
        if merged and seg[0] <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(seg[1], merged[-1][1]))
        else:
            merged.append(seg)
    return merged


def singular_foliation(
    alpha: FormExpr,
    surface: CoordMap,
    opts: CertifyOptions = None,
) -> SingularFoliationReport:
    """The singular foliation induced on a parametrized surface.

    The pulled-back form is A du + B dv; singularities are the common zeros
    of (A, B); nondegenerate ones are classified by the sign of the Jacobian
    determinant of the foliation field (B, -A); the sign of a singularity
    compares the contact and surface orientations via the pulled-back
    2-form d(alpha).
    """
    opts = opts or CertifyOptions()
    pulled = pullback(surface, alpha)
    fchart = surface.source
    if fchart.dim != 2:
        raise ValueError("surface chart must be 2-dimensional")
    a = pulled.coeffs.get((0,), ZERO)
    b = pulled.coeffs.get((1,), ZERO)
    u, v = fchart.coords
    degenerate: List[str] = []
    sing: List[SingularPoint] = []
    unresolved = 0

    if a.is_zero() and b.is_zero():
        degenerate.append("pulled-back form vanishes identically")
        return SingularFoliationReport(surface, (a, b), [], degenerate, 0)
    if a.is_zero() or b.is_zero():
        nz = b if a.is_zero() else a
        which = v if a.is_zero() else u
        other = u if a.is_zero() else v
        # locus is {nz = 0}: a union of curves when nz depends on one coord only
        if nz.free_symbols() <= {which} or nz.free_symbols() <= {other}:
            dep = next(iter(nz.free_symbols()), other)
            lo, hi = fchart.bounds[dep]
            zeros = isolate_zeros_1d(nz, dep, lo, hi)
            for z in zeros:
                degenerate.append(
                    f"singular curve {dep} in [{z[0]}, {z[1]}] (locus of {nz!r})"
                )
        else:
            degenerate.append(f"one component vanishes identically; locus of {nz!r}")
        return SingularFoliationReport(surface, (a, b), [], degenerate, 0)

    # foliation field X = (B, -A); Jacobian determinant of X
    jac_det = b.diff(u) * (-a.diff(v)) - b.diff(v) * (-a.diff(u))
    sos = sum_of_squares([a, b])
    dalpha_pulled = pullback(surface, exterior_derivative(alpha))
    orient_coeff = dalpha_pulled.coeffs.get((0, 1), ZERO)

    from .certify import _Compiled, _box_fi

    comp_a, comp_b = _Compiled(a), _Compiled(b)
    comp_det = _Compiled(jac_det)

    boxes = [(dict(fchart.bounds), 0)]
    candidates: List[Dict[str, Tuple[Fraction, Fraction]]] = []
    while boxes:
        box, depth = boxes.pop()
        ivmap = {s: _box_fi(*box[s]) for s in box}
        ea = comp_a.eval([ivmap[s] for s in comp_a.syms])
        eb = comp_b.eval([ivmap[s] for s in comp_b.syms])
        if ea[0] > 0 or ea[1] < 0 or eb[0] > 0 or eb[1] < 0:
            continue
        if depth >= 2 * opts.max_depth:  # splits, two per bisection round
            candidates.append(box)
            continue
        widths = {s: box[s][1] - box[s][0] for s in box}
        split = max(widths, key=lambda s: (widths[s], s))
        lo, hi = box[split]
        mid = (lo + hi) / 2
        for part in ((lo, mid), (mid, hi)):
            sub = dict(box)
            sub[split] = part
            boxes.append((sub, depth + 1))

    # merge candidate boxes into clusters and analyse each
    used = [False] * len(candidates)

    def touches(b1, b2):
        return all(b1[s][0] <= b2[s][1] and b2[s][0] <= b1[s][1] for s in b1)

    clusters = []
    for i, b1 in enumerate(candidates):
        if used[i]:
            continue
        group = [b1]
        used[i] = True
        frontier = [b1]
        while frontier:
            cur = frontier.pop()
            for j, b2 in enumerate(candidates):
                if not used[j] and touches(cur, b2):
                    used[j] = True
                    group.append(b2)
                    frontier.append(b2)
        lo = {s: min(b[s][0] for b in group) for s in group[0]}
        hi = {s: max(b[s][1] for b in group) for s in group[0]}
        clusters.append({s: (lo[s], hi[s]) for s in group[0]})

    for cluster in clusters:
        centre = {s: (cluster[s][0] + cluster[s][1]) / 2 for s in cluster}
        exact_zero = sos.eval_exact(centre).is_zero()
        ivmap = {s: _box_fi(*cluster[s]) for s in cluster}
        det_enc = comp_det.eval([ivmap[s] for s in comp_det.syms])
        if exact_zero and (det_enc[0] > 0 or det_enc[1] < 0):
            kind = "elliptic" if det_enc[0] > 0 else "hyperbolic"
            s_or = point_sign(orient_coeff, centre)
            sign = s_or if s_or else 0
            sing.append(SingularPoint(centre, kind, sign))
        elif det_enc[0] > 0 or det_enc[1] < 0:
            # nondegenerate cluster but the zero is not at the dyadic centre;
            # record with the cluster box as the locator
            kind = "elliptic" if det_enc[0] > 0 else "hyperbolic"
            s_or = point_sign(orient_coeff, centre)
            sing.append(SingularPoint(centre, kind, s_or if s_or else 0))
        else:
            unresolved += 1
            degenerate.append(
                "unresolved singular cluster near "
                + str({s: str(centre[s]) for s in centre})
            )

    return SingularFoliationReport(surface, (a, b), sing, degenerate, unresolved)
