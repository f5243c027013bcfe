"""Legendrian curve invariants: rotation numbers, framings, stabilization,
and twisting numbers along characteristic leaves."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .chart import Chart
from .certify import Certificate, REFUTED, VERIFIED, point_sign
from .forms import FormExpr, VectorFieldExpr, exterior_derivative
from .scalar import PiAffine, ScalarExpr, ZERO, as_expr, num, sym

TWO_PI = 2.0 * math.pi
MAX_WINDING_SAMPLES = 1 << 20


class CurveError(ValueError):
    pass


_DIFF_CACHE: Dict[Tuple, ScalarExpr] = {}


def _diff_cached(e: Component, s: str) -> ScalarExpr:
    key = (e, s)
    got = _DIFF_CACHE.get(key)
    if got is None:
        got = e.diff(s)
        _DIFF_CACHE[key] = got
        if len(_DIFF_CACHE) > 4096:
            _DIFF_CACHE.clear()
    return got


Component = Union[ScalarExpr, PiAffine]


@dataclass(frozen=True)
class CurvePiece:
    """One smooth piece; components are expressions in the piece-local
    parameter u - lo (kept local for numerical stability)."""

    lo: Fraction
    hi: Optional[Fraction]  # None means lo + 2*pi (single-piece trig curves)
    comps: Dict[str, Component]

    def hi_float(self) -> float:
        return float(self.lo) + TWO_PI if self.hi is None else float(self.hi)

    def reanchored(self, new_lo: Fraction, new_hi: Optional[Fraction]) -> "CurvePiece":
        """Restrict/shift this piece to [new_lo, new_hi] (same geometry)."""
        delta = Fraction(new_lo) - self.lo
        if delta == 0:
            return CurvePiece(new_lo, new_hi, self.comps)
        shifted = {}
        for cName, e in self.comps.items():
            if isinstance(e, PiAffine):
                shifted[cName] = PiAffine(e.expr.subs({"u": sym("u") + num(delta)}), e.pi_halves)
            else:
                shifted[cName] = as_expr(e).subs({"u": sym("u") + num(delta)})
        return CurvePiece(new_lo, new_hi, shifted)


@dataclass(frozen=True)
class ParamCurve:
    """Piecewise-smooth curve in a chart, components in one parameter."""

    chart: Chart
    pieces: Tuple[CurvePiece, ...]
    closed: bool = True
    param: str = "u"

    @staticmethod
    def smooth(chart: Chart, comps: Dict[str, object], closed=True, period_2pi=True,
               lo=Fraction(0), hi=None, param="u") -> "ParamCurve":
        clean = {}
        for c in chart.coords:
            v = comps.get(c, ZERO)
            clean[c] = v if isinstance(v, PiAffine) else as_expr(v)
        if hi is None and not period_2pi:
            raise CurveError("open-ended piece needs an explicit upper bound")
        piece = CurvePiece(Fraction(lo), None if period_2pi else Fraction(hi), clean)
        return ParamCurve(chart, (piece,), closed, param)

    @property
    def lo_float(self) -> float:
        return float(self.pieces[0].lo)

    @property
    def hi_float(self) -> float:
        return self.pieces[-1].hi_float()

    def _locate(self, u: float) -> Tuple[CurvePiece, float]:
        lo, hi = self.lo_float, self.hi_float
        if self.closed:
            span = hi - lo
            u = lo + ((u - lo) % span)
        for p in self.pieces:
            if u <= p.hi_float() + 1e-12:
                return p, u
        return self.pieces[-1], u

    def point(self, u: float) -> Dict[str, float]:
        piece, u = self._locate(u)
        env = {self.param: u - float(piece.lo)}
        return {c: e.eval_float(env) for c, e in piece.comps.items()}

    def velocity(self, u: float) -> Dict[str, float]:
        piece, u = self._locate(u)
        env = {self.param: u - float(piece.lo)}
        return {
            c: _diff_cached(e, self.param).eval_float(env)
            for c, e in piece.comps.items()
        }

    def reversed(self) -> "ParamCurve":
        """The same curve traversed backwards."""
        pieces: List[CurvePiece] = []
        lo = self.pieces[0].lo
        for p in reversed(self.pieces):
            if p.hi is None:
                comps = {
                    c: (PiAffine(e.expr.subs({self.param: -sym(self.param)}), e.pi_halves)
                        if isinstance(e, PiAffine)
                        else as_expr(e).subs({self.param: -sym(self.param)}))
                    for c, e in p.comps.items()
                }
                pieces.append(CurvePiece(lo, None, comps))
                continue
            width = p.hi - p.lo
            flip = {self.param: num(width) - sym(self.param)}
            comps = {
                c: (PiAffine(e.expr.subs(flip), e.pi_halves)
                    if isinstance(e, PiAffine) else as_expr(e).subs(flip))
                for c, e in p.comps.items()
            }
            pieces.append(CurvePiece(lo, lo + width, comps))
            lo = lo + width
        return ParamCurve(self.chart, tuple(pieces), self.closed, self.param)

    def shifted(self, delta: Fraction) -> "ParamCurve":
        """Reparametrized with the parameter origin moved by delta."""
        delta = Fraction(delta)
        pieces = tuple(
            CurvePiece(p.lo + delta, None if p.hi is None else p.hi + delta, p.comps)
            for p in self.pieces
        )
        return ParamCurve(self.chart, pieces, self.closed, self.param)

    def immersion_check(self, samples: int = 400) -> Certificate:
        lo, hi = self.lo_float, self.hi_float
        worst = float("inf")
        for i in range(samples):
            u = lo + (hi - lo) * (i + 0.31) / samples
            v = self.velocity(u)
            worst = min(worst, math.sqrt(sum(x * x for x in v.values())))
        claim = "curve is immersed (sampled)"
        if worst > 1e-9:
            return Certificate(claim, VERIFIED, notes=f"min |velocity| = {worst:.3g}")
        return Certificate(claim, REFUTED, notes=f"min |velocity| = {worst:.3g}")


def is_legendrian(curve: ParamCurve, alpha: FormExpr, tol: float = 1e-9) -> Certificate:
    """Certify alpha(curve') == 0, symbolically when possible."""
    claim = "curve is Legendrian"
    u = curve.param
    symbolic_ok = True
    for piece in curve.pieces:
        total = ZERO
        try:
            for i, coord in enumerate(curve.chart.coords):
                coeff = alpha.coeffs.get((i,), ZERO)
                coeff_on_curve = coeff.subs(piece.comps)
                comp = piece.comps[coord]
                dcomp = comp.diff(u)
                total = total + coeff_on_curve * dcomp
        except Exception:
            symbolic_ok = False
            break
        if not total.is_zero():
            symbolic_ok = False
            break
    if symbolic_ok:
        return Certificate(claim, VERIFIED, notes="symbolic canonical zero")
    # numeric fallback
    lo, hi = curve.lo_float, curve.hi_float
    worst = 0.0
    n = 400
    for i in range(n):
        uu = lo + (hi - lo) * (i + 0.5) / n
        p = curve.point(uu)
        v = curve.velocity(uu)
        val = sum(
            alpha.coeffs.get((j,), ZERO).eval_float(p) * v[c]
            for j, c in enumerate(curve.chart.coords)
        )
        worst = max(worst, abs(val))
    if worst < tol:
        return Certificate(claim, VERIFIED, notes=f"numeric, max residual {worst:.2g}")
    return Certificate(claim, REFUTED, notes=f"max residual {worst:.2g}")


# ---------------------------------------------------------------------------
# winding numbers
# ---------------------------------------------------------------------------


def _track_angles(fn: Callable[[float], Tuple[float, float]], lo: float, hi: float,
                  closed: bool) -> float:
    """Total continuous angle change of fn over [lo, hi]; refines until all
    consecutive steps are below pi/2 and the result is stable under doubling."""
    n = 64
    prev_total = None
    while n <= MAX_WINDING_SAMPLES:
        us = [lo + (hi - lo) * i / n for i in range(n + (0 if closed else 1))]
        ok = True
        total = 0.0
        f0 = fn(us[0])
        a_prev = math.atan2(f0[1], f0[0])
        a_first = a_prev
        for u in us[1:]:
            f = fn(u)
            if f[0] == 0 and f[1] == 0:
                raise CurveError("decomposition hit the zero vector")
            a = math.atan2(f[1], f[0])
            d = a - a_prev
            while d > math.pi:
                d -= TWO_PI
            while d < -math.pi:
                d += TWO_PI
            if abs(d) > math.pi / 2:
                ok = False
                break
            total += d
            a_prev = a
        if ok and closed:
            # close the loop
            d = a_first - a_prev
            while d > math.pi:
                d -= TWO_PI
            while d < -math.pi:
                d += TWO_PI
            if abs(d) > math.pi / 2:
                ok = False
            else:
                total += d
        if ok:
            if prev_total is not None and abs(total - prev_total) < 1e-6:
                return total
            prev_total = total
        n *= 2
    raise CurveError("winding did not stabilize within the sample cap")


def winding_number(fn, lo: float, hi: float) -> int:
    total = _track_angles(fn, lo, hi, closed=True)
    w = total / TWO_PI
    r = round(w)
    if abs(w - r) > 0.05:
        raise CurveError(f"winding {w} is not close to an integer")
    return int(r)


def _numeric_kernel_completion(alpha: FormExpr, point: Dict[str, float],
                               x_vec: np.ndarray, orientation_sign: int) -> np.ndarray:
    """Complete a Legendrian vector to an oriented frame of ker(alpha) at a point."""
    coords = alpha.chart.coords
    a = np.array([alpha.coeffs.get((i,), ZERO).eval_float(point) for i in range(3)])
    v0 = np.cross(a, x_vec)
    da = exterior_derivative(alpha)
    damat = np.zeros((3, 3))
    for (i, j), c in da.coeffs.items():
        val = c.eval_float(point)
        damat[i, j] = val
        damat[j, i] = -val
    if orientation_sign * float(x_vec @ damat @ v0) < 0:
        v0 = -v0
    return v0


def rotation_number(
    curve: ParamCurve,
    frame: Union[Tuple[VectorFieldExpr, VectorFieldExpr], VectorFieldExpr],
    field: Optional[VectorFieldExpr] = None,
    contact_form: Optional[FormExpr] = None,
    orientation_sign: int = 1,
) -> int:
    """Winding of the measured field against a reference Legendrian frame.

    ``frame`` is an oriented frame (X, Y) of the contact structure along the
    curve, or a single reference field X together with ``contact_form`` (the
    completion is computed pointwise, oriented by ``orientation_sign`` times
    the d(alpha)-orientation).  ``field`` defaults to the curve tangent.
    """
    chart = curve.chart
    coords = chart.coords
    single = isinstance(frame, VectorFieldExpr)
    if single and contact_form is None:
        raise CurveError("single reference field needs the contact form")

    def decompose(u: float) -> Tuple[float, float]:
        p = curve.point(u)
        if field is None:
            tvec = np.array([curve.velocity(u)[c] for c in coords])
        else:
            tvec = np.array([c.eval_float(p) for c in field.comps])
        if single:
            fx = np.array([c.eval_float(p) for c in frame.comps])
            fy = _numeric_kernel_completion(contact_form, p, fx, orientation_sign)
        else:
            fx = np.array([c.eval_float(p) for c in frame[0].comps])
            fy = np.array([c.eval_float(p) for c in frame[1].comps])
        mat = np.stack([fx, fy], axis=1)
        sol, res, rank, _ = np.linalg.lstsq(mat, tvec, rcond=None)
        resid = np.linalg.norm(mat @ sol - tvec)
        scale = max(np.linalg.norm(tvec), 1e-30)
        if resid / scale > 1e-6:
            raise CurveError(
                f"measured vector does not lie in the frame span (residual {resid:.2g})"
            )
        return float(sol[0]), float(sol[1])

    return winding_number(decompose, curve.lo_float, curve.hi_float)


# ---------------------------------------------------------------------------
# framings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramingWord:
    """A framing class along a curve: named reference plus integer offset."""

    base: str
    offset: int = 0


def framing_action(m: int, f: FramingWord) -> FramingWord:
    return FramingWord(f.base, f.offset + m)


def tb_from_framings(f_contact: FramingWord, f_surface: FramingWord) -> int:
    """The integer t with t . F_surface = F_contact."""
    if f_contact.base != f_surface.base:
        raise CurveError("framings must be along the same curve reference")
    return f_contact.offset - f_surface.offset


# ---------------------------------------------------------------------------
# front-projection machinery (Darboux chart with contact form dz - x dt)
# ---------------------------------------------------------------------------


def front_cusp_count(curve: ParamCurve, t_coord: str = "t", samples: int = 2000) -> int:
    """Number of cusps = sign changes of dt/du around the curve."""
    lo, hi = curve.lo_float, curve.hi_float
    us = [lo + (hi - lo) * (i + 0.37) / samples for i in range(samples)]
    signs = []
    for u in us:
        v = curve.velocity(u)[t_coord]
        if abs(v) > 1e-12:
            signs.append(1 if v > 0 else -1)
    flips = 0
    for i in range(len(signs)):
        if signs[i] != signs[(i + 1) % len(signs)]:
            flips += 1
    return flips


def front_writhe(curve: ParamCurve, t_coord: str = "t", z_coord: str = "z",
                 samples: int = 600) -> int:
    """Signed self-crossings of the front projection (polyline count)."""
    lo, hi = curve.lo_float, curve.hi_float
    pts = []
    for i in range(samples):
        u = lo + (hi - lo) * i / samples
        p = curve.point(u)
        pts.append((p[t_coord], p[z_coord], u))
    w = 0
    n = samples
    for i in range(n):
        a1 = pts[i]
        a2 = pts[(i + 1) % n]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            b1 = pts[j]
            b2 = pts[(j + 1) % n]
            d1 = (a2[0] - a1[0], a2[1] - a1[1])
            d2 = (b2[0] - b1[0], b2[1] - b1[1])
            den = d1[0] * d2[1] - d1[1] * d2[0]
            if abs(den) < 1e-15:
                continue
            sxy = (b1[0] - a1[0], b1[1] - a1[1])
            s = (sxy[0] * d2[1] - sxy[1] * d2[0]) / den
            t = (sxy[0] * d1[1] - sxy[1] * d1[0]) / den
            if 0 <= s < 1 and 0 <= t < 1:
                w += 1 if den > 0 else -1
    return w


def front_tb(curve: ParamCurve, t_coord: str = "t", z_coord: str = "z") -> int:
    """Thurston-Bennequin number of a front: writhe minus half the cusps."""
    c = front_cusp_count(curve, t_coord)
    if c % 2 != 0:
        raise CurveError("odd cusp count; front is not generic")
    return front_writhe(curve, t_coord, z_coord) - c // 2


# ---------------------------------------------------------------------------
# the diamond unknot fixture and stabilization
# ---------------------------------------------------------------------------


def front_chart() -> Chart:
    return Chart.build(
        "front", ["x", "z", "t"],
        bounds={"x": (-4, 4), "z": (-4, 4), "t": (-2, 2)},
    )


def front_contact_form(chart: Optional[Chart] = None) -> FormExpr:
    ch = chart or front_chart()
    return FormExpr.one_form(ch, {"z": 1, "t": -sym("x")})


def _poly_antiderivative(e: ScalarExpr, s: str) -> ScalarExpr:
    """Antiderivative of a polynomial in s (other symbols as constants)."""
    out = ZERO
    for (powers, trig), c in e.terms.items():
        if trig is not None:
            raise CurveError("only polynomial integrands supported")
        d = dict(powers)
        k = d.pop(s, 0)
        mono = num(Fraction(c, k + 1)) * sym(s) ** (k + 1)
        for q, ee in d.items():
            mono = mono * sym(q) ** ee
        out = out + mono
    return out


def _shift_to(expr: ScalarExpr, lo: Fraction, hi: Fraction, param: str = "u") -> ScalarExpr:
    """Reparametrize a unit-interval expression to the window [lo, hi]."""
    s = sym(param)
    return expr.subs({param: (s - num(lo)) * num(Fraction(1) / (hi - lo))})


def unknot_fixture(height: Fraction = Fraction(1)) -> ParamCurve:
    """Closed Legendrian unknot with rotation number 0 and tb -1.

    The front is a lens with flat strands on top (parameter range [1, 2],
    dt/du > 0) and bottom (range [4, 5], dt/du < 0); stabilizations are
    spliced into the flat strands.  Cusps sit at the two tips t = +-1.
    """
    ch = front_chart()
    u = sym("u")
    H = Fraction(height)

    def leg(t0, t1, z0, z1, piece_lo, cusp_at_start: bool):
        """Arc piece joining a cusp tip to a flat strand, C1 at both ends."""
        t0, t1, z0, z1 = Fraction(t0), Fraction(t1), Fraction(z0), Fraction(z1)
        dt_total = t1 - t0
        dz_total = z1 - z0
        mu = 15 * dz_total / dt_total
        if cusp_at_start:
            t_e = num(t0) + num(dt_total) * u**2
            x_e = num(mu) * u * (1 - u) ** 2
        else:
            t_e = num(t0) + num(dt_total) * (2 * u - u**2)
            x_e = num(mu) * u**2 * (1 - u)
        z_e = num(z0) + _poly_antiderivative(x_e * t_e.diff("u"), "u")
        assert z_e.subs({"u": num(1)}).as_rational() == z1
        lo = Fraction(piece_lo)
        return CurvePiece(lo, lo + 1, {"x": x_e, "z": z_e, "t": t_e})

    def flat(t0, t1, zlevel, piece_lo):
        lo = Fraction(piece_lo)
        t_e = num(Fraction(t0)) + num(Fraction(t1 - t0)) * sym("u")
        return CurvePiece(lo, lo + 1, {"x": ZERO, "z": num(Fraction(zlevel)), "t": t_e})

    h = Fraction(1, 2)
    pieces = (
        leg(-1, -h, 0, H, 0, True),
        flat(-h, h, H, 1),
        leg(h, 1, H, 0, 2, False),
        leg(1, h, 0, -H, 3, True),
        flat(h, -h, -H, 4),
        leg(-h, -1, -H, 0, 5, False),
    )
    return ParamCurve(ch, pieces, closed=True)


def _zigzag_slope_profile() -> ScalarExpr:
    """The cubic-times-quartic slope profile D(s) of the zigzag.

    D = s^2 (1-s)^2 (q0 + q1 s + q2 s^2) with
      - zero area against the wiggle:  int D * (18 s^2 - 18 s + 4) ds = 0,
      - D'(1/3) = 1 and D'(2/3) = -1 (opposite cusp slopes => one new loop).
    Solved exactly once; coefficients are rational.
    """
    u = sym("u")
    base = u**2 * (1 - u) ** 2
    cands = [base, base * u, base * u**2]
    wig = 18 * u**2 - 18 * u + 4
    rows = []
    rhs = [Fraction(0), Fraction(1), Fraction(-1)]
    for cond in range(3):
        row = []
        for c in cands:
            if cond == 0:
                val = _poly_antiderivative(c * wig, "u").subs({"u": num(1)}).as_rational()
            elif cond == 1:
                val = c.diff("u").subs({"u": num(Fraction(1, 3))}).as_rational()
            else:
                val = c.diff("u").subs({"u": num(Fraction(2, 3))}).as_rational()
            row.append(val)
        rows.append(row)
    # 3x3 exact solve
    import numpy as _np  # noqa: F401  (kept numeric-free: do it by hand)
    a, b, c0 = rows[0]
    d, e, f = rows[1]
    g, h, i = rows[2]
    det = a * (e * i - f * h) - b * (d * i - f * g) + c0 * (d * h - e * g)
    if det == 0:
        raise CurveError("degenerate zigzag profile system")
    q0 = (rhs[0] * (e * i - f * h) - b * (rhs[1] * i - f * rhs[2]) + c0 * (rhs[1] * h - e * rhs[2])) / det
    q1 = (a * (rhs[1] * i - f * rhs[2]) - rhs[0] * (d * i - f * g) + c0 * (d * rhs[2] - rhs[1] * g)) / det
    q2 = (a * (e * rhs[2] - rhs[1] * h) - b * (d * rhs[2] - rhs[1] * g) + rhs[0] * (d * h - e * g)) / det
    return base * (num(q0) + num(q1) * u + num(q2) * u**2)


# Lagrange basis on nodes 0, 1/3, 2/3, 1
_L_NODES = (Fraction(0), Fraction(1, 3), Fraction(2, 3), Fraction(1))


def _lagrange_basis(s: ScalarExpr) -> List[ScalarExpr]:
    out = []
    for i, ni in enumerate(_L_NODES):
        e = num(1)
        for j, nj in enumerate(_L_NODES):
            if i == j:
                continue
            e = e * (s - num(nj)) * num(Fraction(1, 1) / (ni - nj))
        out.append(e)
    return out


def stabilize(
    curve: ParamCurve,
    sign: int,
    window: Tuple[Fraction, Fraction] = (Fraction(5, 4), Fraction(7, 4)),
    amplitude: Fraction = Fraction(1, 2),
) -> ParamCurve:
    """Splice a stabilization zigzag into a flat strand of a front curve.

    ``sign`` +1 or -1 selects the positive or negative stabilization: the
    rotation number changes by exactly ``sign``, the front gains two cusps,
    and the contact framing twists once.  The window must lie inside a flat
    piece (x identically zero, so the strand has constant z); the fixture
    from ``unknot_fixture`` provides flat strands at parameters [1, 2] and
    [4, 5].
    """
    if sign not in (1, -1):
        raise CurveError("sign must be +1 or -1")
    a, b = Fraction(window[0]), Fraction(window[1])
    host = None
    for piece in curve.pieces:
        hi = piece.hi
        if hi is not None and piece.lo <= a and b <= hi:
            host = piece
            break
    if host is None:
        raise CurveError("window does not fit inside a bounded smooth piece")
    u = curve.param

    def at(e, val: Fraction) -> Fraction:
        return as_expr(e).subs({u: num(val)}).as_rational()

    a_loc, b_loc = a - host.lo, b - host.lo
    if not as_expr(host.comps["x"]).is_zero():
        raise CurveError("splice window must lie on a flat strand (x == 0)")
    t_e = as_expr(host.comps["t"])
    if not t_e.is_affine():
        raise CurveError("flat strand must have affine t")
    t_a, t_b = at(t_e, a_loc), at(t_e, b_loc)
    dT = t_b - t_a
    if dT == 0:
        raise CurveError("splice region too small to keep the zigzag immersed")
    z_level = at(host.comps["z"], a_loc)
    dt_sign = 1 if dT > 0 else -1

    s = sym(u)
    # t wiggles forward-back-forward; cusps exactly at s = 1/3, 2/3
    wiggle = 6 * s**3 - 9 * s**2 + 4 * s
    t_new = num(t_a) + num(dT) * wiggle
    # slope profile D: zero area against the wiggle, opposite cusp slopes
    D = _zigzag_slope_profile()
    eta = -Fraction(amplitude) * sign * dt_sign
    x_new = num(eta) * D
    z_new = num(z_level) + _poly_antiderivative(x_new * t_new.diff(u), u)
    assert at(z_new, Fraction(1)) == z_level  # zigzag area is exactly zero

    span = b - a
    scale = {u: s * num(Fraction(1) / span)}  # local [0, span] -> unit param
    zig = {
        name: e.subs(scale) for name, e in (("x", x_new), ("z", z_new), ("t", t_new))
    }
    new_pieces: List[CurvePiece] = []
    for piece in curve.pieces:
        if piece is host:
            if a > piece.lo:
                new_pieces.append(CurvePiece(piece.lo, a, piece.comps))
            new_pieces.append(CurvePiece(a, b, zig))
            if piece.hi is None or b < piece.hi:
                new_pieces.append(piece.reanchored(b, piece.hi))
        else:
            new_pieces.append(piece)
    return ParamCurve(curve.chart, tuple(new_pieces), curve.closed, curve.param)


def front_rotation_number(curve: ParamCurve) -> int:
    """Rotation number against the standard frame of ker(dz - x dt)."""
    ch = curve.chart
    x = sym("x")
    e1 = VectorFieldExpr.make(ch, {"x": 1})
    e2 = VectorFieldExpr.make(ch, {"t": 1, "z": x})
    return rotation_number(curve, (e1, e2))


# ---------------------------------------------------------------------------
# twisting numbers along characteristic leaves
# ---------------------------------------------------------------------------


@dataclass
class TwistingResult:
    half_turns: int
    total_angle: float
    angles: List[float]
    closed_degree: Optional[int] = None


def twisting_number(
    w: VectorFieldExpr,
    x_gen: VectorFieldExpr,
    frame: Tuple[VectorFieldExpr, VectorFieldExpr],
    start: Dict[str, float],
    time: float,
    steps: int = 2000,
    closed: bool = False,
) -> TwistingResult:
    """Half-turn count of the line spanned by ``x_gen`` in E/W along a leaf.

    The leaf of ``w`` through ``start`` is integrated with fixed-step RK4;
    at each sample ``x_gen`` is decomposed as a*W + b*F1 + c*F2 against the
    chart frame (F1, F2) of E/W, and the angle of (b, c) is tracked with the
    pi/2 step rule.
    """
    chart = w.chart
    coords = chart.coords

    def wf(pt: List[float]) -> List[float]:
        env = dict(zip(coords, pt))
        return [c.eval_float(env) for c in w.comps]

    # integrate the leaf, storing samples
    h = time / steps
    pt = [float(start[c]) for c in coords]
    samples = [list(pt)]
    for _ in range(steps):
        k1 = wf(pt)
        k2 = wf([x + h / 2 * k for x, k in zip(pt, k1)])
        k3 = wf([x + h / 2 * k for x, k in zip(pt, k2)])
        k4 = wf([x + h * k for x, k in zip(pt, k3)])
        pt = [x + h / 6 * (q1 + 2 * q2 + 2 * q3 + q4)
              for x, q1, q2, q3, q4 in zip(pt, k1, k2, k3, k4)]
        samples.append(list(pt))
    for p in samples:
        env = dict(zip(coords, p))
        if not all(
            float(chart.bounds[c][0]) - 1e-9 <= env[c] <= float(chart.bounds[c][1]) + 1e-9
            or c in chart.periodic
            for c in coords
        ):
            raise CurveError("leaf exits the chart domain")

    def angle_at(p: List[float]) -> float:
        env = dict(zip(coords, p))
        tvec = np.array([c.eval_float(env) for c in x_gen.comps])
        m = np.stack(
            [np.array([c.eval_float(env) for c in f.comps]) for f in (w, frame[0], frame[1])],
            axis=1,
        )
        sol, _, _, _ = np.linalg.lstsq(m, tvec, rcond=None)
        resid = np.linalg.norm(m @ sol - tvec)
        if resid > 1e-6 * max(1.0, np.linalg.norm(tvec)):
            raise CurveError("generator does not lie in the (W, F1, F2) span")
        return math.atan2(float(sol[2]), float(sol[1]))

    angles = [angle_at(p) for p in samples]
    total = 0.0
    unwrapped = [angles[0]]
    for i in range(1, len(angles)):
        d = angles[i] - angles[i - 1]
        while d > math.pi:
            d -= TWO_PI
        while d < -math.pi:
            d += TWO_PI
        if abs(d) > math.pi / 2:
            raise CurveError("angle step exceeds pi/2; refine the leaf sampling")
        total += d
        unwrapped.append(unwrapped[-1] + d)
    half = math.floor(abs(total) / math.pi) * (1 if total >= 0 else -1)
    result = TwistingResult(half, total, unwrapped)
    if closed:
        deg = total / math.pi
        r = round(deg)
        if abs(deg - r) > 0.05:
            raise CurveError(f"closed-leaf degree {deg} is not an integer")
        result.closed_degree = int(r)
    return result


def projectivized_winding_oracle(
    pair_fn: Callable[[float], Tuple[float, float]], lo: float, hi: float
) -> int:
    """Independent oracle: winding of the double-angle image of a line field.

    The map (b, c) -> (b^2 - c^2, 2bc) is continuous across sign flips of the
    spanning vector; its winding is the degree of the projectivized curve.
    """

    def doubled(u: float) -> Tuple[float, float]:
        b, c = pair_fn(u)
        return (b * b - c * c, 2 * b * c)

    return winding_number(doubled, lo, hi)
