"""Nonvanishing certificates by interval arithmetic with recursive bisection.

Box evaluation uses sound float intervals (outward rounding by ulp, see
fastival); exact zero witnesses are found and checked in exact rational
arithmetic; point signs escalate through mpmath's arbitrary-precision
intervals.  A claim is refuted either by an exact zero of the expression at
a rational point of the domain or by a certified sign change between two
rational domain points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from mpmath import iv

from . import fastival as fi
from .chart import Chart
from .scalar import ScalarExpr, as_expr

VERIFIED = "verified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


@dataclass
class Certificate:
    claim: str
    verdict: str
    depth: int = 0
    sign: int = 0
    witness: Optional[Dict[str, Fraction]] = None
    witness_pair: Optional[Tuple[Dict[str, Fraction], Dict[str, Fraction]]] = None
    notes: str = ""

    @property
    def verified(self) -> bool:
        return self.verdict == VERIFIED

    def __bool__(self) -> bool:
        return self.verified

    def to_jsonable(self) -> dict:
        out = {"claim": self.claim, "verdict": self.verdict, "depth": self.depth}
        if self.verdict == VERIFIED:
            out["sign"] = self.sign
        if self.witness is not None:
            out["witness"] = {k: str(v) for k, v in self.witness.items()}
        if self.witness_pair is not None:
            out["witness_pair"] = [
                {k: str(v) for k, v in p.items()} for p in self.witness_pair
            ]
        if self.notes:
            out["notes"] = self.notes
        return out


@dataclass
class CertifyOptions:
    max_depth: int = 12  # bisection rounds; one round halves every coordinate
    prec: int = 64  # precision for exact-point sign refinement
    zero_probe_tol: float = 1e-9


class _Compiled:
    """Expression compiled for fast interval evaluation.

    Supports naive evaluation and a first-order centered form (midpoint
    value plus gradient enclosure times half-width), which controls the
    dependency problem on small boxes.
    """

    __slots__ = ("terms", "syms", "expr", "_grad")

    def __init__(self, expr: ScalarExpr):
        self.expr = expr
        self.syms = sorted(expr.free_symbols())
        self._grad = None
        idx = {s: i for i, s in enumerate(self.syms)}
        self.terms = []
        for (powers, trig), c in expr.terms.items():
            pw = tuple((idx[s], e) for s, e in powers)
            if trig is None:
                tr = None
            else:
                kind, arg = trig
                tr = (
                    kind == "sin",
                    fi.from_fraction(arg[0]),
                    tuple((idx[s], fi.from_fraction(co)) for s, co in arg[1]),
                )
            self.terms.append((fi.from_fraction(c), pw, tr))

    def eval(self, box_ivs):
        total = (0.0, 0.0)
        for c, pw, tr in self.terms:
            val = c
            for i, e in pw:
                val = fi.mul(val, fi.ipow(box_ivs[i], e))
            if tr is not None:
                is_sin, const, items = tr
                a = const
                for i, co in items:
                    a = fi.add(a, fi.mul(co, box_ivs[i]))
                val = fi.mul(val, fi.sin(a) if is_sin else fi.cos(a))
            total = fi.add(total, val)
        return total

    def gradient(self):
        if self._grad is None:
            self._grad = [_Compiled(self.expr.diff(s)) for s in self.syms]
        return self._grad

    def eval_point(self, point: Dict[str, Fraction]):
        pts = [fi.from_fraction(Fraction(point[s])) for s in self.syms]
        return self.eval(pts)

    def eval_centered(self, box: Dict[str, Tuple[Fraction, Fraction]]):
        mids = [fi.from_fraction((box[s][0] + box[s][1]) / 2) for s in self.syms]
        total = self.eval(mids)
        for s, g in zip(self.syms, self.gradient()):
            if not g.terms:
                continue
            genc = g.eval([_box_fi(*box[q]) for q in g.syms])
            half = float(box[s][1] - box[s][0]) / 2 * (1 + 1e-12)
            total = fi.add(total, fi.mul(genc, (-half, half)))
        return total


def _box_fi(lo: Fraction, hi: Fraction):
    a = fi.from_fraction(Fraction(lo))
    b = fi.from_fraction(Fraction(hi))
    return (a[0], b[1])


def interval_eval(expr: ScalarExpr, box: Dict[str, Tuple[Fraction, Fraction]], prec: int = 64):
    """Rigorous float enclosure of expr over a rational box."""
    comp = _Compiled(as_expr(expr))
    return comp.eval([_box_fi(Fraction(box[s][0]), Fraction(box[s][1])) for s in comp.syms])


def _to_iv(f: Fraction):
    return iv.mpf(f.numerator) / iv.mpf(f.denominator)


def point_sign(expr: ScalarExpr, point: Dict[str, Fraction], max_prec: int = 512) -> Optional[int]:
    """Rigorous sign of expr at a rational point (0 for an exact zero)."""
    value = as_expr(expr).eval_exact(point)
    if value.is_zero():
        return 0
    prec = 64
    while prec <= max_prec:
        iv.prec = prec
        enc = iv.mpf(0)
        for (powers, trig), c in value.terms.items():
            term = _to_iv(c)
            if trig is not None:
                kind, arg = trig
                a = _to_iv(arg[0])
                term = term * (iv.sin(a) if kind == "sin" else iv.cos(a))
            enc = enc + term
        if enc.a > 0:
            return 1
        if enc.b < 0:
            return -1
        prec *= 2
    return None


def certify_nonvanishing(
    expr: ScalarExpr,
    chart: Chart,
    claim: str = "",
    opts: CertifyOptions = None,
) -> Certificate:
    """Certify that expr has constant sign on the chart domain.

    verified  -> constant sign everywhere on the domain;
    refuted   -> exact rational zero in the domain, or a certified sign
                 change between two rational domain points;
    inconclusive -> bisection depth exhausted.
    """
    expr = as_expr(expr)
    opts = opts or CertifyOptions()
    claim = claim or f"nonvanishing({expr!r})"

    if expr.is_zero():
        wit = chart.center()
        return Certificate(claim, REFUTED, witness=wit, notes="expression is identically zero")

    comp = _Compiled(expr)
    cons = [_Compiled(g) for g in chart.constraints]
    all_syms = sorted(set(comp.syms) | {s for c in cons for s in c.syms})
    ndims = max(len(all_syms), 1)
    max_splits = opts.max_depth * ndims

    state = {
        "pos": None,
        "neg": None,
        "zero": None,
        "unresolved": 0,
        "max_depth": 0,
        "pos_seen": False,
        "neg_seen": False,
    }

    centre_all = chart.center()

    def probe_zero(point: Dict[str, Fraction]) -> bool:
        full = dict(centre_all)
        full.update(point)
        if not chart.contains_exact(full):
            return False
        if expr.eval_exact(full).is_zero():
            state["zero"] = full
            return True
        return False

    def visit(box, splits: int):
        if state["zero"] or (state["pos"] and state["neg"]):
            return
        depth = splits // ndims
        state["max_depth"] = max(state["max_depth"], depth)
        fbox = {s: _box_fi(*box[s]) for s in box}
        inside_certain = True
        for gc in cons:
            enc = gc.eval([fbox[s] for s in gc.syms])
            if enc[1] < 0:
                return  # box entirely outside the domain
            if not enc[0] > 0:
                inside_certain = False
        enc = comp.eval([fbox[s] for s in comp.syms])
        if not (enc[0] > 0 or enc[1] < 0):
            enc = comp.eval_centered(box)
        if enc[0] > 0 or enc[1] < 0:
            sign = 1 if enc[0] > 0 else -1
            if inside_certain:
                centre = {s: (box[s][0] + box[s][1]) / 2 for s in box}
                if sign > 0 and state["pos"] is None:
                    state["pos"] = centre
                if sign < 0 and state["neg"] is None:
                    state["neg"] = centre
            state["pos_seen" if sign > 0 else "neg_seen"] = True
            return
        centre = {s: (box[s][0] + box[s][1]) / 2 for s in box}
        cf = {s: float(v) for s, v in centre.items()}
        if abs(expr.eval_float(cf)) < opts.zero_probe_tol and probe_zero(centre):
            return
        corner = {s: box[s][0] for s in box}
        if abs(expr.eval_float({s: float(v) for s, v in corner.items()})) < opts.zero_probe_tol:
            if probe_zero(corner):
                return
        if splits >= max_splits:
            state["unresolved"] += 1
            return
        widths = {s: box[s][1] - box[s][0] for s in box}
        split = max(widths, key=lambda s: (widths[s], s))
        lo, hi = box[split]
        mid = (lo + hi) / 2
        for part in ((lo, mid), (mid, hi)):
            sub = dict(box)
            sub[split] = part
            visit(sub, splits + 1)

    box0 = {s: chart.bounds[s] for s in all_syms}
    if not box0:
        enc = comp.eval([])
        if enc[0] > 0:
            return Certificate(claim, VERIFIED, sign=1)
        if enc[1] < 0:
            return Certificate(claim, VERIFIED, sign=-1)
        if expr.eval_exact({}).is_zero():
            return Certificate(claim, REFUTED, witness={}, notes="constant zero")
        s = point_sign(expr, {})
        if s is not None and s != 0:
            return Certificate(claim, VERIFIED, sign=s)
        return Certificate(claim, INCONCLUSIVE, notes="constant of undecided sign")

    centre0 = {s: (box0[s][0] + box0[s][1]) / 2 for s in box0}
    if abs(expr.eval_float({s: float(v) for s, v in centre0.items()})) < opts.zero_probe_tol:
        probe_zero(centre0)
    if state["zero"]:
        return Certificate(claim, REFUTED, witness=state["zero"], notes="exact zero")
    visit(box0, 0)

    if state["zero"]:
        return Certificate(
            claim, REFUTED, depth=state["max_depth"], witness=state["zero"], notes="exact zero"
        )
    if state["pos"] and state["neg"]:
        return Certificate(
            claim,
            REFUTED,
            depth=state["max_depth"],
            witness=state["neg"],
            witness_pair=(state["neg"], state["pos"]),
            notes="certified sign change",
        )
    if state["unresolved"] == 0:
        if state["pos_seen"] and state["neg_seen"]:
            return Certificate(
                claim,
                INCONCLUSIVE,
                depth=state["max_depth"],
                notes="mixed signs without interior witnesses",
            )
        return Certificate(
            claim, VERIFIED, depth=state["max_depth"], sign=1 if state["pos_seen"] else -1
        )
    return Certificate(
        claim,
        INCONCLUSIVE,
        depth=state["max_depth"],
        notes=f"{state['unresolved']} unresolved boxes after {opts.max_depth} rounds",
    )


def certify_positive(expr, chart, claim: str = "", opts: CertifyOptions = None) -> Certificate:
    cert = certify_nonvanishing(expr, chart, claim or f"positive({expr!r})", opts)
    if cert.verified and cert.sign < 0:
        return Certificate(cert.claim, REFUTED, cert.depth, notes="constant negative sign")
    return cert


def certify_nowhere_zero(
    exprs,
    chart: Chart,
    claim: str = "",
    opts: CertifyOptions = None,
) -> Certificate:
    """Certify that a tuple of expressions has no common zero on the domain.

    A box is resolved as soon as one component's enclosure excludes zero,
    which is far tighter than enclosing the sum of squares.  Refuted by an
    exact rational common zero; inconclusive when bisection rounds run out.
    """
    exprs = [as_expr(e) for e in exprs]
    exprs = [e for e in exprs if not e.is_zero()]
    opts = opts or CertifyOptions()
    claim = claim or f"nowhere-zero tuple ({len(exprs)} components)"
    if not exprs:
        return Certificate(claim, REFUTED, witness=chart.center(),
                           notes="all components identically zero")

    comps = [_Compiled(e) for e in exprs]
    cons = [_Compiled(g) for g in chart.constraints]
    all_syms = sorted(
        {s for c in comps for s in c.syms} | {s for c in cons for s in c.syms}
    )
    ndims = max(len(all_syms), 1)
    max_splits = opts.max_depth * ndims
    state = {"zero": None, "unresolved": 0, "max_depth": 0}
    centre_all = chart.center()

    def probe_zero(point) -> bool:
        full = dict(centre_all)
        full.update(point)
        if not chart.contains_exact(full):
            return False
        if all(e.eval_exact(full).is_zero() for e in exprs):
            state["zero"] = full
            return True
        return False

    def visit(box, splits: int):
        if state["zero"]:
            return
        state["max_depth"] = max(state["max_depth"], splits // ndims)
        fbox = {s: _box_fi(*box[s]) for s in box}
        for gc in cons:
            enc = gc.eval([fbox[s] for s in gc.syms])
            if enc[1] < 0:
                return
        for c in comps:
            enc = c.eval([fbox[s] for s in c.syms])
            if enc[0] > 0 or enc[1] < 0:
                return
        for c in comps:
            enc = c.eval_centered(box)
            if enc[0] > 0 or enc[1] < 0:
                return
        centre = {s: (box[s][0] + box[s][1]) / 2 for s in box}
        cf = {s: float(v) for s, v in centre.items()}
        if all(abs(e.eval_float(cf)) < opts.zero_probe_tol for e in exprs):
            if probe_zero(centre):
                return
        if splits >= max_splits:
            state["unresolved"] += 1
            return
        widths = {s: box[s][1] - box[s][0] for s in box}
        split = max(widths, key=lambda s: (widths[s], s))
        lo, hi = box[split]
        mid = (lo + hi) / 2
        for part in ((lo, mid), (mid, hi)):
            sub = dict(box)
            sub[split] = part
            visit(sub, splits + 1)

    box0 = {s: chart.bounds[s] for s in all_syms}
    if not box0:
        if all(e.eval_exact({}).is_zero() for e in exprs):
            return Certificate(claim, REFUTED, witness={}, notes="constant zero tuple")
        return Certificate(claim, VERIFIED)
    visit(box0, 0)
    if state["zero"]:
        return Certificate(claim, REFUTED, depth=state["max_depth"],
                           witness=state["zero"], notes="exact common zero")
    if state["unresolved"] == 0:
        return Certificate(claim, VERIFIED, depth=state["max_depth"], sign=1)
    return Certificate(
        claim,
        INCONCLUSIVE,
        depth=state["max_depth"],
        notes=f"{state['unresolved']} unresolved boxes after {opts.max_depth} rounds",
    )
