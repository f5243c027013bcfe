"""Vector fields, differential forms, and exterior calculus on a chart."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .chart import Chart
from .scalar import ScalarExpr, ZERO, as_expr, num, sym, ExprError


class ChartMismatch(ValueError):
    pass


def _same_chart(a, b):
    if a.chart is not b.chart and a.chart != b.chart:
        raise ChartMismatch(f"charts differ: {a.chart.name} vs {b.chart.name}")


@dataclass(frozen=True)
class VectorFieldExpr:
    chart: Chart
    comps: Tuple[ScalarExpr, ...]

    def __post_init__(self):
        if len(self.comps) != self.chart.dim:
            raise ExprError("component count must equal chart dimension")

    @staticmethod
    def make(chart: Chart, comps: Mapping[str, object]) -> "VectorFieldExpr":
        unknown = set(comps) - set(chart.coords)
        if unknown:
            raise ExprError(f"unknown coordinates {unknown}")
        return VectorFieldExpr(
            chart, tuple(as_expr(comps.get(c, ZERO)) for c in chart.coords)
        )

    def comp(self, coord: str) -> ScalarExpr:
        return self.comps[self.chart.coords.index(coord)]

    def __add__(self, other: "VectorFieldExpr") -> "VectorFieldExpr":
        _same_chart(self, other)
        return VectorFieldExpr(self.chart, tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: "VectorFieldExpr") -> "VectorFieldExpr":
        _same_chart(self, other)
        return VectorFieldExpr(self.chart, tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __neg__(self):
        return VectorFieldExpr(self.chart, tuple(-a for a in self.comps))

    def scale(self, f) -> "VectorFieldExpr":
        f = as_expr(f)
        return VectorFieldExpr(self.chart, tuple(f * a for a in self.comps))

    def __call__(self, f: ScalarExpr) -> ScalarExpr:
        """Directional derivative V(f)."""
        f = as_expr(f)
        out = ZERO
        for c, v in zip(self.chart.coords, self.comps):
            out = out + v * f.diff(c)
        return out

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other):
        if not isinstance(other, VectorFieldExpr):
            return NotImplemented
        return self.chart.coords == other.chart.coords and all(
            (a - b).is_zero() for a, b in zip(self.comps, other.comps)
        )

    def __hash__(self):
        return hash((self.chart.coords, self.comps))

    def eval_float(self, point: Dict[str, float]):
        return [c.eval_float(point) for c in self.comps]

    def __repr__(self):
        bits = [
            f"({c!r})*d_{name}"
            for name, c in zip(self.chart.coords, self.comps)
            if not c.is_zero()
        ]
        return " + ".join(bits) if bits else "0"


def lie_bracket(v: VectorFieldExpr, u: VectorFieldExpr) -> VectorFieldExpr:
    """[v, u], componentwise v(u^i) - u(v^i)."""
    _same_chart(v, u)
    return VectorFieldExpr(
        v.chart, tuple(v(ui) - u(vi) for vi, ui in zip(v.comps, u.comps))
    )


@dataclass(frozen=True)
class FormExpr:
    chart: Chart
    degree: int
    coeffs: Mapping[Tuple[int, ...], ScalarExpr]

    @staticmethod
    def make(chart: Chart, degree: int, coeffs: Mapping[Tuple[int, ...], object]) -> "FormExpr":
        if degree < 0 or degree > chart.dim:
            raise ExprError("form degree out of range")
        clean: Dict[Tuple[int, ...], ScalarExpr] = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or list(idx) != sorted(set(idx)):
                raise ExprError(f"index tuple {idx} must be strictly increasing")
            if any(i < 0 or i >= chart.dim for i in idx):
                raise ExprError(f"index out of range in {idx}")
            c = as_expr(c)
            if not c.is_zero():
                clean[idx] = clean.get(idx, ZERO) + c
        return FormExpr(chart, degree, clean)

    @staticmethod
    def one_form(chart: Chart, comps: Mapping[str, object]) -> "FormExpr":
        unknown = set(comps) - set(chart.coords)
        if unknown:
            raise ExprError(f"unknown coordinates {unknown}")
        return FormExpr.make(
            chart,
            1,
            {(chart.coords.index(c),): as_expr(v) for c, v in comps.items()},
        )

    @staticmethod
    def function(chart: Chart, f) -> "FormExpr":
        return FormExpr.make(chart, 0, {(): as_expr(f)})

    @staticmethod
    def volume(chart: Chart) -> "FormExpr":
        return FormExpr.make(chart, chart.dim, {tuple(range(chart.dim)): num(1)})

    def coeff(self, *coords: str) -> ScalarExpr:
        idx = tuple(sorted(self.chart.coords.index(c) for c in coords))
        return self.coeffs.get(idx, ZERO)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def __add__(self, other: "FormExpr") -> "FormExpr":
        _same_chart(self, other)
        if self.degree != other.degree:
            raise ExprError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, ZERO) + v
        return FormExpr.make(self.chart, self.degree, out)

    def __sub__(self, other: "FormExpr") -> "FormExpr":
        return self + other.scale(num(-1))

    def __neg__(self):
        return self.scale(num(-1))

    def scale(self, f) -> "FormExpr":
        f = as_expr(f)
        return FormExpr.make(
            self.chart, self.degree, {k: f * v for k, v in self.coeffs.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, FormExpr):
            return NotImplemented
        if self.chart.coords != other.chart.coords or self.degree != other.degree:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.chart.coords, self.degree))

    def __call__(self, *fields: VectorFieldExpr) -> ScalarExpr:
        """Evaluate on vector fields (full antisymmetric pairing)."""
        if len(fields) != self.degree:
            raise ExprError("wrong number of vector arguments")
        out = self
        for v in fields:
            out = interior_product(v, out)
        return out.coeffs.get((), ZERO)

    def __repr__(self):
        names = self.chart.coords
        bits = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            base = "^".join(f"d{names[i]}" for i in idx) or "1"
            bits.append(f"({c!r}) {base}")
        return " + ".join(bits) if bits else "0"


def _merge_indices(i1: Tuple[int, ...], i2: Tuple[int, ...]):
    """Merge two strictly increasing tuples; returns (sign, merged) or None."""
    if set(i1) & set(i2):
        return None
    merged = tuple(sorted(i1 + i2))
    perm = list(i1 + i2)
    # count inversions of the concatenation
    inv = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                inv += 1
    return ((-1) ** inv, merged)


def wedge(a: FormExpr, b: FormExpr) -> FormExpr:
    _same_chart(a, b)
    if a.degree + b.degree > a.chart.dim:
        raise ExprError("degree overflow in wedge product")
    out: Dict[Tuple[int, ...], ScalarExpr] = {}
    for i1, c1 in a.coeffs.items():
        for i2, c2 in b.coeffs.items():
            m = _merge_indices(i1, i2)
            if m is None:
                continue
            sign, idx = m
            out[idx] = out.get(idx, ZERO) + sign * c1 * c2
    return FormExpr.make(a.chart, a.degree + b.degree, out)


def exterior_derivative(w: FormExpr) -> FormExpr:
    if w.degree + 1 > w.chart.dim:
        raise ExprError("degree overflow in exterior derivative")
    out: Dict[Tuple[int, ...], ScalarExpr] = {}
    for idx, c in w.coeffs.items():
        for j, coord in enumerate(w.chart.coords):
            if j in idx:
                continue
            dc = c.diff(coord)
            if dc.is_zero():
                continue
            m = _merge_indices((j,), idx)
            sign, merged = m
            out[merged] = out.get(merged, ZERO) + sign * dc
    return FormExpr.make(w.chart, w.degree + 1, out)


def interior_product(v: VectorFieldExpr, w: FormExpr) -> FormExpr:
    _same_chart(v, w)
    if w.degree == 0:
        raise ExprError("cannot contract a 0-form")
    out: Dict[Tuple[int, ...], ScalarExpr] = {}
    for idx, c in w.coeffs.items():
        for p, i in enumerate(idx):
            rest = idx[:p] + idx[p + 1:]
            term = ((-1) ** p) * v.comps[i] * c
            out[rest] = out.get(rest, ZERO) + term
    return FormExpr.make(w.chart, w.degree - 1, out)


def lie_derivative_form(v: VectorFieldExpr, w: FormExpr) -> FormExpr:
    """Cartan formula L_v w = i_v dw + d(i_v w)."""
    part1 = interior_product(v, exterior_derivative(w))
    if w.degree == 0:
        return FormExpr.function(w.chart, v(w.coeffs.get((), ZERO)))
    part2 = exterior_derivative(interior_product(v, w))
    return part1 + part2


def det_expr(rows: Sequence[Sequence[ScalarExpr]]) -> ScalarExpr:
    """Determinant of a small square matrix of expressions (Laplace)."""
    n = len(rows)
    if n == 0:
        return num(1)
    if n == 1:
        return as_expr(rows[0][0])
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    out = ZERO
    for j in range(n):
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = rows[0][j] * det_expr(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def annihilator_of_fields(fields: Sequence[VectorFieldExpr]) -> FormExpr:
    """The 1-form i_{X1}...i_{Xn-1} vol annihilating the span of the fields.

    Requires dim = len(fields) + 1; vanishes exactly where the fields are
    dependent.
    """
    chart = fields[0].chart
    n = chart.dim
    if len(fields) != n - 1:
        raise ExprError("need dim-1 fields for the annihilator construction")
    out = FormExpr.volume(chart)
    for f in fields:
        out = interior_product(f, out)
    return out


def wedge_fields_coeffs(fields: Sequence[VectorFieldExpr]) -> Dict[Tuple[int, ...], ScalarExpr]:
    """Coefficients of X1 ^ ... ^ Xk as a k-vector (minors of the matrix)."""
    chart = fields[0].chart
    k = len(fields)
    out = {}
    for idx in combinations(range(chart.dim), k):
        rows = [[f.comps[i] for i in idx] for f in fields]
        out[idx] = det_expr(rows)
    return out


def sum_of_squares(exprs) -> ScalarExpr:
    out = ZERO
    for e in exprs:
        e = as_expr(e)
        out = out + e * e
    return out


def proportional_forms(a: FormExpr, b: FormExpr):
    """Return f with a == f*b exactly (canonical scalar multiple), else None."""
    from .scalar import try_divide

    if a.chart.coords != b.chart.coords or a.degree != b.degree:
        return None
    pivot = None
    for idx, c in b.coeffs.items():
        if not c.is_zero():
            pivot = idx
            break
    if pivot is None:
        return None
    f = try_divide(a.coeffs.get(pivot, ZERO), b.coeffs[pivot])
    if f is None:
        return None
    if (a - b.scale(f)).is_zero():
        return f
    return None


@dataclass(frozen=True)
class CoordMap:
    """A coordinate map between charts, with an optional symbolic inverse."""

    source: Chart
    target: Chart
    comps: Mapping[str, ScalarExpr]  # target coord -> expr in source coords
    inverse: Optional["CoordMap"] = None

    @staticmethod
    def make(source: Chart, target: Chart, comps: Mapping[str, object], inverse=None) -> "CoordMap":
        clean = {}
        for c in target.coords:
            if c not in comps:
                raise ExprError(f"map missing component for {c}")
            e = as_expr(comps[c])
            bad = set(e.free_symbols()) - set(source.coords)
            if bad:
                raise ExprError(f"map component {c} uses unknown symbols {bad}")
            clean[c] = e
        return CoordMap(source, target, clean, inverse)

    @staticmethod
    def identity(chart: Chart) -> "CoordMap":
        comps = {c: sym(c) for c in chart.coords}
        m = CoordMap(chart, chart, comps, None)
        return CoordMap(chart, chart, comps, m)

    def apply_scalar(self, f: ScalarExpr) -> ScalarExpr:
        """f o phi for f on the target."""
        return as_expr(f).subs(dict(self.comps))

    def jacobian(self):
        """d(phi^i)/d(x^j) indexed [target i][source j]."""
        return [
            [self.comps[ci].diff(cj) for cj in self.source.coords]
            for ci in self.target.coords
        ]


def pullback(phi: CoordMap, w: FormExpr) -> FormExpr:
    """phi^* w for w on the target chart; result lives on the source chart."""
    if w.chart.coords != phi.target.coords:
        raise ChartMismatch("form does not live on the map target")
    jac = phi.jacobian()
    out: Dict[Tuple[int, ...], ScalarExpr] = {}
    n_src = phi.source.dim
    for idx, c in w.coeffs.items():
        c_src = phi.apply_scalar(c)
        if w.degree == 0:
            out[()] = out.get((), ZERO) + c_src
            continue
        for jdx in combinations(range(n_src), w.degree):
            rows = [[jac[i][j] for j in jdx] for i in idx]
            d = det_expr(rows)
            if d.is_zero():
                continue
            out[jdx] = out.get(jdx, ZERO) + c_src * d
    return FormExpr.make(phi.source, w.degree, out)


def pushforward(phi: CoordMap, v: VectorFieldExpr) -> VectorFieldExpr:
    """phi_* v for v on the source chart; requires a symbolic inverse."""
    if phi.inverse is None:
        raise ExprError("pushforward requires a symbolic inverse")
    if v.chart.coords != phi.source.coords:
        raise ChartMismatch("field does not live on the map source")
    inv = phi.inverse
    jac = phi.jacobian()
    comps = []
    for i, ci in enumerate(phi.target.coords):
        e = ZERO
        for j in range(phi.source.dim):
            e = e + jac[i][j] * v.comps[j]
        comps.append(inv.apply_scalar(e))
    return VectorFieldExpr(phi.target, tuple(comps))
