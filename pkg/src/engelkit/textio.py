"""Parser for the declarative input format.

    chart NAME coords(a b c) domain{ -1<=a<=1; a^2+b^2<=1 } periodic(t)
    param NAME = p/q
    form NAME = d(z) - x*d(y)
    field NAME = 2*y2*d(y2) - x*d(x)
    curve NAME param(u) period(2pi) { x = cos(u); y = sin(u) }

Scalar expressions use +, -, *, ^ (integer powers), division by rational
constants, sin and cos of affine arguments, and rational literals p/q.
Inside a form, d(a) is the coordinate differential; inside a field it is
the coordinate derivation.  Forms, fields, and curves bind to the most
recently declared chart; parameters are substituted eagerly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .chart import Chart
from .curves import ParamCurve
from .forms import FormExpr, VectorFieldExpr, wedge
from .scalar import ExprError, ScalarExpr, ZERO, as_expr, cos_of, num, sin_of, sym


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(msg + where)


TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|[-+*/^=(){};,<>])|(?P<bad>\S))"
)


@dataclass
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if "#" in line:
            line = line[: line.index("#")]
        pos = 0
        while pos < len(line):
            m = TOKEN_RE.match(line, pos)
            if not m or m.end() == pos:
                break
            if m.group("bad"):
                raise ParseError(f"unexpected character {m.group('bad')!r}", lineno, m.start("bad") + 1)
            for kind in ("num", "name", "op"):
                if m.group(kind):
                    out.append(Token(kind, m.group(kind), lineno, m.start(kind) + 1))
            pos = m.end()
    return out


@dataclass
class Declarations:
    charts: Dict[str, Chart] = field(default_factory=dict)
    params: Dict[str, Fraction] = field(default_factory=dict)
    forms: Dict[str, FormExpr] = field(default_factory=dict)
    fields: Dict[str, VectorFieldExpr] = field(default_factory=dict)
    curves: Dict[str, ParamCurve] = field(default_factory=dict)
    order: List[Tuple[str, str]] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.toks = tokens
        self.i = 0
        self.decls = Declarations()
        self.current_chart: Optional[Chart] = None

    # -- token helpers ---------------------------------------------------

    def peek(self) -> Optional[Token]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            raise ParseError("unexpected end of input",
                             last.line if last else 1, last.col if last else 1)
        self.i += 1
        return t

    def expect(self, value: str) -> Token:
        t = self.next()
        if t.value != value:
            raise ParseError(f"expected {value!r}, found {t.value!r}", t.line, t.col)
        return t

    def expect_name(self) -> Token:
        t = self.next()
        if t.kind != "name":
            raise ParseError(f"expected a name, found {t.value!r}", t.line, t.col)
        return t

    # -- the grammar -------------------------------------------------------

    def parse(self) -> Declarations:
        while self.peek() is not None:
            t = self.expect_name()
            if t.value == "chart":
                self.parse_chart()
            elif t.value == "param":
                self.parse_param()
            elif t.value == "form":
                self.parse_form()
            elif t.value == "field":
                self.parse_field()
            elif t.value == "curve":
                self.parse_curve()
            else:
                raise ParseError(f"unknown declaration {t.value!r}", t.line, t.col)
        return self.decls

    def check_fresh(self, name: Token):
        d = self.decls
        if any(name.value in bag for bag in (d.charts, d.params, d.forms, d.fields, d.curves)):
            raise ParseError(f"duplicate name {name.value!r}", name.line, name.col)

    def parse_chart(self):
        name = self.expect_name()
        self.check_fresh(name)
        self.expect("coords")
        self.expect("(")
        coords = []
        while self.peek() and self.peek().value != ")":
            coords.append(self.expect_name().value)
        self.expect(")")
        constraints = []
        bounds: Dict[str, List[Optional[Fraction]]] = {c: [None, None] for c in coords}
        periodic: List[str] = []
        while self.peek() and self.peek().value in ("domain", "periodic"):
            t = self.next()
            if t.value == "domain":
                self.expect("{")
                while self.peek() and self.peek().value != "}":
                    self.parse_inequality(coords, bounds, constraints)
                    if self.peek() and self.peek().value == ";":
                        self.next()
                self.expect("}")
            else:
                self.expect("(")
                while self.peek() and self.peek().value != ")":
                    pname = self.expect_name()
                    if pname.value not in coords:
                        raise ParseError(f"unknown periodic coordinate {pname.value!r}",
                                         pname.line, pname.col)
                    periodic.append(pname.value)
                self.expect(")")
        final_bounds = {}
        for c in coords:
            lo, hi = bounds[c]
            if lo is not None and hi is not None:
                final_bounds[c] = (lo, hi)
            elif c not in periodic:
                raise ParseError(f"coordinate {c} of chart {name.value} is unbounded",
                                 name.line, name.col)
        try:
            chart = Chart.build(name.value, coords, bounds=final_bounds,
                                constraints=constraints, periodic=periodic)
        except ExprError as e:
            raise ParseError(str(e), name.line, name.col)
        self.decls.charts[name.value] = chart
        self.decls.order.append(("chart", name.value))
        self.current_chart = chart

    def parse_inequality(self, coords, bounds, constraints):
        """expr <= expr [<= expr]; simple coordinate bounds are recognized."""
        start = self.peek()
        parts = [self.parse_expr(coords, allow_d=False)]
        while self.peek() and self.peek().value in ("<=", "<"):
            self.next()
            parts.append(self.parse_expr(coords, allow_d=False))
        if len(parts) < 2:
            raise ParseError("expected an inequality", start.line, start.col)
        for lhs, rhs in zip(parts, parts[1:]):
            diff = rhs - lhs
            # coordinate bound forms: c - lo >= 0 or hi - c >= 0
            handled = False
            if diff.is_affine():
                const, coeffs = diff.affine_parts()
                if len(coeffs) == 1:
                    (c, coef), = coeffs.items()
                    if coef == 1:
                        lo = -const
                        cur = bounds[c][0]
                        bounds[c][0] = lo if cur is None else max(cur, lo)
                        handled = True
                    elif coef == -1:
                        hi = const
                        cur = bounds[c][1]
                        bounds[c][1] = hi if cur is None else min(cur, hi)
                        handled = True
            if not handled:
                constraints.append(diff)

    def parse_param(self):
        name = self.expect_name()
        self.check_fresh(name)
        self.expect("=")
        value = self.parse_expr([], allow_d=False)
        if not value.is_rational():
            raise ParseError("parameter values must be rational", name.line, name.col)
        self.decls.params[name.value] = value.as_rational()
        self.decls.order.append(("param", name.value))

    def _need_chart(self, tok: Token) -> Chart:
        if self.current_chart is None:
            raise ParseError("declare a chart first", tok.line, tok.col)
        return self.current_chart

    def parse_form(self):
        name = self.expect_name()
        self.check_fresh(name)
        chart = self._need_chart(name)
        self.expect("=")
        terms = self.parse_d_combination(chart)
        form = None
        for scalar, d_coords in terms:
            if len(d_coords) == 0:
                piece = FormExpr.function(chart, scalar)
            else:
                piece = FormExpr.one_form(chart, {d_coords[0]: scalar})
                for c in d_coords[1:]:
                    piece = wedge(piece, FormExpr.one_form(chart, {c: num(1)}))
            form = piece if form is None else form + piece
        if form is None:
            raise ParseError("empty form", name.line, name.col)
        self.decls.forms[name.value] = form
        self.decls.order.append(("form", name.value))

    def parse_field(self):
        name = self.expect_name()
        self.check_fresh(name)
        chart = self._need_chart(name)
        self.expect("=")
        terms = self.parse_d_combination(chart)
        comps = {c: ZERO for c in chart.coords}
        for scalar, d_coords in terms:
            if len(d_coords) != 1:
                raise ParseError("each field term needs exactly one d(coord)",
                                 name.line, name.col)
            comps[d_coords[0]] = comps[d_coords[0]] + scalar
        self.decls.fields[name.value] = VectorFieldExpr.make(chart, comps)
        self.decls.order.append(("field", name.value))

    def parse_curve(self):
        name = self.expect_name()
        self.check_fresh(name)
        chart = self._need_chart(name)
        self.expect("param")
        self.expect("(")
        pname = self.expect_name().value
        self.expect(")")
        self.expect("period")
        self.expect("(")
        t = self.next()
        period_2pi = False
        hi = None
        if t.kind == "num" and t.value == "2" and self.peek() and self.peek().value == "pi":
            self.next()
            period_2pi = True
        elif t.kind == "num":
            p = int(t.value)
            q = 1
            if self.peek() and self.peek().value == "/":
                self.next()
                q = int(self.expect_num().value)
            hi = Fraction(p, q)
        else:
            raise ParseError("period must be 2pi or a rational", t.line, t.col)
        self.expect(")")
        self.expect("{")
        comps = {}
        while self.peek() and self.peek().value != "}":
            cname = self.expect_name()
            if cname.value not in chart.coords:
                raise ParseError(f"unknown coordinate {cname.value!r}", cname.line, cname.col)
            self.expect("=")
            comps[cname.value] = self.parse_expr(list(chart.coords) + [pname], allow_d=False)
            if self.peek() and self.peek().value == ";":
                self.next()
        self.expect("}")
        curve = ParamCurve.smooth(chart, comps, period_2pi=period_2pi,
                                  hi=hi, param=pname)
        self.decls.curves[name.value] = curve
        self.decls.order.append(("curve", name.value))

    def expect_num(self) -> Token:
        t = self.next()
        if t.kind != "num":
            raise ParseError(f"expected a number, found {t.value!r}", t.line, t.col)
        return t

    # -- expressions -------------------------------------------------------

    def parse_d_combination(self, chart):
        """Parse an expression, returning [(scalar, d-coords tuple)] terms."""
        ast = self.parse_sum(list(chart.coords), allow_d=True)
        out = []
        for scalar, ds in ast:
            for c in ds:
                if c not in chart.coords:
                    tok = self.toks[min(self.i, len(self.toks) - 1)]
                    raise ParseError(f"d({c}): unknown coordinate", tok.line, tok.col)
            out.append((scalar, ds))
        return out

    def parse_expr(self, symbols, allow_d: bool) -> ScalarExpr:
        terms = self.parse_sum(symbols, allow_d)
        total = ZERO
        for scalar, ds in terms:
            if ds:
                tok = self.toks[min(self.i, len(self.toks) - 1)]
                raise ParseError("d() not allowed in a scalar expression", tok.line, tok.col)
            total = total + scalar
        return total

    def parse_sum(self, symbols, allow_d):
        terms = self.parse_product(symbols, allow_d)
        while self.peek() and self.peek().value in ("+", "-"):
            op = self.next().value
            rhs = self.parse_product(symbols, allow_d)
            if op == "-":
                rhs = [(-s, ds) for s, ds in rhs]
            terms = terms + rhs
        return terms

    def parse_product(self, symbols, allow_d):
        acc = self.parse_factor(symbols, allow_d)
        while self.peek() and self.peek().value in ("*", "/"):
            op = self.next().value
            rhs = self.parse_factor(symbols, allow_d)
            if op == "/":
                if len(rhs) != 1 or rhs[0][1] or not rhs[0][0].is_rational():
                    t = self.toks[self.i - 1]
                    raise ParseError("division only by rational constants", t.line, t.col)
                r = rhs[0][0].as_rational()
                if r == 0:
                    t = self.toks[self.i - 1]
                    raise ParseError("division by zero", t.line, t.col)
                acc = [(s * num(Fraction(1, 1) / r), ds) for s, ds in acc]
            else:
                out = []
                for s1, d1 in acc:
                    for s2, d2 in rhs:
                        out.append((s1 * s2, d1 + d2))
                acc = out
        return acc

    def parse_factor(self, symbols, allow_d):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of expression", 1, 1)
        if t.value == "-":
            self.next()
            inner = self.parse_factor(symbols, allow_d)
            return [(-s, ds) for s, ds in inner]
        base = self.parse_atom(symbols, allow_d)
        while self.peek() and self.peek().value == "^":
            self.next()
            e = self.expect_num()
            n = int(e.value)
            out = []
            for s, ds in base:
                if ds:
                    raise ParseError("cannot raise d() to a power", e.line, e.col)
                out.append((s**n, ()))
            base = out
        return base

    def parse_atom(self, symbols, allow_d):
        t = self.next()
        if t.kind == "num":
            return [(num(int(t.value)), ())]
        if t.value == "(":
            inner = self.parse_sum(symbols, allow_d)
            self.expect(")")
            return inner
        if t.kind == "name":
            if t.value in ("sin", "cos"):
                self.expect("(")
                arg = self.parse_expr(symbols, allow_d=False)
                self.expect(")")
                try:
                    val = sin_of(arg) if t.value == "sin" else cos_of(arg)
                except ExprError as e:
                    raise ParseError(str(e), t.line, t.col)
                return [(val, ())]
            if t.value == "d":
                if not allow_d:
                    raise ParseError("d() not allowed here", t.line, t.col)
                self.expect("(")
                cname = self.expect_name()
                self.expect(")")
                return [(num(1), (cname.value,))]
            if t.value in self.decls.params:
                return [(num(self.decls.params[t.value]), ())]
            if symbols and t.value not in symbols:
                raise ParseError(f"undeclared symbol {t.value!r}", t.line, t.col)
            return [(sym(t.value), ())]
        raise ParseError(f"unexpected token {t.value!r}", t.line, t.col)


def parse_input(text: str) -> Declarations:
    return _Parser(tokenize(text)).parse()


def parse_file(path: str) -> Declarations:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_input(fh.read())
