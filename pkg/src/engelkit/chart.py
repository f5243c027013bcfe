"""Coordinate charts with compact semi-algebraic domains and named faces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .scalar import ScalarExpr, as_expr, num, sym, ExprError

# Periodic coordinates range over [0, 2*pi); their box bound is a rational
# cover of that interval.  Certification over the cover is conservative.
PERIOD_BOUND = Fraction(44, 7)


@dataclass(frozen=True)
class Chart:
    name: str
    coords: Tuple[str, ...]
    bounds: Mapping[str, Tuple[Fraction, Fraction]]
    constraints: Tuple[ScalarExpr, ...] = ()
    periodic: Tuple[str, ...] = ()

    @staticmethod
    def build(
        name: str,
        coords: Sequence[str],
        bounds: Mapping[str, Tuple] = None,
        constraints: Sequence[ScalarExpr] = (),
        periodic: Sequence[str] = (),
    ) -> "Chart":
        coords = tuple(coords)
        bnds: Dict[str, Tuple[Fraction, Fraction]] = {}
        bounds = dict(bounds or {})
        for c in coords:
            if c in bounds:
                lo, hi = bounds[c]
                bnds[c] = (Fraction(lo), Fraction(hi))
            elif c in periodic:
                bnds[c] = (Fraction(0), PERIOD_BOUND)
            else:
                raise ExprError(f"coordinate {c} of chart {name} has no bounds")
            if bnds[c][0] >= bnds[c][1]:
                raise ExprError(f"empty bound for coordinate {c}")
        for g in constraints:
            if not as_expr(g).is_polynomial():
                raise ExprError("domain constraints must be polynomial")
            bad = set(as_expr(g).free_symbols()) - set(coords)
            if bad:
                raise ExprError(f"constraint uses unknown symbols {bad}")
        return Chart(name, coords, bnds, tuple(as_expr(g) for g in constraints), tuple(periodic))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def box(self) -> Dict[str, Tuple[Fraction, Fraction]]:
        return dict(self.bounds)

    def contains_exact(self, point: Mapping[str, Fraction]) -> bool:
        """Exact membership test for a rational point."""
        for c in self.coords:
            v = Fraction(point[c])
            lo, hi = self.bounds[c]
            if c in self.periodic:
                continue
            if not (lo <= v <= hi):
                return False
        for g in self.constraints:
            val = g.eval_exact(point)
            if not val.is_rational():
                return False
            if val.as_rational() < 0:
                return False
        return True

    def center(self) -> Dict[str, Fraction]:
        return {c: (lo + hi) / 2 for c, (lo, hi) in self.bounds.items()}

    def restricted(self, new_bounds: Mapping[str, Tuple]) -> "Chart":
        merged = dict(self.bounds)
        for c, (lo, hi) in new_bounds.items():
            merged[c] = (Fraction(lo), Fraction(hi))
        return Chart(self.name, self.coords, merged, self.constraints, self.periodic)


def with_params(chart: Chart, params: Mapping[str, Tuple]) -> Chart:
    """Extend a chart with bounded parameter symbols (for certification)."""
    coords = chart.coords + tuple(params)
    bounds = dict(chart.bounds)
    for p, (lo, hi) in params.items():
        bounds[p] = (Fraction(lo), Fraction(hi))
    return Chart(chart.name + "+params", coords, bounds, chart.constraints, chart.periodic)


@dataclass(frozen=True)
class Face:
    """A boundary face: a chart of its own plus the embedding into the ambient.

    ``embed`` sends each ambient coordinate to an expression in the face
    coordinates; ``tight`` is the ambient defining function that vanishes on
    the face (nonnegative inside the domain), so the outward direction is the
    direction of decreasing ``tight``.
    """

    name: str
    ambient: Chart
    chart: Chart
    embed: Mapping[str, ScalarExpr]
    tight: ScalarExpr

    def pull_scalar(self, e: ScalarExpr) -> ScalarExpr:
        return as_expr(e).subs(dict(self.embed))

    def project_tangent(self, comps_by_coord: Mapping[str, ScalarExpr]):
        """Express an ambient vector field tangent to the face in face coords.

        For graph-type faces (every face coordinate embeds identically) the
        face components are the pulled-back ambient components.  For
        parametrized faces the embedding must have orthonormal Jacobian
        columns (checked symbolically), and the components are obtained by
        pairing with the columns.
        """
        pulled = {c: self.pull_scalar(comps_by_coord[c]) for c in self.ambient.coords}
        identity_like = all(
            self.embed.get(f, None) == sym(f) for f in self.chart.coords
        )
        if identity_like:
            return tuple(pulled[f] for f in self.chart.coords)
        cols = {
            f: [as_expr(self.embed[c]).diff(f) for c in self.ambient.coords]
            for f in self.chart.coords
        }
        for f in self.chart.coords:
            for g in self.chart.coords:
                dot = num(0)
                for a, b in zip(cols[f], cols[g]):
                    dot = dot + a * b
                expect = num(1) if f == g else num(0)
                if not (dot - expect).is_zero():
                    raise ExprError(
                        "face embedding does not have orthonormal Jacobian columns"
                    )
        out = []
        for f in self.chart.coords:
            e = num(0)
            for c, d in zip(self.ambient.coords, cols[f]):
                e = e + d * pulled[c]
            out.append(e)
        return tuple(out)


@dataclass(frozen=True)
class LevelSetFace:
    """A boundary face described only as the zero set of the tight function.

    Used when no in-class parametrization exists (e.g. a sphere cutting a
    trigonometric chart); supports transversality certification via the
    equality constraint, but not pullbacks.
    """

    name: str
    ambient: Chart
    tight: ScalarExpr

    def constrained_chart(self) -> Chart:
        g = as_expr(self.tight)
        return Chart(
            self.ambient.name + "|" + self.name,
            self.ambient.coords,
            self.ambient.bounds,
            self.ambient.constraints + (g, -g),
            self.ambient.periodic,
        )


def coordinate_face(chart: Chart, coord: str, side: str, name: Optional[str] = None) -> Face:
    """Face where one coordinate sits at its lower or upper bound."""
    lo, hi = chart.bounds[coord]
    value = hi if side == "upper" else lo
    g = (sym(coord) - num(value)) if side == "lower" else (num(value) - sym(coord))
    rest = tuple(c for c in chart.coords if c != coord)
    sub_bounds = {c: chart.bounds[c] for c in rest}
    constraints = []
    for cons in chart.constraints:
        c2 = cons.subs({coord: num(value)})
        if not c2.is_rational():
            constraints.append(c2)
        elif c2.as_rational() < 0:
            raise ExprError("face lies outside the chart domain")
    face_chart = Chart.build(
        f"{chart.name}.{coord}={value}",
        rest,
        bounds=sub_bounds,
        constraints=constraints,
        periodic=tuple(c for c in chart.periodic if c != coord),
    )
    embed = {c: sym(c) for c in rest}
    embed[coord] = num(value)
    return Face(name or f"{coord}={value}", chart, face_chart, embed, g)


def graph_face(
    chart: Chart,
    coord: str,
    graph: ScalarExpr,
    name: str,
    face_bounds: Mapping[str, Tuple] = None,
    orient_inward_positive: bool = True,
) -> Face:
    """Face given by ``coord = graph(other coords)``.

    ``orient_inward_positive`` states that ``graph - coord >= 0`` holds on
    the domain side of the face (so that is the tight function); otherwise
    ``coord - graph`` is used.
    """
    graph = as_expr(graph)
    rest = tuple(c for c in chart.coords if c != coord)
    if set(graph.free_symbols()) - set(rest):
        raise ExprError("graph must depend only on the remaining coordinates")
    sub_bounds = {c: chart.bounds[c] for c in rest}
    if face_bounds:
        sub_bounds.update({c: (Fraction(a), Fraction(b)) for c, (a, b) in face_bounds.items()})
    face_chart = Chart.build(
        f"{chart.name}.{name}",
        rest,
        bounds=sub_bounds,
        periodic=tuple(c for c in chart.periodic if c != coord),
    )
    embed = {c: sym(c) for c in rest}
    embed[coord] = graph
    g = graph - sym(coord) if orient_inward_positive else sym(coord) - graph
    return Face(name, chart, face_chart, embed, g)
