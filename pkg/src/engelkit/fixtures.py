"""Shared geometric fixtures: the boundary deformation family of the
connected-sum construction and its sample data."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List

from .chart import Chart
from .forms import FormExpr, VectorFieldExpr
from .scalar import cos_of, num, sin_of, sym


def boundary_family_chart() -> Chart:
    """The outer boundary of the 1-handle, coordinates (x, eta, t); eta is
    the angle on the unit circle y1 = cos(eta), y2 = sin(eta)."""
    return Chart.build(
        "dplusR1",
        ["x", "eta", "t"],
        bounds={"x": (-3, 3)},
        periodic=["eta", "t"],
    )


def boundary_family_form(s: str = "s") -> FormExpr:
    """The even-contact deformation family restricted to the outer boundary.

    Interpolates between the annihilators of the two connected-sum models;
    the restriction to the boundary is a contact form for every parameter
    value in [0, 1].
    """
    ch = boundary_family_chart()
    eta, x, ss = sym("eta"), sym("x"), sym(s)
    sin_e, cos_e = sin_of(eta), cos_of(eta)
    return FormExpr.one_form(
        ch,
        {
            "x": -sin_e,
            "eta": (1 - 2 * ss) * sin_e - x * cos_e * Fraction(1, 2),
            "t": cos_e * Fraction(1, 2),
        },
    )


def boundary_family_points(n: int = 20) -> List[Dict[str, float]]:
    """Sample points on the central torus x = 0."""
    pts = []
    for i in range(n):
        eta = 2 * math.pi * (i + 0.3) / n
        t = 2 * math.pi * ((i * 7) % n + 0.6) / n
        pts.append({"x": 0.0, "eta": eta, "t": t})
    return pts


def legendrian_comparison_field(point: Dict[str, float]) -> List[float]:
    """The comparison Legendrian field on the central torus, evaluated at a
    point: (8 y2 / (1 + y2^2)) (y2 d_t + 1/2 y1 d_x) with y = (cos, sin) eta.
    Components in (x, eta, t) order."""
    y1 = math.cos(point["eta"])
    y2 = math.sin(point["eta"])
    f = 8.0 * y2 / (1.0 + y2 * y2)
    return [f * 0.5 * y1, 0.0, f * y2]
