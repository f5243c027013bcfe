"""Contact/even-contact/Engel predicates and the induced-structure machinery."""

import math
import random
from fractions import Fraction

import pytest

from engelkit.certify import CertifyOptions
from engelkit.chart import Chart, coordinate_face, with_params
from engelkit.forms import (
    CoordMap,
    FormExpr,
    VectorFieldExpr,
    exterior_derivative,
    lie_derivative_form,
    proportional_forms,
    pullback,
    wedge,
)
from engelkit.scalar import cos_of, num, sin_of, sym
from engelkit.structures import (
    Distribution,
    SolveError,
    characteristic_foliation,
    check_W_in_D,
    contact_field_from_function,
    gray_field,
    gray_flow,
    induced_contact_on_transversal,
    intersection_line_field,
    is_contact,
    is_engel,
    is_even_contact,
    kernel_frame,
    reeb_field,
    singular_foliation,
    isolate_zeros_1d,
)

x, y, z, w, t = sym("x"), sym("y"), sym("z"), sym("w"), sym("t")


def darboux3():
    return Chart.build("dbx", ["x", "y", "z"], bounds={c: (-1, 1) for c in "xyz"})


def r4():
    return Chart.build("r4", ["w", "x", "y", "z"], bounds={c: (-1, 1) for c in "wxyz"})


def standard_engel():
    ch = r4()
    X = VectorFieldExpr.make(ch, {"w": 1})
    Y = VectorFieldExpr.make(ch, {"y": 1, "z": x, "x": w})
    return ch, Distribution.span([X, Y])


class TestContact:
    def test_darboux(self):
        assert is_contact(FormExpr.one_form(darboux3(), {"z": 1, "y": -x})).verified

    def test_closed_form_refuted(self):
        cert = is_contact(FormExpr.one_form(darboux3(), {"z": 1}))
        assert cert.verdict == "refuted"

    def test_overtwisted_annulus(self):
        q = sym("q")
        ch = Chart.build(
            "ann", ["q", "phi", "z"],
            bounds={"q": (Fraction(1, 4), 4), "z": (-1, 1)}, periodic=["phi"],
        )
        alpha = FormExpr.one_form(ch, {"z": cos_of(q), "phi": sin_of(q)})
        assert is_contact(alpha).verified


class TestEvenContact:
    def test_standard(self):
        ch = r4()
        assert is_even_contact(FormExpr.one_form(ch, {"z": 1, "y": -x})).verified

    def test_closed_refuted(self):
        ch = r4()
        assert is_even_contact(FormExpr.one_form(ch, {"z": 1})).verdict == "refuted"


class TestEngel:
    def test_standard_engel(self):
        ch, dist = standard_engel()
        assert dist.independence.verified
        cert = is_engel(dist)
        assert cert.verified
        ann = cert.annihilator
        assert proportional_forms(ann, FormExpr.one_form(ch, {"z": 1, "y": -x})) is not None

    def test_integrable_refuted(self):
        ch = r4()
        dist = Distribution.span(
            [VectorFieldExpr.make(ch, {"x": 1}), VectorFieldExpr.make(ch, {"y": 1})]
        )
        assert is_engel(dist).verdict == "refuted"

    def test_characteristic_foliation(self):
        ch, dist = standard_engel()
        beta = FormExpr.one_form(ch, {"z": 1, "y": -x})
        wf = characteristic_foliation(beta, normalize="w")
        assert wf == VectorFieldExpr.make(ch, {"w": 1})
        assert check_W_in_D(dist, wf).verified
        assert check_W_in_D(dist, VectorFieldExpr.make(ch, {"z": 1})).verdict == "refuted"

    def test_characteristic_foliation_trivial(self):
        ch = Chart.build("c", ["t", "x", "y", "w"], bounds={c: (-1, 1) for c in "txyw"})
        beta = FormExpr.one_form(ch, {"t": 1, "y": sym("x"), "x": -sym("y")})
        wf = characteristic_foliation(beta, normalize="w")
        assert wf == VectorFieldExpr.make(ch, {"w": 1})


class TestReeb:
    def test_examples(self):
        ch = darboux3()
        assert reeb_field(FormExpr.one_form(ch, {"z": 1, "y": -x})) == \
            VectorFieldExpr.make(ch, {"z": 1})
        assert reeb_field(FormExpr.one_form(ch, {"z": 1, "y": x})) == \
            VectorFieldExpr.make(ch, {"z": 1})

    def test_torus(self):
        ch = Chart.build("t3", ["t", "x", "y"],
                         bounds={"x": (-1, 1), "y": (-1, 1)}, periodic=["t"])
        alpha = FormExpr.one_form(ch, {"x": cos_of(t), "y": -sin_of(t)})
        r = reeb_field(alpha)
        assert r == VectorFieldExpr.make(ch, {"x": cos_of(t), "y": -sin_of(t)})
        # both defining identities hold canonically
        assert (alpha(r) - 1).is_zero()
        da = exterior_derivative(alpha)
        from engelkit.forms import interior_product
        assert interior_product(r, da).is_zero()


class TestContactField:
    def test_from_function_recovers(self):
        ch = Chart.build("h1", ["x", "y1", "y2"], bounds={c: (-1, 1) for c in ("x", "y1", "y2")})
        y1, y2 = sym("y1"), sym("y2")
        alpha = FormExpr.one_form(ch, {"y1": 1, "x": y2})
        v1 = VectorFieldExpr.make(ch, {"y2": 2 * y2, "x": -x, "y1": y1})
        got = contact_field_from_function(alpha, alpha(v1))
        assert got == v1
        lv = lie_derivative_form(got, alpha)
        assert wedge(lv, alpha).is_zero()

    def test_trivial_functions(self):
        ch = darboux3()
        alpha = FormExpr.one_form(ch, {"z": 1, "y": -x})
        assert contact_field_from_function(alpha, num(1)) == reeb_field(alpha)
        assert contact_field_from_function(alpha, num(0)).is_zero()


class TestGray:
    def test_constant_family(self):
        ch = darboux3()
        alpha = FormExpr.one_form(ch, {"z": 1, "y": -x})
        assert gray_field(alpha).numerator.is_zero()

    def test_translation_family(self):
        ch = darboux3()
        a_s = FormExpr.one_form(ch, {"z": 1, "y": -(x + sym("s"))})
        zf = gray_field(a_s)
        assert zf.denominator == num(1)
        assert zf.numerator == VectorFieldExpr.make(ch, {"x": -1})
        res = gray_flow(a_s, 100, [{"x": 0.25, "y": -0.5, "z": 0.1}])
        assert abs(res.points[0]["x"] - (0.25 - 1.0)) < 1e-8
        assert res.max_residual < 1e-10

    def test_residual_refinement(self):
        from engelkit.fixtures import boundary_family_form, boundary_family_points

        form = boundary_family_form()
        pts = boundary_family_points(4)
        r1 = gray_flow(form, 60, pts)
        r2 = gray_flow(form, 120, pts)
        assert r2.max_residual * 4 <= r1.max_residual


class TestTransversal:
    def test_standard_engel_face(self):
        ch, dist = standard_engel()
        beta = FormExpr.one_form(ch, {"z": 1, "y": -x})
        wf = VectorFieldExpr.make(ch, {"w": 1})
        face = coordinate_face(ch, "w", "upper", "w=1")
        induced, trans, contact = induced_contact_on_transversal(beta, wf, face)
        assert trans.verified and contact.verified
        expected = FormExpr.one_form(face.chart, {"z": 1, "y": -sym("x")})
        assert (induced - expected).is_zero()

    def test_intersection_line_field(self):
        ch, dist = standard_engel()
        wf, xf = dist.fields
        face = coordinate_face(ch, "w", "upper", "w=1")
        line, cert = intersection_line_field(dist, wf, xf, face)
        assert cert.verified
        expected = VectorFieldExpr.make(face.chart, {"y": 1, "z": sym("x"), "x": num(1)})
        # at w = 1 the generator has a dx leg from w d_x
        assert line == expected


class TestKernelFrame:
    def test_frame_spans_and_orients(self):
        ch = darboux3()
        alpha = FormExpr.one_form(ch, {"z": 1, "y": -x})
        e1, e2 = kernel_frame(alpha)
        assert alpha(e1).is_zero() and alpha(e2).is_zero()
        da = exterior_derivative(alpha)
        pairing = da(e1, e2)
        from engelkit.certify import certify_nonvanishing
        assert certify_nonvanishing(pairing, ch).sign == 1


class TestSingularFoliation:
    def test_torus_standard_form_divides(self):
        ch3 = Chart.build("t3", ["phi", "t", "x"],
                          bounds={"x": (-1, 1)}, periodic=["phi", "t"])
        alpha = FormExpr.one_form(ch3, {"t": cos_of(sym("phi")), "x": sin_of(sym("phi"))})
        surf = Chart.build("t2", ["phi", "t"], bounds={}, periodic=["phi", "t"])
        emb = CoordMap.make(surf, ch3, {"phi": sym("phi"), "t": sym("t"), "x": num(0)})
        rep = singular_foliation(alpha, emb)
        # the singular locus is the two circles cos(phi) = 0
        assert not rep.nondegenerate
        assert len(rep.degenerate_loci) == 2
        zs = isolate_zeros_1d(cos_of(sym("phi")), "phi", Fraction(0), Fraction(44, 7))
        assert len(zs) == 2

    def test_plane_degenerate_locus(self):
        ch3 = darboux3()
        alpha = FormExpr.one_form(ch3, {"z": 1, "y": -x})
        surf = Chart.build("pl", ["x", "y"], bounds={"x": (-1, 1), "y": (-1, 1)})
        emb = CoordMap.make(surf, ch3, {"x": sym("x"), "y": sym("y"), "z": num(0)})
        rep = singular_foliation(alpha, emb)
        assert rep.degenerate_loci  # the line x = 0 is singular

    def test_sphere_poles(self):
        # unit sphere in the rotationally symmetric structure: the only
        # chart-interior singular candidates sit at the poles, where the
        # numeric index is +1 on both
        ch3 = darboux3()
        alpha = FormExpr.one_form(ch3, {"z": 1, "y": x, "x": -y})
        surf = Chart.build("sph", ["th", "ph"],
                           bounds={"th": (Fraction(1, 10), Fraction(3))},
                           periodic=["ph"])
        th, ph = sym("th"), sym("ph")
        emb = CoordMap.make(
            surf, ch3,
            {"x": sin_of(th) * cos_of(ph), "y": sin_of(th) * sin_of(ph), "z": cos_of(th)},
        )
        rep = singular_foliation(alpha, emb)
        # no interior singular points away from the poles
        assert rep.singular_points == []
        # numeric pole index oracle: winding of the projected field around
        # each pole in a normal chart
        for pole_z in (1.0, -1.0):
            windings = []
            r = 0.05
            npts = 60
            total = 0.0
            prev = None
            for k in range(npts + 1):
                ang = 2 * math.pi * k / npts
                px, py = r * math.cos(ang), r * math.sin(ang)
                pz = pole_z * math.sqrt(max(0.0, 1 - px * px - py * py))
                # line field on the sphere: projection of ker(alpha)
                # alpha = dz + x dy - y dx; tangent projection of
                # X = (y, -x, 0) x normal gives the foliation direction
                nx, ny, nz = px, py, pz
                ax, ay, az = -py, px, 1.0
                # X = a - (a.n) n projected to the tangent plane
                dot = ax * nx + ay * ny + az * nz
                tx, ty = ax - dot * nx, ay - dot * ny
                angv = math.atan2(ty, tx)
                if prev is not None:
                    d = angv - prev
                    while d > math.pi:
                        d -= 2 * math.pi
                    while d < -math.pi:
                        d += 2 * math.pi
                    total += d
                prev = angv
            index = round(total / (2 * math.pi))
            assert index == 1


class TestInvariants:
    def test_engel_characteristic_in_distribution(self):
        """Certified Engel distributions have their characteristic field
        inside the distribution (executable form of the tangency lemma)."""
        ch, dist = standard_engel()
        cert = is_engel(dist)
        wf = characteristic_foliation(cert.annihilator, normalize="w")
        assert check_W_in_D(dist, wf).verified
