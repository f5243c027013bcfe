"""Exact scalar expressions over chart coordinates and named parameters.

The expression class is deliberately small: rational constants, symbols,
sums, products, and sin/cos applied to affine combinations of symbols with
rational coefficients (plus an optional additive integer multiple of pi/2,
which folds away immediately).  Every expression is kept in a canonical
normal form: an expanded sum of monomials, each monomial a rational
coefficient times symbol powers times at most one sin/cos factor whose
argument is a sign-normalized affine form.  Products of trig factors are
rewritten by the product-to-sum identities, so sin^2 + cos^2 = 1 holds on
the nose and two expressions are equal exactly when their normal forms
coincide.

The class is closed under differentiation and under substitution of affine
expressions into trig arguments, which is all the toolkit needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

SIN = "sin"
COS = "cos"

Rat = Union[int, Fraction]


class ExprError(ValueError):
    """Raised when an operation would leave the expression class."""


# ---------------------------------------------------------------------------
# linear arguments of trig factors
# ---------------------------------------------------------------------------

# A LinArg is (const, ((sym, coeff), ...)) with syms sorted and coeffs nonzero.
LinArg = tuple


def _linarg(const: Fraction, items: Iterable[tuple]) -> LinArg:
    kept = tuple((s, c) for s, c in sorted(items) if c != 0)
    return (const, kept)


def _linarg_is_zero(arg: LinArg) -> bool:
    return arg[0] == 0 and not arg[1]


def _linarg_neg(arg: LinArg) -> LinArg:
    return (-arg[0], tuple((s, -c) for s, c in arg[1]))


def _linarg_add(a: LinArg, b: LinArg) -> LinArg:
    coeffs = dict(a[1])
    for s, c in b[1]:
        coeffs[s] = coeffs.get(s, Fraction(0)) + c
    return _linarg(a[0] + b[0], coeffs.items())


def _linarg_sub(a: LinArg, b: LinArg) -> LinArg:
    return _linarg_add(a, _linarg_neg(b))


def _linarg_lead(arg: LinArg) -> Fraction:
    if arg[1]:
        return arg[1][0][1]
    return arg[0]


def _norm_trig(kind: str, arg: LinArg):
    """Sign-normalize a trig atom; returns (coeff_factor, atom_or_None).

    atom is None when the factor degenerates to a constant (arg == 0).
    """
    if _linarg_is_zero(arg):
        return (Fraction(1), None) if kind == COS else (Fraction(0), None)
    if _linarg_lead(arg) < 0:
        if kind == SIN:
            return (Fraction(-1), (SIN, _linarg_neg(arg)))
        return (Fraction(1), (COS, _linarg_neg(arg)))
    return (Fraction(1), (kind, arg))


def _trig_product(t1, t2):
    """Product-to-sum rewrite of two trig atoms.

    Returns a list of (coeff, atom_or_None) pairs.
    """
    k1, a1 = t1
    k2, a2 = t2
    plus = _linarg_add(a1, a2)
    minus = _linarg_sub(a1, a2)
    if k1 == COS and k2 == COS:
        raw = [(Fraction(1, 2), COS, minus), (Fraction(1, 2), COS, plus)]
    elif k1 == SIN and k2 == SIN:
        raw = [(Fraction(1, 2), COS, minus), (Fraction(-1, 2), COS, plus)]
    elif k1 == SIN and k2 == COS:
        raw = [(Fraction(1, 2), SIN, plus), (Fraction(1, 2), SIN, minus)]
    else:  # cos * sin
        raw = [(Fraction(1, 2), SIN, plus), (Fraction(-1, 2), SIN, minus)]
    out = []
    for c, kind, arg in raw:
        f, atom = _norm_trig(kind, arg)
        if c * f != 0:
            out.append((c * f, atom))
    return out


# ---------------------------------------------------------------------------
# terms and expressions
# ---------------------------------------------------------------------------

# term key: (powers, trig) with powers a sorted tuple of (sym, exp>0) and
# trig either None or a normalized (kind, LinArg) atom.


def _mul_powers(p1, p2):
    d = dict(p1)
    for s, e in p2:
        d[s] = d.get(s, 0) + e
    return tuple(sorted((s, e) for s, e in d.items() if e != 0))


class ScalarExpr:
    """Immutable canonical-form expression."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping = None, _internal=False):
        if not _internal:
            raise ExprError("use num()/sym()/sin_of()/cos_of() to build expressions")
        self._terms = dict(terms or {})
        self._hash = None

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _make(terms: dict) -> "ScalarExpr":
        return ScalarExpr({k: v for k, v in terms.items() if v != 0}, _internal=True)

    # -- basic structure -----------------------------------------------------

    @property
    def terms(self):
        return self._terms

    def free_symbols(self):
        syms = set()
        for (powers, trig) in self._terms:
            syms.update(s for s, _ in powers)
            if trig is not None:
                syms.update(s for s, _ in trig[1][1])
        return syms

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        if not self._terms:
            return True
        if len(self._terms) == 1:
            ((powers, trig),) = self._terms.keys()
            return not powers and trig is None
        return False

    def as_rational(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_rational():
            raise ExprError("expression is not a rational constant")
        return next(iter(self._terms.values()))

    def is_affine(self) -> bool:
        """True when the expression is c0 + sum c_i * sym_i (no trig)."""
        for (powers, trig), _ in self._terms.items():
            if trig is not None:
                return False
            if len(powers) > 1 or any(e > 1 for _, e in powers):
                return False
        return True

    def affine_parts(self):
        """Return (const, {sym: coeff}) for an affine expression."""
        if not self.is_affine():
            raise ExprError("expression is not affine")
        const = Fraction(0)
        coeffs = {}
        for (powers, _), c in self._terms.items():
            if not powers:
                const = c
            else:
                coeffs[powers[0][0]] = c
        return const, coeffs

    def is_polynomial(self) -> bool:
        return all(trig is None for (_, trig) in self._terms)

    def has_trig(self) -> bool:
        return not self.is_polynomial()

    def total_degree(self) -> int:
        deg = 0
        for (powers, _) in self._terms:
            deg = max(deg, sum(e for _, e in powers))
        return deg

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = as_expr(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            nv = terms.get(k, Fraction(0)) + v
            if nv:
                terms[k] = nv
            else:
                terms.pop(k, None)
        return ScalarExpr._make(terms)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr._make({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-as_expr(other))

    def __rsub__(self, other):
        return as_expr(other) + (-self)

    def __mul__(self, other):
        other = as_expr(other)
        out: dict = {}
        for (p1, t1), c1 in self._terms.items():
            for (p2, t2), c2 in other._terms.items():
                c = c1 * c2
                powers = _mul_powers(p1, p2)
                if t1 is None and t2 is None:
                    pieces = [(Fraction(1), None)]
                elif t1 is None:
                    pieces = [(Fraction(1), t2)]
                elif t2 is None:
                    pieces = [(Fraction(1), t1)]
                else:
                    pieces = _trig_product(t1, t2)
                for f, atom in pieces:
                    key = (powers, atom)
                    nv = out.get(key, Fraction(0)) + c * f
                    if nv:
                        out[key] = nv
                    else:
                        out.pop(key, None)
        return ScalarExpr._make(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ExprError("only nonnegative integer powers are supported")
        result = num(1)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, (ScalarExpr, int, Fraction)):
            return NotImplemented
        return (self - as_expr(other)).is_zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus ------------------------------------------------------------

    def diff(self, sym: str) -> "ScalarExpr":
        out: dict = {}

        def add(key, val):
            nv = out.get(key, Fraction(0)) + val
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)

        for (powers, trig), c in self._terms.items():
            # monomial part
            for i, (s, e) in enumerate(powers):
                if s == sym:
                    rest = list(powers)
                    if e == 1:
                        rest.pop(i)
                    else:
                        rest[i] = (s, e - 1)
                    add((tuple(rest), trig), c * e)
            # trig part
            if trig is not None:
                kind, arg = trig
                coeff = dict(arg[1]).get(sym, Fraction(0))
                if coeff:
                    if kind == SIN:
                        f, atom = _norm_trig(COS, arg)
                        add((powers, atom), c * coeff * f)
                    else:
                        f, atom = _norm_trig(SIN, arg)
                        add((powers, atom), -c * coeff * f)
        return ScalarExpr._make(out)

    # -- substitution ----------------------------------------------------------

    def subs(self, values: Mapping[str, object]) -> "ScalarExpr":
        """Substitute expressions for symbols.

        Values may be ScalarExpr, int, or Fraction, or a PiAffine for
        symbols that only occur inside trig arguments.  Substituting into a
        trig argument requires the value to be affine.
        """
        vals = {}
        for s, v in values.items():
            if isinstance(v, PiAffine):
                vals[s] = v
            else:
                vals[s] = as_expr(v)
        total = num(0)
        for (powers, trig), c in self._terms.items():
            piece = num(c)
            for s, e in powers:
                if s in vals:
                    v = vals[s]
                    if isinstance(v, PiAffine):
                        if v.pi_halves != 0:
                            raise ExprError(
                                "pi-shifted value substituted outside a trig argument"
                            )
                        v = v.expr
                    piece = piece * v**e
                else:
                    piece = piece * sym(s) ** e
            if trig is not None:
                kind, arg = trig
                new_arg = num(arg[0])
                pi_halves = 0
                for s, co in arg[1]:
                    if s in vals:
                        v = vals[s]
                        if isinstance(v, PiAffine):
                            if (co * v.pi_halves).denominator != 1:
                                raise ExprError(
                                    "pi/2 shift must stay an integer multiple"
                                )
                            pi_halves += int(co * v.pi_halves)
                            v = v.expr
                        if not v.is_affine():
                            raise ExprError(
                                "substitution into a trig argument must be affine"
                            )
                        new_arg = new_arg + co * v
                    else:
                        new_arg = new_arg + co * sym(s)
                trig_fn = sin_of if kind == SIN else cos_of
                piece = piece * trig_fn(new_arg, pi_halves=pi_halves)
            total = total + piece
        return total

    def eval_exact(self, point: Mapping[str, Rat]) -> "ScalarExpr":
        """Exact evaluation at a rational point (result may keep trig consts)."""
        return self.subs({s: Fraction(v) for s, v in point.items()})

    def eval_float(self, point: Mapping[str, float]) -> float:
        total = 0.0
        for (powers, trig), c in self._terms.items():
            val = float(c)
            for s, e in powers:
                val *= float(point[s]) ** e
            if trig is not None:
                kind, arg = trig
                a = float(arg[0]) + sum(float(co) * float(point[s]) for s, co in arg[1])
                val *= math.sin(a) if kind == SIN else math.cos(a)
            total += val
        return total

    # -- display ---------------------------------------------------------------

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (powers, trig), c in sorted(
            self._terms.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
        ):
            bits = []
            if c != 1 or (not powers and trig is None):
                bits.append(str(c))
            for s, e in powers:
                bits.append(f"{s}^{e}" if e > 1 else s)
            if trig is not None:
                kind, arg = trig
                terms = []
                if arg[0]:
                    terms.append(str(arg[0]))
                for s, co in arg[1]:
                    if co == 1:
                        terms.append(s)
                    else:
                        terms.append(f"{co}*{s}")
                bits.append(f"{kind}({'+'.join(terms)})".replace("+-", "-"))
            parts.append("*".join(bits))
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class PiAffine:
    """An affine expression plus an integer multiple of pi/2.

    Used for curve components such as a coordinate frozen at pi/2; the
    pi-part may only ever be substituted into trig arguments, where it
    folds exactly.
    """

    expr: ScalarExpr
    pi_halves: int = 0

    def eval_float(self, point: Mapping[str, float]) -> float:
        return self.expr.eval_float(point) + self.pi_halves * math.pi / 2.0

    def diff(self, s: str) -> ScalarExpr:
        return self.expr.diff(s)


# ---------------------------------------------------------------------------
# public constructors
# ---------------------------------------------------------------------------


def num(p: Rat, q: int = 1) -> ScalarExpr:
    c = Fraction(p, q)
    if c == 0:
        return ScalarExpr._make({})
    return ScalarExpr._make({((), None): c})


ZERO = num(0)
ONE = num(1)


def sym(name: str) -> ScalarExpr:
    return ScalarExpr._make({(((name, 1),), None): Fraction(1)})


def as_expr(v) -> ScalarExpr:
    if isinstance(v, ScalarExpr):
        return v
    if isinstance(v, (int, Fraction)):
        return num(v)
    raise ExprError(f"cannot convert {v!r} to ScalarExpr")


def _trig_of(kind: str, arg, pi_halves: int) -> ScalarExpr:
    arg = as_expr(arg)
    if not arg.is_affine():
        raise ExprError(f"{kind} argument must be affine in the symbols: {arg!r}")
    const, coeffs = arg.affine_parts()
    m = pi_halves % 4
    # fold the pi/2 multiple: sin(u + m*pi/2), cos(u + m*pi/2)
    seq = {
        (SIN, 0): (1, SIN), (SIN, 1): (1, COS), (SIN, 2): (-1, SIN), (SIN, 3): (-1, COS),
        (COS, 0): (1, COS), (COS, 1): (-1, SIN), (COS, 2): (-1, COS), (COS, 3): (1, SIN),
    }
    sgn, kind2 = seq[(kind, m)]
    f, atom = _norm_trig(kind2, _linarg(const, coeffs.items()))
    coeff = sgn * f
    if atom is None:
        return num(coeff)
    if coeff == 0:
        return ZERO
    return ScalarExpr._make({((), atom): Fraction(coeff)})


def sin_of(arg, pi_halves: int = 0) -> ScalarExpr:
    return _trig_of(SIN, arg, pi_halves)


def cos_of(arg, pi_halves: int = 0) -> ScalarExpr:
    return _trig_of(COS, arg, pi_halves)


# ---------------------------------------------------------------------------
# exact division
# ---------------------------------------------------------------------------


def _gauss_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gauss_div(a, b):
    d = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d)


def _to_exponential(expr: ScalarExpr):
    """Rewrite as a Laurent polynomial in symbols and e^{i*freq} factors.

    Returns (terms, trig_syms) with terms mapping
    (powers, freqs) -> Gaussian-rational coefficient, where freqs is a
    tuple of Fractions aligned with trig_syms and the extra last slot holds
    the constant part of the argument.
    """
    trig_syms = sorted(
        {s for (_, trig) in expr.terms if trig for s, _ in trig[1][1]}
    )
    idx = {s: i for i, s in enumerate(trig_syms)}
    n = len(trig_syms) + 1  # last slot: constant frequency
    out = {}

    def add(powers, freqs, coeff):
        key = (powers, freqs)
        cur = out.get(key, (Fraction(0), Fraction(0)))
        nv = (cur[0] + coeff[0], cur[1] + coeff[1])
        if nv == (0, 0):
            out.pop(key, None)
        else:
            out[key] = nv

    for (powers, trig), c in expr.terms.items():
        if trig is None:
            add(powers, (Fraction(0),) * n, (c, Fraction(0)))
            continue
        kind, arg = trig
        freqs = [Fraction(0)] * n
        for s, co in arg[1]:
            freqs[idx[s]] = co
        freqs[-1] = arg[0]
        fpos = tuple(freqs)
        fneg = tuple(-f for f in freqs)
        if kind == COS:
            add(powers, fpos, (c / 2, Fraction(0)))
            add(powers, fneg, (c / 2, Fraction(0)))
        else:
            add(powers, fpos, (Fraction(0), -c / 2))
            add(powers, fneg, (Fraction(0), c / 2))
    return out, trig_syms


def _from_exponential(terms, trig_syms) -> ScalarExpr:
    n = len(trig_syms) + 1
    done = set()
    result = ZERO
    for (powers, freqs), (re, im) in terms.items():
        if (powers, freqs) in done:
            continue
        if all(f == 0 for f in freqs):
            if im != 0:
                raise ExprError("non-real exponential part")
            mono = num(re)
            for s, e in powers:
                mono = mono * sym(s) ** e
            result = result + mono
            done.add((powers, freqs))
            continue
        neg = tuple(-f for f in freqs)
        partner = terms.get((powers, neg), (Fraction(0), Fraction(0)))
        done.add((powers, freqs))
        done.add((powers, neg))
        # pick canonical (positive leading frequency) representative
        lead = next(f for f in freqs if f != 0)
        if lead < 0:
            freqs, neg = neg, freqs
            re, im = partner
            partner = terms.get((powers, neg), (Fraction(0), Fraction(0)))
        if partner != (re, -im):
            raise ExprError("exponential form is not conjugate-symmetric")
        arg = num(freqs[-1])
        for s, f in zip(trig_syms, freqs[:-1]):
            arg = arg + f * sym(s)
        piece = 2 * re * cos_of(arg) - 2 * im * sin_of(arg)
        for s, e in powers:
            piece = piece * sym(s) ** e
        result = result + piece
    return result


def _poly_divide(a_terms, b_terms):
    """Exact division of multivariate Laurent polynomials over Q(i).

    Terms are dicts {(powvec): gauss}; powvec entries may be negative.
    Returns quotient dict or None.
    """
    if not b_terms:
        raise ZeroDivisionError("division by zero expression")
    if not a_terms:
        return {}

    def order_key(p):
        return (sum(p), p)

    b_lead = max(b_terms, key=order_key)
    b_lc = b_terms[b_lead]
    rem = dict(a_terms)
    quo = {}
    steps = 0
    limit = 4 * (len(a_terms) + 1) * (len(b_terms) + 1) + 10000
    while rem:
        steps += 1
        if steps > limit:
            return None
        r_lead = max(rem, key=order_key)
        q_pow = tuple(r - b for r, b in zip(r_lead, b_lead))
        q_c = _gauss_div(rem[r_lead], b_lc)
        quo[q_pow] = q_c
        for bp, bc in b_terms.items():
            tp = tuple(q + b for q, b in zip(q_pow, bp))
            cur = rem.get(tp, (Fraction(0), Fraction(0)))
            prod = _gauss_mul(q_c, bc)
            nv = (cur[0] - prod[0], cur[1] - prod[1])
            if nv == (0, 0):
                rem.pop(tp, None)
            else:
                rem[tp] = nv
        # exact division must cancel the leading term we targeted
        if r_lead in rem:
            return None
    return quo


def try_divide(a: ScalarExpr, b: ScalarExpr):
    """Return q with a == q*b exactly, or None when no quotient exists."""
    a = as_expr(a)
    b = as_expr(b)
    if b.is_zero():
        raise ZeroDivisionError("division by zero expression")
    if a.is_zero():
        return ZERO
    if b.is_rational():
        c = b.as_rational()
        return ScalarExpr._make({k: v / c for k, v in a.terms.items()})

    ea, syms_a = _to_exponential(a)
    eb, syms_b = _to_exponential(b)
    trig_syms = sorted(set(syms_a) | set(syms_b))
    poly_syms = sorted(a.free_symbols() | b.free_symbols())

    def align(eterms, old_syms):
        pos = {s: trig_syms.index(s) for s in old_syms}
        n = len(trig_syms) + 1
        out = {}
        for (powers, freqs), c in eterms.items():
            nf = [Fraction(0)] * n
            for s, f in zip(old_syms, freqs[:-1]):
                nf[pos[s]] = f
            nf[-1] = freqs[-1]
            pows = dict(powers)
            vec = tuple(pows.get(s, 0) for s in poly_syms)
            out[(vec, tuple(nf))] = c
        return out

    ea = align(ea, syms_a)
    eb = align(eb, syms_b)

    # clear frequency denominators with one scale per slot
    nslots = len(trig_syms) + 1
    dens = [1] * nslots
    for et in (ea, eb):
        for (_, freqs) in et:
            for i, f in enumerate(freqs):
                dens[i] = dens[i] * f.denominator // math.gcd(dens[i], f.denominator)

    def to_vec(et):
        out = {}
        for (pvec, freqs), c in et.items():
            fvec = tuple(int(f * d) for f, d in zip(freqs, dens))
            out[pvec + fvec] = c
        return out

    va, vb = to_vec(ea), to_vec(eb)
    quo = _poly_divide(va, vb)
    if quo is None:
        return None

    npoly = len(poly_syms)
    qexp = {}
    for vec, c in quo.items():
        pvec, fvec = vec[:npoly], vec[npoly:]
        if any(p < 0 for p in pvec):
            return None
        powers = tuple((s, e) for s, e in zip(poly_syms, pvec) if e)
        freqs = tuple(Fraction(f, d) for f, d in zip(fvec, dens))
        qexp[(powers, freqs)] = c
    try:
        q = _from_exponential(qexp, trig_syms)
    except ExprError:
        return None
    if (q * b - a).is_zero():
        return q
    return None


def simplify(e: ScalarExpr) -> ScalarExpr:
    """Expressions are always canonical; provided for API symmetry."""
    return as_expr(e)
