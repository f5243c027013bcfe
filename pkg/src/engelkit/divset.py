"""Combinatorial calculus of dividing sets on model surfaces.

Dividing sets are isotopy-class data: essential-curve counts and slopes,
nesting forests of contractible circles, chord diagrams on the disc, and
alternating region signs.  Bypass moves are strand-reconnection rules whose
outputs are pinned by validity, nonemptiness, and invariance of the Euler
pairing; the torus planner reproduces the normalization procedure move by
move.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class DivSetError(ValueError):
    pass


# A nesting forest is a tuple of trees; a tree is a tuple of child trees.
Forest = Tuple
Tree = Tuple

DISC = "disc"
ANNULUS = "annulus"
TORUS = "torus"
SPHERE = "sphere"


def tree_nodes(tree: Tree) -> int:
    return 1 + sum(tree_nodes(c) for c in tree)


def forest_nodes(forest: Forest) -> int:
    return sum(tree_nodes(t) for t in forest)


def normalize_slope(p: int, q: int) -> Tuple[int, int]:
    if p == 0 and q == 0:
        raise DivSetError("slope 0/0 is not a slope")
    g = gcd(abs(p), abs(q))
    p, q = p // g, q // g
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    return (p, q)


@dataclass(frozen=True)
class DividingSet:
    """Isotopy-class data of a dividing set on a model surface.

    surface: disc | annulus | torus | sphere.
    essential: number of essential closed curves (torus/annulus).
    slope: common slope of the essential curves (torus only).
    forests: nesting forests of contractible circles, one per complementary
        region of the essential curves (cyclic order on the torus; a single
        region when there are none).  On the sphere a single forest.
    chords: non-crossing chord diagram on the disc boundary, as pairs of
        endpoint indices in circular order.
    face_forests: forests of circles per chord-diagram face (disc only),
        indexed in the canonical face order.
    base_sign: sign of the first region (all others alternate).
    overtwisted: ambient flag enabling bypass moves.
    """

    surface: str
    essential: int = 0
    slope: Optional[Tuple[int, int]] = None
    forests: Tuple[Forest, ...] = ((),)
    chords: Tuple[Tuple[int, int], ...] = ()
    face_forests: Tuple[Forest, ...] = ()
    base_sign: int = 1
    overtwisted: bool = False

    # -- structure -----------------------------------------------------------

    def component_count(self) -> int:
        n = self.essential + len(self.chords)
        n += sum(forest_nodes(f) for f in self.forests)
        n += sum(forest_nodes(f) for f in self.face_forests)
        return n

    def region_count_for_essentials(self) -> int:
        if self.surface == TORUS:
            return self.essential if self.essential > 0 else 1
        if self.surface == ANNULUS:
            return self.essential + 1
        return 1

    def validate(self) -> List[str]:
        """Type-invariant check; returns a list of violations (empty = ok)."""
        v: List[str] = []
        if self.surface not in (DISC, ANNULUS, TORUS, SPHERE):
            v.append(f"unknown surface {self.surface}")
            return v
        if self.component_count() == 0:
            v.append("dividing set is empty")
        if self.base_sign not in (1, -1):
            v.append("base sign must be +1 or -1")
        if self.surface == TORUS:
            if self.essential % 2 != 0:
                v.append("odd essential count: region signs cannot alternate")
            if self.essential > 0 and self.slope is None:
                v.append("essential curves need a slope")
            if self.essential == 0 and self.slope is not None:
                v.append("slope given without essential curves")
            if self.slope is not None and normalize_slope(*self.slope) != self.slope:
                v.append("slope is not in reduced canonical form")
            if len(self.forests) != self.region_count_for_essentials():
                v.append("forest count does not match the region count")
            if self.chords or self.face_forests:
                v.append("closed surfaces carry no boundary chords")
        elif self.surface == SPHERE:
            if self.essential or self.slope or self.chords or self.face_forests:
                v.append("sphere dividing sets consist of circles only")
            if len(self.forests) != 1:
                v.append("sphere carries a single nesting forest")
        elif self.surface == DISC:
            if self.essential or self.slope:
                v.append("disc has no essential closed curves")
            if len(self.forests) != 1 or self.forests != ((),):
                v.append("disc circles belong in face_forests")
            m = len(self.chords)
            ends = sorted(e for ch in self.chords for e in ch)
            if ends != list(range(2 * m)):
                v.append("chord endpoints must be exactly 0..2m-1")
            if _crossing(self.chords):
                v.append("chord diagram has a crossing")
            if m and len(self.face_forests) != m + 1:
                v.append("face forest count must be chord count + 1")
            if not m and self.face_forests and len(self.face_forests) != 1:
                v.append("chordless disc has a single face")
        elif self.surface == ANNULUS:
            if self.slope is not None:
                v.append("annulus essential curves need no slope")
            if len(self.forests) != self.essential + 1:
                v.append("forest count must be essential + 1")
            if self.chords or self.face_forests:
                v.append("annulus boundary chords are not supported")
        return v

    def require_valid(self):
        v = self.validate()
        if v:
            raise DivSetError("; ".join(v))
        return self


def _crossing(chords: Sequence[Tuple[int, int]]) -> bool:
    cs = [tuple(sorted(c)) for c in chords]
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            a, b = cs[i]
            c, d = cs[j]
            if (a < c < b < d) or (c < a < d < b):
                return True
    return False


# ---------------------------------------------------------------------------
# tightness and Euler pairing
# ---------------------------------------------------------------------------


def is_tight_neighborhood(g: DividingSet) -> bool:
    g.require_valid()
    if g.surface == SPHERE:
        return g.component_count() == 1
    if g.surface == DISC:
        return sum(forest_nodes(f) for f in g.face_forests) == 0
    return all(forest_nodes(f) == 0 for f in g.forests)


def _forest_euler(forest: Forest, sign: int) -> Tuple[int, int]:
    """(chi_plus, chi_minus) contributions of circle interiors; the holes
    they punch in the containing region are accounted by the caller."""
    plus = minus = 0
    for tree in forest:
        p, m = _tree_euler(tree, -sign)
        plus += p
        minus += m
    return plus, minus


def _tree_euler(tree: Tree, sign: int) -> Tuple[int, int]:
    chi = 1 - len(tree)
    plus = chi if sign > 0 else 0
    minus = chi if sign < 0 else 0
    for child in tree:
        p, m = _tree_euler(child, -sign)
        plus += p
        minus += m
    return plus, minus


def euler_class_pairing(g: DividingSet) -> int:
    """chi(plus regions) - chi(minus regions) on a closed surface."""
    g.require_valid()
    if g.surface not in (TORUS, SPHERE):
        raise DivSetError("Euler pairing needs a closed surface")
    plus = minus = 0
    nregions = g.region_count_for_essentials()
    for i, forest in enumerate(g.forests):
        sign = g.base_sign * (-1) ** i
        if g.surface == TORUS:
            chi = 0 - len(forest)  # annulus (or full torus) minus top discs
        else:
            chi = 2 - len(forest)  # sphere minus top discs
        if sign > 0:
            plus += chi
        else:
            minus += chi
        p, m = _forest_euler(forest, sign)
        plus += p
        minus += m
    return plus - minus


# ---------------------------------------------------------------------------
# disc invariants: tb and rot from the chord diagram
# ---------------------------------------------------------------------------


def disc_faces(chords: Sequence[Tuple[int, int]]) -> List[Tuple[Tuple[int, ...], int]]:
    """Faces of a non-crossing chord diagram on the disc.

    Returns a list of (arcs, depth) in canonical order (by smallest arc),
    where arcs are the boundary arcs k (between endpoints k and k+1 mod 2m)
    on the face and depth is the number of chords separating the face from
    the base face (the one containing arc 2m-1).
    """
    m = len(chords)
    if m == 0:
        return [((0,), 0)]
    cs = [tuple(sorted(c)) for c in chords]
    arcs = range(2 * m)
    keyed: Dict[Tuple[int, ...], List[int]] = {}
    for a in arcs:
        nest = tuple(sorted(i for i, (lo, hi) in enumerate(cs) if lo <= a < hi))
        keyed.setdefault(nest, []).append(a)
    faces = sorted(((tuple(sorted(v)), len(k)) for k, v in keyed.items()),
                   key=lambda fv: fv[0][0])
    return faces


def tb_rot_from_divset(g: DividingSet) -> Tuple[int, int]:
    """The boundary invariants (tb, rot) of a disc dividing set."""
    g.require_valid()
    if g.surface != DISC:
        raise DivSetError("tb/rot formulas apply to disc dividing sets here")
    m = len(g.chords)
    if m == 0:
        raise DivSetError("boundary meets no dividing arcs")
    tb = -m  # = -(1/2) |Gamma . boundary|
    faces = disc_faces(g.chords)
    plus = minus = 0
    for idx, (arcs, depth) in enumerate(faces):
        sign = g.base_sign * (-1) ** depth
        forest = g.face_forests[idx] if idx < len(g.face_forests) else ()
        chi = 1 - len(forest)
        if sign > 0:
            plus += chi
        else:
            minus += chi
        p, mi = _forest_euler(forest, sign)
        plus += p
        minus += mi
    return tb, plus - minus


def connected_sum_invariants(tb1: int, rot1: int, tb2: int, rot2: int) -> Tuple[int, int]:
    return (tb1 + tb2 + 1, rot1 + rot2)


def halfdisc_ot_connected_sum() -> Dict[str, object]:
    """Invariants of the half-disc boundary summed with an overtwisted-disc
    boundary; the two documented conventions disagree on the rotation
    number, so the additive-formula value is returned and flagged."""
    tb, rot = connected_sum_invariants(-2, 1, 0, -1)
    return {"tb": tb, "rot": rot, "rot_alternative": 1, "conflict_noted": True}


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def unknot_disc() -> DividingSet:
    return DividingSet(DISC, chords=((0, 1),), face_forests=((), ()), forests=((),))


def bypass_halfdisc() -> DividingSet:
    """Two nested dividing arcs; boundary invariants (-2, 1)."""
    return DividingSet(
        DISC, chords=((0, 3), (1, 2)), face_forests=((), (), ()), forests=((),)
    )


def r2_disc(n: int) -> DividingSet:
    """Diameter arc plus |n| closed circles below it: rot = 2n."""
    circles = tuple(() for _ in range(abs(n)))
    if n >= 0:
        face_forests = (circles, ())
        sign = 1
    else:
        face_forests = (circles, ())
        sign = -1
    return DividingSet(DISC, chords=((0, 1),), face_forests=face_forests,
                       forests=((),), base_sign=sign)


def sphere_stack(count: int, base_sign: int = 1) -> DividingSet:
    """Parallel latitude circles on the sphere (a nested chain)."""
    forest: Forest = ()
    for _ in range(count):
        forest = (forest,)
    return DividingSet(SPHERE, forests=(forest,), base_sign=base_sign)


def torus_standard(slope=(0, 1), base_sign=1, overtwisted=False) -> DividingSet:
    return DividingSet(
        TORUS, essential=2, slope=normalize_slope(*slope),
        forests=((), ()), base_sign=base_sign, overtwisted=overtwisted,
    )


# ---------------------------------------------------------------------------
# bypass moves
# ---------------------------------------------------------------------------

# component references: ("e", index) for essential curves;
# ("c", region, path) for circles, path = child indices from the top.


@dataclass(frozen=True)
class AttachingArc:
    crossings: Tuple[Tuple, ...]  # exactly three (component_ref, side) events
    slope: Optional[Tuple[int, int]] = None  # for pair-creating arcs

    def refs(self):
        return tuple(c[0] for c in self.crossings)

    @staticmethod
    def make(refs: Sequence, slope=None, sides=None) -> "AttachingArc":
        refs = tuple(tuple(r) for r in refs)
        if len(refs) != 3:
            raise DivSetError("an attaching arc crosses the dividing set three times")
        sides = tuple(sides) if sides is not None else (1, -1, 1)
        return AttachingArc(tuple(zip(refs, sides)),
                            normalize_slope(*slope) if slope else None)


@dataclass(frozen=True)
class BypassMove:
    arc: AttachingArc
    kind: str
    result: DividingSet
    hypothetical: bool = False

    def to_jsonable(self):
        return {
            "kind": self.kind,
            "arc": [list(r) for r in self.arc.refs()],
            "slope": list(self.arc.slope) if self.arc.slope else None,
            "hypothetical": self.hypothetical,
            "result": divset_to_jsonable(self.result),
        }


def _get_tree(forest: Forest, path: Tuple[int, ...]) -> Tree:
    node = forest
    for i in path[:-1]:
        node = node[i]
    return node[path[-1]]


def _remove_tree(forest: Forest, path: Tuple[int, ...], replacement=None) -> Forest:
    """Remove (or replace) the subtree at path; replacement None deletes."""
    i = path[0]
    if len(path) == 1:
        if replacement is None:
            return forest[:i] + forest[i + 1:]
        return forest[:i] + (replacement,) + forest[i + 1:]
    sub = _remove_tree(forest[i], path[1:], replacement)
    return forest[:i] + (sub,) + forest[i + 1:]


def _classify(g: DividingSet, arc: AttachingArc) -> str:
    refs = arc.refs()
    kinds = [r[0] for r in refs]
    if kinds == ["e", "e", "e"]:
        i, j, k = (r[1] for r in refs)
        e = g.essential
        if e >= 4 and len({i, j, k}) == 3 and (j - i) % e == 1 and (k - j) % e == 1:
            return "reduce-essential"
        if e == 2 and len({i, j, k}) == 2:
            return "remove-essential-pair"
        raise DivSetError("unsupported essential crossing pattern")
    if kinds.count("e") == 0:
        a, b, c = refs
        if a == c and a[0] == "c" and b[0] == "c":
            # (P, C, P): either pair-to-essential or pair annihilation
            if arc.slope is not None:
                return "create-pair"
            return "annihilate-pair"
        if a[0] == b[0] == c[0] == "c" and len({a, b, c}) == 3:
            pa, pb, pc = a[2], b[2], c[2]
            if len(pb) == len(pa) + 1 and pb[:-1] == pa and \
               len(pc) == len(pb) + 1 and pc[:-1] == pb and a[1] == b[1] == c[1]:
                return "chain-merge"
            return "merge-three"
        raise DivSetError("unsupported circle pattern")
    if kinds.count("e") == 1 and kinds[1] == "e":
        return "absorb-across"
    raise DivSetError("unsupported crossing pattern")


def attach_bypass(g: DividingSet, arc: AttachingArc,
                  hypothetical: bool = False) -> BypassMove:
    """Apply the local reconnection of a bypass attachment.

    The ambient must be flagged overtwisted unless the move is marked
    hypothetical.  The output is validated, must stay nonempty, and must
    preserve the Euler pairing.
    """
    g.require_valid()
    if g.surface != TORUS:
        raise DivSetError("bypass moves are implemented on the torus")
    if not g.overtwisted and not hypothetical:
        raise DivSetError(
            "ambient not marked overtwisted; pass hypothetical=True to force"
        )
    kind = _classify(g, arc)
    before_euler = euler_class_pairing(g)
    out = _apply_move(g, arc, kind)
    violations = out.validate()
    if violations:
        raise DivSetError("move produced an invalid set: " + "; ".join(violations))
    if out.component_count() == 0:
        raise DivSetError("move would empty the dividing set")
    if euler_class_pairing(out) != before_euler:
        raise DivSetError("move would change the Euler pairing")
    return BypassMove(arc, kind, out, hypothetical and not g.overtwisted)


def _apply_move(g: DividingSet, arc: AttachingArc, kind: str) -> DividingSet:
    refs = arc.refs()
    if kind == "reduce-essential":
        # Three consecutive essential strands merge into one snake; the two
        # sides of the snake pick up the alternating old regions, so signs
        # and the Euler pairing are preserved with arbitrary content.
        i = refs[0][1]
        e = g.essential
        forests = list(g.forests)
        side_a = tuple(forests[(i - 1) % e]) + tuple(forests[(i + 1) % e])
        side_b = tuple(forests[i % e]) + tuple(forests[(i + 2) % e])
        # new cyclic region order: old i+3, ..., i-2, A, B
        new_forests: List[Forest] = []
        r = (i + 3) % e
        while r != (i - 1) % e:
            new_forests.append(forests[r])
            r = (r + 1) % e
        new_forests.append(side_a)
        new_forests.append(side_b)
        new_base = g.base_sign * (-1) ** ((i + 3) % 2)
        return replace(
            g,
            essential=e - 2,
            forests=tuple(new_forests),
            base_sign=new_base,
            slope=g.slope if e - 2 > 0 else None,
        )
    if kind == "remove-essential-pair":
        # the two essential curves reconnect into a nested contractible
        # pair; region 0 becomes the outside, region 1 the middle annulus
        inner: Tree = ()
        pair: Tree = (inner,) + tuple(g.forests[1])
        return replace(
            g, essential=0, slope=None,
            forests=((pair,) + tuple(g.forests[0]),),
            base_sign=g.base_sign,
        )
    if kind == "create-pair":
        # a top-level nested pair (P with single childless child C) becomes
        # two essential curves of the prescribed slope; P's other nesting
        # level becomes the second annulus (empty since C is the only child)
        if g.essential != 0:
            raise DivSetError("pair creation needs a torus without essential curves")
        _, region, path = refs[0]
        if len(path) != 1:
            raise DivSetError("pair creation needs a top-level parent circle")
        parent = _get_tree(g.forests[region], path)
        if len(parent) != 1 or parent[0] != ():
            raise DivSetError("pair creation needs a parent with a single childless child")
        outer_forest = _remove_tree(g.forests[region], path)
        return replace(
            g, essential=2, slope=arc.slope,
            forests=(outer_forest, ()),
            base_sign=g.base_sign,
        )
    if kind == "annihilate-pair":
        _, region, path = refs[0]
        forests = list(g.forests)
        parent = _get_tree(forests[region], path)
        if len(parent) != 1 or parent[0] != ():
            raise DivSetError("pair annihilation needs a parent with a single childless child")
        forests[region] = _remove_tree(forests[region], path)
        return replace(g, forests=tuple(forests))
    if kind == "merge-three":
        # (Q, P, C): Q and P siblings in one nesting context, Q childless,
        # C a child of P; all three merge into one circle keeping the other
        # children (legality is settled by the Euler-pairing postcondition)
        (qk, qr, qp), (pk, pr, pp), (ck, cr, cp) = refs
        if qr != pr or cr != pr:
            raise DivSetError("merge crossings must share a region")
        if len(qp) != len(pp) or qp[:-1] != pp[:-1] or qp == pp:
            raise DivSetError("merge needs two distinct sibling circles")
        if len(cp) != len(pp) + 1 or cp[:-1] != pp:
            raise DivSetError("third crossing must be a child of the second")
        forests = list(g.forests)
        forest = forests[qr]
        q_tree = _get_tree(forest, qp)
        p_tree = _get_tree(forest, pp)
        child = p_tree[cp[-1]]
        merged = (
            tuple(t for j, t in enumerate(p_tree) if j != cp[-1])
            + child
            + q_tree
        )
        forest = _remove_tree(forest, pp, merged)
        forest = _remove_tree(forest, qp)  # qp index unaffected: pp replaced in place
        forests[qr] = forest
        return replace(g, forests=tuple(forests))
    if kind == "chain-merge":
        # three concentric circles merge into one snake circle; the two
        # sides of the snake pick up the alternating nesting levels
        (pk, pr, pp), (ck, cr, cp), (gk, gr, gp) = refs
        forests = list(g.forests)
        forest = forests[pr]
        p_tree = _get_tree(forest, pp)
        c_tree = p_tree[cp[-1]]
        g_tree = c_tree[gp[-1]]
        merged = (
            tuple(t for j, t in enumerate(p_tree) if j != cp[-1])
            + tuple(t for j, t in enumerate(c_tree) if j != gp[-1])
            + g_tree
        )
        forests[pr] = _remove_tree(forest, pp, merged)
        return replace(g, forests=tuple(forests))
    if kind == "absorb-across":
        # two circles in adjacent regions merge with the essential curve
        # between them; their contents cross over to the opposite sides
        # (the two sides of the resulting snake alternate)
        (ak, ar, ap), (ek, ei), (bk, br, bp) = refs
        e = g.essential
        if e < 2:
            raise DivSetError("absorbing move needs essential curves")
        if len(ap) != 1 or len(bp) != 1:
            raise DivSetError("absorbing move needs top-level circles")
        if (ar - br) % e not in (1, e - 1):
            raise DivSetError("circles must sit in adjacent regions")
        forests = list(g.forests)
        a_kids = _get_tree(forests[ar], ap)
        b_kids = _get_tree(forests[br], bp)
        forests[ar] = _remove_tree(forests[ar], ap) + tuple(b_kids)
        forests[br] = _remove_tree(forests[br], bp) + tuple(a_kids)
        return replace(g, forests=tuple(forests))
    raise DivSetError(f"unknown move kind {kind}")


# ---------------------------------------------------------------------------
# torus normalization planner
# ---------------------------------------------------------------------------


def _find_leaf_pair(g: DividingSet, top_only: bool = False):
    """(region, path) of a parent circle with a single childless child.

    Deterministic: deepest first, then leftmost region, then leftmost path
    (innermost-first cleanup); ``top_only`` restricts to top-level parents.
    """
    best = None
    for region, forest in enumerate(g.forests):
        stack = [((i,), t) for i, t in enumerate(forest)]
        while stack:
            path, tree = stack.pop(0)
            if len(tree) == 1 and tree[0] == () and (not top_only or len(path) == 1):
                cand_key = (-len(path), region, path)
                if best is None or cand_key < best[0]:
                    best = (cand_key, (region, path))
            for i, c in enumerate(tree):
                stack.append((path + (i,), c))
    return best[1] if best else None


def _iter_sibling_contexts(g: DividingSet):
    """Yield (region, prefix, children) for every nesting context."""
    for region, forest in enumerate(g.forests):
        yield region, (), forest
        stack = [((i,), t) for i, t in enumerate(forest)]
        while stack:
            path, tree = stack.pop(0)
            if tree:
                yield region, path, tree
            for i, c in enumerate(tree):
                stack.append((path + (i,), c))


def _merge_patterns(g: DividingSet):
    """All (Q, P, C) sibling-merge patterns, shallowest context first."""
    out = []
    for region, prefix, children in _iter_sibling_contexts(g):
        parents = [i for i, t in enumerate(children) if t != ()]
        for q in range(len(children)):
            for p in parents:
                if q == p:
                    continue
                for ci in range(len(children[p])):
                    out.append((
                        ("c", region, prefix + (q,)),
                        ("c", region, prefix + (p,)),
                        ("c", region, prefix + (p, ci)),
                    ))
    out.sort(key=lambda pat: (len(pat[0][2]), pat[0][1], pat[0][2]))
    return out


def _find_merge_pattern(g: DividingSet):
    pats = _merge_patterns(g)
    return pats[0] if pats else None


def _chain_patterns(g: DividingSet):
    """All (P, C, G) grandparent-chain patterns, deepest last."""
    out = []
    for region, prefix, children in _iter_sibling_contexts(g):
        for pi, p_tree in enumerate(children):
            for ci, c_tree in enumerate(p_tree):
                for gi in range(len(c_tree)):
                    out.append((
                        ("c", region, prefix + (pi,)),
                        ("c", region, prefix + (pi, ci)),
                        ("c", region, prefix + (pi, ci, gi)),
                    ))
    out.sort(key=lambda pat: (len(pat[0][2]), pat[0][1], pat[0][2]))
    return out


def _absorb_patterns(g: DividingSet):
    e = g.essential
    if e < 2:
        return []
    out = []
    for r in range(e):
        r2 = (r + 1) % e
        for i, _ in enumerate(g.forests[r]):
            for j, _ in enumerate(g.forests[r2]):
                out.append((("c", r, (i,)), ("e", r2), ("c", r2, (j,))))
    return out


def _find_absorb_pattern(g: DividingSet):
    pats = _absorb_patterns(g)
    return pats[0] if pats else None


def legal_moves(g: DividingSet, target_slope: Tuple[int, int]) -> List[AttachingArc]:
    """Deterministic enumeration of the legal arcs from a torus state."""
    out: List[AttachingArc] = []
    e = g.essential
    if e >= 4:
        for i in range(e):
            out.append(AttachingArc.make([("e", i), ("e", (i + 1) % e), ("e", (i + 2) % e)]))
    if e == 2:
        out.append(AttachingArc.make([("e", 0), ("e", 1), ("e", 1)]))
    # nested leaf pairs: annihilation and (at e == 0, top level) pair creation
    for region, forest in enumerate(g.forests):
        stack = [((i,), t) for i, t in enumerate(forest)]
        while stack:
            path, tree = stack.pop(0)
            if len(tree) == 1 and tree[0] == ():
                ref = ("c", region, path)
                child = ("c", region, path + (0,))
                out.append(AttachingArc.make([ref, child, ref]))
                if e == 0 and len(path) == 1:
                    out.append(AttachingArc.make([ref, child, ref], slope=target_slope))
            for i, c in enumerate(tree):
                stack.append((path + (i,), c))
    for pat in _merge_patterns(g):
        out.append(AttachingArc.make(pat))
    for pat in _chain_patterns(g):
        out.append(AttachingArc.make(pat))
    for pat in _absorb_patterns(g):
        out.append(AttachingArc.make(pat))
    return out


def _state_key(g: DividingSet):
    return (g.essential, g.slope, g.forests, g.base_sign)


def _is_terminal(g: DividingSet, slope: Tuple[int, int]) -> bool:
    return (
        g.essential == 2
        and g.slope == slope
        and all(forest_nodes(f) == 0 for f in g.forests)
    )


def torus_normalize(
    g: DividingSet,
    target_slope: Tuple[int, int],
    max_moves: int = 64,
) -> List[BypassMove]:
    """Plan of bypass moves ending in two essential curves of the target
    slope and no contractible components.

    Deterministic: essential reduction first, then elimination and creation
    of the target pair, then innermost-first cleanup of contractibles; a
    bounded breadth-first completion covers the remaining shapes.
    """
    g.require_valid()
    if g.surface != TORUS:
        raise DivSetError("the normalization planner works on torus dividing sets")
    if euler_class_pairing(g) != 0:
        raise DivSetError("nonzero Euler pairing; no normalized form exists")
    if not g.overtwisted:
        raise DivSetError("normalization requires the overtwisted ambient flag")
    target_slope = normalize_slope(*target_slope)
    plan: List[BypassMove] = []
    cur = g

    def try_apply(arc: AttachingArc) -> bool:
        nonlocal cur
        try:
            mv = attach_bypass(cur, arc)
        except DivSetError:
            return False
        plan.append(mv)
        cur = mv.result
        return True

    stuck = False
    while len(plan) < max_moves and not stuck:
        if _is_terminal(cur, target_slope):
            return plan
        if cur.essential >= 4:
            if try_apply(AttachingArc.make([("e", 0), ("e", 1), ("e", 2)])):
                continue
        if cur.essential == 2 and cur.slope != target_slope:
            if try_apply(AttachingArc.make([("e", 0), ("e", 1), ("e", 1)])):
                continue
        if cur.essential == 0:
            pair = _find_leaf_pair(cur, top_only=True)
            if pair is not None:
                region, path = pair
                ref = ("c", region, path)
                child = ("c", region, path + (0,))
                if try_apply(AttachingArc.make([ref, child, ref], slope=target_slope)):
                    continue
            pair = _find_leaf_pair(cur)
            if pair is not None and forest_nodes(cur.forests[0]) > 2:
                region, path = pair
                ref = ("c", region, path)
                child = ("c", region, path + (0,))
                if try_apply(AttachingArc.make([ref, child, ref])):
                    continue
        if cur.essential == 2:
            pair = _find_leaf_pair(cur)
            if pair is not None:
                region, path = pair
                ref = ("c", region, path)
                child = ("c", region, path + (0,))
                if try_apply(AttachingArc.make([ref, child, ref])):
                    continue
            absorbed = False
            for pat in _absorb_patterns(cur):
                if try_apply(AttachingArc.make(pat)):
                    absorbed = True
                    break
            if absorbed:
                continue
        applied = False
        for pat in _merge_patterns(cur) + _chain_patterns(cur):
            if try_apply(AttachingArc.make(pat)):
                applied = True
                break
        if applied:
            continue
        stuck = True
    if _is_terminal(cur, target_slope):
        return plan
    # bounded breadth-first completion for the remaining shapes
    tail = _bfs_plan(cur, target_slope, max_moves - len(plan))
    if tail is None:
        raise DivSetError("move budget exceeded")
    for arc in tail:
        if not try_apply(arc):
            raise DivSetError("breadth-first completion replay failed")
    return plan


def _bfs_plan(g: DividingSet, slope, budget: int):
    from collections import deque

    start = _state_key(g)
    seen = {start}
    queue = deque([(g, [])])
    while queue:
        state, path = queue.popleft()
        if _is_terminal(state, slope):
            return path
        if len(path) >= budget:
            continue
        for arc in legal_moves(state, slope):
            try:
                mv = attach_bypass(state, arc)
            except DivSetError:
                continue
            key = _state_key(mv.result)
            if key in seen:
                continue
            seen.add(key)
            queue.append((mv.result, path + [arc]))
    return None


def bfs_normalize(g: DividingSet, target_slope, budget: int = 16):
    """Exhaustive shortest plan (oracle for the deterministic planner)."""
    target_slope = normalize_slope(*target_slope)
    arcs = _bfs_plan(g, target_slope, budget)
    if arcs is None:
        return None
    plan = []
    cur = g
    for arc in arcs:
        mv = attach_bypass(cur, arc)
        plan.append(mv)
        cur = mv.result
    return plan


# ---------------------------------------------------------------------------
# Dehn-twist parity bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DehnParityState:
    divide_parity: str  # "zero" | "odd"
    ruling_parity: str  # "even" | "odd"
    twists: int = 0


def dehn_parity_update(state: DehnParityState) -> DehnParityState:
    """The framing effect of the divide-killing bypass plus one right twist.

    Requires rotation number zero along the divides and even parity along
    the ruling; afterwards the divide rotation is odd (hence nonzero) and
    the ruling parity is unchanged.
    """
    if state.divide_parity != "zero":
        raise DivSetError("divide rotation is no longer zero")
    if state.ruling_parity != "even":
        raise DivSetError("ruling rotation parity must be even")
    return DehnParityState("odd", "even", state.twists + 1)


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------


def _forest_to_json(f: Forest):
    return [_forest_to_json(t) for t in f]


def _forest_from_json(data) -> Forest:
    return tuple(_forest_from_json(t) for t in data)


def divset_to_jsonable(g: DividingSet) -> dict:
    return {
        "surface": g.surface,
        "essential": g.essential,
        "slope": list(g.slope) if g.slope else None,
        "forests": [_forest_to_json(f) for f in g.forests],
        "chords": [list(c) for c in g.chords],
        "face_forests": [_forest_to_json(f) for f in g.face_forests],
        "base_sign": g.base_sign,
        "overtwisted": g.overtwisted,
    }


def divset_from_jsonable(d: dict) -> DividingSet:
    return DividingSet(
        surface=d["surface"],
        essential=d.get("essential", 0),
        slope=tuple(d["slope"]) if d.get("slope") else None,
        forests=tuple(_forest_from_json(f) for f in d.get("forests", [[]])),
        chords=tuple(tuple(c) for c in d.get("chords", [])),
        face_forests=tuple(_forest_from_json(f) for f in d.get("face_forests", [])),
        base_sign=d.get("base_sign", 1),
        overtwisted=d.get("overtwisted", False),
    )


def plan_to_jsonable(plan: Sequence[BypassMove]) -> list:
    return [mv.to_jsonable() for mv in plan]
