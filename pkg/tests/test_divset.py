"""Dividing-set combinatorics: validation, formulas, moves, and the planner."""

import itertools
import json
import random

import pytest

from engelkit.divset import (
    AttachingArc,
    DISC,
    DividingSet,
    DivSetError,
    DehnParityState,
    SPHERE,
    TORUS,
    attach_bypass,
    bfs_normalize,
    bypass_halfdisc,
    connected_sum_invariants,
    dehn_parity_update,
    divset_from_jsonable,
    divset_to_jsonable,
    euler_class_pairing,
    forest_nodes,
    halfdisc_ot_connected_sum,
    is_tight_neighborhood,
    legal_moves,
    normalize_slope,
    plan_to_jsonable,
    r2_disc,
    sphere_stack,
    tb_rot_from_divset,
    torus_normalize,
    torus_standard,
    unknot_disc,
)


class TestValidation:
    def test_standard_torus_ok(self):
        assert torus_standard().validate() == []

    def test_empty_rejected(self):
        g = DividingSet(TORUS, forests=((),))
        assert any("empty" in v for v in g.validate())

    def test_odd_essential_rejected(self):
        g = DividingSet(TORUS, essential=3, slope=(0, 1), forests=((), (), ()))
        assert any("alternate" in v for v in g.validate())

    def test_slope_normalization(self):
        assert normalize_slope(2, -4) == (-1, 2)
        assert normalize_slope(-3, 0) == (1, 0)


class TestTightness:
    def test_torus(self):
        assert is_tight_neighborhood(torus_standard())
        g = DividingSet(TORUS, essential=2, slope=(0, 1), forests=(((),), ()))
        assert not is_tight_neighborhood(g)

    def test_sphere(self):
        assert is_tight_neighborhood(sphere_stack(1))
        assert not is_tight_neighborhood(sphere_stack(3))


class TestEuler:
    def test_torus_annuli(self):
        assert euler_class_pairing(torus_standard()) == 0

    def test_discs_in_one_region(self):
        for r in (1, 2, 3):
            g = DividingSet(TORUS, essential=2, slope=(0, 1),
                            forests=(tuple(() for _ in range(r)), ()))
            assert abs(euler_class_pairing(g)) == 2 * r
            g2 = DividingSet(TORUS, essential=2, slope=(0, 1),
                             forests=(tuple(() for _ in range(r)), ()),
                             base_sign=-1)
            assert euler_class_pairing(g2) == -euler_class_pairing(g)

    def test_sphere(self):
        assert euler_class_pairing(sphere_stack(1)) == 0
        # the parallel three-circle stack has two cancelling cap/annulus
        # pairs; counting regions directly gives zero for either sign
        assert euler_class_pairing(sphere_stack(3)) == 0
        assert euler_class_pairing(sphere_stack(3, base_sign=-1)) == 0

    def test_cancelling_pair_invariance(self):
        base = torus_standard()
        v0 = euler_class_pairing(base)
        nested = DividingSet(TORUS, essential=2, slope=(0, 1),
                             forests=(((((),),)), ()))
        assert euler_class_pairing(nested) == v0


class TestTbRot:
    def test_unknot_disc(self):
        assert tb_rot_from_divset(unknot_disc()) == (-1, 0)

    def test_bypass_halfdisc(self):
        assert tb_rot_from_divset(bypass_halfdisc()) == (-2, 1)

    def test_r2_family(self):
        for n in range(-3, 4):
            tb, rot = tb_rot_from_divset(r2_disc(n))
            assert rot == 2 * n
            assert tb == -1

    def test_connected_sum(self):
        assert connected_sum_invariants(-2, 1, -1, 0) == (-2, 1)
        assert connected_sum_invariants(-1, 0, -1, 0) == (-1, 0)
        assert connected_sum_invariants(0, -1, 0, 1) == (1, 0)

    def test_halfdisc_ot_fixture_flags_conflict(self):
        d = halfdisc_ot_connected_sum()
        assert d["tb"] == -1
        assert d["rot"] == 0
        assert d["conflict_noted"]

    def test_framing_route_agreement(self):
        """The combinatorial tb matches the front-geometry computation on
        the paired fixtures."""
        from engelkit.curves import front_rotation_number, front_tb, stabilize, unknot_fixture

        u = unknot_fixture()
        assert tb_rot_from_divset(unknot_disc()) == (front_tb(u), front_rotation_number(u))
        s = stabilize(u, 1)
        assert tb_rot_from_divset(bypass_halfdisc()) == (front_tb(s), front_rotation_number(s))


class TestMoves:
    def test_reduce_essential(self):
        g = DividingSet(TORUS, essential=4, slope=(1, 0),
                        forests=((), (), (), ()), overtwisted=True)
        mv = attach_bypass(g, AttachingArc.make([("e", 0), ("e", 1), ("e", 2)]))
        assert mv.result.essential == 2
        assert mv.result.component_count() == g.component_count() - 2

    def test_reduce_essential_with_content(self):
        g = DividingSet(TORUS, essential=4, slope=(1, 0),
                        forests=(((),), (), (), ((),)), overtwisted=True)
        assert euler_class_pairing(g) == 0
        mv = attach_bypass(g, AttachingArc.make([("e", 0), ("e", 1), ("e", 2)]))
        assert euler_class_pairing(mv.result) == 0
        assert mv.result.essential == 2

    def test_remove_essential_pair(self):
        g = torus_standard(overtwisted=True)
        mv = attach_bypass(g, AttachingArc.make([("e", 0), ("e", 1), ("e", 1)]))
        assert mv.result.essential == 0
        assert mv.result.component_count() == 2  # nested pair

    def test_create_pair(self):
        pair = DividingSet(TORUS, essential=0, forests=((((),),),), overtwisted=True)
        arc = AttachingArc.make(
            [("c", 0, (0,)), ("c", 0, (0, 0)), ("c", 0, (0,))], slope=(1, 2)
        )
        mv = attach_bypass(pair, arc)
        assert mv.result.essential == 2 and mv.result.slope == (1, 2)
        assert all(forest_nodes(f) == 0 for f in mv.result.forests)

    def test_annihilate_pair(self):
        g = DividingSet(TORUS, essential=2, slope=(0, 1),
                        forests=(((((),),)), ()), overtwisted=True)
        arc = AttachingArc.make([("c", 0, (0,)), ("c", 0, (0, 0)), ("c", 0, (0,))])
        mv = attach_bypass(g, arc)
        assert mv.result == torus_standard(overtwisted=True)

    def test_absorb_across(self):
        g = DividingSet(TORUS, essential=2, slope=(0, 1),
                        forests=(((),), ((),)), overtwisted=True)
        arc = AttachingArc.make([("c", 0, (0,)), ("e", 1), ("c", 1, (0,))])
        mv = attach_bypass(g, arc)
        assert mv.result == torus_standard(overtwisted=True)

    def test_requires_overtwisted_flag(self):
        g = torus_standard(overtwisted=False)
        with pytest.raises(DivSetError):
            attach_bypass(g, AttachingArc.make([("e", 0), ("e", 1), ("e", 1)]))
        mv = attach_bypass(g, AttachingArc.make([("e", 0), ("e", 1), ("e", 1)]),
                           hypothetical=True)
        assert mv.hypothetical

    def test_never_empties(self):
        pair = DividingSet(TORUS, essential=0, forests=((((),),),), overtwisted=True)
        arc = AttachingArc.make([("c", 0, (0,)), ("c", 0, (0, 0)), ("c", 0, (0,))])
        with pytest.raises(DivSetError):
            attach_bypass(pair, arc)  # annihilation would empty the set

    def test_arc_needs_three_crossings(self):
        with pytest.raises(DivSetError):
            AttachingArc.make([("e", 0), ("e", 1)])


def _forests_with_nodes(total):
    """All nesting forests with a given number of circles."""
    if total == 0:
        yield ()
        return
    # first tree takes k nodes (1 subtree root + k-1 inside), rest recurse
    for k in range(1, total + 1):
        for tree_inner in _forests_with_nodes(k - 1):
            for rest in _forests_with_nodes(total - k):
                yield (tree_inner,) + rest


def _all_torus_states(max_components):
    for e in (0, 2, 4):
        if e > max_components:
            continue
        budget = max_components - e
        regions = max(e, 1)
        for total in range(0, budget + 1):
            for split in itertools.product(range(total + 1), repeat=regions):
                if sum(split) != total:
                    continue
                forest_choices = [list(_forests_with_nodes(c)) for c in split]
                for combo in itertools.product(*forest_choices):
                    if e == 0 and total == 0:
                        continue
                    g = DividingSet(
                        TORUS, essential=e,
                        slope=(0, 1) if e else None,
                        forests=tuple(combo), overtwisted=True,
                    )
                    if g.validate() == []:
                        yield g


class TestFuzz:
    def test_moves_preserve_validity_and_euler(self):
        count = 0
        for g in _all_torus_states(6):
            before = euler_class_pairing(g)
            for arc in legal_moves(g, (0, 1)):
                try:
                    mv = attach_bypass(g, arc)
                except DivSetError:
                    continue
                count += 1
                assert mv.result.validate() == []
                assert mv.result.component_count() > 0
                assert euler_class_pairing(mv.result) == before
        assert count > 50


class TestPlanner:
    def test_already_normal(self):
        g = torus_standard(slope=(0, 1), overtwisted=True)
        assert torus_normalize(g, (0, 1)) == []

    def test_four_essential_plan(self):
        g = DividingSet(TORUS, essential=4, slope=(1, 0),
                        forests=((), (), (), ()), overtwisted=True)
        plan = torus_normalize(g, (0, 1))
        assert [m.kind for m in plan] == [
            "reduce-essential", "remove-essential-pair", "create-pair",
        ]
        final = plan[-1].result
        assert final.essential == 2 and final.slope == (0, 1)

    def test_both_annuli_contractibles(self):
        g = DividingSet(TORUS, essential=2, slope=(0, 1),
                        forests=(((),), ((),)), overtwisted=True)
        plan = torus_normalize(g, (0, 1))
        assert plan[0].kind == "absorb-across"
        assert plan[-1].result == torus_standard(overtwisted=True)

    def test_replay_reproduces_terminal(self):
        g = DividingSet(TORUS, essential=4, slope=(1, 0),
                        forests=(((),), ((),), (), ()), overtwisted=True)
        assert euler_class_pairing(g) == 0
        plan = torus_normalize(g, (2, 1))
        cur = g
        for mv in plan:
            cur = attach_bypass(cur, mv.arc).result
        assert cur == plan[-1].result
        assert cur.slope == (2, 1)

    def test_euler_obstruction(self):
        g = DividingSet(TORUS, essential=2, slope=(0, 1),
                        forests=(((),), ()), overtwisted=True)
        with pytest.raises(DivSetError):
            torus_normalize(g, (0, 1))

    def test_needs_overtwisted(self):
        g = DividingSet(TORUS, essential=4, slope=(1, 0), forests=((), (), (), ()))
        with pytest.raises(DivSetError):
            torus_normalize(g, (0, 1))

    def test_all_small_states_terminate(self):
        budget = 0
        for g in _all_torus_states(8):
            if euler_class_pairing(g) != 0:
                continue
            plan = torus_normalize(g, (0, 1))
            final = plan[-1].result if plan else g
            assert final.essential == 2
            assert final.slope == (0, 1)
            assert all(forest_nodes(f) == 0 for f in final.forests)
            budget += 1
        assert budget >= 8

    def test_bfs_equivalence_small(self):
        for g in _all_torus_states(4):
            if euler_class_pairing(g) != 0:
                continue
            plan = torus_normalize(g, (0, 1))
            bfs = bfs_normalize(g, (0, 1))
            assert bfs is not None
            final_det = plan[-1].result if plan else g
            final_bfs = bfs[-1].result if bfs else g
            assert final_det == final_bfs


class TestDehnParity:
    def test_update(self):
        s = DehnParityState("zero", "even")
        s2 = dehn_parity_update(s)
        assert s2.divide_parity == "odd" and s2.ruling_parity == "even"
        assert s2.twists == 1

    def test_precondition_errors(self):
        with pytest.raises(DivSetError):
            dehn_parity_update(DehnParityState("zero", "odd"))
        s2 = dehn_parity_update(DehnParityState("zero", "even"))
        with pytest.raises(DivSetError):
            dehn_parity_update(s2)


class TestJson:
    def test_round_trip(self):
        g = DividingSet(TORUS, essential=2, slope=(0, 1),
                        forests=((((),),), ((),)), overtwisted=True)
        blob = json.dumps(divset_to_jsonable(g), sort_keys=True)
        back = divset_from_jsonable(json.loads(blob))
        assert back == g
        blob2 = json.dumps(divset_to_jsonable(back), sort_keys=True)
        assert blob == blob2

    def test_plan_serialization(self):
        g = DividingSet(TORUS, essential=4, slope=(1, 0),
                        forests=((), (), (), ()), overtwisted=True)
        plan = torus_normalize(g, (0, 1))
        data = plan_to_jsonable(plan)
        assert len(data) == len(plan)
        for mv, d in zip(plan, data):
            assert divset_from_jsonable(d["result"]) == mv.result
