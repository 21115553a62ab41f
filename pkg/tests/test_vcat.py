import random

import pytest

from enrbisim.errors import BaseMismatch, NotParallel, SizeLimit, TypeMismatch
from enrbisim.fixtures import aut1, codisc2, loop1, m3, p01, point, q2, ql
from enrbisim.quantaloid import validate_quantaloid
from enrbisim.vcat import (
    EnrichedGraph,
    LaxRelationalPresentation,
    VCategory,
    VFunctor,
    _kleene_closure,
    coproduct,
    decode_slice,
    encode_slice,
    enumerate_vfunctors,
    exists_vnatural,
    free_vcategory,
    isomorphic_by,
    laxrel_to_vcat,
    product,
    pullback,
    same_presentation,
    slice_quantaloid,
    terminal,
    to_terminal,
    validate_vcategory,
    validate_vfunctor,
    vcat_to_laxrel,
)


@pytest.fixture(scope="module")
def Q2():
    return q2()


@pytest.fixture(scope="module")
def QL():
    return ql()


class TestValidateVCategory:
    def test_single_point_valid(self, Q2):
        a = VCategory(Q2, ["x"], [0], [[1]])
        assert validate_vcategory(a) == []

    def test_broken_transitivity(self, Q2):
        a = VCategory(
            Q2,
            ["a0", "a1", "a2"],
            [0, 0, 0],
            [[1, 1, 0], [0, 1, 1], [0, 0, 1]],
        )
        assert any("composition" in v for v in validate_vcategory(a))

    def test_free_output_valid(self, QL):
        assert validate_vcategory(aut1(QL)) == []
        assert validate_vcategory(loop1(QL)) == []

    def test_missing_identity(self, Q2):
        a = VCategory(Q2, ["x"], [0], [[0]])
        assert any("identity" in v for v in validate_vcategory(a))


class TestValidateVFunctor:
    def test_identity_valid(self, Q2):
        a = p01(Q2)
        assert validate_vfunctor(VFunctor.identity(a)) == []

    def test_codiscrete_collapse_valid(self, Q2):
        c = codisc2(Q2)
        p = point(Q2)
        assert validate_vfunctor(VFunctor(c, p, [0, 0])) == []

    def test_hom_shrink_reported(self, Q2):
        # reversed preorder map shrinks the hom between the two points
        a = p01(Q2)
        b = VCategory(Q2, ["b0", "b1"], [0, 0], [[1, 0], [1, 1]])
        f = VFunctor(a, b, [0, 1])
        assert any("shrinks" in v for v in validate_vfunctor(f))

    def test_base_mismatch(self, Q2, QL):
        a = point(Q2)
        b = loop1(QL)
        with pytest.raises(BaseMismatch):
            validate_vfunctor(VFunctor(a, b, [0]))


class TestVNatural:
    def test_reflexive(self, Q2):
        a = p01(Q2)
        f = VFunctor.identity(a)
        assert exists_vnatural(f, f)

    def test_preorder_pointwise(self, Q2):
        a = p01(Q2)
        lift = VFunctor(a, a, [1, 1])
        assert exists_vnatural(VFunctor.identity(a), lift)
        assert not exists_vnatural(lift, VFunctor.identity(a))

    def test_language_case_fails_without_unit(self, QL):
        b = aut1(QL)
        one = VCategory(QL, ["x"], [0], [[frozenset({()})]])
        f = VFunctor(one, b, [0])
        g = VFunctor(one, b, [1])
        # hom(a0, a1) = {m} does not contain the empty word
        assert not exists_vnatural(f, g)

    def test_not_parallel(self, Q2):
        a, b = point(Q2), p01(Q2)
        with pytest.raises(NotParallel):
            exists_vnatural(VFunctor(a, b, [0]), VFunctor.identity(b))


class TestProduct:
    def test_with_terminal_is_isomorphic(self, Q2):
        a = p01(Q2)
        one = terminal(Q2)
        prod, to_a, _ = product(a, one)
        assert prod.n_objects == a.n_objects
        assert isomorphic_by(prod, a, to_a.mapping)

    def test_product_of_preorders(self, Q2):
        a = p01(Q2)
        prod, _, _ = product(a, a)
        # componentwise order on pairs
        idx = {name: i for i, name in enumerate(prod.objects)}
        assert prod.hom(idx["(a0|a0)"], idx["(a1|a1)"]) == 1
        assert prod.hom(idx["(a1|a0)"], idx["(a0|a1)"]) == 0

    def test_empty_fiber(self, QL):
        a = aut1(QL)
        empty = VCategory(QL, [], [], [])
        prod, _, _ = product(a, empty)
        assert prod.n_objects == 0

    def test_projections_are_functors(self, Q2):
        a, b = p01(Q2), codisc2(Q2)
        prod, to_a, to_b = product(a, b)
        assert validate_vfunctor(to_a) == []
        assert validate_vfunctor(to_b) == []


class TestPullback:
    def test_along_identities_is_product(self, Q2):
        a, b = p01(Q2), codisc2(Q2)
        prod, _, _ = product(a, b)
        one = terminal(Q2)
        pb, _, _ = pullback(to_terminal(a, one), to_terminal(b, one))
        assert same_presentation(prod, pb)

    def test_of_identity_along_identity(self, Q2):
        a = p01(Q2)
        f = VFunctor.identity(a)
        pb, _, _ = pullback(f, f)
        assert pb.n_objects == a.n_objects

    def test_universal_property_brute_force(self, Q2):
        a, b = p01(Q2), codisc2(Q2)
        one = terminal(Q2)
        f, g = to_terminal(a, one), to_terminal(b, one)
        pb, pa, pb_leg = pullback(f, g)
        assert pa.then(f).mapping == pb_leg.then(g).mapping
        for c in (point(Q2), p01(Q2)):
            for qa in enumerate_vfunctors(c, a):
                for qb in enumerate_vfunctors(c, b):
                    if qa.then(f).mapping != qb.then(g).mapping:
                        continue
                    mediators = [
                        u
                        for u in enumerate_vfunctors(c, pb)
                        if u.then(pa).mapping == qa.mapping
                        and u.then(pb_leg).mapping == qb.mapping
                    ]
                    assert len(mediators) == 1


class TestUniversalProperties:
    def test_product_mediators_unique(self, Q2):
        a, b = p01(Q2), codisc2(Q2)
        prod, to_a, to_b = product(a, b)
        for c in (point(Q2), p01(Q2)):
            for qa in enumerate_vfunctors(c, a):
                for qb in enumerate_vfunctors(c, b):
                    mediators = [
                        u
                        for u in enumerate_vfunctors(c, prod)
                        if u.then(to_a).mapping == qa.mapping
                        and u.then(to_b).mapping == qb.mapping
                    ]
                    assert len(mediators) == 1

    def test_coproduct_mediators_unique(self, Q2):
        a, b = point(Q2), p01(Q2)
        total, (inj_a, inj_b) = coproduct([a, b])
        for c in (p01(Q2), codisc2(Q2)):
            for qa in enumerate_vfunctors(a, c):
                for qb in enumerate_vfunctors(b, c):
                    mediators = [
                        u
                        for u in enumerate_vfunctors(total, c)
                        if inj_a.then(u).mapping == qa.mapping
                        and inj_b.then(u).mapping == qb.mapping
                    ]
                    assert len(mediators) == 1


class TestTerminal:
    def test_over_boolean(self, Q2):
        one = terminal(Q2)
        assert one.n_objects == 1
        assert one.hom(0, 0) == 1
        assert validate_vcategory(one) == []

    def test_unique_map_from_fixture(self, QL):
        a = aut1(QL)
        one = terminal(QL)
        maps = enumerate_vfunctors(a, one)
        assert len(maps) == 1
        assert maps[0].mapping == to_terminal(a, one).mapping

    def test_over_metric_grid(self):
        base = m3()
        one = terminal(base)
        # top of the reversed grid is numeric zero
        assert base.hom(0, 0).name_of(one.hom(0, 0)) == "0"


class TestCoproduct:
    def test_single_summand(self, Q2):
        a = p01(Q2)
        total, (inj,) = coproduct([a])
        assert isomorphic_by(a, total, inj.mapping)

    def test_cross_homs_are_bottom(self, Q2):
        a, b = p01(Q2), point(Q2)
        total, _ = coproduct([a, b])
        idx = {name: i for i, name in enumerate(total.objects)}
        assert total.hom(idx["a0#0"], idx["p#1"]) == 0

    def test_sizes_add(self, QL):
        total, injections = coproduct([aut1(QL), loop1(QL)])
        assert total.n_objects == 3
        assert all(validate_vfunctor(i) == [] for i in injections)
        assert validate_vcategory(total) == []


class TestFreeVCategory:
    def test_edgeless(self, QL):
        a = free_vcategory(
            QL, EnrichedGraph(vertices=[("x", 0), ("y", 0)], edges=[])
        )
        assert a.hom(0, 0) == frozenset({()})
        assert a.hom(0, 1) == frozenset()

    def test_aut1_homs(self, QL):
        a = aut1(QL)
        assert a.hom(0, 0) == frozenset({()})
        assert a.hom(0, 1) == frozenset({("m",)})
        assert a.hom(1, 1) == frozenset({()})
        assert a.hom(1, 0) == frozenset()

    def test_loop_saturates_at_cutoff(self, QL):
        b = loop1(QL)
        assert b.hom(0, 0) == frozenset({(), ("m",), ("m", "m")})

    def test_bad_edge_label(self, Q2):
        with pytest.raises(TypeMismatch):
            free_vcategory(
                Q2, EnrichedGraph(vertices=[("x", 0)], edges=[(0, 0, 7)])
            )

    def test_fast_path_matches_generic_closure(self, QL):
        graph = EnrichedGraph(
            vertices=[("x", 0), ("y", 0)],
            edges=[(0, 1, frozenset({("m",)})), (1, 0, frozenset({(), ("m",)}))],
        )
        fast = free_vcategory(QL, graph)
        slow = _kleene_closure(QL, [0, 0], graph.edges)
        assert fast.homs == slow

    def test_free_over_boolean_is_reachability(self, Q2):
        graph = EnrichedGraph(
            vertices=[("x", 0), ("y", 0), ("z", 0)],
            edges=[(0, 1, 1), (1, 2, 1)],
        )
        a = free_vcategory(Q2, graph)
        assert a.hom(0, 2) == 1
        assert a.hom(2, 0) == 0


class TestEnumerateVFunctors:
    def test_terminal_to_terminal(self, Q2):
        one = terminal(Q2)
        assert len(enumerate_vfunctors(one, one)) == 1

    def test_aut1_into_loop1(self, QL):
        assert len(enumerate_vfunctors(aut1(QL), loop1(QL))) == 1

    def test_empty_target(self, QL):
        a = aut1(QL)
        empty = VCategory(QL, [], [], [])
        assert enumerate_vfunctors(a, empty) == []

    def test_cap(self, Q2):
        c = codisc2(Q2)
        with pytest.raises(SizeLimit):
            enumerate_vfunctors(c, c, cap=1)


class TestLaxRelational:
    def _presentation(self):
        from enrbisim.cts import FiniteCategory
        from enrbisim.quantaloid import build_powerset_quantaloid

        cat = FiniteCategory.poset(["0", "1"], [(0, 0), (0, 1), (1, 1)])
        base = build_powerset_quantaloid(cat)
        arrow = next(
            m for m in range(len(cat.morphisms)) if cat.mor_src(m) == 0 and cat.mor_tgt(m) == 1
        )
        pres = LaxRelationalPresentation(
            cat,
            fibers=[["x0", "x1"], ["y0"]],
            relations={
                cat.identities[0]: {(0, 0), (1, 1)},
                cat.identities[1]: {(0, 0)},
                arrow: {(0, 0)},
            },
        )
        return base, pres, arrow

    def test_one_point_round_trip(self):
        base, pres, arrow = self._presentation()
        a = laxrel_to_vcat(pres, base)
        assert validate_vcategory(a) == []
        back = vcat_to_laxrel(a)
        assert back.fibers == pres.fibers
        assert back.relations == pres.relations

    def test_membership_matches_relation(self):
        base, pres, arrow = self._presentation()
        a = laxrel_to_vcat(pres, base)
        assert arrow in a.hom(0, 2)  # x0 -> y0 carries the arrow
        assert arrow not in a.hom(1, 2)

    def test_random_round_trips(self):
        from enrbisim.cts import FiniteCategory
        from enrbisim.quantaloid import build_powerset_quantaloid

        rng = random.Random(11)
        cat = FiniteCategory.poset(["0", "1"], [(0, 0), (0, 1), (1, 1)])
        base = build_powerset_quantaloid(cat)
        arrow = next(
            m
            for m in range(len(cat.morphisms))
            if cat.mor_src(m) == 0 and cat.mor_tgt(m) == 1
        )
        for _ in range(30):
            fibers = [["a", "b"][: rng.randint(1, 2)], ["c", "d"][: rng.randint(1, 2)]]
            rel_id0 = {(i, i) for i in range(len(fibers[0]))}
            rel_id1 = {(i, i) for i in range(len(fibers[1]))}
            cross = {
                (i, j)
                for i in range(len(fibers[0]))
                for j in range(len(fibers[1]))
                if rng.random() < 0.6
            }
            pres = LaxRelationalPresentation(
                cat,
                fibers,
                {cat.identities[0]: rel_id0, cat.identities[1]: rel_id1, arrow: cross},
            )
            back = vcat_to_laxrel(laxrel_to_vcat(pres, base))
            assert back.fibers == pres.fibers
            assert back.relations == pres.relations


class TestSlice:
    def test_slice_of_terminal_is_base(self, Q2):
        one = terminal(Q2)
        va = slice_quantaloid(one)
        assert validate_quantaloid(va).ok
        assert va.hom(0, 0).size == Q2.hom(0, 0).size

    def test_identity_functor_encodes_to_full_homs(self, Q2):
        a = p01(Q2)
        va = slice_quantaloid(a)
        s = encode_slice(va, VFunctor.identity(a))
        assert validate_vcategory(s) == []
        assert s.hom(0, 1) == a.hom(0, 1)

    def test_round_trip_on_random_slices(self, QL):
        a = aut1(QL)
        va = slice_quantaloid(a)
        assert validate_quantaloid(va).ok
        sources = [loop1(QL), aut1(QL)]
        for x in sources:
            for f in enumerate_vfunctors(x, a):
                s = encode_slice(va, f)
                assert validate_vcategory(s) == []
                g = decode_slice(va, s)
                assert g.mapping == f.mapping
                assert same_presentation(g.source, x)
