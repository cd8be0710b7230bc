"""
Tests for order classification, maximal finite subgroups, graph recovery,
nerve truncations and the normalizer certificate.
"""

import pytest

from pathpart.analysis import (
    NonTrivialNormalizer,
    OrderClass,
    classify_order,
    classify_orders,
    finite_order_elements,
    homotopy_selfequiv_order,
    maximal_finite_subgroups,
    maxsub,
    maxsub_graph,
    maxsub_symmetry_check,
    nerve,
    normalizer,
    recover_check,
    recover_decgraph,
    strong_maxsub_graph,
)
from pathpart.decpart import PALETTES, DecGraph, build, path_partial, random_decgraphs
from pathpart.fingroup import builtin_group, identify, make_cyclic
from pathpart.graphs import complete, isomorphic, path
from pathpart.options import RECOVERY_BOUNDS, Bounds
from pathpart.partialcore import GroupDiagram, colimit_of_groups, free_on_one, from_group
from pathpart.words import CRWord, Letter

A = CRWord((Letter(0, 1),))
B = CRWord((Letter(1, 1),))
AB = CRWord((Letter(0, 1), Letter(1, 1)))


@pytest.fixture
def d8_colimit():
    diagram = GroupDiagram.from_subgroups(
        builtin_group("D8"),
        [["1", "x2"], ["1", "x2", "t", "tx2"], ["1", "x2", "tx", "tx3"]],
        [(0, 1), (0, 2)],
        names=["Z", "V", "V'"],
    )
    return colimit_of_groups(diagram)


class TestOrders:
    def test_unit(self, p_k2):
        assert classify_order(p_k2, p_k2.unit, 12) == (OrderClass.FINITE, 1)

    def test_letter(self, p_k2, k2_z2z3):
        assert classify_order(p_k2, A, 12) == (OrderClass.FINITE, 2)
        assert classify_order(build(k2_z2z3), B, 12) == (OrderClass.FINITE, 3)

    def test_product_of_letters_is_infinite(self, p_k2):
        assert classify_order(p_k2, AB, 12) == (OrderClass.INFINITE, None)

    def test_free_on_one(self):
        assert classify_order(free_on_one(), 1, 12) == (OrderClass.INFINITE, None)

    def test_long_elements_have_infinite_order(self, sample_decgraphs):
        corpus = sample_decgraphs + random_decgraphs(6, 4, PALETTES["oracle"], seed=5)
        for dg in corpus:
            classes = classify_orders(build(dg), 3, 12)
            for e, order_class in classes.items():
                if len(e) >= 2:
                    assert order_class is OrderClass.INFINITE, repr(e)
                else:
                    assert order_class is OrderClass.FINITE, repr(e)

    def test_indeterminate(self):
        # Z7 elements need seven powers
        z7 = from_group(make_cyclic(7))
        assert classify_order(z7, 1, 4) == (OrderClass.INDETERMINATE, None)

    def test_indeterminate_warns(self):
        z7 = from_group(make_cyclic(7))
        with pytest.warns(UserWarning, match="indeterminate order"):
            found = finite_order_elements(z7, 1, 4)
        assert found == {0}

    def test_finite_elements(self, p_k2):
        assert finite_order_elements(p_k2, 2, 12) == {p_k2.unit, A, B}


class TestMaximalSubgroups:
    def test_k2(self, p_k2):
        records = maximal_finite_subgroups(p_k2)
        assert [r.elements for r in records] == [{p_k2.unit, A}, {p_k2.unit, B}]
        assert all(r.order == 2 for r in records)

    def test_mixed_decorations(self, k2_z2z3):
        records = maximal_finite_subgroups(build(k2_z2z3))
        assert sorted(identify(r.table) for r in records) == ["Z2", "Z3"]

    def test_non_abelian_vertex(self):
        dg = DecGraph(complete(2), [builtin_group("S3"), make_cyclic(2)])
        records = maximal_finite_subgroups(build(dg))
        assert sorted(r.order for r in records) == [2, 6]
        assert identify(max(records, key=lambda r: r.order).table) == "S3"

    def test_group_is_its_own_maximal_subgroup(self):
        s3 = from_group(builtin_group("S3"))
        records = maximal_finite_subgroups(s3, Bounds(elem_len=1))
        assert len(records) == 1
        assert records[0].order == 6

    def test_unlabelled_group(self):
        records = maximal_finite_subgroups(from_group(make_cyclic(3)), Bounds(elem_len=1))
        assert [r.order for r in records] == [3]

    def test_colimit(self, d8_colimit):
        records = maximal_finite_subgroups(d8_colimit, Bounds(elem_len=1))
        assert [r.order for r in records] == [4, 4]
        assert {r.elements for r in records} == {d8_colimit.node_elements(1), d8_colimit.node_elements(2)}


class TestMaxSub:
    def test_labels_follow_vertices(self, p_k2):
        result = maxsub(p_k2)
        assert result.graph.labels == ("a", "b")
        assert result.graph.edges == ((0, 1),)
        assert result.witnesses[(0, 1)] == (A, B)
        assert not result.strong

    def test_path(self, p_p3):
        g = maxsub_graph(p_p3)
        assert g.labels == ("a", "b", "c")
        assert isomorphic(g, path(3)) is not None

    def test_weak_and_strong_differ_on_colimit(self, d8_colimit):
        bounds = Bounds(elem_len=1)
        weak = maxsub(d8_colimit, bounds)
        strong = maxsub(d8_colimit, bounds, strong=True, records=weak.records)
        assert weak.graph.edges == ((0, 1),)
        assert strong.graph.edges == ()
        assert weak.graph.labels == ("H0", "H1")

    def test_strong_agrees_on_decorated_graphs(self, p_p3):
        assert strong_maxsub_graph(p_p3) == maxsub_graph(p_p3)

    def test_symmetry(self, p_p3):
        assert maxsub_symmetry_check(p_p3, maximal_finite_subgroups(p_p3)) is None


class TestRecovery:
    def test_k2(self, k2_z2z3):
        f = recover_check(k2_z2z3)
        assert f is not None and f.is_isomorphism()

    def test_decorations_recovered(self, k2_z2z3):
        dg = recover_decgraph(build(k2_z2z3))
        assert dg.graph.labels == ("a", "b")
        assert [identify(g) for g in dg.dec] == ["Z2", "Z3"]

    def test_edgeless(self, sample_decgraphs):
        assert recover_check(sample_decgraphs[0]) is not None

    def test_random(self):
        for dg in random_decgraphs(4, 3, seed=11):
            assert recover_check(dg, RECOVERY_BOUNDS) is not None, dg


class TestNerve:
    def test_z2_group(self):
        z2 = from_group(make_cyclic(2))
        n = nerve(z2, 2, 1)
        assert [len(n.dims[k]) for k in range(3)] == [1, 2, 4]
        assert n.non_degenerate(1) == [(1,)]
        assert n.non_degenerate(2) == [(1, 1)]
        assert n.check_simplicial_identities() == []

    def test_faces_and_degeneracies(self):
        z2 = from_group(make_cyclic(2))
        n = nerve(z2, 2, 1)
        assert n.face(1, (1, 1)) == (0,)
        assert n.face(0, (1, 0)) == (0,)
        assert n.face(2, (1, 0)) == (1,)
        assert n.degeneracy(0, (1,)) == (0, 1)
        with pytest.raises(ValueError):
            n.face(3, (1, 1))

    def test_path_partial(self, p_p3):
        n = nerve(p_p3, 2, 1)
        a, c = CRWord((Letter(0, 1),)), CRWord((Letter(2, 1),))
        assert not n.contains((a, c))
        assert n.contains((a, CRWord((Letter(1, 1),))))
        assert n.check_simplicial_identities() == []
        assert n.inner_horn_fillers() == []

    def test_faces_closed(self, p_k2):
        n = nerve(p_k2, 2, 1)
        # the face of (a, b) is the length-two element ab
        assert n.contains((AB,))

    def test_to_json(self):
        n = nerve(from_group(make_cyclic(2)), 2, 1)
        out = n.to_json()
        assert sorted(out["simplices"]) == ["0", "1", "2"]
        assert out["faces"]["1,0"] == [0, 0]
        assert len(out["degeneracies"]["0,0"]) == 1
        assert "2,0" not in out["degeneracies"]


class TestNormalizer:
    def test_trivial_on_k2(self, p_k2):
        assert normalizer(p_k2, 3) == {p_k2.unit}

    def test_whole_group(self):
        z3 = from_group(make_cyclic(3))
        assert normalizer(z3, 1) == {0, 1, 2}

    def test_single_vertex(self):
        h = path_partial(complete(1))
        assert normalizer(h, 1) == {h.unit, A}

    def test_homotopy_order(self, p_k2, k2_z2z3):
        assert homotopy_selfequiv_order(p_k2) == 2
        assert homotopy_selfequiv_order(build(k2_z2z3)) == 2

    def test_refused_on_single_vertex(self):
        with pytest.raises(NonTrivialNormalizer, match="normalizer"):
            homotopy_selfequiv_order(path_partial(complete(1)))
