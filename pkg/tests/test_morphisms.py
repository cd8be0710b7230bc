"""
Tests for decorated-graph morphisms, homomorphism checks and automorphism groups.
"""

import itertools
from unittest.mock import patch

import pytest

from pathpart.decpart import DecGraph, build, path_partial, uniform
from pathpart.fingroup import GroupMap, builtin_group, make_cyclic
from pathpart.graphs import GraphMap, complete, path
from pathpart.morphisms import (
    DecMorphism,
    PartialHom,
    TruncatedAut,
    aut_group,
    brute_aut_truncated,
    check_hom,
    decorate,
    induced_hom,
    kernel,
    kernel_is_torsion_free,
    oracle_agreement,
    path_lift,
    predicted_aut_order,
    restrict,
)
from pathpart.partialcore import from_group
from pathpart.words import CRWord, Letter, reduce

B1, B2 = Letter(1, 1), Letter(1, 2)


def drop_b1(h):
    """Delete the letter b.1 from every word: not a homomorphism of K2(Z2, Z3)."""
    return PartialHom(h, h, lambda e: CRWord(reduce([letter for letter in e if letter != B1], h.dec)), "drop b.1")


class TestDecMorphism:
    def test_identity_describe(self, k2_z2z3):
        assert DecMorphism.identity(k2_z2z3).describe() == "a->a [1->1]; b->b [1->1, 2->2]"

    def test_wrong_count(self, k2_z2z3):
        ident = GraphMap.identity(k2_z2z3.graph)
        with pytest.raises(ValueError, match="Expected 2 group maps"):
            DecMorphism(k2_z2z3, k2_z2z3, ident, [GroupMap.identity(make_cyclic(2))])

    def test_not_injective(self):
        dg = uniform(complete(1), make_cyclic(2))
        z2 = make_cyclic(2)
        with pytest.raises(ValueError, match="not injective"):
            DecMorphism(dg, dg, GraphMap.identity(dg.graph), [GroupMap(z2, z2, [0, 0])])

    def test_graph_mismatch(self, k2_z2z3):
        other = GraphMap.identity(path(3))
        with pytest.raises(ValueError, match="does not match"):
            DecMorphism(k2_z2z3, k2_z2z3, other, [])

    def test_wrong_target_group(self, k2_z2z3):
        swap = GraphMap(k2_z2z3.graph, k2_z2z3.graph, [1, 0])
        z2, z3 = make_cyclic(2), make_cyclic(3)
        with pytest.raises(ValueError, match="wrong source or target"):
            DecMorphism(k2_z2z3, k2_z2z3, swap, [GroupMap.identity(z2), GroupMap.identity(z3)])

    def test_apply(self, k2_z2z3):
        z2, z3 = make_cyclic(2), make_cyclic(3)
        m = DecMorphism(k2_z2z3, k2_z2z3, GraphMap.identity(k2_z2z3.graph), [GroupMap.identity(z2), GroupMap(z3, z3, [0, 2, 1])])
        assert m.apply((Letter(0, 1), B1)) == (Letter(0, 1), B2)
        assert m.compose(m).is_identity()


class TestCheckHom:
    def test_collapse_fails_products(self, k2_z2z3):
        h = build(k2_z2z3)
        report = check_hom(drop_b1(h), max_word_len=3, max_elem_size=1)
        assert not report.passed
        assert report.axiom == "H2"
        b1 = CRWord((B1,))
        assert report.word == (b1, b1)
        assert report.replay(drop_b1(h))

    def test_collapse_triple_is_fine(self, k2_z2z3):
        # (b.1)^3 is the unit on both sides
        h = build(k2_z2z3)
        f = drop_b1(h)
        b1 = CRWord((B1,))
        assert f.target.product(f.apply_word((b1, b1, b1))) == f(h.product((b1, b1, b1)))

    def test_domain_not_preserved(self, p_p3):
        swap = {0: 0, 1: 2, 2: 1}
        f = PartialHom(p_p3, p_p3, lambda e: CRWord(Letter(swap[v], x) for v, x in e))
        report = check_hom(f, max_word_len=2, max_elem_size=1)
        assert not report.passed
        assert report.axiom == "H1"

    def test_fold_path_onto_edge(self):
        fold = GraphMap(path(3), complete(2), [0, 1, 0])
        report = check_hom(induced_hom(path_lift(fold)), max_word_len=3, max_elem_size=2)
        assert report.passed
        assert report.n_words > 1

    def test_induced_hom_is_functorial(self):
        fold = path_lift(GraphMap(path(3), complete(2), [0, 1, 0]))
        swap = path_lift(GraphMap(complete(2), complete(2), [1, 0]))
        composite = induced_hom(swap.compose(fold))
        stepwise = induced_hom(swap).compose(induced_hom(fold))
        for e in composite.source.enum_elems(4):
            assert composite(e) == stepwise(e)
        assert check_hom(stepwise, max_word_len=3, max_elem_size=2).passed
        ident = induced_hom(DecMorphism.identity(fold.source))
        assert all(ident(e) == e for e in ident.source.enum_elems(4))

    def test_automorphisms_are_homs(self, k2_z2z3):
        for m in aut_group(k2_z2z3).elements:
            assert check_hom(induced_hom(m), max_word_len=3, max_elem_size=2).passed


class TestDecorate:
    def test_recovers_path_lift(self):
        fold = GraphMap(path(3), complete(2), [0, 1, 0])
        lifted = path_lift(fold)
        assert decorate(induced_hom(lifted)) == lifted

    def test_letter_to_word(self, p_k2):
        a = CRWord((Letter(0, 1),))
        ab = CRWord((Letter(0, 1), Letter(1, 1)))
        f = PartialHom(p_k2, p_k2, lambda e: ab if e == a else e)
        with pytest.raises(ValueError, match="does not map to a letter"):
            decorate(f)

    def test_needs_decorated_graphs(self):
        g = from_group(make_cyclic(2))
        with pytest.raises(TypeError):
            decorate(PartialHom(g, g, lambda e: e))


class TestKernel:
    def test_torsion_in_kernel(self, k2_z2z3):
        h = build(k2_z2z3)
        f = drop_b1(h)
        assert kernel(f, 1) == {h.unit, CRWord((B1,))}
        assert not kernel_is_torsion_free(f, 1)

    def test_torsion_free_kernel(self, p_k2):
        k1 = path_partial(complete(1))
        squash = PartialHom(p_k2, k1, lambda e: CRWord(reduce([Letter(0, 1)] * len(e), k1.dec)))
        ab = CRWord((Letter(0, 1), Letter(1, 1)))
        assert ab in kernel(squash, 2)
        assert kernel_is_torsion_free(squash, 2)

    def test_identity_kernel(self, p_p3):
        f = PartialHom(p_p3, p_p3, lambda e: e)
        assert kernel(f, 3) == {p_p3.unit}
        assert kernel_is_torsion_free(f, 3)


class TestAutGroup:
    def test_k2_mixed(self, k2_z2z3):
        result = aut_group(k2_z2z3)
        assert result.order == 2
        squaring = [m for m in result.elements if not m.is_identity()]
        assert squaring[0].fam[1].images == (0, 2, 1)
        assert result.elements[0].is_identity()
        seq = result.exact_sequence()
        assert seq["image_trivial"]
        assert seq["kernel_order"] == 2
        assert seq["graph_aut_order"] == 2
        assert not seq["surjective"]
        assert seq["text"] == "1 -> Z2 -> Z2 -> Z2"

    def test_path_partial(self, p_p3):
        result = aut_group(p_p3.decgraph)
        assert result.order == 2
        assert result.exact_sequence()["kernel"] == "1"

    def test_k2_z3_is_dihedral(self):
        result = aut_group(uniform(complete(2), make_cyclic(3)))
        assert result.order == 8
        assert result.exact_sequence()["aut"] == "D8"

    def test_wreath(self):
        result = aut_group(uniform(path(3), make_cyclic(3)))
        assert result.order == 16
        seq = result.exact_sequence()
        assert seq["kernel_order"] == 8
        assert seq["surjective"]
        assert result.is_section()

    def test_section_needs_uniform(self, k2_z2z3):
        with pytest.raises(ValueError, match="all decorations equal"):
            aut_group(k2_z2z3).section()

    def test_closed_under_composition(self):
        result = aut_group(uniform(complete(2), make_cyclic(3)))
        members = set(result.elements)
        for a, b in itertools.product(result.elements, repeat=2):
            assert a.compose(b) in members

    @pytest.mark.parametrize("dg", [
        uniform(path(4), make_cyclic(2)),
        uniform(complete(3), make_cyclic(3)),
        DecGraph(path(3), [make_cyclic(2), builtin_group("V4"), make_cyclic(2)]),
    ])
    def test_predicted_order(self, dg):
        assert predicted_aut_order(dg) == aut_group(dg).order


class TestOracle:
    def test_k2(self, p_k2):
        found = brute_aut_truncated(p_k2, 2)
        assert len(found) == 2
        assert found[0] == TruncatedAut((0, 1, 2, 3, 4))

    def test_restrict_identity(self, p_k2):
        elems = sorted(p_k2.enum_elems(2), key=p_k2.elem_key)
        ident = DecMorphism.identity(p_k2.decgraph)
        assert restrict(ident, elems) == TruncatedAut(tuple(range(len(elems))))

    def test_agreement_mixed(self, k2_z2z3):
        result = oracle_agreement(k2_z2z3, 2, 2)
        assert result.agree
        assert result.oracle_count == result.predicted_count == 2

    def test_agreement_reuses_given_group(self, k2_z2z3):
        aut = aut_group(k2_z2z3)
        with patch("pathpart.morphisms.aut_group") as recompute:
            result = oracle_agreement(k2_z2z3, 2, 2, aut=aut)
        recompute.assert_not_called()
        assert result.agree

    def test_agreement_path(self, p_p3):
        result = oracle_agreement(p_p3.decgraph, 3, 3)
        assert result.agree
        assert not result.spurious and not result.missing
