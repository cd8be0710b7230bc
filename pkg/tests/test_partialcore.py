"""
Tests for partial-group handles, the colimit construction and the axiom checker.
"""

import pytest

from pathpart.fingroup import FinGroup, GroupMap, builtin_group, identify, make_cyclic
from pathpart.options import SearchLimits
from pathpart.partialcore import (
    AXIOMS,
    Counterexample,
    DomainError,
    GroupDiagram,
    check_axioms,
    colimit_of_groups,
    corrupt_product,
    enum_domain_words,
    free_on_one,
    from_group,
    induced_table,
    is_partial_subgroup,
    is_subgroup,
    powers,
)


@pytest.fixture
def d8_colimit():
    """V <- Z -> V' inside D8: two Klein subgroups glued along the centre."""
    d8 = builtin_group("D8")
    diagram = GroupDiagram.from_subgroups(
        d8,
        [["1", "x2"], ["1", "x2", "t", "tx2"], ["1", "x2", "tx", "tx3"]],
        [(0, 1), (0, 2)],
        names=["Z", "V", "V'"],
    )
    return colimit_of_groups(diagram)


@pytest.fixture
def s3():
    return from_group(builtin_group("S3"))


class TestGroupHandle:
    def test_every_word_in_domain(self, s3):
        assert s3.in_domain(tuple(s3.enum_elems(1)))

    def test_product(self):
        z3 = from_group(make_cyclic(3))
        assert z3.product((1, 1, 1)) == 0
        assert z3.product(()) == 0

    def test_unknown_entry(self, s3):
        with pytest.raises(DomainError):
            s3.in_domain((9,))

    def test_format_and_parse(self, s3):
        x = s3.parse_elem("(123)")
        assert s3.format_elem(x) == "(123)"


class TestFreeOnOne:
    def test_domain(self):
        f = free_on_one()
        assert f.in_domain((1, -1, 1))
        assert f.in_domain((1, 0, -1))
        assert not f.in_domain((1, 1))
        assert not f.in_domain((-1, 0, -1))

    def test_product(self):
        f = free_on_one()
        assert f.product((1, -1, 1)) == 1
        with pytest.raises(DomainError):
            f.product((1, 1))

    def test_names(self):
        f = free_on_one()
        assert [f.format_elem(e) for e in sorted(f.enum_elems(1), key=f.elem_key)] == ["1", "a", "a^-1"]
        assert f.parse_elem("a^-1") == -1
        with pytest.raises(KeyError):
            f.parse_elem("b")

    def test_powers_leave_domain(self):
        assert list(powers(free_on_one(), 1, 5)) == [(1, 1)]


class TestColimit:
    def test_domain(self, d8_colimit):
        h = d8_colimit
        x2, t, tx = (h.parse_elem(s) for s in ("x2", "t", "tx"))
        assert h.in_domain((x2, x2))
        assert not h.in_domain((t, tx))
        assert h.in_domain((t, x2, t))

    def test_products(self, d8_colimit):
        h = d8_colimit
        t, tx2, x2 = (h.parse_elem(s) for s in ("t", "tx2", "x2"))
        assert h.product((t, tx2)) == x2
        assert h.product((x2, x2)) == h.unit
        with pytest.raises(DomainError):
            h.product((t, h.parse_elem("tx")))

    def test_class_count(self, d8_colimit):
        # 1, x2 shared; t, tx2 in V; tx, tx3 in V'
        assert len(list(d8_colimit.enum_elems(1))) == 6

    def test_witness_independence(self, d8_colimit):
        h = d8_colimit
        x2 = h.parse_elem("x2")
        products = h.products_by_witness((x2, x2, x2))
        assert len(products) == 3
        assert len(set(products.values())) == 1

    def test_node_elements(self, d8_colimit):
        assert len(d8_colimit.node_elements(1)) == 4
        assert d8_colimit.node_elements(0) < d8_colimit.node_elements(2)

    def test_qualified_names(self):
        z2 = FinGroup(make_cyclic(2).table, labels=["e", "s"])
        # two copies of Z2 with nothing glued: their generators share the label "s"
        h = colimit_of_groups(GroupDiagram([z2, z2], [], names=["A", "B"]))
        assert h.format_elem(h.unit) == "e"
        a, b = h.parse_elem("s@A"), h.parse_elem("s@B")
        assert a != b
        assert not h.in_domain((a, b))

    def test_non_injective_arrow(self):
        z2, z4 = make_cyclic(2), make_cyclic(4)
        with pytest.raises(ValueError, match="not injective"):
            GroupDiagram([z4, z2], [(0, 1, GroupMap(z4, z2, [0, 1, 0, 1]))])

    def test_cycle_rejected(self):
        z2 = make_cyclic(2)
        ident = GroupMap.identity(z2)
        with pytest.raises(ValueError, match="acyclic"):
            GroupDiagram([z2, z2], [(0, 1, ident), (1, 0, ident)])

    def test_not_contained(self):
        d8 = builtin_group("D8")
        with pytest.raises(ValueError, match="not contained"):
            GroupDiagram.from_subgroups(d8, [["1", "t"], ["1", "x2"]], [(0, 1)])


class TestDomainWords:
    def test_free_on_one(self):
        f = free_on_one()
        words = list(enum_domain_words(f, [0, 1, -1], 3))
        assert words == [(1,), (-1,), (1, -1), (-1, 1), (1, -1, 1), (-1, 1, -1)]

    def test_overflow(self, s3):
        SearchLimits.set_max_elements(10)
        from pathpart.options import EnumerationOverflow
        with pytest.raises(EnumerationOverflow):
            list(enum_domain_words(s3, list(s3.enum_elems(1)), 3))


class TestCheckAxioms:
    def test_group(self, s3):
        report = check_axioms(s3, 1, 3)
        assert report.passed
        assert report.n_elems == 6
        assert not report.incomplete

    def test_free_on_one(self):
        assert check_axioms(free_on_one(), 1, 5).passed

    def test_colimit(self, d8_colimit):
        assert check_axioms(d8_colimit, 1, 3).passed

    def test_corrupted_fails_p2(self, s3):
        s = s3.parse_elem("(12)")
        bad = corrupt_product(s3, (s, s), s)
        report = check_axioms(bad, 1, 3)
        assert not report.passed
        assert report.verdicts["P2"] is False
        cx = report.counterexamples["P2"]
        assert cx.replay(bad)
        assert not cx.replay(s3)
        assert cx.describe(bad).startswith("P2 fails on")

    def test_report_dict(self, s3):
        out = check_axioms(s3, 1, 2).to_dict(s3)
        assert set(out["verdicts"]) == set(AXIOMS)
        assert all(v is True for v in out["verdicts"].values())
        assert out["bounds"] == {"max_elem_size": 1, "max_word_len": 2}
        assert out["counterexamples"] == {}

    def test_overflow_marks_incomplete(self, s3):
        SearchLimits.set_max_elements(20)
        report = check_axioms(s3, 1, 3)
        assert report.incomplete
        assert report.passed

    def test_counterexample_replay_by_axiom(self):
        f = free_on_one()
        assert Counterexample("D1", (1,)).replay(f) is False


class TestSubgroups:
    def test_is_subgroup(self, s3):
        c3 = {0, s3.parse_elem("(123)"), s3.parse_elem("(132)")}
        assert is_subgroup(s3, c3)
        assert not is_subgroup(s3, c3 | {s3.parse_elem("(12)")})
        assert not is_subgroup(s3, {s3.parse_elem("(123)")})

    @pytest.mark.parametrize("name", ["Z1", "Z4", "V4", "S3", "D8"])
    def test_group_table_round_trip(self, name):
        g = builtin_group(name)
        h = from_group(g)
        rebuilt = induced_table(h, h.enum_elems(1))
        assert rebuilt == g
        assert [rebuilt.label(x) for x in rebuilt.elements()] == [g.label(x) for x in g.elements()]

    def test_unlabelled_group(self):
        z6 = from_group(make_cyclic(6))
        assert is_subgroup(z6, {0, 2, 4})
        assert not is_subgroup(z6, {0, 2})
        assert induced_table(z6, {3, 0}).labels == ("0", "3")

    def test_induced_table(self, s3):
        c3 = {0, s3.parse_elem("(123)"), s3.parse_elem("(132)")}
        table = induced_table(s3, c3)
        assert identify(table) == "Z3"
        assert table.labels[0] == "1"

    def test_colimit_subgroups(self, d8_colimit):
        h = d8_colimit
        assert is_subgroup(h, h.node_elements(1))
        union = h.node_elements(1) | h.node_elements(2)
        assert not is_subgroup(h, union)
        assert is_partial_subgroup(h, union, 3)

    def test_free_on_one_partial_subgroup(self):
        f = free_on_one()
        assert is_partial_subgroup(f, {0, 1, -1})
        assert not is_subgroup(f, {0, 1, -1})
