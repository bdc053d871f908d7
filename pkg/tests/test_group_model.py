import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymrep.errors import CannotVerifyError, GroupDataError, HomomorphismError, RewritingError
from asymrep.group_model import IDENTITY, GroupData, GroupMorphism, Word, check_hom, evaluate_hom

from conftest import rand_word

F2 = GroupData(("a", "b"), name="F2")
Z2 = GroupData(("a", "b"), ("a b A B",), normal_form="abelian", name="Z2")
# Z/3 by a rewriting system: a^3 -> e, a^-1 -> a^2
Z3 = GroupData(("a",), ("a^3",), normal_form="rewriting", rules=(("a^3", ""), ("A", "a^2")), name="Z3")


class TestWords:
    def test_parse_format_roundtrip(self):
        w = F2.parse("a b^2 A^3 B")
        assert w.letters == ((0, 1), (1, 2), (0, -3), (1, -1))
        assert F2.format(w) == "a b^2 A^3 B"
        assert F2.parse(F2.format(w)) == w

    def test_identity_spellings(self):
        assert F2.parse("") == IDENTITY
        assert F2.parse("e") == IDENTITY
        assert F2.format(IDENTITY) == "e"

    def test_parse_errors(self):
        with pytest.raises(GroupDataError):
            F2.parse("a c")
        with pytest.raises(GroupDataError):
            F2.parse("a^x")

    def test_generator_names(self):
        with pytest.raises(GroupDataError):
            GroupData(("a", "a"))
        with pytest.raises(GroupDataError):
            GroupData(("a", "A"))
        with pytest.raises(GroupDataError):
            GroupData(("a",), normal_form="knuth-bendix")

    def test_normal_form_aliases(self):
        assert GroupData(("a",), normal_form="free-reduction").normal_form == "free"
        assert GroupData(("a",), normal_form="abelian-exponent-vector").normal_form == "abelian"


class TestNormalize:
    def test_free_reduction(self):
        assert F2.normalize(F2.parse("a A b")) == F2.parse("b")
        assert F2.normalize(IDENTITY) == IDENTITY
        assert F2.normalize(F2.parse("a b B a")) == F2.parse("a^2")

    def test_abelian(self):
        assert Z2.normalize(Z2.parse("b a b")) == Z2.parse("a b^2")

    def test_multiply_invert(self):
        assert F2.multiply("a", "A") == IDENTITY
        assert F2.invert("a^2 b") == F2.parse("B A^2")
        assert Z2.multiply("a b", "b a") == Z2.parse("a^2 b^2")
        assert F2.power("a b", -2) == F2.parse("B A B A")

    def test_rewriting(self):
        assert Z3.normalize(Z3.parse("a^5")) == Z3.parse("a^2")
        assert Z3.normalize(Z3.parse("A")) == Z3.parse("a^2")
        assert Z3.equal("a^4", "a")

    def test_rewriting_step_bound(self):
        loop = GroupData(("a", "b"), normal_form="rewriting", rules=(("a", "b"), ("b", "a")), max_rewrites=50)
        with pytest.raises(RewritingError):
            loop.normalize(loop.parse("a"))

    def test_equality_without_normal_form(self):
        G = GroupData(("x",), ("x^2",), normal_form="none")
        assert G.equal("x X x", "x")
        with pytest.raises(CannotVerifyError):
            G.equal("x^2", "")


class TestHoms:
    def test_evaluate(self):
        alpha = check_hom(Z2, [1, 0])
        assert evaluate_hom(alpha, Z2.parse("a^2 B")) == 2
        assert evaluate_hom(alpha, IDENTITY) == 0
        assert evaluate_hom(check_hom(F2, [1, 1]), F2.parse("a b A b")) == 2

    def test_check_hom(self):
        check_hom(Z2, [1, 0])
        S2 = GroupData(("a1", "b1", "a2", "b2"), ("a1 b1 A1 B1 a2 b2 A2 B2",))
        check_hom(S2, [3, -1, 4, 7])
        cyc = GroupData(("a",), ("a^2",))
        with pytest.raises(HomomorphismError) as info:
            check_hom(cyc, [1])
        assert info.value.value == 2
        assert info.value.relator == cyc.parse("a^2")
        with pytest.raises(HomomorphismError):
            check_hom(Z2, [1])

    def test_morphism_and_pullback(self):
        s = GroupMorphism(Z2, F2, (F2.parse("a b"), F2.parse("a b")))
        assert s("a B") == IDENTITY
        phi = check_hom(F2, [2, -1])
        assert s.pullback(phi).images == (1, 1)


words = st.lists(st.tuples(st.integers(0, 1), st.integers(-3, 3).filter(bool)), max_size=8)


@settings(max_examples=200, deadline=None)
@given(w1=words, w2=words, images=st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_normal_form_and_hom_properties(w1, w2, images):
    for G in (F2, Z2):
        u, v = G.word_from_letters(w1), G.word_from_letters(w2)
        assert G.normalize(G.normalize(u)) == G.normalize(u)
        phi = check_hom(G, images)
        assert phi(G.multiply(u, v)) == phi(u) + phi(v)
        assert phi(G.invert(u)) == -phi(u)
        assert G.multiply(u, G.invert(u)) == IDENTITY


def test_normalized_adjacent_letters_distinct(rng):
    for _ in range(200):
        w = rand_word(F2, rng, max_len=8)
        gens = [g for g, _ in w.letters]
        assert all(x != y for x, y in zip(gens, gens[1:]))
