import unittest

import pytest
from hypothesis import given, settings, strategies as st

from src.curve_pi1.braid import BraidWord, FreeWord, monodromy_braids
from src.curve_pi1.exactpoly import CurveParams
from src.curve_pi1.groups.finite import TargetGroupFactory, fingerprint, free_product_fingerprint, hom_count
from src.curve_pi1.groups.presentation import (Presentation, PresentationError, cyclic_key, cyclic_reduce,
                                               parse_presentation, parse_relator, zvk_presentation)
from src.curve_pi1.groups.smith import abelianization
from src.curve_pi1.groups.tietze import eliminate_generator, remove_duplicates, tietze_simplify


class TestParsing(unittest.TestCase):

    def test_parse_triangle_group(self):
        pres = parse_presentation("< a b | a^2, b^3, (a b)^5 >")

        self.assertEqual(pres.generators, ('a', 'b'))
        self.assertEqual(len(pres.relators), 3)
        self.assertEqual(len(pres.relators[2]), 10)
        self.assertEqual(pres.to_text(), "< a b | a^2, b^3, a b a b a b a b a b >")

    def test_equation_and_inverse_powers(self):
        self.assertEqual(parse_relator("a = b", ('a', 'b')).letters, (1, -2))
        self.assertEqual(parse_relator("(a b)^-1", ('a', 'b')).letters, (-2, -1))
        self.assertEqual(parse_relator("a * 1 * b", ('a', 'b')).letters, (1, 2))

    def test_relators_are_cyclically_reduced(self):
        pres = parse_presentation("< a, b | b a b^-1, a a^-1 >")
        self.assertEqual(pres.to_dict()['relators'], ['a'])

    def test_malformed_text(self):
        for text in ["a b | a", "< a b | c >", "< a b | (a b >", "< a a | a >", "< a b | a^b >", "< a | a ; a >"]:
            with self.subTest(text=text):
                with self.assertRaises(PresentationError):
                    parse_presentation(text)

    def test_relator_rank_must_match(self):
        with self.assertRaises(PresentationError):
            Presentation(('a',), (FreeWord(2, (1, 2)),))


def test_cyclic_key_identifies_conjugates_and_inverses():
    w = FreeWord(2, (1, 2, 2))
    rotated = FreeWord(2, (2, 1, 2))
    assert cyclic_key(w) == cyclic_key(rotated) == cyclic_key(w.inverse())
    assert cyclic_reduce(FreeWord(2, (2, 1, -2))).letters == (1,)


class TestZvkPresentation(unittest.TestCase):

    def setUp(self):
        self.params = CurveParams(3, 1, 1)
        braids = monodromy_braids(self.params)
        self.zvk = zvk_presentation([braids.beta_0, braids.beta_inf], self.params.d,
                                    central_exponent=self.params.N)

    def test_raw_relators(self):
        self.assertEqual(self.zvk.raw_count, 5)
        self.assertEqual(self.zvk.redundant, (1, 3))
        self.assertEqual(self.zvk.presentation.generators, ('m1', 'm2'))

    def test_abelianization_is_cyclic_of_order_dN(self):
        self.assertEqual(abelianization(self.zvk.presentation).factors, [6])

    def test_simplified_presentation_keeps_abelianization(self):
        result = tietze_simplify(self.zvk.presentation)
        self.assertLessEqual(result.presentation.rank, 2)
        self.assertEqual(abelianization(result.presentation).factors, [6])

    def test_strand_mismatch(self):
        with self.assertRaises(PresentationError):
            zvk_presentation([BraidWord.parse("s1", 3)], 2)


class TestTietzeKeepsFingerprint(unittest.TestCase):
    """
    Tietze moves present the same group, so every homomorphism count survives them.
    """

    @classmethod
    def setUpClass(cls):
        cls.cases = {}
        for args in [(3, 1, 1), (5, 1, 2)]:
            params = CurveParams(*args)
            braids = monodromy_braids(params)
            raw = zvk_presentation([braids.beta_0, braids.beta_inf], params.d,
                                   central_exponent=params.N).presentation
            simplified = tietze_simplify(raw).presentation
            cls.cases[args] = (params, fingerprint(raw, 'full'), fingerprint(simplified, 'full'))

    def test_full_catalog_counts_agree(self):
        for args, (_, raw, simplified) in self.cases.items():
            with self.subTest(params=args):
                self.assertTrue(raw.complete)
                self.assertEqual(raw.counts(), simplified.counts())

    def test_counts_match_free_product(self):
        for args, (params, raw, _) in self.cases.items():
            with self.subTest(params=args):
                comparison = raw.compare(free_product_fingerprint(params.d, params.N, 'full'))
                self.assertEqual(set(comparison.values()), {'match'})


SWEEP_TARGETS = ['C2', 'C3', 'C4', 'C2xC2', 'Sym3', 'D8', 'Q8']


@st.composite
def small_presentations(draw):
    rank = draw(st.integers(min_value=2, max_value=3))
    letters = [g for g in range(-rank, rank + 1) if g]
    relators = draw(st.lists(st.lists(st.sampled_from(letters), min_size=1, max_size=6), min_size=1, max_size=3))
    return Presentation(('a', 'b', 'c')[:rank], tuple(FreeWord(rank, tuple(r)) for r in relators))


@settings(max_examples=100, deadline=None)
@given(small_presentations())
def test_tietze_keeps_homomorphism_counts(pres):
    simplified = tietze_simplify(pres).presentation
    for name in SWEEP_TARGETS:
        group = TargetGroupFactory.create_target(name)
        assert hom_count(simplified, group) == hom_count(pres, group), name


class TestTietze(unittest.TestCase):

    def test_eliminates_generator_solved_by_relator(self):
        result = tietze_simplify(parse_presentation("< a b | a b >"))

        self.assertEqual(result.presentation.generators, ('a',))
        self.assertEqual(result.presentation.relators, ())
        self.assertTrue(any(move.startswith("eliminate b") for move in result.moves))

    def test_zero_budget_is_flagged(self):
        pres = parse_presentation("< a b | a b >")
        result = tietze_simplify(pres, budget=0)
        self.assertTrue(result.budget_exhausted)
        self.assertEqual(result.presentation, pres)

    def test_duplicates_are_dropped(self):
        pres = parse_presentation("< a b | a b^2, b a b, b^-2 a^-1 >")
        reduced, dropped = remove_duplicates(pres)
        self.assertEqual(dropped, 2)
        self.assertEqual(len(reduced.relators), 1)

    def test_eliminate_generator_substitutes(self):
        pres = parse_presentation("< a b c | c a^-1 b, a^3 c^2 >")
        eliminated = eliminate_generator(pres, 0, 3)
        # c = b^-1 a
        self.assertEqual(eliminated.generators, ('a', 'b'))
        self.assertEqual(eliminated.relators[0], parse_relator("a^3 b^-1 a b^-1 a", ('a', 'b')))

    def test_free_product_presentation_is_a_fixpoint(self):
        pres = parse_presentation("< a b | a^2, b^3 >")
        result = tietze_simplify(pres)
        self.assertEqual(result.presentation, pres)
        self.assertEqual(result.passes, 1)


def test_empty_presentation():
    pres = parse_presentation("< | >")
    assert pres.rank == 0
    with pytest.raises(PresentationError):
        parse_presentation("< a | b >")
