import unittest
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from src.curve_pi1.braid import monodromy_braids
from src.curve_pi1.exactpoly import CurveParams
from src.curve_pi1.groups.freeproduct import (FreeProductWord, bounded_hopf_check, eval_hom, find_epimorphism,
                                              fp_multiply, fp_normal_form, normal_forms, reaches_generators)
from src.curve_pi1.groups.presentation import parse_presentation, zvk_presentation


def w(text, p=2, q=3):
    return FreeProductWord.parse(text, p, q)


class TestNormalForm(unittest.TestCase):

    def test_exponents_reduce_and_syllables_merge(self):
        self.assertEqual(w("a a").to_text(), "1")
        self.assertEqual(w("b b b b").to_text(), "b")
        self.assertEqual(w("a b b^2 a").to_text(), "1")
        self.assertEqual(w("b^-1").to_text(), "b^2")

    def test_multiplication_and_inverse(self):
        x = w("a b")
        self.assertTrue((x * x.inverse()).is_identity)
        self.assertEqual(fp_multiply(x, w("b^2 a")).to_text(), "1")
        self.assertEqual((x ** 3).syllable_length, 6)
        self.assertEqual(fp_normal_form(x), x)

    def test_factor_mismatch(self):
        with self.assertRaises(ValueError):
            w("a") * FreeProductWord.a(2, 5)
        with self.assertRaises(ValueError):
            w("c")

    def test_ball_sizes(self):
        self.assertEqual(len(normal_forms(2, 3, 1)), 4)
        self.assertEqual(len(normal_forms(2, 3, 2)), 8)
        self.assertEqual(len(normal_forms(2, 3, 6)), 50)
        self.assertEqual(len(set(normal_forms(2, 3, 6))), 50)


class TestHomomorphisms(unittest.TestCase):

    def setUp(self):
        self.pres = parse_presentation("< x y | x^2, y^3 >")

    def test_eval_hom(self):
        self.assertTrue(eval_hom(self.pres, [w("a"), w("b")]).is_hom)
        check = eval_hom(self.pres, [w("b"), w("a")])
        self.assertFalse(check.is_hom)
        self.assertEqual(check.failing_relator, 0)
        with self.assertRaises(ValueError):
            eval_hom(self.pres, [w("a")])

    def test_reaches_generators(self):
        self.assertTrue(reaches_generators([w("a"), w("b")], 1))
        self.assertFalse(reaches_generators([w("1"), w("b")], 6))
        self.assertTrue(reaches_generators([w("a b"), w("b a")], 6))

    def test_surjective_endomorphisms_are_injective_on_ball(self):
        """
        Z/2 * Z/3 is Hopfian: every surjective endomorphism found in a small ball is injective.
        """
        ball = normal_forms(2, 3, 3)
        involutions = [x for x in ball if (x ** 2).is_identity]
        order_three = [y for y in ball if (y ** 3).is_identity]
        self.assertEqual((len(involutions), len(order_three)), (4, 5))

        surjective = 0
        for img_a, img_b in product(involutions, order_three):
            report = bounded_hopf_check(2, 3, [img_a, img_b], ball_radius=4, search_length=6)
            self.assertTrue(report.is_hom)
            if report.surjective_within_L:
                surjective += 1
                self.assertTrue(report.injective_on_ball_R)
        self.assertGreater(surjective, 0)

    def test_identity_image_is_not_surjective(self):
        report = bounded_hopf_check(2, 3, [w("1"), w("b")], ball_radius=3, search_length=6)
        self.assertFalse(report.surjective_within_L)
        self.assertFalse(report.injective_on_ball_R)

    def test_non_homomorphism_skips_injectivity(self):
        report = bounded_hopf_check(2, 3, [w("b"), w("a")], ball_radius=2)
        self.assertFalse(report.is_hom)
        self.assertIsNone(report.injective_on_ball_R)


class TestFindEpimorphism(unittest.TestCase):

    def test_smallest_member(self):
        params = CurveParams(3, 1, 1)
        braids = monodromy_braids(params)
        pres = zvk_presentation([braids.beta_0, braids.beta_inf], 2, central_exponent=3).presentation

        # Act
        search = find_epimorphism(pres, 2, 3, max_syllables=2)

        # Assert
        self.assertTrue(search.found)
        self.assertEqual([x.to_text() for x in search.images], ["a b", "b a"])
        self.assertTrue(eval_hom(pres, search.images).is_hom)
        self.assertFalse(search.exhausted)

    def test_candidate_cap(self):
        search = find_epimorphism(parse_presentation("< x y | x^2, y^3 >"), 2, 3, max_syllables=2, candidate_cap=2)
        self.assertFalse(search.found)
        self.assertTrue(search.exhausted)
        self.assertEqual(search.to_dict()['images'], None)

    def test_abelian_group_has_no_epimorphism(self):
        search = find_epimorphism(parse_presentation("< x y | x y x^-1 y^-1 >"), 2, 3, max_syllables=2)
        self.assertFalse(search.found)
        self.assertFalse(search.exhausted)


BALL = normal_forms(2, 3, 4)
elements = st.sampled_from(BALL)
raw_syllables = st.lists(st.tuples(st.sampled_from(['a', 'b']), st.integers(min_value=-7, max_value=7)), max_size=12)


@settings(max_examples=200, deadline=None)
@given(elements, elements, elements)
def test_multiplication_is_associative(x, y, z):
    assert fp_multiply(fp_multiply(x, y), z) == fp_multiply(x, fp_multiply(y, z))
    assert (x * x.inverse()).is_identity


@settings(max_examples=200, deadline=None)
@given(raw_syllables)
def test_normal_form_is_idempotent_and_alternating(syllables):
    # Arrange
    word = FreeProductWord(2, 3, tuple(syllables))

    # Act
    again = fp_normal_form(word)

    # Assert
    assert again == word
    assert again.syllables == word.syllables
    tags = [tag for tag, _ in word.syllables]
    assert all(t != u for t, u in zip(tags, tags[1:]))
    assert all(0 < e < word.order_of(tag) for tag, e in word.syllables)


@given(raw_syllables)
def test_normal_form_agrees_with_syllable_by_syllable_product(syllables):
    word = FreeProductWord.identity(2, 3)
    for tag, e in syllables:
        word = word * (FreeProductWord.a(2, 3, e) if tag == 'a' else FreeProductWord.b(2, 3, e))
    assert word == FreeProductWord(2, 3, tuple(syllables))


def test_free_product_needs_positive_orders():
    with pytest.raises(ValueError):
        FreeProductWord(0, 3)
