#!/usr/bin/env python

import unittest

from hypothesis import given, settings, strategies as st

from framework import (
    ATOMS,
    any_formulas,
    cosafe_formulas,
    finite_words,
    lasso_words,
    letters_over,
)
from ltlgcs.error import LassoRequiredError
from ltlgcs.ltl.formula import Eventually, Next, Not, to_nnf
from ltlgcs.ltl.parser import parse
from ltlgcs.ltl.semantics import Word, check_word, holds_empty

LETTERS = letters_over(ATOMS)


def holds(text, letters, cycle=None):
    if cycle is None:
        return check_word(parse(text), Word.of(letters))
    return check_word(parse(text), Word.lasso_of(letters, cycle))


class TestWord(unittest.TestCase):
    def test_lasso_parts(self):
        w = Word.lasso_of([{"a"}], [{"b"}, set()])
        self.assertEqual(w.lasso, 1)
        self.assertEqual(w.prefix, (frozenset("a"),))
        self.assertEqual(len(w.cycle), 2)
        self.assertTrue(w.is_lasso)
        self.assertEqual(str(w), "{a} ({b} {})^w")

    def test_finite(self):
        w = Word.of([["a", "b"], []])
        self.assertFalse(w.is_lasso)
        self.assertEqual(w.cycle, ())
        self.assertEqual(str(w), "{a,b} {}")

    def test_bad_lasso(self):
        with self.assertRaises(ValueError):
            Word.of([{"a"}], lasso=1)
        with self.assertRaises(ValueError):
            Word.lasso_of([{"a"}], [])


class TestFinite(unittest.TestCase):
    def test_eventually(self):
        self.assertTrue(holds("F (a | b)", [set(), {"b"}]))
        self.assertFalse(holds("F (a | b)", [set(), {"c"}]))
        self.assertFalse(holds("F a", []))

    def test_strong_next(self):
        self.assertFalse(holds("X a", [{"a"}]))
        self.assertTrue(holds("X a", [set(), {"a"}]))
        self.assertFalse(holds("X true", [set()]))
        self.assertFalse(holds("!X a", [set()]))

    def test_until(self):
        self.assertTrue(holds("a U b", [{"a"}, {"a"}, {"b"}]))
        self.assertFalse(holds("a U b", [{"a"}, set(), {"b"}]))
        self.assertFalse(holds("a U b", [{"a"}, {"a"}]))
        self.assertTrue(holds("a U b", [{"b"}]))

    def test_ordering(self):
        f = "F (a & F goal)"
        self.assertTrue(holds(f, [set(), {"a"}, set(), {"goal"}]))
        self.assertFalse(holds(f, [{"goal"}, {"a"}]))
        self.assertTrue(holds(f, [{"a", "goal"}]))

    def test_key_door(self):
        f = "(!door1 U key1) & F goal"
        self.assertTrue(holds(f, [set(), {"key1"}, {"door1"}, {"goal"}]))
        self.assertFalse(holds(f, [set(), {"door1"}, {"key1"}, {"goal"}]))

    def test_true_on_empty(self):
        self.assertTrue(holds("true", []))
        self.assertTrue(holds_empty(parse("true & (false | true)")))
        self.assertFalse(holds_empty(parse("!a")))

    def test_lasso_required(self):
        for text in ("G a", "!(a U b)", "F G a"):
            with self.assertRaises(LassoRequiredError):
                holds(text, [{"a"}])

    def test_negated_always_is_cosafe(self):
        self.assertTrue(holds("!G a", [{"a"}, set()]))
        self.assertFalse(holds("!G a", [{"a"}]))

    @given(cosafe_formulas(), finite_words(LETTERS))
    @settings(max_examples=300, deadline=None)
    def test_eventually_is_some_suffix(self, f, w):
        suffixes = [Word.of(w.letters[i:]) for i in range(len(w))]
        self.assertEqual(
            check_word(Eventually(f), w), any(check_word(f, s) for s in suffixes)
        )

    @given(cosafe_formulas(), finite_words(LETTERS))
    @settings(max_examples=300, deadline=None)
    def test_next_is_tail(self, f, w):
        expected = len(w) >= 2 and check_word(f, Word.of(w.letters[1:]))
        self.assertEqual(check_word(Next(f), w), expected)


class TestLasso(unittest.TestCase):
    def test_recurrence(self):
        self.assertTrue(holds("G F a", [], [{"a"}, set()]))
        self.assertFalse(holds("G F a", [{"a"}], [set()]))
        self.assertTrue(holds("G (F a & F b)", [set()], [{"a"}, set(), {"b"}]))
        self.assertFalse(holds("G (F a & F b)", [{"b"}], [{"a"}]))

    def test_persistence(self):
        self.assertTrue(holds("F G a", [set()], [{"a"}]))
        self.assertFalse(holds("F G a", [{"a"}], [{"a"}, set()]))

    def test_safety(self):
        self.assertTrue(holds("G a", [{"a"}], [{"a", "b"}]))
        self.assertFalse(holds("G a", [{"a"}], [{"a"}, set()]))
        self.assertTrue(holds("F a & G !b", [set()], [{"a"}]))

    def test_next_wraps(self):
        self.assertTrue(holds("X X a", [set()], [set(), {"a"}]))
        self.assertTrue(holds("X a", [], [{"a"}]))

    def test_until_through_cycle(self):
        self.assertTrue(holds("a U b", [{"a"}], [{"a"}, {"b"}]))
        self.assertFalse(holds("a U b", [{"a"}], [{"a"}]))

    @given(any_formulas(), lasso_words(LETTERS))
    @settings(max_examples=300, deadline=None)
    def test_negation(self, f, w):
        self.assertEqual(check_word(Not(f), w), not check_word(f, w))

    @given(any_formulas(), lasso_words(LETTERS))
    @settings(max_examples=300, deadline=None)
    def test_nnf_preserves_meaning(self, f, w):
        self.assertEqual(check_word(to_nnf(f), w), check_word(f, w))

    @given(any_formulas(), lasso_words(LETTERS), st.integers(1, 3))
    @settings(max_examples=200, deadline=None)
    def test_unrolled_cycle(self, f, w, times):
        unrolled = Word.lasso_of(w.prefix, w.cycle * times)
        self.assertEqual(check_word(f, unrolled), check_word(f, w))


if __name__ == "__main__":
    unittest.main()
