"""Closed forms for directed sequences against the engine."""

import pytest

from starfactor import (
    DirectedSeq,
    check_rule8_commutation,
    directed,
    eval_word,
    factor_opposite_directed,
    factor_same_directed_no6b,
    normalize_directed,
    parse_word,
)
from starfactor.directed import crosscheck_opposite, crosscheck_same

W = parse_word


def test_normalize_directed_examples():
    assert normalize_directed(W("E12 E13 E12")) == DirectedSeq(1, 2, 1)
    assert normalize_directed(W("E12 E21")) is None
    assert normalize_directed(()) == DirectedSeq(1, 0, 0)
    assert normalize_directed(W("E12 E13^-1")) is None
    assert normalize_directed(W("E31 E32 E31")) == DirectedSeq(3, 2, 1)


def test_normalize_matches_commuted_word():
    # block order is immaterial: both orders give the same normal form
    assert normalize_directed(W("E12 E13")) == normalize_directed(W("E13 E12"))


def test_opposite_closed_form_examples():
    # S = E13 (toward 1), T = E21 (toward 2): m=0, n=1, p=1, q=0
    s = directed(1, {2: 0, 3: 1})
    t = directed(2, {1: 1, 3: 0})
    assert factor_opposite_directed(s, t) == W("E21 E23 E13^-1")
    # m != 0 and p != 0 stops
    s = directed(1, {2: 1, 3: 0})
    assert factor_opposite_directed(s, t) is None
    # S empty: T survives unchanged
    s = directed(1, {2: 0, 3: 0})
    t = directed(2, {1: 0, 3: 2})
    assert factor_opposite_directed(s, t) == W("E23 E23")


def test_same_closed_form_examples():
    s = DirectedSeq(1, 1, 1)
    assert factor_same_directed_no6b(s, s) == ()
    assert factor_same_directed_no6b(DirectedSeq(1, 1, 0), DirectedSeq(1, 0, 1)) == W(
        "E13 E12^-1"
    )
    assert factor_same_directed_no6b(DirectedSeq(1, 2, 0), DirectedSeq(1, 1, 0)) == W(
        "E12^-1"
    )


def test_closed_forms_preserve_value():
    for s_exp in ((0, 1), (2, 1), (1, 2)):
        for t_exp in ((1, 0), (2, 2)):
            s = directed(1, {2: s_exp[0], 3: s_exp[1]})
            t = directed(2, {1: t_exp[0], 3: t_exp[1]})
            word = tuple(x.inverse() for x in reversed(s.word())) + t.word()
            out = factor_opposite_directed(s, t)
            if out is not None:
                assert eval_word(out) == eval_word(word)
            s2 = DirectedSeq(1, *s_exp)
            t2 = DirectedSeq(1, *t_exp)
            word2 = tuple(x.inverse() for x in reversed(s2.word())) + t2.word()
            assert eval_word(factor_same_directed_no6b(s2, t2)) == eval_word(word2)


def test_opposite_agrees_with_engine_small():
    for m in range(3):
        for n in range(3):
            for p in range(3):
                for q in range(3):
                    s = directed(1, {2: m, 3: n})
                    t = directed(2, {1: p, 3: q})
                    ok, msg = crosscheck_opposite(s, t)
                    assert ok, f"(m,n,p,q)=({m},{n},{p},{q}): {msg}"


def test_same_agrees_with_engine_small():
    for m in range(3):
        for n in range(3):
            for p in range(3):
                for q in range(3):
                    ok, msg = crosscheck_same(DirectedSeq(2, m, n), DirectedSeq(2, p, q))
                    assert ok, f"(m,n,p,q)=({m},{n},{p},{q}): {msg}"


def test_rule8_commutation_displayed_case():
    # U = E_jk^-1 E_ij E_ik at (i,j,k) = (1,2,3)
    report = check_rule8_commutation(W("E23^-1 E12 E13"), 1)
    assert report.ok, report.problems
    assert report.pairs == (
        (W("E12 E13 E13 E23^-1"), W("E13 E12 E13 E23^-1")),
    )


def test_rule8_commutation_all_positive():
    report = check_rule8_commutation(W("E12 E13"), 0)
    assert report.ok
    # both sides already strong: the results are the swapped words themselves
    assert report.pairs == ((W("E12 E13"), W("E13 E12")),)


def test_rule8_commutation_with_choices():
    # prefix E12^-1 gives rule-6 branches on both sides
    report = check_rule8_commutation(W("E12^-1 E13 E12 E13"), 2)
    assert report.ok, report.problems


def test_rule8_position_validation():
    with pytest.raises(ValueError):
        check_rule8_commutation(W("E12 E21"), 0)
    with pytest.raises(ValueError):
        check_rule8_commutation(W("E12 E13"), 5)


def test_rule8_commutation_prefix_case():
    # E12^-1 followed by the swappable pair E13 E12
    report = check_rule8_commutation(W("E12^-1 E13 E12"), 1)
    assert report.ok, report.problems


def test_rule8_commutation_random_probe():
    from random import Random

    from starfactor import E

    rng = Random(7)
    pairs = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
    checked = 0
    while checked < 25:
        n = rng.randint(2, 6)
        w = tuple(E(*rng.choice(pairs), rng.choice((1, -1))) for _ in range(n))
        spots = [
            t
            for t in range(n - 1)
            if w[t].c > 0 < w[t + 1].c and w[t].a == w[t + 1].a and w[t].b != w[t + 1].b
        ]
        if not spots:
            continue
        report = check_rule8_commutation(w, spots[0])
        assert report.ok, (w, report.problems)
        checked += 1
