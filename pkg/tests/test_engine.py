"""Rule identities, redex machinery, runs, and the strong-form split."""

import pytest
from hypothesis import given, settings

from starfactor import (
    Always6a,
    Always6b,
    BUDGET_EXCEEDED,
    ChoiceError,
    E,
    NotARedexError,
    Scripted,
    STOPPED,
    STRONG_FORM,
    apply_rule,
    eval_word,
    factor_run,
    find_redex,
    is_strong_form,
    parse_word,
    push_permutations_right,
    split_strong,
)
from starfactor.engine import rule_rhs
from conftest import words

W = parse_word


# -- rule identities -----------------------------------------------------------

RULE_LHS_RIGHT = {
    "2": lambda i, j, k: E(i, j),
    "3": lambda i, j, k: E(k, j),
    "4": lambda i, j, k: E(j, k),
    "5": lambda i, j, k: E(k, i),
    "6a": lambda i, j, k: E(i, k),
    "6b": lambda i, j, k: E(i, k),
}


@pytest.mark.parametrize("alg", ["A", "B"])
@pytest.mark.parametrize("num", ["2", "3", "4", "5", "6a", "6b"])
@pytest.mark.parametrize("i,j", [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)])
def test_rule_is_matrix_identity(alg, num, i, j):
    k = 6 - i - j
    lhs = (E(i, j, -1), RULE_LHS_RIGHT[num](i, j, k))
    assert eval_word(lhs) == eval_word(rule_rhs(alg, num, i, j))


@pytest.mark.parametrize("i,j", [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)])
def test_rule_one_sides_differ(i, j):
    # the stop rule is semantic: E_ij^-1 E_ji is never the identity
    assert eval_word((E(i, j, -1), E(j, i))) != eval_word(())
    assert eval_word((E(i, j, -1), E(i, j))) == eval_word(())


def test_rule_seven_push():
    # R321 E12 => E_{r(1) r(2)} R321 = E23 R321
    assert push_permutations_right(W("R321 E12")) == W("E23 R321")


# -- strong form and redexes -----------------------------------------------------


def test_is_strong_form_examples():
    assert is_strong_form(W("E31 E32 E12^-1"))
    assert not is_strong_form(W("E12^-1 E13"))
    assert is_strong_form(W("E13 R321 E12^-1"))
    assert is_strong_form(())


def test_find_redex_examples():
    assert find_redex(W("E12^-1 E12^-1 E13")) == 1
    assert find_redex(W("E31 E32 E12^-1")) is None
    assert find_redex(W("E13 E12^-1 E21")) == 1


def test_find_redex_skips_perm_letters():
    assert find_redex(W("E12^-1 R321 E31")) == 0


def test_push_permutations_right_examples():
    assert push_permutations_right(W("E12 E13^-1")) == W("E12 E13^-1")
    assert push_permutations_right(W("R321 R321 R321")) == ()
    assert push_permutations_right(W("R321 R321")) == W("R231")


@given(words(10))
def test_push_permutations_right_preserves_value(w):
    out = push_permutations_right(w)
    assert eval_word(out) == eval_word(w)
    kinds = [sym.kind for sym in out]
    if "R" in kinds:
        assert kinds.count("R") == 1 and kinds[-1] == "R"


# -- apply_rule -------------------------------------------------------------------


def test_apply_rule_examples():
    step = apply_rule(W("E12^-1 E31"), 0, "A")
    assert step.after == W("E31 E32 E12^-1")
    step = apply_rule(W("E12^-1 E13"), 0, "A", choice="6b")
    assert step.after == W("E31 E23 R321 E32^-1 E21^-1")
    step = apply_rule(W("E12^-1 E13"), 0, "B", choice="6b")
    assert step.after == W("E32 E13 E32^-1")
    step = apply_rule(W("E12^-1 E21"), 0, "A")
    assert step.after is None and step.rule.number == "1"


def test_apply_rule_through_perm_letter():
    # intervening R relabels the positive partner before matching
    step = apply_rule(W("E12^-1 R321 E31"), 0, "A")
    # R321 E31 = E12 R321, so the redex is E12^-1 E12: rule 2
    assert step.rule.number == "2"
    assert step.after == W("R321")


def test_apply_rule_errors():
    with pytest.raises(NotARedexError):
        apply_rule(W("E12 E13"), 0, "A")
    with pytest.raises(NotARedexError):
        apply_rule(W("E12^-1 E13^-1"), 0, "A")
    with pytest.raises(ChoiceError):
        apply_rule(W("E12^-1 E13"), 0, "A")  # missing choice
    with pytest.raises(ChoiceError):
        apply_rule(W("E12^-1 E31"), 0, "A", choice="6a")  # extraneous choice


@given(words(8))
def test_apply_rule_preserves_value(w):
    pos = find_redex(w)
    if pos is None:
        return
    for alg in ("A", "B"):
        for choice in (None, "6a", "6b"):
            try:
                step = apply_rule(w, pos, alg, choice)
            except ChoiceError:
                continue
            if step.after is not None:
                assert eval_word(step.after) == eval_word(w)


# -- factor_run -------------------------------------------------------------------


def test_worked_example_golden():
    out = factor_run(W("E12^-1 E12^-1 E13"), "A", Scripted(["6b"]), check_steps=True)
    assert out.status == STRONG_FORM
    assert out.result == W("E31 E32 E23 E13^-1 E12^-1 R321 E32^-1 E21^-1")
    assert [step.rule.number for step in out.trace] == ["6b", "5", "4"]
    assert [step.position for step in out.trace] == [1, 0, 2]
    assert out.choices == ("6b",)


def test_already_strong_word_runs_zero_steps():
    w = W("E31 E32 E12^-1")
    out = factor_run(w, "A", Always6a())
    assert out.status == STRONG_FORM and out.result == w and out.trace == ()


def test_algorithm_b_cycles():
    out = factor_run(W("E13^-1 E12^-1 E13"), "B", Always6b(), budget=100)
    assert out.status == BUDGET_EXCEEDED
    assert out.steps == 100
    # the middle three letters recur every other step
    core = W("E13^-1 E12^-1 E13")
    for idx in (1, 3, 5):
        after = out.trace[idx].after
        mid = tuple(after[1 + idx // 2 : 4 + idx // 2])
        assert mid == core


def test_algorithm_b_cycle_detector():
    out = factor_run(
        W("E13^-1 E12^-1 E13"), "B", Always6b(), budget=10**6, detect_cycles=True
    )
    assert out.status == BUDGET_EXCEEDED and out.cycle_detected


def test_stop_outcome():
    out = factor_run(W("E12^-1 E21"), "A")
    assert out.status == STOPPED
    assert out.trace[-1].after is None


def test_scripted_exhaustion_is_an_error():
    # choosing 6a at the first redex leads straight to a second one
    with pytest.raises(ChoiceError):
        factor_run(W("E12^-1 E12^-1 E13"), "A", Scripted(["6a"]))


def test_determinism():
    w = W("E12^-1 E13 E23^-1 E21 E31^-1 E32")
    a = factor_run(w, "A", Always6b(), budget=500)
    b = factor_run(w, "A", Always6b(), budget=500)
    assert a == b


@settings(max_examples=200)
@given(words(10))
def test_always6a_terminates_fast(w):
    budget = max(10, 10 * len(w) ** 2)
    out = factor_run(w, "A", Always6a(), budget=budget, check_steps=True)
    assert out.status in (STRONG_FORM, STOPPED)
    if out.status == STRONG_FORM:
        assert is_strong_form(out.result)
        assert eval_word(out.result) == eval_word(w)
        # rule 2 leaves no adjacent inverse pair behind
        for x, y in zip(out.result, out.result[1:]):
            assert not (x.kind == "E" == y.kind and x.c < 0 < y.c)


@settings(max_examples=60)
@given(words(8))
def test_always6b_preserves_value_within_budget(w):
    out = factor_run(w, "A", Always6b(), budget=200, check_steps=True)
    if out.status == STRONG_FORM:
        assert eval_word(out.result) == eval_word(w)


# -- split_strong -----------------------------------------------------------------


def test_split_strong_examples():
    t, s, perms = split_strong(W("E31 E32 E12^-1"))
    assert (t, s, perms) == (W("E31 E32"), W("E12"), ())
    t, s, perms = split_strong(W("E31 E23 R321 E32^-1 E21^-1"))
    assert (t, s, perms) == (W("E31 E23"), W("E21 E32"), W("R321"))
    assert split_strong(()) == ((), (), ())


def test_split_strong_relabels_across_perm():
    # worked-example result: the R sits inside the negative zone and the
    # letters it crosses on the way to the boundary get relabeled
    t, s, perms = split_strong(W("E31 E32 E23 E13^-1 E12^-1 R321 E32^-1 E21^-1"))
    assert t == W("E31 E32 E23")
    assert s == W("E21 E32 E31 E32")
    assert perms == W("R321")


def test_split_strong_rejects_non_strong():
    with pytest.raises(ValueError):
        split_strong(W("E12^-1 E13"))


@given(words(10))
def test_split_strong_value_contract(w):
    if not is_strong_form(w):
        return
    t, s, perms = split_strong(w)
    recomposed = eval_word(t) * eval_word(perms) * eval_word(s).inverse()
    assert recomposed == eval_word(w)
    assert all(sym.c > 0 for sym in t)
    assert all(sym.c > 0 for sym in s)
