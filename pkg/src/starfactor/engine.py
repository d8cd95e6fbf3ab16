"""Rule tables and runs for the two local factorization algorithms.

A run rewrites a word until every positive elementary letter lies to the
left of every negative one (permutation letters do not count), a ``stop``
rule fires, or the step budget runs out.  A redex is the leftmost negative
elementary letter immediately followed -- up to intervening R letters --
by a positive elementary one.  R letters otherwise stay exactly where the
rules put them; when one sits inside a redex it is pushed right across the
positive letter (relabeling it) before the rule is matched.  These pushes
preserve the word's matrix value and are not counted against the budget.

Rule table, for {i, j, k} = {1, 2, 3} (left column algorithm A, right B
where they differ):

    1   E_ij^-1 E_ji  =>  stop
    2   E_ij^-1 E_ij  =>  (empty)
    3   E_ij^-1 E_kj  =>  E_kj E_ij^-1
    4   E_ij^-1 E_jk  =>  E_jk E_ik^-1 E_ij^-1        | E_jk E_ij^-1 E_ik^-1
    5   E_ij^-1 E_ki  =>  E_ki E_kj E_ij^-1           | E_kj E_ki E_ij^-1
    6a  E_ij^-1 E_ik  =>  E_ik E_ij^-1                | E_jk E_ij^-1 E_jk^-1
    6b  E_ij^-1 E_ik  =>  E_ki E_jk R_kji E_kj^-1 E_ji^-1 | E_kj E_ik E_kj^-1
    7   R E_lm^s      =>  E_{r(l) r(m)}^s R           (bookkeeping, A only writes R)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Protocol, Sequence

from .words import (
    E,
    R,
    ROT_IDENTITY,
    Rotation,
    Symbol,
    Word,
    eval_word,
    format_word,
    relabel,
    rot_compose,
    rot_inverse,
    rotation_of,
    perm_symbol,
)

DEFAULT_BUDGET = 10**6

STRONG_FORM = "strong_form"
STOPPED = "stopped"
BUDGET_EXCEEDED = "budget_exceeded"


class NotARedexError(ValueError):
    pass


class ChoiceError(ValueError):
    """Missing, extraneous, or exhausted rule-6 choice."""


class RuleId(NamedTuple):
    algorithm: str
    number: str

    def __str__(self) -> str:
        return f"{self.algorithm}:{self.number}"


class RewriteStep(NamedTuple):
    position: int
    rule: RuleId
    before: Word
    after: Optional[Word]  # None when rule 1 fires


@dataclass(frozen=True)
class RunOutcome:
    status: str
    result: Optional[Word]  # strong-form word, when status == STRONG_FORM
    trace: tuple[RewriteStep, ...]
    choices: tuple[str, ...]
    word: Word  # word at termination, whatever the status
    steps: int
    cycle_detected: bool = False


# -- choice policies ---------------------------------------------------------


class ChoicePolicy(Protocol):
    def choose(self, letters: Sequence[Symbol], pos: int) -> str: ...


class Always6a:
    def choose(self, letters: Sequence[Symbol], pos: int) -> str:
        return "6a"


class Always6b:
    def choose(self, letters: Sequence[Symbol], pos: int) -> str:
        return "6b"


class Scripted:
    """Consume a fixed list of choices left to right; running out is an error."""

    def __init__(self, choices: Iterable[str]):
        self._choices = list(choices)
        for c in self._choices:
            if c not in ("6a", "6b"):
                raise ChoiceError(f"invalid scripted choice {c!r}")
        self._next = 0

    def choose(self, letters: Sequence[Symbol], pos: int) -> str:
        if self._next >= len(self._choices):
            raise ChoiceError("scripted choices exhausted before the run ended")
        c = self._choices[self._next]
        self._next += 1
        return c


# -- rule machinery ----------------------------------------------------------


def _third(i: int, j: int) -> int:
    return 6 - i - j


def _classify(i: int, j: int, a: int, b: int) -> str:
    """Rule number for the redex E_ij^-1 E_ab; patterns are exhaustive."""
    if a == j:
        return "1" if b == i else "4"
    if a == i:
        return "2" if b == j else "6"
    # a == k
    return "3" if b == j else "5"


def _build_rule_table() -> dict[tuple[str, int, int], dict[str, tuple[Symbol, ...]]]:
    table: dict[tuple[str, int, int], dict[str, tuple[Symbol, ...]]] = {}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            k = _third(i, j)
            table[("A", i, j)] = {
                "2": (),
                "3": (E(k, j), E(i, j, -1)),
                "4": (E(j, k), E(i, k, -1), E(i, j, -1)),
                "5": (E(k, i), E(k, j), E(i, j, -1)),
                "6a": (E(i, k), E(i, j, -1)),
                "6b": (E(k, i), E(j, k), R(k, j, i), E(k, j, -1), E(j, i, -1)),
            }
            table[("B", i, j)] = {
                "2": (),
                "3": (E(k, j), E(i, j, -1)),
                "4": (E(j, k), E(i, j, -1), E(i, k, -1)),
                "5": (E(k, j), E(k, i), E(i, j, -1)),
                "6a": (E(j, k), E(i, j, -1), E(j, k, -1)),
                "6b": (E(k, j), E(i, k), E(k, j, -1)),
            }
    return table


_RULE_TABLE = _build_rule_table()


def rule_rhs(algorithm: str, number: str, i: int, j: int) -> tuple[Symbol, ...]:
    """Replacement word for rule ``number`` at the redex E_ij^-1 E_??."""
    if algorithm not in ("A", "B"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return _RULE_TABLE[(algorithm, i, j)][number]


def is_strong_form(word: Iterable[Symbol]) -> bool:
    """No positive elementary letter to the right of a negative one."""
    seen_negative = False
    for sym in word:
        if sym.kind != "E":
            continue
        if sym.c < 0:
            seen_negative = True
        elif seen_negative:
            return False
    return True


def _scan(letters: Sequence[Symbol], start: int) -> Optional[tuple[int, int]]:
    """Leftmost (negative, positive) elementary pair, R letters transparent."""
    n = len(letters)
    t = start
    while t < n:
        sym = letters[t]
        if sym.kind == "E" and sym.c < 0:
            u = t + 1
            while u < n and letters[u].kind == "R":
                u += 1
            if u < n:
                nxt = letters[u]
                if nxt.c > 0:
                    return t, u
        t += 1
    return None


def find_redex(word: Sequence[Symbol], start: int = 0) -> Optional[int]:
    """Index of the negative letter of the leftmost redex, or None."""
    hit = _scan(word, start)
    return None if hit is None else hit[0]


def _expose(letters: list[Symbol], t: int, u: int) -> None:
    """Push R letters inside the redex right past the positive letter."""
    if u == t + 1:
        return
    perms = letters[t + 1 : u]
    rot = ROT_IDENTITY
    for p in perms:
        rot = rot_compose(rot, rotation_of(p))
    letters[t + 1 : u + 1] = [relabel(letters[u], rot)] + perms


def _restart(letters: Sequence[Symbol], t: int) -> int:
    """Conservative scan restart: previous elementary letter before t."""
    p = t - 1
    while p >= 0 and letters[p].kind == "R":
        p -= 1
    return max(p, 0)


def apply_rule(
    word: Sequence[Symbol],
    pos: int,
    algorithm: str = "A",
    choice: Optional[str] = None,
) -> RewriteStep:
    """Apply the matching rule at the redex whose negative letter sits at ``pos``.

    ``choice`` must be given exactly when the redex matches rule 6.  Rule 1
    yields a step with ``after=None`` (stop).
    """
    letters = list(word)
    n = len(letters)
    if not (0 <= pos < n) or letters[pos].kind != "E" or letters[pos].c > 0:
        raise NotARedexError(f"position {pos} is not a negative elementary letter")
    u = pos + 1
    while u < n and letters[u].kind == "R":
        u += 1
    if u >= n or letters[u].kind != "E" or letters[u].c < 0:
        raise NotARedexError(f"position {pos} is not followed by a positive letter")
    before = tuple(word)
    _expose(letters, pos, u)
    left, right = letters[pos], letters[pos + 1]
    num = _classify(left.a, left.b, right.a, right.b)
    if num == "6":
        if choice not in ("6a", "6b"):
            raise ChoiceError("rule-6 redex needs a choice of '6a' or '6b'")
        num = choice
    elif choice is not None:
        raise ChoiceError(f"choice supplied but the redex matches rule {num}")
    rule = RuleId(algorithm, "1" if num == "1" else num)
    if num == "1":
        return RewriteStep(pos, rule, before, None)
    letters[pos : pos + 2] = rule_rhs(algorithm, num, left.a, left.b)
    return RewriteStep(pos, rule, before, tuple(letters))


def factor_run(
    word: Iterable[Symbol],
    algorithm: str = "A",
    policy: Optional[ChoicePolicy] = None,
    budget: int = DEFAULT_BUDGET,
    record_trace: bool = True,
    check_steps: bool = False,
    detect_cycles: bool = False,
) -> RunOutcome:
    """Run the local algorithm to strong form, stop, or budget exhaustion.

    Deterministic given (word, algorithm, policy, budget).  ``check_steps``
    verifies matrix-value preservation after every step.  ``detect_cycles``
    terminates early (reported as budget exhaustion) when the active region
    of the word repeats exactly; only sound for choice policies that depend
    on nothing outside the word, so it is off by default.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if policy is None:
        policy = Always6a()
    letters = list(word)
    trace: list[RewriteStep] = []
    choices: list[str] = []
    steps = 0
    scan_from = 0
    seen_cores: set[Word] = set()
    value = eval_word(letters) if check_steps else None

    while True:
        hit = _scan(letters, scan_from)
        if hit is None:
            return RunOutcome(
                STRONG_FORM,
                tuple(letters),
                tuple(trace),
                tuple(choices),
                tuple(letters),
                steps,
            )
        t, u = hit
        if steps >= budget:
            return RunOutcome(
                BUDGET_EXCEEDED, None, tuple(trace), tuple(choices), tuple(letters), steps
            )
        if detect_cycles:
            # active region: first negative through last positive; letters
            # outside it are inert and only accumulate
            first_neg = next(
                idx for idx, s in enumerate(letters) if s.kind == "E" and s.c < 0
            )
            last_pos = max(
                idx for idx, s in enumerate(letters) if s.kind == "E" and s.c > 0
            )
            core = tuple(letters[first_neg : last_pos + 1])
            if core in seen_cores:
                return RunOutcome(
                    BUDGET_EXCEEDED,
                    None,
                    tuple(trace),
                    tuple(choices),
                    tuple(letters),
                    steps,
                    cycle_detected=True,
                )
            seen_cores.add(core)
        before = tuple(letters) if (record_trace or check_steps) else ()
        _expose(letters, t, u)
        left, right = letters[t], letters[t + 1]
        num = _classify(left.a, left.b, right.a, right.b)
        if num == "6":
            num = policy.choose(letters, t)
            if num not in ("6a", "6b"):
                raise ChoiceError(f"policy returned invalid choice {num!r}")
            choices.append(num)
        if num == "1":
            if record_trace:
                trace.append(RewriteStep(t, RuleId(algorithm, "1"), before, None))
            return RunOutcome(
                STOPPED, None, tuple(trace), tuple(choices), tuple(letters), steps
            )
        letters[t : t + 2] = rule_rhs(algorithm, num, left.a, left.b)
        steps += 1
        if record_trace:
            trace.append(RewriteStep(t, RuleId(algorithm, num), before, tuple(letters)))
        if check_steps:
            new_value = eval_word(letters)
            if new_value != value:
                raise AssertionError(
                    f"step {steps} (rule {num}) changed the word's matrix value: "
                    f"{format_word(before)} => {format_word(letters)}"
                )
        scan_from = _restart(letters, t)


# -- strong-form bookkeeping ---------------------------------------------------


class NotStrongFormError(ValueError):
    pass


def expel_perms(word: Iterable[Symbol]) -> tuple[list[Symbol], Rotation]:
    """Move every R letter to the right end; returns (relabeled letters, residue)."""
    rot = ROT_IDENTITY
    out: list[Symbol] = []
    for sym in word:
        if sym.kind == "R":
            rot = rot_compose(rot, rotation_of(sym))
        else:
            out.append(relabel(sym, rot))
    return out, rot


def push_permutations_right(word: Iterable[Symbol]) -> Word:
    """Normalize all R letters to the right end, merged into at most one."""
    letters, rot = expel_perms(word)
    if rot != ROT_IDENTITY:
        letters.append(perm_symbol(rot))
    return tuple(letters)


def strong_parts(word: Sequence[Symbol]) -> tuple[Word, Word]:
    """Split a strong word at the boundary after its last positive letter.

    The prefix keeps interior R letters (they are part of normal-form
    patterns); boundary and tail R letters go to the tail.
    """
    if not is_strong_form(word):
        raise NotStrongFormError(format_word(word))
    last_pos = -1
    for idx, sym in enumerate(word):
        if sym.kind == "E" and sym.c > 0:
            last_pos = idx
    return tuple(word[: last_pos + 1]), tuple(word[last_pos + 1 :])


def split_strong(word: Sequence[Symbol]) -> tuple[Word, Word, Word]:
    """Rewrite a strong word as T * perms * S^-1 and return (T, S, perms).

    T collects the positive letters (R letters in the prefix are pushed to
    the boundary, relabeling the positives they cross); tail R letters are
    pulled left to the boundary, relabeling the negatives they cross; S is
    the reversal-with-sign-flip of the resulting pure-negative tail.  All
    moves are conjugation identities, so eval(T) * eval(perms) * eval(S)^-1
    equals the value of the input word.
    """
    prefix, tail = strong_parts(word)
    t_letters, rot = expel_perms(prefix)
    # collect tail R letters at the boundary: walk right to left, relabeling
    # each negative by the inverse of the rotations that pass over it
    s_inv: list[Symbol] = []
    rot_tail = ROT_IDENTITY
    for sym in reversed(tail):
        if sym.kind == "R":
            rot_tail = rot_compose(rotation_of(sym), rot_tail)
        else:
            s_inv.append(relabel(sym, rot_inverse(rot_tail)))
    s_inv.reverse()
    total = rot_compose(rot, rot_tail)
    perms: Word = () if total == ROT_IDENTITY else (perm_symbol(total),)
    s_word = tuple(sym.inverse() for sym in reversed(s_inv))
    return tuple(t_letters), s_word, perms
