"""Closed-form factorizations of directed sequences; independent of the engine.

A positive word is *directed toward i* when every letter is E_ij or E_ik.
Same-first-index letters commute (E_ij E_ik = E_ik E_ij as matrices), so a
directed word normalizes to an exponent pair.  The closed forms below give
the unique factorizations of S^-1 T for directed S and T, and a checker
confirms that the commutation of same-index letters carries factorizations
of a word to factorizations of the swapped word one transposition apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .words import E, Symbol, Word, eval_word, format_word
from .engine import Always6a, STRONG_FORM, factor_run
from .enumerator import EnumerationResult, enumerate_factorizations


@dataclass(frozen=True)
class DirectedSeq:
    """E_ij^m E_ik^n in normalized block order, with j < k."""

    i: int
    m: int
    n: int

    def __post_init__(self):
        if self.i not in (1, 2, 3):
            raise ValueError(f"invalid direction index {self.i}")
        if self.m < 0 or self.n < 0:
            raise ValueError("exponents must be >= 0")

    @property
    def j(self) -> int:
        return min(x for x in (1, 2, 3) if x != self.i)

    @property
    def k(self) -> int:
        return max(x for x in (1, 2, 3) if x != self.i)

    def word(self) -> Word:
        return tuple([E(self.i, self.j)] * self.m + [E(self.i, self.k)] * self.n)

    def exponent(self, other: int) -> int:
        """Exponent of E_i-other inside the sequence."""
        if other == self.j:
            return self.m
        if other == self.k:
            return self.n
        raise ValueError(f"index {other} is the direction itself")


def directed(i: int, exponents: dict[int, int]) -> DirectedSeq:
    """DirectedSeq toward i with given exponents keyed by the second index."""
    seq = DirectedSeq(i, 0, 0)
    return DirectedSeq(i, exponents.get(seq.j, 0), exponents.get(seq.k, 0))


def normalize_directed(word: Sequence[Symbol]) -> Optional[DirectedSeq]:
    """Exponent pair of a directed positive word, or None if not directed."""
    counts: dict[int, int] = {}
    direction: Optional[int] = None
    for sym in word:
        if sym.kind != "E" or sym.c < 0:
            return None
        if direction is None:
            direction = sym.a
        elif sym.a != direction:
            return None
        counts[sym.b] = counts.get(sym.b, 0) + 1
    if direction is None:
        return DirectedSeq(1, 0, 0)  # empty word: directed, exponents (0, 0)
    seq = DirectedSeq(direction, 0, 0)
    return DirectedSeq(direction, counts.get(seq.j, 0), counts.get(seq.k, 0))


def factor_opposite_directed(s: DirectedSeq, t: DirectedSeq) -> Optional[Word]:
    """The unique factorization of S^-1 T for S toward i, T toward j != i.

    Writing S = E_ij^m E_ik^n and T = E_ji^p E_jk^q (k the third index):

        m == 0:            E_ji^p E_jk^(q+n*p) E_ik^-n
        p == 0:            E_jk^q E_ik^(-n-m*q) E_ij^-m
        m != 0 and p != 0: stop (returns None)
    """
    i, j = s.i, t.i
    if i == j:
        raise ValueError("sequences must be directed toward different indices")
    k = 6 - i - j
    m, n = s.exponent(j), s.exponent(k)
    p, q = t.exponent(i), t.exponent(k)
    if m == 0:
        return tuple(
            [E(j, i)] * p + [E(j, k)] * (q + n * p) + [E(i, k, -1)] * n
        )
    if p == 0:
        return tuple(
            [E(j, k)] * q + [E(i, k, -1)] * (n + m * q) + [E(i, j, -1)] * m
        )
    return None


def factor_same_directed_no6b(s: DirectedSeq, t: DirectedSeq) -> Word:
    """The unique 6a-only factorization T1 S1^-1 of S^-1 T, both toward i.

    Common powers cancel; the surviving positive block commutes across the
    surviving negative block.
    """
    if s.i != t.i:
        raise ValueError("sequences must be directed toward the same index")
    i, j, k = s.i, s.j, s.k
    pos_j, neg_j = max(t.m - s.m, 0), max(s.m - t.m, 0)
    pos_k, neg_k = max(t.n - s.n, 0), max(s.n - t.n, 0)
    return tuple(
        [E(i, j)] * pos_j
        + [E(i, k)] * pos_k
        + [E(i, k, -1)] * neg_k
        + [E(i, j, -1)] * neg_j
    )


# -- commutation of same-index swaps with the factorization ------------------


@dataclass(frozen=True)
class Rule8Report:
    ok: bool
    swapped_word: Word
    pairs: tuple[tuple[Word, Word], ...]  # matched (original, swapped) results
    problems: tuple[str, ...]


def _one_swap_apart(u: Word, v: Word) -> bool:
    """Equal words, or differing by one adjacent same-first-index transposition."""
    if u == v:
        return True
    if len(u) != len(v):
        return False
    diff = [idx for idx, (x, y) in enumerate(zip(u, v)) if x != y]
    if len(diff) != 2 or diff[1] != diff[0] + 1:
        return False
    d = diff[0]
    x, y = u[d], u[d + 1]
    if (v[d], v[d + 1]) != (y, x):
        return False
    return x.kind == "E" and y.kind == "E" and x.c > 0 and y.c > 0 and x.a == y.a


def _perfect_matching(lefts: list[Word], rights: list[Word]) -> Optional[list[int]]:
    """Backtracking perfect matching under the one-swap relation."""
    n = len(lefts)
    adjacency = [
        [t for t in range(n) if _one_swap_apart(lefts[s], rights[t])] for s in range(n)
    ]
    match: list[int] = [-1] * n
    used = [False] * n

    def place(s: int) -> bool:
        if s == n:
            return True
        for t in adjacency[s]:
            if not used[t]:
                used[t] = True
                match[s] = t
                if place(s + 1):
                    return True
                used[t] = False
        return False

    return match if place(0) else None


def check_rule8_commutation(word: Sequence[Symbol], swap_position: int) -> Rule8Report:
    """Compare factorizations of a word and of its same-index-swapped variant.

    Requires an adjacent positive pair E_ij E_ik at ``swap_position``.  The
    completed factorizations of the two words must admit a perfect matching
    in which paired results differ by at most one such swap.  (Stop counts
    may differ: a swap can change how many branches die in stops.)
    """
    word = tuple(word)
    if swap_position < 0 or swap_position + 1 >= len(word):
        raise ValueError("swap position out of range")
    x, y = word[swap_position], word[swap_position + 1]
    if not (x.kind == "E" == y.kind and x.c > 0 < y.c and x.a == y.a and x.b != y.b):
        raise ValueError(
            f"letters at {swap_position} are not an adjacent same-index positive pair"
        )
    swapped = word[:swap_position] + (y, x) + word[swap_position + 2 :]
    left = enumerate_factorizations(word)
    right = enumerate_factorizations(swapped)
    problems: list[str] = []
    pairs: tuple[tuple[Word, Word], ...] = ()
    if left.completed_count != right.completed_count:
        problems.append(
            f"completed counts differ: {left.completed_count} vs {right.completed_count}"
        )
    else:
        lefts = [f.word for f in left.completed]
        rights = [f.word for f in right.completed]
        matching = _perfect_matching(lefts, rights)
        if matching is None:
            problems.append("no one-swap pairing of the completed factorizations exists")
        else:
            pairs = tuple((lefts[s], rights[t]) for s, t in enumerate(matching))
    return Rule8Report(not problems, swapped, pairs, tuple(problems))


def _directed_layout(word: Word):
    """(T, S) of a strong word as directed normal forms, or None."""
    from .engine import is_strong_form, split_strong

    if not is_strong_form(word):
        return None
    t_part, s_part, perms = split_strong(word)
    if perms:
        return None
    t_norm = normalize_directed(t_part)
    s_norm = normalize_directed(s_part)
    if t_norm is None or s_norm is None:
        return None
    return t_norm, s_norm


def crosscheck_opposite(s: DirectedSeq, t: DirectedSeq) -> tuple[bool, str]:
    """Engine agreement for the opposite-direction closed form.

    Directed sequences are defined up to same-index commutation, so the
    comparison is by matrix value and directed normal form of both parts.
    """
    word = tuple(sym.inverse() for sym in reversed(s.word())) + t.word()
    expected = factor_opposite_directed(s, t)
    res: EnumerationResult = enumerate_factorizations(word)
    if expected is None:
        if res.completed_count == 0 and res.stopped_count > 0:
            return True, "all branches stop"
        return False, f"expected stop, engine completed {res.completed_count}"
    if res.completed_count != 1:
        return False, f"expected a unique factorization, engine found {res.completed_count}"
    got = res.completed[0].word
    if eval_word(got) != eval_word(expected):
        return False, f"values differ: {format_word(expected)!r} vs {format_word(got)!r}"
    if _directed_layout(got) != _directed_layout(expected):
        return False, f"closed form {format_word(expected)!r} != engine {format_word(got)!r}"
    return True, "unique factorization matches"


def crosscheck_same(s: DirectedSeq, t: DirectedSeq) -> tuple[bool, str]:
    """Engine agreement for the same-direction, 6a-only closed form."""
    word = tuple(sym.inverse() for sym in reversed(s.word())) + t.word()
    expected = factor_same_directed_no6b(s, t)
    outcome = factor_run(word, "A", Always6a(), budget=10_000)
    if outcome.status != STRONG_FORM:
        return False, f"engine run ended with {outcome.status}"
    if outcome.result != expected:
        return (
            False,
            f"closed form {format_word(expected)!r} != engine {format_word(outcome.result)!r}",
        )
    return True, "unique factorization matches"
