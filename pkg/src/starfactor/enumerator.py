"""Exhaustive exploration of the 6a/6b choice tree, counting, and normal forms.

Every rule-6 redex under the fixed leftmost order forks the run in two;
depth-first exploration (6a branch first) visits every completed
factorization exactly once, keyed by its choice sequence.  Completed
results of words E_ij^-m E_ik^n are recognized against the normal form

    T = E_ik^q E_ki (H(j,k,i) R_jki)^r H_p(j,k,i)

where a *group* H(j,k,i) is (E_jk E_ji)^m1 E_kj^n1 ... (E_jk E_ji)^ml
E_kj^nl E_jk E_ij (all middle exponents positive, l > 0) and a partial
group is an initial segment of one.  Pushing the interior R letters to
the right with the commutation rule turns the pattern into a plain
concatenation of groups whose index triples rotate by (j,k,i) -> (i,j,k)
-> (k,i,j) per group; the recognizer normalizes its input that way first,
so it accepts both the literal display shape and engine output, whose R
letters sit wherever the rules dropped them.  The expelled boundary
rotation belongs to neither T nor S and is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .words import (
    E,
    R,
    Symbol,
    Word,
    eval_word,
    format_word,
    mirror_word,
    rot_compose,
    rotation_of,
)
from .engine import (
    RewriteStep,
    RuleId,
    _RULE_TABLE,
    expel_perms,
    split_strong,
    strong_parts,
)

DEFAULT_BRANCH_STEPS = 10**5
DEFAULT_BRANCH_LIMIT = 10**8

# published counts of completed factorizations of E_12^-m E_13^m
REFERENCE_DIAGONAL_COUNTS = {
    1: 2,
    2: 6,
    3: 16,
    5: 68,
    10: 658,
    20: 8094,
    30: 37322,
    40: 112610,
}


class Factorization(NamedTuple):
    choices: tuple[str, ...]
    word: Word  # full strong-form result
    T: Word
    S: Word
    perms: Word
    trace: Optional[tuple[RewriteStep, ...]]


@dataclass(frozen=True)
class EnumerationResult:
    completed: tuple[Factorization, ...]
    stopped_count: int
    exceeded_count: int
    distinct_results: int
    incomplete: bool = False

    @property
    def completed_count(self) -> int:
        return len(self.completed)


def power_word(m: int, n: int, i: int = 1, j: int = 2, k: int = 3) -> Word:
    """The word E_ij^-m E_ik^n."""
    if m < 0 or n < 0:
        raise ValueError("exponents must be >= 0")
    return tuple([E(i, j, -1)] * m + [E(i, k)] * n)


def local_family_words(m: int, n: int, i: int = 1, j: int = 2, k: int = 3) -> tuple[Word, ...]:
    """The local subsequence words of the m-assembly, n-subdivision diagram.

    Four shapes: E_ij^-m E_ik^n; E_ij^-m E_ik^q E_ki (q < n);
    E_ji^-1 E_ij^-p E_ik^n and E_ji^-1 E_ij^-p E_ik^q E_ki (p < m, q < n).
    """
    out: list[Word] = [power_word(m, n, i, j, k)]
    for q in range(n):
        out.append(tuple([E(i, j, -1)] * m + [E(i, k)] * q + [E(k, i)]))
    for p in range(m):
        out.append(tuple([E(j, i, -1)] + [E(i, j, -1)] * p + [E(i, k)] * n))
        for q in range(n):
            out.append(
                tuple([E(j, i, -1)] + [E(i, j, -1)] * p + [E(i, k)] * q + [E(k, i)])
            )
    return tuple(out)


def _build_relabel_tables():
    """Lookup tables for the redex-exposing R pushes, keyed by rotation."""
    relabel: dict = {}
    rot_of: dict = {}
    for rot in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                if i != j:
                    for s in (1, -1):
                        relabel[(rot, E(i, j, s))] = E(rot[i - 1], rot[j - 1], s)
    for sym in (R(3, 2, 1), R(2, 3, 1)):
        rot_of[sym] = rotation_of(sym)
    return relabel, rot_of


_RELABEL, _ROT_OF = _build_relabel_tables()


def enumerate_factorizations(
    word: Sequence[Symbol],
    algorithm: str = "A",
    budget_per_branch: int = DEFAULT_BRANCH_STEPS,
    branch_budget: int = DEFAULT_BRANCH_LIMIT,
    keep_traces: bool = False,
) -> EnumerationResult:
    """Depth-first enumeration of all runs over the rule-6 choice tree.

    Deterministic: the 6a branch is explored before 6b, so two calls yield
    identical result sequences.  ``budget_per_branch`` bounds rule
    applications per branch; ``branch_budget`` bounds the number of leaves
    explored, and overrunning it flags the result as incomplete.

    Backtracking is undo-based: one shared letter list plus a trail of slice
    edits, so forks cost O(1) instead of a word copy.
    """
    completed: list[Factorization] = []
    stopped = 0
    exceeded = 0
    leaves = 0
    incomplete = False

    letters: list[Symbol] = list(word)
    # index the rule table as rtab[i][j][num] for the fixed algorithm
    rtab: list = [[None] * 4 for _ in range(4)]
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i != j:
                rtab[i][j] = _RULE_TABLE[(algorithm, i, j)]
    relabel_table = _RELABEL
    rot_of = _ROT_OF
    compose = rot_compose

    # trail of (start, old_slice, new_len); undo by letters[s:s+new_len] = old
    trail: list[tuple[int, tuple, int]] = []
    choices: list[str] = []
    trace: list[RewriteStep] = []
    # fork frames: (trail_len, choices_len, trace_len, steps, t, u)
    forks: list[tuple[int, int, int, int, int, int]] = []

    scan_from = 0
    steps = 0

    def emit(status: str) -> None:
        nonlocal stopped, exceeded, leaves
        leaves += 1
        if status == "strong":
            result = tuple(letters)
            t_part, s_part, perms = split_strong(result)
            completed.append(
                Factorization(
                    tuple(choices),
                    result,
                    t_part,
                    s_part,
                    perms,
                    tuple(trace) if keep_traces else None,
                )
            )
        elif status == "stopped":
            stopped += 1
        else:
            exceeded += 1

    while True:
        # walk the current branch to a leaf
        n = len(letters)
        t = scan_from
        status = None
        while True:
            # inline leftmost-redex scan
            while t < n:
                sym = letters[t]
                if sym[0] == "E" and sym[3] < 0:
                    u = t + 1
                    while u < n and letters[u][0] == "R":
                        u += 1
                    if u < n and letters[u][3] > 0:
                        break
                t += 1
            else:
                status = "strong"
                break
            if steps >= budget_per_branch:
                status = "exceeded"
                break
            if keep_traces:
                before = tuple(letters)
            # expose: push intervening R letters right across the positive
            old = tuple(letters[t : u + 1])
            if u != t + 1:
                perms = letters[t + 1 : u]
                rot = None
                for p in perms:
                    rot = rot_of[p] if rot is None else compose(rot, rot_of[p])
                letters[t + 1 : u + 1] = [relabel_table[(rot, letters[u])]] + perms
            left = letters[t]
            right = letters[t + 1]
            i, j = left[1], left[2]
            a, b = right[1], right[2]
            # classify
            if a == j:
                num = "1" if b == i else "4"
            elif a == i:
                num = "2" if b == j else "6"
            else:
                num = "3" if b == j else "5"
            if num == "1":
                letters[t : t + len(old)] = old  # undo the expose
                if keep_traces:
                    trace.append(RewriteStep(t, RuleId(algorithm, "1"), before, None))
                status = "stopped"
                break
            if num == "6":
                forks.append((len(trail), len(choices), len(trace), steps, t, u))
                choices.append("6a")
                num = "6a"
            seg = rtab[i][j][num]
            letters[t : t + 2] = seg
            trail.append((t, old, len(seg) + u - t - 1))
            steps += 1
            if keep_traces:
                trace.append(RewriteStep(t, RuleId(algorithm, num), before, tuple(letters)))
            n = len(letters)
            # restart at the previous elementary letter
            p = t - 1
            while p >= 0 and letters[p][0] == "R":
                p -= 1
            t = p if p > 0 else 0
        emit(status)
        if leaves >= branch_budget and forks:
            incomplete = True
            break
        # backtrack to the most recent fork and take its 6b branch
        if not forks:
            break
        trail_len, choices_len, trace_len, fork_steps, t, u = forks.pop()
        while len(trail) > trail_len:
            start, old, new_len = trail.pop()
            letters[start : start + new_len] = old
        del choices[choices_len:]
        choices.append("6b")
        del trace[trace_len:]
        n = len(letters)
        old = tuple(letters[t : u + 1])
        if keep_traces:
            before = tuple(letters)
        if u != t + 1:
            perms = letters[t + 1 : u]
            rot = None
            for p in perms:
                rot = rot_of[p] if rot is None else compose(rot, rot_of[p])
            letters[t + 1 : u + 1] = [relabel_table[(rot, letters[u])]] + perms
        left = letters[t]
        seg = rtab[left[1]][left[2]]["6b"]
        letters[t : t + 2] = seg
        trail.append((t, old, len(seg) + u - t - 1))
        steps = fork_steps + 1
        if keep_traces:
            trace.append(RewriteStep(t, RuleId(algorithm, "6b"), before, tuple(letters)))
        p = t - 1
        while p >= 0 and letters[p][0] == "R":
            p -= 1
        scan_from = p if p > 0 else 0

    distinct = len({f.word for f in completed})
    return EnumerationResult(tuple(completed), stopped, exceeded, distinct, incomplete)


def count_table(
    max_mn: int,
    budget_per_branch: int = DEFAULT_BRANCH_STEPS,
    rows: Optional[Sequence[int]] = None,
) -> list[tuple[int, int, int, int, int]]:
    """Rows (m, n, completed, stopped, distinct_results) for m = n <= max_mn."""
    if rows is None:
        rows = range(1, max_mn + 1)
    out = []
    for m in rows:
        res = enumerate_factorizations(
            power_word(m, m), budget_per_branch=budget_per_branch
        )
        if res.exceeded_count or res.incomplete:
            raise RuntimeError(f"enumeration at m=n={m} did not finish within budgets")
        out.append((m, m, res.completed_count, res.stopped_count, res.distinct_results))
    return out


# -- normal form recognition ---------------------------------------------------


@dataclass(frozen=True)
class GroupForm:
    """One (possibly partial) group: index triple, exponent segments, completeness."""

    j: int
    k: int
    i: int
    segments: tuple[tuple[int, int], ...]
    complete: bool


@dataclass(frozen=True)
class DiamondForm:
    variant: str  # "power" or "full"
    i: int
    j: int
    k: int
    power: int = 0  # exponent for the power variant, leading q for full
    q: int = 0
    r: int = 0
    partial: Optional[GroupForm] = None


class _GroupScan(NamedTuple):
    ok: bool
    end: int
    segments: tuple[tuple[int, int], ...]
    complete: bool


def _scan_group(letters: Sequence[Symbol], pos: int, a: int, b: int, c: int) -> _GroupScan:
    """Scan one group H(a, b, c) = (E_ab E_ac)^m1 E_ba^n1 ... E_ab E_ca from pos.

    Stops at the terminal pair (complete) or at end-of-word (partial).  A
    letter outside the group's alphabet at a segment boundary fails the scan
    unless the group is empty there (caller decides what emptiness means).
    """
    e_ab = (a, b)
    e_ac = (a, c)
    e_ba = (b, a)
    e_ca = (c, a)
    n = len(letters)
    segments: list[tuple[int, int]] = []
    while True:
        m_count = 0
        # (E_ab E_ac)^m block
        while pos < n and (letters[pos].a, letters[pos].b) == e_ab:
            if pos + 1 >= n:
                segments.append((m_count, 0))
                return _GroupScan(True, n, tuple(segments), False)  # ends mid pair/terminal
            nxt = (letters[pos + 1].a, letters[pos + 1].b)
            if nxt == e_ac:
                m_count += 1
                pos += 2
            elif nxt == e_ca:
                if m_count or not segments:
                    segments.append((m_count, 0))
                return _GroupScan(True, pos + 2, tuple(segments), True)  # terminal pair
            else:
                return _GroupScan(False, pos, tuple(segments), False)
        # E_ba^n block
        n_count = 0
        while pos < n and (letters[pos].a, letters[pos].b) == e_ba:
            n_count += 1
            pos += 1
        segments.append((m_count, n_count))
        if pos >= n:
            return _GroupScan(True, n, tuple(segments), False)
        if (letters[pos].a, letters[pos].b) != e_ab:
            return _GroupScan(False, pos, tuple(segments), False)
        if n_count == 0 and m_count == 0 and segments[:-1]:
            # no progress: an E_ab after e.g. E_ca cannot restart a segment
            return _GroupScan(False, pos, tuple(segments), False)


def recognize_diamond(word: Sequence[Symbol], i: int, j: int, k: int) -> Optional[DiamondForm]:
    """Match a positive word against the completed-factorization normal form.

    The input may contain R letters anywhere; they are expelled to the right
    first (the equivalent rotated-group reading of the pattern), and the
    expelled boundary rotation is not part of the match.  Returns None when
    the word fits neither the pure power E_ik^n nor the full shape.
    """
    if sorted((i, j, k)) != [1, 2, 3]:
        raise ValueError(f"invalid index assignment ({i}, {j}, {k})")
    for sym in word:
        if sym.kind == "E" and sym.c < 0:
            raise ValueError("normal-form candidate must contain no inverse letters")
    letters, _residue = expel_perms(word)
    n = len(letters)
    e_ik = (i, k)
    pos = 0
    while pos < n and (letters[pos].a, letters[pos].b) == e_ik:
        pos += 1
    if pos == n:
        return DiamondForm("power", i, j, k, power=n)
    q = pos
    if (letters[pos].a, letters[pos].b) != (k, i):
        return None
    pos += 1
    # groups rotate (j, k, i) -> (i, j, k) -> (k, i, j) as boundary R letters
    # are pushed out of the pattern
    a, b, c = j, k, i
    r = 0
    partial: Optional[GroupForm] = None
    while True:
        if pos == n:
            partial = GroupForm(a, b, c, (), False)  # empty trailing partial
            break
        scan = _scan_group(letters, pos, a, b, c)
        if not scan.ok:
            return None
        if scan.complete and scan.end < n:
            r += 1
            pos = scan.end
            a, b, c = c, a, b
            continue
        partial = GroupForm(a, b, c, scan.segments, scan.complete)
        break
    return DiamondForm("full", i, j, k, q=q, r=r, partial=partial)


def check_length_bound(word: Sequence[Symbol], factorization: Factorization) -> bool:
    """Elementary-letter count of T is at most max(2m+n, m+2n) for E_ij^-m E_ik^n."""
    m, n, _ = _power_shape(word)
    prefix, _tail = strong_parts(factorization.word)
    t_len = sum(1 for sym in prefix if sym.kind == "E")
    return t_len <= max(2 * m + n, m + 2 * n)


def _power_shape(word: Sequence[Symbol]) -> tuple[int, int, tuple[int, int, int]]:
    """(m, n, (i, j, k)) for a word of shape E_ij^-m E_ik^n."""
    m = 0
    pos = 0
    n_count = 0
    if not word:
        return 0, 0, (1, 2, 3)
    if word[0].c < 0:
        i, j = word[0].a, word[0].b
        while pos < len(word) and word[pos] == E(i, j, -1):
            m += 1
            pos += 1
        k = 6 - i - j
    else:
        i, k = word[0].a, word[0].b
        j = 6 - i - k
    for sym in word[pos:]:
        if sym != E(i, k):
            raise ValueError(f"{format_word(word)} is not of the shape E_ij^-m E_ik^n")
        n_count += 1
    return m, n_count, (i, j, k)


@dataclass(frozen=True)
class TheoremReport:
    m: int
    n: int
    ok: bool
    completed_count: int
    stopped_count: int
    exceeded_count: int
    failures: tuple[str, ...]


def verify_theorem_form(
    m: int,
    n: int,
    budget_per_branch: int = DEFAULT_BRANCH_STEPS,
    i: int = 1,
    j: int = 2,
    k: int = 3,
) -> TheoremReport:
    """Enumerate E_ij^-m E_ik^n and check every completed branch.

    Asserts: no branch exceeds its budget, matrix value is preserved, the
    positive part matches the normal form at (i, j, k), the mirrored tail
    matches it with j and k interchanged, and the length bound holds.
    """
    word = power_word(m, n, i, j, k)
    res = enumerate_factorizations(word, budget_per_branch=budget_per_branch)
    failures: list[str] = []
    if res.exceeded_count:
        failures.append(f"{res.exceeded_count} branch(es) exceeded the step budget")
    if res.incomplete:
        failures.append("enumeration hit the branch budget")
    target = eval_word(word) if word else None
    for fact in res.completed:
        tag = "+".join(fact.choices) or "(forced)"
        if word and eval_word(fact.word) != target:
            failures.append(f"[{tag}] result changed the matrix value")
            continue
        prefix, tail = strong_parts(fact.word)
        if recognize_diamond(prefix, i, j, k) is None:
            failures.append(f"[{tag}] T = {format_word(prefix)!r} missed the normal form")
        mirror_prefix, _ = strong_parts(mirror_word(fact.word))
        if recognize_diamond(mirror_prefix, i, k, j) is None:
            failures.append(
                f"[{tag}] S = {format_word(mirror_prefix)!r} missed the swapped form"
            )
        if not check_length_bound(word, fact):
            failures.append(f"[{tag}] length bound violated")
    return TheoremReport(
        m,
        n,
        not failures,
        res.completed_count,
        res.stopped_count,
        res.exceeded_count,
        tuple(failures),
    )
