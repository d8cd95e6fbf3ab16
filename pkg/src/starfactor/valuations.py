"""Valuation-driven runs: cone choices made by a fixed direction vector.

A valuation is a direction with (idealized) rationally independent
coordinates.  Exact rationals stand in for that ideal: any comparison that
lands on an exact tie aborts the run with a TieError.  The optional
perturbed mode appends an infinitesimal basis offset to the direction
(coordinates become lexicographically compared vectors), which makes every
comparison strict at the cost of no longer being a single rational point.

Tracking is incremental: if the valuation has coordinates (b1, b2, b3) in
the cone reached by a word prefix, extending the prefix by E(a, b, s)
replaces b_a by b_a - s*b_b, and an R letter permutes the coordinates.  At
a rule-6 redex E_ij^-1 E_ik the two candidate cones are the halves of the
current cone split along (i, k), so the branch is 6a when b_i > b_k and 6b
when b_k > b_i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional, Sequence

from .words import Symbol, Word, rotation_of
from .engine import (
    BUDGET_EXCEEDED,
    RunOutcome,
    factor_run,
)
from .enumerator import local_family_words
from .fans import Cone, UNIT_CONE

DEFAULT_VALUATION_BUDGET = 10**4


class TieError(ValueError):
    """An exact tie in a comparison that the model requires to be strict."""


class ContainmentError(ValueError):
    """The valuation direction left the cone being tracked."""


@dataclass(frozen=True)
class Valuation:
    direction: tuple[Fraction, Fraction, Fraction]
    perturbed: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "direction", tuple(Fraction(x) for x in self.direction)
        )

    @staticmethod
    def parse(text: str, perturbed: bool = False) -> "Valuation":
        """Three exact rationals, comma-separated: "3,5/2,7"."""
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated rationals, got {text!r}")
        return Valuation(tuple(Fraction(p.strip()) for p in parts), perturbed)  # type: ignore[arg-type]


# coordinates are tuples of rationals compared lexicographically; plain runs
# use 1-tuples, perturbed runs 4-tuples (value, eps1, eps2, eps3)
CoordVec = tuple


def _sign(vec: CoordVec) -> int:
    for x in vec:
        if x > 0:
            return 1
        if x < 0:
            return -1
    return 0


def _sub(u: CoordVec, v: CoordVec, s: int) -> CoordVec:
    if s > 0:
        return tuple(a - b for a, b in zip(u, v))
    return tuple(a + b for a, b in zip(u, v))


def _initial_coords(valuation: Valuation, anchor: Cone) -> list[CoordVec]:
    inv = anchor.matrix().inverse()
    base = inv.apply(valuation.direction)
    if not valuation.perturbed:
        coords = [(Fraction(b),) for b in base]
    else:
        rows = inv.rows
        coords = [
            (Fraction(base[t]), Fraction(rows[t][0]), Fraction(rows[t][1]), Fraction(rows[t][2]))
            for t in range(3)
        ]
    for c in coords:
        s = _sign(c)
        if s == 0:
            raise TieError(f"valuation lies on a face of {anchor.rays}")
        if s < 0:
            raise ContainmentError(f"valuation is outside the cone {anchor.rays}")
    return coords


def _advance(coords: list[CoordVec], sym: Symbol) -> None:
    """Update coordinates across one word letter (cone = previous * letter)."""
    if sym.kind == "E":
        coords[sym.a - 1] = _sub(coords[sym.a - 1], coords[sym.b - 1], sym.c)
    else:
        rot = rotation_of(sym)
        old = list(coords)
        for x in (1, 2, 3):
            coords[x - 1] = old[rot[x - 1] - 1]


# -- public coordinate operations ----------------------------------------------

BaryCoords = tuple[Fraction, Fraction, Fraction]


def bary_coords(cone: Cone, valuation: Valuation) -> BaryCoords:
    """The unique rational coordinates of the direction in the cone's basis.

    All entries strictly positive; a zero entry is a tie error and a negative
    one a containment error.
    """
    coords = cone.matrix().inverse().apply(valuation.direction)
    coords = tuple(Fraction(c) for c in coords)
    if any(c == 0 for c in coords):
        raise TieError(f"valuation lies on a face of {cone.rays}")
    if any(c < 0 for c in coords):
        raise ContainmentError(f"valuation is outside the cone {cone.rays}")
    return coords  # type: ignore[return-value]


def coords_after_subdivision(b: Sequence[Fraction], i: int, j: int) -> BaryCoords:
    """Subtract b_i from b_j: the coordinate move of one star subdivision."""
    if i not in (1, 2, 3) or j not in (1, 2, 3) or i == j:
        raise ValueError(f"invalid coordinate indices ({i}, {j})")
    bi, bj = Fraction(b[i - 1]), Fraction(b[j - 1])
    if bj == bi:
        raise TieError(f"coordinates {i} and {j} are equal")
    if bj < bi:
        raise ValueError(f"coordinate {j} must exceed coordinate {i}")
    out = [Fraction(x) for x in b]
    out[j - 1] = bj - bi
    return tuple(out)  # type: ignore[return-value]


def choose_cone_along(halves: tuple[Cone, Cone], valuation: Valuation) -> Cone:
    """The half whose coordinates for the valuation are all strictly positive."""
    inside = []
    for half in halves:
        try:
            bary_coords(half, valuation)
        except TieError:
            raise
        except ContainmentError:
            continue
        inside.append(half)
    if len(inside) != 1:
        raise ContainmentError(
            f"valuation is interior to {len(inside)} of the two halves"
        )
    return inside[0]


# -- valuation-driven runs -------------------------------------------------------


class ValuationPolicy:
    """Rule-6 chooser: pick the branch on the ray's side of the new wall.

    At the redex E_ij^-1 E_ik the two branches start with the halves of the
    tracked cone split along its (i, k) wall; the branch whose half lies on
    the ray's side is chosen by comparing the i and k coordinates.  When the
    ray is interior this is exactly "the cone containing the ray"; the run
    may also wander to cones away from the ray, where the same comparison
    still selects a unique branch.  Equality is a tie error.

    Records the coordinate trajectory (position, coordinates, choice) of
    every decision it makes.
    """

    def __init__(self, valuation: Valuation, anchor: Cone = UNIT_CONE):
        self.valuation = valuation
        self.anchor = anchor
        self.trajectory: list[tuple[int, tuple, str]] = []

    def choose(self, letters: Sequence[Symbol], pos: int) -> str:
        coords = _initial_coords(self.valuation, self.anchor)
        for sym in letters[:pos]:
            _advance(coords, sym)
        i = letters[pos].a
        k = letters[pos + 1].b
        s = _sign(_sub(coords[i - 1], coords[k - 1], 1))
        if s == 0:
            raise TieError(f"coordinates {i} and {k} tie at position {pos}")
        choice = "6a" if s > 0 else "6b"
        self.trajectory.append((pos, tuple(coords), choice))
        return choice


def run_along_valuation(
    word: Sequence[Symbol],
    algorithm: str,
    valuation: Valuation,
    budget: int = DEFAULT_VALUATION_BUDGET,
    anchor: Cone = UNIT_CONE,
    record_trace: bool = True,
) -> tuple[RunOutcome, ValuationPolicy]:
    """Factor with every rule-6 branch selected by the valuation."""
    policy = ValuationPolicy(valuation, anchor)
    outcome = factor_run(
        word,
        algorithm,
        policy,
        budget=budget,
        record_trace=record_trace,
    )
    return outcome, policy


# -- sampling and the non-termination search -------------------------------------


def sample_valuations(
    count: int, seed: int = 20230817, bound: int = 10**6, perturbed: bool = False
):
    """Random integer directions in the open positive octant."""
    rng = Random(seed)
    out = []
    for _ in range(count):
        out.append(
            Valuation(
                (
                    Fraction(rng.randint(1, bound)),
                    Fraction(rng.randint(1, bound)),
                    Fraction(rng.randint(1, bound)),
                ),
                perturbed,
            )
        )
    return out


@dataclass(frozen=True)
class NonTerminationWitness:
    word: Word
    valuation: Valuation
    budget: int
    samples_tried: int

    def to_json(self) -> str:
        from .words import format_word

        return json.dumps(
            {
                "word": format_word(self.word),
                "valuation": [str(x) for x in self.valuation.direction],
                "budget": self.budget,
                "samples_tried": self.samples_tried,
            },
            sort_keys=True,
        )


def search_b_nontermination(
    words: Optional[Sequence[Sequence[Symbol]]] = None,
    budget: int = 400,
    max_samples: int = 10**4,
    seed: int = 20230817,
    grid: int = 6,
) -> Optional[NonTerminationWitness]:
    """Search for a valuation along which algorithm B exceeds its budget.

    By default the search covers the local words of the symmetric 2-by-2
    assembly/subdivision diagram (the bare E_12^-2 E_13^2 turns out to be
    finite along every sampled valuation; its sibling local words are not).
    Tries a coarse integer grid of directions first, then random ones; a
    direction that aborts on a tie is skipped.  One attempt is one
    (word, valuation) run.
    """
    if words is None:
        word_list = [tuple(w) for w in local_family_words(2, 2)]
    else:
        word_list = [tuple(w) for w in words]
    tried = 0

    def attempt(valuation: Valuation) -> Optional[NonTerminationWitness]:
        nonlocal tried
        for word in word_list:
            tried += 1
            try:
                outcome, _policy = run_along_valuation(
                    word, "B", valuation, budget=budget, record_trace=False
                )
            except (TieError, ContainmentError):
                continue
            if outcome.status == BUDGET_EXCEEDED:
                return NonTerminationWitness(word, valuation, budget, tried)
        return None

    for x in range(1, grid + 1):
        for y in range(1, grid + 1):
            for z in range(1, grid + 1):
                if tried >= max_samples:
                    return None
                hit = attempt(Valuation((Fraction(x), Fraction(y), Fraction(z))))
                if hit:
                    return hit
    for valuation in sample_valuations(max_samples, seed):
        if tried >= max_samples:
            break
        hit = attempt(valuation)
        if hit:
            return hit
    return None
