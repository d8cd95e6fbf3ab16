"""Nonsingular cones and fans in dimension 3, star moves, and common refinements.

A cone is an ordered triple of primitive integer rays forming a lattice
basis (|det| = 1); a fan is a finite set of such cones with pairwise
face-compatible intersections, identified by unordered generator sets.
Star subdivisions insert the ray a+b across every cone having the 2-face
(a, b); star assemblies are their exact inverses.  The common refinement
of two subdivision chains of one cone is built through the word machinery:
every local subsequence of the assembly-then-subdivision global sequence
is enumerated, each completed factorization's positive part is replayed
from its anchor cone, and the resulting generator sets are the maximal
cones.  All arithmetic is exact (ints and Fractions).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from random import Random
from typing import Iterable, NamedTuple, Optional, Sequence

from .words import E, IntMatrix3, Symbol, Word, eval_word, format_word
from .engine import strong_parts
from .enumerator import DEFAULT_BRANCH_STEPS, enumerate_factorizations

Vec = tuple[int, int, int]


class FanError(ValueError):
    pass


def primitive(v: Sequence[int]) -> Vec:
    x, y, z = int(v[0]), int(v[1]), int(v[2])
    g = gcd(gcd(abs(x), abs(y)), abs(z))
    if g == 0:
        raise FanError("the zero vector is not a ray")
    return (x // g, y // g, z // g)


def _add(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


@dataclass(frozen=True)
class Cone:
    """Ordered triple of rays generating a unimodular cone."""

    rays: tuple[Vec, Vec, Vec]

    def __post_init__(self):
        rays = tuple(primitive(r) for r in self.rays)
        object.__setattr__(self, "rays", rays)
        if abs(self.matrix().det()) != 1:
            raise FanError(f"generators {rays} are not a lattice basis")

    def matrix(self) -> IntMatrix3:
        return IntMatrix3.from_columns(*self.rays)

    def key(self) -> frozenset:
        return frozenset(self.rays)

    def coords(self, point: Sequence) -> tuple:
        """Coordinates of a point in this cone's generator basis (exact)."""
        return self.matrix().inverse().apply(tuple(point))

    def contains(self, point: Sequence, strict: bool = False) -> bool:
        cs = self.coords(point)
        if strict:
            return all(c > 0 for c in cs)
        return all(c >= 0 for c in cs)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays)

    def interior_point(self) -> Vec:
        return _add(_add(self.rays[0], self.rays[1]), self.rays[2])


def cone_from_matrix(m: IntMatrix3) -> Cone:
    return Cone(tuple(m.columns()))  # type: ignore[arg-type]


UNIT_CONE = Cone(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


class Fan:
    """Finite set of maximal cones; identity ignores generator order."""

    def __init__(self, cones: Iterable[Cone]):
        seen: dict[frozenset, Cone] = {}
        for cone in cones:
            seen.setdefault(cone.key(), cone)
        self.cones: tuple[Cone, ...] = tuple(
            sorted(seen.values(), key=lambda c: sorted(c.rays))
        )

    def __len__(self) -> int:
        return len(self.cones)

    def __iter__(self):
        return iter(self.cones)

    def keys(self) -> frozenset:
        return frozenset(c.key() for c in self.cones)

    def __eq__(self, other) -> bool:
        return isinstance(other, Fan) and self.keys() == other.keys()

    def __hash__(self) -> int:
        return hash(self.keys())

    def rays(self) -> set[Vec]:
        out: set[Vec] = set()
        for cone in self.cones:
            out.update(cone.rays)
        return out

    def cones_with_ray(self, ray: Vec) -> list[Cone]:
        ray = primitive(ray)
        return [c for c in self.cones if ray in c.rays]

    def validate(self, check_faces: bool = True) -> list[str]:
        """Invariant check; returns a list of problems (empty when valid)."""
        problems = []
        if check_faces:
            cones = self.cones
            for s in range(len(cones)):
                for t in range(s + 1, len(cones)):
                    if not _face_compatible(cones[s], cones[t]):
                        problems.append(
                            f"cones {cones[s].rays} and {cones[t].rays} do not meet in a common face"
                        )
        return problems


# -- exact face compatibility --------------------------------------------------


def _cross(u: Vec, v: Vec) -> Vec:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _inward_normals(cone: Cone) -> tuple[Vec, Vec, Vec]:
    """Rows of the inverse matrix: x in cone iff all <n_t, x> >= 0."""
    return cone.matrix().inverse().rows


def _in_span_nonneg(point: Vec, gens: tuple[Vec, ...]) -> bool:
    """Is the point a nonnegative rational combination of <= 2 independent gens?"""
    if point == (0, 0, 0):
        return True
    if not gens:
        return False
    if len(gens) == 1:
        g = gens[0]
        # point = a*g with a >= 0
        ratios = set()
        for p, q in zip(point, g):
            if q == 0:
                if p != 0:
                    return False
            else:
                ratios.add(Fraction(p, q))
        return len(ratios) == 1 and next(iter(ratios)) >= 0
    g1, g2 = gens[0], gens[1]
    # solve point = a*g1 + b*g2 over the rationals
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            det = g1[r1] * g2[r2] - g1[r2] * g2[r1]
            if det == 0:
                continue
            a = Fraction(point[r1] * g2[r2] - point[r2] * g2[r1], det)
            b = Fraction(g1[r1] * point[r2] - g1[r2] * point[r1], det)
            third = 3 - r1 - r2
            if a * g1[third] + b * g2[third] != point[third]:
                return False
            return a >= 0 and b >= 0
    return False


def _face_compatible(c1: Cone, c2: Cone) -> bool:
    """The intersection of the two cones is exactly the face their common rays span.

    Extreme rays of the intersection are generators of one cone lying in the
    other, or lines where a facet of one meets a facet of the other; each
    must already lie in the span of the common generators.
    """
    common = tuple(set(c1.rays) & set(c2.rays))
    candidates: list[Vec] = []
    for r in c1.rays:
        if c2.contains(r):
            candidates.append(r)
    for r in c2.rays:
        if c1.contains(r):
            candidates.append(r)
    for n1 in _inward_normals(c1):
        for n2 in _inward_normals(c2):
            d = _cross(n1, n2)
            if d == (0, 0, 0):
                continue
            for cand in (d, (-d[0], -d[1], -d[2])):
                if c1.contains(cand) and c2.contains(cand):
                    candidates.append(primitive(cand))
    return all(_in_span_nonneg(c, common) for c in set(candidates))


# -- star moves ----------------------------------------------------------------


def star_subdivide(fan: Fan, a: Sequence[int], b: Sequence[int]) -> Fan:
    """Split every maximal cone having the 2-face (a, b) at the ray a + b."""
    a, b = primitive(a), primitive(b)
    hit = [c for c in fan.cones if a in c.rays and b in c.rays]
    if not hit:
        raise FanError(f"({a}, {b}) is not a 2-face of any maximal cone")
    new_ray = primitive(_add(a, b))
    out: list[Cone] = [c for c in fan.cones if c not in hit]
    for cone in hit:
        sa, sb = cone.rays.index(a), cone.rays.index(b)
        for replaced in (sa, sb):
            rays = list(cone.rays)
            rays[replaced] = new_ray
            out.append(Cone(tuple(rays)))  # type: ignore[arg-type]
    return Fan(out)


def star_assemble(fan: Fan, ray: Sequence[int]) -> Fan:
    """Undo the smooth star subdivision that inserted ``ray``.

    Fails with a diagnostic when the star of the ray is not the exact result
    of one subdivision (wrong pairing, no summand pair, or leftover cones).
    """
    ray = primitive(ray)
    star = fan.cones_with_ray(ray)
    if not star:
        raise FanError(f"{ray} is not a ray of the fan")
    others = {r for c in star for r in c.rays if r != ray}
    pairs = [
        (a, b) for a in others for b in others if a < b and _add(a, b) == ray
    ]
    if not pairs:
        raise FanError(f"no generator pair of the star sums to {ray}")
    if len(pairs) > 1:
        raise FanError(f"ambiguous assembly at {ray}: candidate faces {pairs}")
    a, b = pairs[0]
    merged: list[Cone] = []
    consumed: set[frozenset] = set()
    for cone in star:
        if cone.key() in consumed:
            continue
        if b in cone.rays:
            present, missing = b, a
        elif a in cone.rays:
            present, missing = a, b
        else:
            raise FanError(f"star cone {cone.rays} contains neither {a} nor {b}")
        rest = [r for r in cone.rays if r not in (ray, a, b)]
        if len(rest) != 1:
            raise FanError(f"star cone {cone.rays} is not a subdivision half at {ray}")
        x = rest[0]
        partner_key = frozenset({ray, missing, x})
        partner = next((c for c in star if c.key() == partner_key), None)
        if partner is None:
            raise FanError(f"star cone {cone.rays} has no merge partner at {ray}")
        consumed.add(cone.key())
        consumed.add(partner_key)
        slot = cone.rays.index(ray)
        rays = list(cone.rays)
        rays[slot] = missing
        merged.append(Cone(tuple(rays)))  # type: ignore[arg-type]
    out = [c for c in fan.cones if ray not in c.rays] + merged
    return Fan(out)


class Move(NamedTuple):
    kind: str  # "subdivide" | "assemble"
    a: Optional[Vec]  # face pair for subdivisions and for recorded assemblies
    b: Optional[Vec]
    ray: Vec


def subdivide_move(a: Sequence[int], b: Sequence[int]) -> Move:
    a, b = primitive(a), primitive(b)
    return Move("subdivide", a, b, primitive(_add(a, b)))


def assemble_move(a: Sequence[int], b: Sequence[int]) -> Move:
    a, b = primitive(a), primitive(b)
    return Move("assemble", a, b, primitive(_add(a, b)))


def apply_move(fan: Fan, move: Move) -> Fan:
    if move.kind == "subdivide":
        return star_subdivide(fan, move.a, move.b)
    return star_assemble(fan, move.ray)


def replace_interior_subdivision(cone: Cone) -> tuple[Move, Move, Move]:
    """Three 2-face moves whose composite is the interior subdivision at v1+v2+v3."""
    v1, v2, v3 = cone.rays
    mid = primitive(_add(v1, v2))
    return (
        subdivide_move(v1, v2),
        subdivide_move(mid, v3),
        assemble_move(v1, v2),
    )


def interior_star_subdivision(cone: Cone) -> Fan:
    """Direct star subdivision of a single cone at the sum of its generators."""
    center = primitive(cone.interior_point())
    out = []
    for slot in range(3):
        rays = list(cone.rays)
        rays[slot] = center
        out.append(Cone(tuple(rays)))  # type: ignore[arg-type]
    return Fan(out)


# -- matrix encoding of local moves --------------------------------------------


def local_subdivision_symbol(parent: Cone, child: Cone) -> tuple[Symbol, Optional[Symbol]]:
    """The letter (and cyclic reordering, if needed) encoding parent -> child.

    Finds E_ij with child_matrix * P = parent_matrix * E_ij over the three
    cyclic column rotations P; the reordering is returned as an R letter
    (None when the orderings already agree).
    """
    from .words import R

    target = parent.matrix().inverse() * child.matrix()
    rotations: list[Optional[Symbol]] = [None, R(3, 2, 1), R(2, 3, 1)]
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            for rot in rotations:
                candidate = eval_word((E(i, j),) + ((rot,) if rot else ()))
                if candidate == target:
                    return E(i, j), rot
    raise FanError(
        f"{child.rays} is not a local subdivision half of {parent.rays}"
    )


# -- global sequences and local subsequences ------------------------------------


@dataclass(frozen=True)
class GlobalSequence:
    fans: tuple[Fan, ...]
    moves: tuple[Move, ...]


def chain_subdivide(cone: Cone, faces: Sequence[tuple[Sequence[int], Sequence[int]]]) -> list[Fan]:
    """Fans of the subdivision chain starting at the single-cone fan."""
    fans = [Fan([cone])]
    for a, b in faces:
        fans.append(star_subdivide(fans[-1], a, b))
    return fans


def assembly_subdivision_sequence(
    cone: Cone,
    left_faces: Sequence[tuple[Sequence[int], Sequence[int]]],
    right_faces: Sequence[tuple[Sequence[int], Sequence[int]]],
) -> GlobalSequence:
    """Global sequence: undo the left chain (assemblies), then apply the right."""
    left = chain_subdivide(cone, left_faces)
    fans = list(reversed(left))
    moves = [
        assemble_move(a, b) for a, b in reversed([tuple(f) for f in left_faces])
    ]
    for a, b in right_faces:
        moves.append(subdivide_move(a, b))
        fans.append(star_subdivide(fans[-1], a, b))
    return GlobalSequence(tuple(fans), tuple(moves))


@dataclass(frozen=True)
class LocalSubsequence:
    cones: tuple[Cone, ...]
    word: Word
    anchor: Cone


def _forward_step(cone: Cone, move: Move, enumerate_halves: bool, ref: Optional[Vec]):
    """Successor cones of a local subsequence across one move, with letters."""
    rays = cone.rays
    if move.kind == "assemble":
        if move.ray not in rays:
            return [(cone, None)]
        slot = rays.index(move.ray)
        partner = move.b if move.b in rays else move.a
        if partner not in rays:
            raise FanError(f"assembly face {move.a},{move.b} missing from {rays}")
        other = move.a if partner == move.b else move.b
        new_rays = list(rays)
        new_rays[slot] = other
        parent = Cone(tuple(new_rays))
        letter = E(rays.index(partner) + 1, slot + 1, -1)
        return [(parent, letter)]
    # subdivision
    if move.a not in rays or move.b not in rays:
        return [(cone, None)]
    sa, sb = rays.index(move.a), rays.index(move.b)
    halves = []
    for replaced, kept in ((sb, sa), (sa, sb)):
        new_rays = list(rays)
        new_rays[replaced] = move.ray
        halves.append((Cone(tuple(new_rays)), E(kept + 1, replaced + 1)))
    if enumerate_halves:
        return halves
    if ref is not None:
        chosen = [h for h in halves if h[0].contains(ref)]
        if chosen:
            return [chosen[0]]
    return [halves[0]]


def extract_local_subsequences(
    seq: GlobalSequence,
    fan_index: int,
    anchor: Cone,
    enumerate_halves: bool = False,
) -> tuple[LocalSubsequence, ...]:
    """Extend a cone choice to local subsequences across the whole sequence.

    Backward extension (toward earlier fans) is unique through subdivisions;
    where a choice exists (backward assemblies, forward subdivisions) the
    deterministic mode picks the half containing the anchor's interior point
    and the enumeration mode explores both.
    """
    if anchor.key() not in seq.fans[fan_index].keys():
        raise FanError("anchor cone does not belong to the indicated fan")
    ref = anchor.interior_point()

    # backward: moves fan_index-1 .. 0, inverted
    back_states: list[tuple[list[Cone], list[Symbol]]] = [([anchor], [])]
    for t in range(fan_index - 1, -1, -1):
        move = seq.moves[t]
        inverse = Move(
            "assemble" if move.kind == "subdivide" else "subdivide",
            move.a,
            move.b,
            move.ray,
        )
        next_states = []
        for cones, letters in back_states:
            for nxt, letter in _forward_step(cones[0], inverse, enumerate_halves, ref):
                prepended = (
                    [letter.inverse()] + letters if letter is not None else list(letters)
                )
                next_states.append(([nxt] + cones, prepended))
        back_states = next_states

    out: list[LocalSubsequence] = []
    for cones, letters in back_states:
        fwd_states = [(list(cones), list(letters))]
        for t in range(fan_index, len(seq.moves)):
            move = seq.moves[t]
            next_states = []
            for cs, ls in fwd_states:
                for nxt, letter in _forward_step(cs[-1], move, enumerate_halves, ref):
                    next_states.append(
                        (cs + [nxt], ls + ([letter] if letter is not None else []))
                    )
            fwd_states = next_states
        for cs, ls in fwd_states:
            out.append(LocalSubsequence(tuple(cs), tuple(ls), cs[0]))
    return tuple(out)


# -- common refinement ----------------------------------------------------------


class RefinementError(RuntimeError):
    pass


@dataclass(frozen=True)
class RefinementResult:
    fan: Fan
    factorization_total: int
    per_word: tuple[tuple[Word, int], ...]


def build_common_refinement(
    cone: Cone,
    left_faces: Sequence[tuple[Sequence[int], Sequence[int]]],
    right_faces: Sequence[tuple[Sequence[int], Sequence[int]]],
    budget_per_branch: int = DEFAULT_BRANCH_STEPS,
) -> RefinementResult:
    """Common refinement of the two subdivision chains of ``cone``.

    Enumerates every local subsequence word of the induced global sequence,
    runs the full choice-tree enumeration on each, and replays each completed
    factorization's positive part from its anchor to produce a maximal cone.
    The cone count must equal the total number of completed factorizations.
    """
    seq = assembly_subdivision_sequence(cone, left_faces, right_faces)
    cones: dict[frozenset, Cone] = {}
    per_word: list[tuple[Word, int]] = []
    total = 0
    for anchor in seq.fans[0].cones:
        for sub in extract_local_subsequences(seq, 0, anchor, enumerate_halves=True):
            res = enumerate_factorizations(sub.word, budget_per_branch=budget_per_branch)
            if res.exceeded_count or res.incomplete:
                raise RefinementError(
                    f"enumeration of local word {format_word(sub.word)!r} did not finish"
                )
            per_word.append((sub.word, res.completed_count))
            total += res.completed_count
            base = sub.anchor.matrix()
            for fact in res.completed:
                prefix, _tail = strong_parts(fact.word)
                top = cone_from_matrix(base * eval_word(prefix))
                cones[top.key()] = top
    fan = Fan(cones.values())
    if len(fan) != total:
        raise RefinementError(
            f"{total} completed factorizations produced only {len(fan)} distinct cones"
        )
    return RefinementResult(fan, total, tuple(per_word))


@dataclass(frozen=True)
class RefinementReport:
    ok: bool
    checks: tuple[tuple[str, bool, str], ...]


def verify_refinement(
    refinement: Fan,
    cone: Cone,
    left_faces: Sequence[tuple[Sequence[int], Sequence[int]]],
    right_faces: Sequence[tuple[Sequence[int], Sequence[int]]],
    samples: int = 1000,
    seed: int = 20230817,
) -> RefinementReport:
    """Geometric validation of a refinement, independent of how it was built.

    (a) every cone is unimodular and the fan is face-compatible, (b) random
    rational interior points of the base cone land in exactly one refinement
    cone, (c) every refinement cone lies inside exactly one maximal cone of
    each of the two subdivided fans.
    """
    checks: list[tuple[str, bool, str]] = []

    problems = refinement.validate()
    checks.append(("fan_invariants", not problems, "; ".join(problems) or "ok"))

    rng = Random(seed)
    bad_points = 0
    for _ in range(samples):
        while True:
            lams = [Fraction(rng.randint(1, 9973), rng.randint(1, 97)) for _ in range(3)]
            point = tuple(
                sum(l * r[t] for l, r in zip(lams, cone.rays)) for t in range(3)
            )
            hits = 0
            on_boundary = False
            for c in refinement.cones:
                cs = c.coords(point)
                if all(x > 0 for x in cs):
                    hits += 1
                elif all(x >= 0 for x in cs):
                    on_boundary = True
            if on_boundary and hits == 0:
                continue  # degenerate sample on an interior wall; redraw
            break
        if hits != 1:
            bad_points += 1
    checks.append(
        (
            "support_partition",
            bad_points == 0,
            f"{bad_points}/{samples} interior samples not in exactly one cone",
        )
    )

    left_fan = chain_subdivide(cone, left_faces)[-1]
    right_fan = chain_subdivide(cone, right_faces)[-1]
    for name, target in (("refines_left", left_fan), ("refines_right", right_fan)):
        bad = 0
        for c in refinement.cones:
            containers = sum(1 for big in target.cones if big.contains_cone(c))
            if containers != 1:
                bad += 1
        checks.append((name, bad == 0, f"{bad} cones not inside exactly one target cone"))

    ok = all(passed for _, passed, _ in checks)
    return RefinementReport(ok, tuple(checks))


# -- serialization ---------------------------------------------------------------


def fan_to_text(fan: Fan) -> str:
    """One cone per line, three integer vectors."""
    lines = []
    for cone in fan.cones:
        lines.append("  ".join(" ".join(str(x) for x in ray) for ray in cone.rays))
    return "\n".join(lines) + "\n"


def fan_from_text(text: str) -> Fan:
    cones = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        nums = [int(tok) for tok in line.split()]
        if len(nums) != 9:
            raise FanError(f"expected 9 integers per cone line, got {len(nums)}")
        cones.append(Cone((tuple(nums[0:3]), tuple(nums[3:6]), tuple(nums[6:9]))))  # type: ignore[arg-type]
    return Fan(cones)
