"""Cones, fans, star moves, local encoding, and common refinements."""

import pytest

from starfactor import (
    Cone,
    E,
    Fan,
    FanError,
    UNIT_CONE,
    assembly_subdivision_sequence,
    build_common_refinement,
    extract_local_subsequences,
    fan_from_text,
    fan_to_text,
    format_word,
    interior_star_subdivision,
    local_subdivision_symbol,
    replace_interior_subdivision,
    star_assemble,
    star_subdivide,
    verify_refinement,
)
from starfactor.fans import apply_move, chain_subdivide, cone_from_matrix, primitive

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def chain_faces(m, base, apex=E1):
    out, prev = [], base
    for _ in range(m):
        out.append((apex, prev))
        prev = tuple(a + b for a, b in zip(apex, prev))
    return out


def test_cone_requires_lattice_basis():
    with pytest.raises(FanError):
        Cone((E1, E2, (1, 1, 0)))
    with pytest.raises(FanError):
        Cone((E1, E2, (0, 0, 0)))
    assert Cone((E1, E2, (0, 2, 2))).rays[2] == (0, 1, 1)  # made primitive


def test_star_subdivide_unit_cone():
    fan = star_subdivide(Fan([UNIT_CONE]), E1, E2)
    assert fan.keys() == {
        frozenset({(1, 1, 0), E2, E3}),
        frozenset({E1, (1, 1, 0), E3}),
    }
    for cone in fan.cones:
        assert abs(cone.matrix().det()) == 1
    assert not fan.validate()


def test_star_subdivide_shared_face_splits_both():
    neighbour = Cone((E1, E2, (0, 0, -1)))
    fan = Fan([UNIT_CONE, neighbour])
    out = star_subdivide(fan, E1, E2)
    assert len(out) == 4


def test_star_subdivide_missing_face():
    fan = star_subdivide(Fan([UNIT_CONE]), E1, E2)
    with pytest.raises(FanError):
        star_subdivide(fan, E1, E2)  # (e1, e2) is no longer a 2-face


def test_star_assemble_inverts_subdivision():
    fan = Fan([UNIT_CONE])
    divided = star_subdivide(fan, E1, E2)
    assert star_assemble(divided, (1, 1, 0)) == fan


def test_star_assemble_rejects_original_ray():
    divided = star_subdivide(Fan([UNIT_CONE]), E1, E2)
    with pytest.raises(FanError):
        star_assemble(divided, E3)


def test_star_assemble_rejects_mixed_star():
    # two chained subdivisions: removing the middle ray is not one inverse
    fan = star_subdivide(Fan([UNIT_CONE]), E1, E2)
    fan = star_subdivide(fan, E1, (1, 1, 0))
    with pytest.raises(FanError):
        star_assemble(fan, (1, 1, 0))


def test_star_assemble_four_cone_star():
    # one subdivision that split two adjacent cones assembles back
    neighbour = Cone((E1, E2, (0, 0, -1)))
    fan = Fan([UNIT_CONE, neighbour])
    divided = star_subdivide(fan, E1, E2)
    assert star_assemble(divided, (1, 1, 0)) == fan


def test_replace_interior_subdivision():
    moves = replace_interior_subdivision(UNIT_CONE)
    fan = Fan([UNIT_CONE])
    stages = [fan]
    for move in moves:
        fan = apply_move(fan, move)
        stages.append(fan)
        assert not fan.validate()
    assert fan == interior_star_subdivision(UNIT_CONE)
    assert fan.keys() == {
        frozenset({(1, 1, 1), E2, E3}),
        frozenset({E1, (1, 1, 1), E3}),
        frozenset({E1, E2, (1, 1, 1)}),
    }


def test_local_subdivision_symbol_examples():
    child = cone_from_matrix(UNIT_CONE.matrix() * __import__("starfactor").elem_matrix(1, 2))
    sym, rot = local_subdivision_symbol(UNIT_CONE, child)
    assert sym == E(1, 2) and rot is None
    child = Cone(((1, 1, 0), E2, E3))
    sym, rot = local_subdivision_symbol(UNIT_CONE, child)
    assert sym == E(2, 1) and rot is None
    with pytest.raises(FanError):
        local_subdivision_symbol(UNIT_CONE, Cone(((1, 2, 0), E2, E3)))


def test_local_subdivision_symbol_with_rotation():
    # same half, generators listed in a cyclic rotation of the inherited order
    child = Cone((E3, E1, (1, 1, 0)))
    sym, rot = local_subdivision_symbol(UNIT_CONE, child)
    matrix = UNIT_CONE.matrix() * __import__("starfactor").eval_word(
        (sym,) + ((rot,) if rot else ())
    )
    assert cone_from_matrix(matrix).key() == child.key()


def test_extract_four_local_words():
    seq = assembly_subdivision_sequence(UNIT_CONE, [(E1, E2)], [(E1, E3)])
    words = set()
    for anchor in seq.fans[0].cones:
        for sub in extract_local_subsequences(seq, 0, anchor, enumerate_halves=True):
            words.add(format_word(sub.word))
    assert words == {"E12^-1 E13", "E12^-1 E31", "E21^-1 E13", "E21^-1 E31"}


def test_extract_single_fan_sequence():
    from starfactor.fans import GlobalSequence

    seq = GlobalSequence((Fan([UNIT_CONE]),), ())
    subs = extract_local_subsequences(seq, 0, UNIT_CONE)
    assert len(subs) == 1 and subs[0].word == () and subs[0].cones == (UNIT_CONE,)


def test_extract_backward_from_final_fan():
    seq = assembly_subdivision_sequence(UNIT_CONE, [(E1, E2)], [(E1, E3)])
    final = seq.fans[-1].cones[0]
    subs = extract_local_subsequences(seq, len(seq.fans) - 1, final)
    assert len(subs) == 1
    assert len(subs[0].cones) == len(seq.fans)
    # the word's value carries the anchor-of-fan-0 to the final cone
    anchor = subs[0].cones[0]
    from starfactor import eval_word

    assert (
        cone_from_matrix(anchor.matrix() * eval_word(subs[0].word)).key() == final.key()
    )


def test_refinement_one_one():
    left, right = [(E1, E2)], [(E1, E3)]
    res = build_common_refinement(UNIT_CONE, left, right)
    assert len(res.fan) == 5 and res.factorization_total == 5
    expected = {
        frozenset({E1, (1, 1, 0), (1, 0, 1)}),
        frozenset({(1, 0, 1), (1, 1, 0), (1, 1, 1)}),
        frozenset({(1, 0, 1), (1, 1, 1), E3}),
        frozenset({(1, 1, 0), E2, (1, 1, 1)}),
        frozenset({(1, 1, 1), E2, E3}),
    }
    assert res.fan.keys() == expected
    report = verify_refinement(res.fan, UNIT_CONE, left, right, samples=300)
    assert report.ok, report.checks


def test_refinement_left_empty_is_right_fan():
    right = chain_faces(2, E3)
    res = build_common_refinement(UNIT_CONE, [], right)
    assert res.fan == chain_subdivide(UNIT_CONE, right)[-1]


def test_refinement_two_one():
    left, right = chain_faces(2, E2), chain_faces(1, E3)
    res = build_common_refinement(UNIT_CONE, left, right)
    assert len(res.fan) == res.factorization_total == 10
    report = verify_refinement(res.fan, UNIT_CONE, left, right, samples=300)
    assert report.ok, report.checks


def test_verify_refinement_negative_control():
    left, right = [(E1, E2)], [(E1, E3)]
    res = build_common_refinement(UNIT_CONE, left, right)
    # corrupt: drop one cone and enlarge another's footprint
    broken = Fan([c for c in res.fan.cones][1:] + [UNIT_CONE])
    report = verify_refinement(broken, UNIT_CONE, left, right, samples=100)
    assert not report.ok


def test_fan_validator_catches_overlap():
    overlapping = Fan([UNIT_CONE, Cone(((1, 1, 0), E1, E3))])
    assert overlapping.validate()
    fine = star_subdivide(Fan([UNIT_CONE]), E1, E2)
    assert not fine.validate()


def test_fan_text_round_trip():
    fan = star_subdivide(Fan([UNIT_CONE]), E1, E2)
    assert fan_from_text(fan_to_text(fan)) == fan


def test_primitive():
    assert primitive((2, 4, 6)) == (1, 2, 3)
    assert primitive((0, -2, 0)) == (0, -1, 0)
    with pytest.raises(FanError):
        primitive((0, 0, 0))


def test_extract_deterministic_mode_is_one_enumerated_branch():
    seq = assembly_subdivision_sequence(UNIT_CONE, [(E1, E2)], [(E1, E3)])
    anchor = seq.fans[0].cones[0]
    enumerated = {
        s.word for s in extract_local_subsequences(seq, 0, anchor, enumerate_halves=True)
    }
    chosen = extract_local_subsequences(seq, 0, anchor)
    assert len(chosen) == 1
    assert chosen[0].word in enumerated


def test_refinement_three_three_family_sum():
    from starfactor import enumerate_factorizations
    from starfactor.enumerator import local_family_words

    left, right = chain_faces(3, E2), chain_faces(3, E3)
    res = build_common_refinement(UNIT_CONE, left, right)
    family_sum = sum(
        enumerate_factorizations(w).completed_count for w in local_family_words(3, 3)
    )
    assert len(res.fan) == res.factorization_total == family_sum == 61
    report = verify_refinement(res.fan, UNIT_CONE, left, right, samples=300)
    assert report.ok, report.checks
