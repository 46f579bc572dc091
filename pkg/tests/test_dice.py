import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from diextract.coins import elias_extract, peres_extract, vn_extract
from diextract.dice import (
    BinarizationTree,
    DieDistribution,
    DieSeq,
    MalformedTreeError,
    build_tree,
    conditional_probs,
    depth_for,
    empty_tree,
    face_bits,
    generalized_extract,
    prefixes,
    reconstruct,
    sequence_prob,
)
from diextract.oracle import enumerate_die, verify_uniformity

EXAMPLE = [0, 1, 2, 1, 1, 2, 2, 1, 0]


def test_face_bits():
    assert [face_bits(f, 3) for f in range(3)] == ["TT", "TH", "HT"]
    assert face_bits(0, 2) == "T"
    assert face_bits(5, 8) == "HTH"
    with pytest.raises(ValueError):
        face_bits(3, 3)


def test_depth_and_prefix_order():
    assert [depth_for(m) for m in (2, 3, 4, 5, 8, 9)] == [0, 1, 1, 2, 2, 3]
    assert prefixes(2) == ["", "T", "H", "TT", "TH", "HT", "HH"]


def test_build_tree_example():
    tree = build_tree(EXAMPLE, 3)
    assert tree.label("") == "TTHTTHHTT"
    assert tree.label("T") == "THHHHT"
    assert tree.label("H") == "TTT"


def naive_labels(faces, m):
    """Label of prefix g = digit after g in each word that starts with g."""
    words = [face_bits(f, m) for f in faces]
    return {g: "".join(w[len(g)] for w in words if w.startswith(g)) for g in prefixes(depth_for(m))}


@pytest.mark.parametrize("m", [3, 5, 7, 8])
def test_build_tree_matches_prefix_definition(m):
    rng = random.Random(m)
    for _ in range(50):
        faces = [rng.randrange(m) for _ in range(rng.randrange(12))]
        tree = build_tree(faces, m)
        assert dict(iter(tree)) == naive_labels(faces, m)


def test_reconstruct_example_and_empty():
    assert reconstruct(build_tree(EXAMPLE, 3), 3).faces == tuple(EXAMPLE)
    assert reconstruct(empty_tree(5), 5).faces == ()


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_round_trip_exhaustive(m):
    for n in range(6):
        for x in itertools.product(range(m), repeat=n):
            assert reconstruct(build_tree(x, m), m).faces == x


@given(st.integers(2, 40).flatmap(lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m - 1), max_size=60))))
def test_round_trip_random(case):
    m, faces = case
    assert reconstruct(build_tree(faces, m), m).faces == tuple(faces)


def test_tree_invariants():
    tree = build_tree(EXAMPLE, 3)
    tree.check_consistency()
    assert len(tree.labels) == 2 ** (tree.depth + 1) - 1


def test_reconstruct_rejects_inconsistent_trees():
    with pytest.raises(MalformedTreeError):
        reconstruct(BinarizationTree(1, ("TH", "TT", "")), 3)  # H-child too short
    with pytest.raises(MalformedTreeError):
        reconstruct(BinarizationTree(1, ("H", "", "H")), 3)  # encodes face 3
    with pytest.raises(MalformedTreeError):
        reconstruct(BinarizationTree(0, ("T",)), 3)


def test_die_seq_validation():
    with pytest.raises(ValueError):
        DieSeq((0, 3), 3)
    with pytest.raises(ValueError):
        DieSeq((), 1)
    assert len(DieSeq((0, 1, 2), 3)) == 3


def test_generalized_binary_is_plain_extractor():
    rng = random.Random(0)
    for _ in range(100):
        faces = [rng.randrange(2) for _ in range(rng.randrange(30))]
        coins = "".join("H" if f else "T" for f in faces)
        for psi in (vn_extract, elias_extract, peres_extract):
            assert generalized_extract(faces, psi, 2) == psi(coins)


def test_generalized_example_by_composition():
    expected = elias_extract("TTHTTHHTT") + elias_extract("THHHHT") + elias_extract("TTT")
    assert generalized_extract(EXAMPLE, elias_extract, 3) == expected
    assert generalized_extract(DieSeq(tuple(EXAMPLE), 3), elias_extract) == expected


def test_generalized_golden_vectors():
    # frozen from the compositions above so traversal changes show up
    assert generalized_extract(EXAMPLE, elias_extract, 3) == "11101010"
    assert generalized_extract(EXAMPLE, peres_extract, 3) == "10101011"
    assert generalized_extract(EXAMPLE, vn_extract, 3) == "10101"


def test_generalized_vn_uniform_m3_n4():
    rho = DieDistribution.parse(["1/5", "3/10", "1/2"])
    assert verify_uniformity(enumerate_die(vn_extract, 3, 4, rho)).ok


def test_conditional_probs_example():
    q = conditional_probs(DieDistribution.parse(["0.2", "0.3", "0.5"]))
    assert q[("", "T")] == Fraction(1, 2)
    assert q[("T", "T")] == Fraction(2, 5)
    assert q[("H", "T")] == 1
    assert not q.unreachable


def test_conditional_probs_uniform_and_hand_values():
    q = conditional_probs([Fraction(1, 4)] * 4)
    assert set(q.q.values()) == {Fraction(1, 2)}
    q = conditional_probs([Fraction(1, 7), Fraction(2, 7), Fraction(4, 7)])
    assert q[("", "T")] == Fraction(3, 7)
    assert q[("T", "T")] == Fraction(1, 3)
    assert q[("H", "T")] == 1


def test_conditional_probs_flags_unreachable():
    q = conditional_probs([Fraction(1, 2), Fraction(1, 2), Fraction(0), Fraction(0)])
    assert q.unreachable == {"H"}
    for g in prefixes(1):
        if g not in q.unreachable:
            assert q[(g, "T")] + q[(g, "H")] == 1


def test_conditional_probs_real_mode():
    q = conditional_probs(DieDistribution((0.2, 0.3, 0.5)))
    assert q[("T", "T")] == pytest.approx(0.4)


def test_die_distribution_validation():
    with pytest.raises(ValueError):
        DieDistribution((Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValueError):
        DieDistribution((0.5, 0.6))
    DieDistribution((0.5, 0.5 + 1e-12))


def test_sequence_prob_examples():
    rho = DieDistribution.parse(["1/5", "3/10", "1/2"])
    assert sequence_prob([2], rho) == Fraction(1, 2)
    assert sequence_prob([0, 1, 2], rho) == Fraction(3, 100)
    zero = DieDistribution.parse(["1/2", "1/2", "0"])
    assert sequence_prob([0, 2], zero) == 0
    with pytest.raises(ValueError):
        sequence_prob([0], DieDistribution((0.2, 0.3, 0.5)))


def _distinct_perms(s):
    return sorted({"".join(p) for p in itertools.permutations(s)})


@pytest.mark.parametrize("m,n", [(3, 5), (4, 4), (5, 3)])
def test_class_members_share_probability(m, n):
    rho = DieDistribution(tuple(Fraction(i + 1, m * (m + 1) // 2) for i in range(m)))
    for x in itertools.product(range(m), repeat=n):
        tree = build_tree(x, m)
        base = sequence_prob(x, rho)
        for labels in itertools.product(*(_distinct_perms(lab) for lab in tree.labels)):
            y = reconstruct(BinarizationTree(tree.depth, labels), m)
            assert sequence_prob(y.faces, rho) == base


def test_round_trip_ten_thousand_random_instances():
    rng = random.Random(2024)
    for _ in range(10_000):
        m = rng.randrange(2, 33)
        faces = [rng.randrange(m) for _ in range(rng.randrange(6, 40))]
        assert reconstruct(build_tree(faces, m), m).faces == tuple(faces)
