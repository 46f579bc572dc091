from fractions import Fraction

import pytest

from diextract.coins import elias_extract, peres_extract, vn_extract
from diextract.dice import DieDistribution, build_tree, sequence_prob
from diextract.oracle import (
    MUTANTS,
    CapExceededError,
    ExactDist,
    class_counts,
    enumerate_coin,
    enumerate_die,
    enumerate_phi,
    verify_lemma1_counts,
    verify_uniformity,
)

EXTRACTORS = [vn_extract, elias_extract, peres_extract]
RHO3 = DieDistribution.parse(["1/5", "3/10", "1/2"])


def test_enumerate_coin_hand_values():
    assert enumerate_coin(vn_extract, 2, Fraction(1, 2)).entries == {
        "": Fraction(1, 2), "0": Fraction(1, 4), "1": Fraction(1, 4)}
    assert enumerate_coin(vn_extract, 2, Fraction(1, 3)).entries == {
        "": Fraction(5, 9), "0": Fraction(2, 9), "1": Fraction(2, 9)}
    for psi in EXTRACTORS:
        assert enumerate_coin(psi, 0, Fraction(1, 3)).entries == {"": 1}


def test_enumerate_coin_cap_and_bias_validation(monkeypatch):
    with pytest.raises(CapExceededError):
        enumerate_coin(vn_extract, 15, Fraction(1, 2))
    with pytest.raises(ValueError):
        enumerate_coin(vn_extract, 2, Fraction(1))
    monkeypatch.setenv("DIEXTRACT_CAP", "3")
    with pytest.raises(CapExceededError):
        enumerate_coin(vn_extract, 4, Fraction(1, 2))


@pytest.mark.parametrize("psi", EXTRACTORS)
@pytest.mark.parametrize("n", [0, 3, 8, 12])
def test_distributions_conserve_mass(psi, n):
    assert enumerate_coin(psi, n, Fraction(7, 10)).total() == 1


@pytest.mark.parametrize("psi", EXTRACTORS)
def test_coin_oracle_agrees_with_class_counts(psi):
    # P[Y] = sum over classes of p^k1 (1-p)^k2 * #preimages
    p = Fraction(1, 3)
    for n in range(13):
        counts = class_counts(psi, n)
        dist = enumerate_coin(psi, n, p)
        closed = {}
        for heads, counter in counts.items():
            for y, c in counter.items():
                closed[y] = closed.get(y, 0) + c * p**heads * (1 - p) ** (n - heads)
        assert closed == dist.entries


def test_verify_uniformity_cases():
    assert verify_uniformity(enumerate_coin(vn_extract, 6, Fraction(7, 10))).ok
    bad = verify_uniformity(ExactDist({"0": Fraction(1, 3), "1": Fraction(1, 4), "": Fraction(5, 12)}))
    assert not bad.ok
    assert bad.violations[0][0] == 1
    assert verify_uniformity(ExactDist({"": Fraction(1)})).ok
    missing = verify_uniformity(ExactDist({"0": Fraction(1, 2), "": Fraction(1, 2)}))
    assert not missing.ok and missing.violations[0][2] == "1"


def test_by_length_common_probability():
    rep = verify_uniformity(enumerate_coin(vn_extract, 2, Fraction(1, 3)))
    assert rep.by_length == {0: Fraction(5, 9), 1: Fraction(2, 9)}


def test_lemma1_examples():
    assert verify_lemma1_counts(elias_extract, 4) == (True, None)
    for n in range(13):
        assert verify_lemma1_counts(vn_extract, n)[0]


@pytest.mark.parametrize("name", sorted(MUTANTS))
def test_mutants_are_caught(name):
    ok, witness = verify_lemma1_counts(MUTANTS[name], 6)
    assert not ok
    k1, k2, y, y2, c1, c2 = witness
    assert k1 + k2 == 6 and len(y) == len(y2) and c1 != c2
    rep = verify_uniformity(enumerate_coin(MUTANTS[name], 6, Fraction(1, 3)))
    assert not rep.ok and rep.violations


def test_vn_mutant_documented_witness():
    ok, witness = verify_lemma1_counts(MUTANTS["vn-hh0"], 6)
    assert not ok
    assert witness[2:4] == ("0", "1")


def test_enumerate_die_reduces_to_coin():
    rho = DieDistribution.parse(["2/3", "1/3"])  # face 1 is H with p = 1/3
    for psi in EXTRACTORS:
        for n in range(7):
            assert enumerate_die(psi, 2, n, rho).entries == enumerate_coin(psi, n, Fraction(1, 3)).entries


def test_enumerate_die_m3_elias_uniform():
    d = enumerate_die(elias_extract, 3, 4, RHO3)
    assert d.total() == 1
    assert verify_uniformity(d).ok


def test_enumerate_die_workers_do_not_change_result():
    a = enumerate_die(peres_extract, 3, 4, RHO3)
    b = enumerate_die(peres_extract, 3, 4, RHO3, workers=2)
    assert a == b


def test_enumerate_die_cap():
    with pytest.raises(CapExceededError):
        enumerate_die(vn_extract, 5, 6, DieDistribution.parse(["1/5"] * 5), cap=1000)


def test_die_class_probability_matches_product_formula():
    import itertools

    groups = {}
    for x in itertools.product(range(3), repeat=4):
        tree = build_tree(x, 3)
        key = tuple(sorted(lab) for lab in tree.labels)
        groups.setdefault(tuple(map(tuple, key)), set()).add(sequence_prob(x, RHO3))
    assert all(len(v) == 1 for v in groups.values())


def test_enumerate_phi_k1_half():
    dist, stats = enumerate_phi(1, Fraction(1, 2), Fraction(1, 2**30))
    assert dist.residual < Fraction(1, 2**30)
    assert verify_uniformity(dist).ok
    assert all(s.full_length_share >= Fraction(1, 2) for s in stats)
    assert dist.total() == 1


@pytest.mark.parametrize("depth", [5, 12, 30])
def test_enumerate_phi_truncation_residual(depth):
    p = Fraction(1, 3)
    with pytest.raises(CapExceededError) as info:
        enumerate_phi(2, p, Fraction(1, 2**60), max_depth=depth)
    dist, _ = info.value.partial
    assert dist.residual >= p**depth + (1 - p) ** depth
    assert dist.total() == 1


def test_enumerate_phi_per_set_stats_exact():
    _, stats = enumerate_phi(3, Fraction(1, 2), Fraction(1, 2**20))
    for s in stats:
        assert s.full_length_share == Fraction((s.size >> 3) << 3, s.size)


def test_enumerate_phi_limits():
    with pytest.raises(CapExceededError):
        enumerate_phi(5, Fraction(1, 2), Fraction(1, 2**10))
    with pytest.raises(ValueError):
        enumerate_phi(2, Fraction(1, 2), 0)
    with pytest.raises(CapExceededError):
        enumerate_phi(2, Fraction(1, 2), Fraction(1, 2**30), max_depth=5)
