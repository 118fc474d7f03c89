import numpy as np
import pytest
from hypothesis import given, strategies as st

from circsep.algebra import (
    ModRing,
    PermutationZd,
    binom2,
    eta_pow,
    eta_table,
    gf_add_table,
    invert_permutation,
    is_prime,
    mod_inverse,
    negate_permutation,
)

PRIMES = [2, 3, 5, 7, 11]


@pytest.mark.parametrize("n,expected", [(0, False), (1, False), (2, True), (4, False), (9, False),
                                        (11, True), (97, True), (91, False)])
def test_is_prime(n, expected):
    assert is_prime(n) is expected


@pytest.mark.parametrize("d", PRIMES)
def test_mod_inverse_exhaustive(d):
    for x in range(1, d):
        assert (x * mod_inverse(x, d)) % d == 1


def test_mod_inverse_rejects_zero_and_composite():
    with pytest.raises(ZeroDivisionError):
        mod_inverse(0, 5)
    with pytest.raises(ValueError):
        mod_inverse(2, 4)


def test_mod_ring_ops():
    ring = ModRing(5)
    assert ring.add(3, 4) == 2
    assert ring.neg(2) == 3
    assert ring.mul(3, 4) == 2
    assert ring.inv(3) == 2
    assert list(ring.elements()) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("k,expected", [(0, 0), (1, 0), (2, 1), (3, 3), (4, 6), (7, 21)])
def test_binom2(k, expected):
    assert binom2(k) == expected


@pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
def test_eta_table_is_exact_root_of_unity(d):
    tab = eta_table(d)
    np.testing.assert_allclose(tab, np.exp(2j * np.pi * np.arange(d) / d), atol=1e-15)
    assert not tab.flags.writeable
    # quarter turns are exact
    if d == 4:
        assert tab[1] == 1j and tab[2] == -1


def test_eta_pow_negative_exponent():
    assert eta_pow(3, -1) == pytest.approx(np.conj(eta_pow(3, 1)))
    assert eta_pow(2, 5) == -1


class TestPermutation:
    def test_requires_fixed_zero(self):
        with pytest.raises(ValueError, match="fix 0"):
            PermutationZd((1, 0, 2))

    def test_requires_bijection(self):
        with pytest.raises(ValueError, match="not a permutation"):
            PermutationZd((0, 1, 1))

    def test_json_round_trip(self):
        p = PermutationZd((0, 2, 1, 4, 3))
        assert PermutationZd.from_json(p.to_json()) == p

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_inverse_composes_to_identity(self, d):
        p = PermutationZd.random(d, np.random.default_rng(d))
        q = invert_permutation(p)
        assert [q(p(x)) for x in range(d)] == list(range(d))

    def test_negate(self):
        p = PermutationZd((0, 2, 1, 4, 3))
        assert negate_permutation(p).values == (0, 3, 4, 1, 2)

    @given(st.sampled_from([3, 5, 7]), st.integers(0, 2**32 - 1))
    def test_random_is_valid(self, d, seed):
        p = PermutationZd.random(d, np.random.default_rng(seed))
        assert p(0) == 0 and sorted(p.values) == list(range(d))


@pytest.mark.parametrize("q", [4, 8, 9])
def test_gf_table_is_abelian_group(q):
    t = gf_add_table(q)
    tab = t.table
    np.testing.assert_array_equal(tab, tab.T)
    assert (tab[0] == np.arange(q)).all()
    for row in tab:  # Latin square
        assert sorted(row) == list(range(q))
    for x in range(q):
        assert t.add(x, t.neg(x)) == 0
    for x in range(q):
        for y in range(q):
            for z in range(q):
                assert tab[tab[x, y], z] == tab[x, tab[y, z]]


def test_gf4_matches_displayed_table():
    # rows listed top-down as y = lambda+1, lambda, 1, 0; columns x = 0, 1, lambda, lambda+1
    displayed = [
        ["lambda+1", "lambda", "1", "0"],
        ["lambda", "lambda+1", "0", "1"],
        ["1", "0", "lambda+1", "lambda"],
        ["0", "1", "lambda", "lambda+1"],
    ]
    t = gf_add_table(4)
    for row, y in zip(displayed, [3, 2, 1, 0]):
        assert [t.label(t.add(y, x)) for x in range(4)] == row


def test_gf_characteristic_two_is_self_inverse():
    t = gf_add_table(8)
    assert all(t.add(x, x) == 0 for x in range(8))


def test_gf_unsupported_order():
    with pytest.raises(ValueError):
        gf_add_table(6)
