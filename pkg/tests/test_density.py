import json

import numpy as np
import pytest

from circsep.algebra import PermutationZd
from circsep.analysis import partial_transpose
from circsep.density import (
    FAMILIES,
    ClassBlocks,
    DensityMatrix,
    NonPsdBlockError,
    ProductEntrySpec,
    bhn_density,
    bhn_density_from_projectors,
    bhn_line_state,
    bhn_line_weights,
    bhn_two_projector,
    build_family,
    divincenzo,
    from_class_blocks,
    general_cr_density,
    horodecki_alpha,
    isotropic,
    mix_with_identity,
    product_entry_density,
    random_circulant,
    random_product_entry_spec,
    to_class_blocks,
    werner,
)


def ket(d, *idx):
    v = np.zeros(d ** len(idx))
    flat = 0
    for i in idx:
        flat = flat * d + i
    v[flat] = 1.0
    return v


def swap(d):
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1
    return f


# -- families against textbook constructions ------------------------------------

@pytest.mark.parametrize("d,lam", [(2, 0.3), (3, 0.25), (5, 0.9)])
def test_isotropic_matches_definition(d, lam):
    phi = sum(ket(d, i, i) for i in range(d)) / np.sqrt(d)
    want = lam * np.outer(phi, phi) + (1 - lam) * np.eye(d * d) / d**2
    np.testing.assert_allclose(isotropic(d, lam).entries, want, atol=1e-15)


@pytest.mark.parametrize("d,p", [(3, 0.0), (3, 0.5), (3, 0.9), (5, 0.3)])
def test_werner_is_partial_transpose_of_swap_mixture(d, p):
    f = swap(d)
    eye = np.eye(d * d)
    state = (1 - p) * (eye + f) / (d * (d + 1)) + p * (eye - f) / (d * (d - 1))
    rho = werner(d, p)
    assert rho.partial_transpose_form
    np.testing.assert_allclose(rho.entries, partial_transpose(state), atol=1e-15)


@pytest.mark.parametrize("b,c", [(0.1, 0.2), (0.2, 0.05), (0.0, 0.0), (1 / 6, 1 / 6)])
def test_divincenzo_is_partial_transpose(b, c):
    d = 3
    a = 1 / d - (b + c) * (d - 1) / 2
    state = sum(a * np.outer(ket(d, i, i), ket(d, i, i)) for i in range(d))
    for i in range(d):
        for j in range(i + 1, d):
            plus = (ket(d, i, j) + ket(d, j, i)) / np.sqrt(2)
            minus = (ket(d, i, j) - ket(d, j, i)) / np.sqrt(2)
            state = state + c * np.outer(plus, plus) + b * np.outer(minus, minus)
    assert np.trace(state) == pytest.approx(1.0)
    np.testing.assert_allclose(divincenzo(d, b, c).entries, partial_transpose(state), atol=1e-15)


def test_divincenzo_rejects_negative_diagonal():
    with pytest.raises(ValueError, match="negative diagonal"):
        divincenzo(3, 0.5, 0.5)


@pytest.mark.parametrize("alpha", [0.0, 2.0, 3.5, 5.0])
def test_horodecki_matches_definition(alpha):
    d = 3
    psi = sum(ket(d, i, i) for i in range(d)) / np.sqrt(d)
    s_plus = sum(np.outer(ket(d, i, (i + 1) % d), ket(d, i, (i + 1) % d)) for i in range(d)) / 3
    s_minus = sum(np.outer(ket(d, (i + 1) % d, i), ket(d, (i + 1) % d, i)) for i in range(d)) / 3
    want = 2 / 7 * np.outer(psi, psi) + alpha / 7 * s_plus + (5 - alpha) / 7 * s_minus
    np.testing.assert_allclose(horodecki_alpha(alpha).entries, want, atol=1e-15)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_bhn_entry_formula_matches_projectors(d):
    rng = np.random.default_rng(d)
    c = rng.uniform(size=(d, d))
    c /= c.sum()
    np.testing.assert_allclose(bhn_density(d, c).entries, bhn_density_from_projectors(d, c), atol=1e-14)


def test_bhn_phi_plus_is_zero_zero():
    d = 3
    phi = sum(ket(d, i, i) for i in range(d)) / np.sqrt(d)
    c = np.zeros((d, d))
    c[0, 0] = 1
    np.testing.assert_allclose(bhn_density(d, c).entries, np.outer(phi, phi), atol=1e-15)


@pytest.mark.parametrize("kw", [dict(s=1, t=0), dict(s=2, t=1), dict(s=0, t=2), dict(vertical=1)])
def test_line_weights_sum_to_one(kw):
    w = bhn_line_weights(5, **kw)
    assert w.sum() == pytest.approx(1.0)
    assert np.count_nonzero(w) == 5


def test_two_projector_limits():
    np.testing.assert_allclose(bhn_two_projector(0, 0).entries, np.eye(9) / 9)
    with pytest.raises(ValueError):
        bhn_two_projector(0.7, 0.7)


def test_mix_with_identity_endpoints():
    rho = isotropic(3, 1.0)
    np.testing.assert_allclose(mix_with_identity(rho, 0).entries, np.eye(9) / 9)
    np.testing.assert_allclose(mix_with_identity(rho, 1).entries, rho.entries)


# -- validation ------------------------------------------------------------------

def test_rejects_non_hermitian():
    m = np.eye(4) / 4 + 0j
    m[0, 1] = 0.1
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(m)


def test_rejects_bad_trace():
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(4) / 2)


def test_rejects_entries_outside_pattern():
    m = np.eye(9) / 9 + 0j
    m[0, 1] = m[1, 0] = 0.01
    with pytest.raises(ValueError, match="outside support"):
        DensityMatrix(m, permutation=PermutationZd.identity(3))


def test_entries_are_read_only():
    rho = isotropic(3, 0.2)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1


@pytest.mark.parametrize("d", [2, 3, 5])
def test_class_blocks_round_trip(d):
    rng = np.random.default_rng(100 + d)
    p = PermutationZd.random(d, rng)
    rho = random_circulant(d, rng, p)
    blocks = to_class_blocks(rho)
    back = from_class_blocks(ClassBlocks.from_json(json.loads(json.dumps(blocks.to_json()))))
    np.testing.assert_allclose(back.entries, rho.entries, atol=1e-15)
    assert back.permutation == p


def test_from_class_blocks_rejects_non_psd_block():
    blocks = np.array([np.eye(3) / 9] * 3, dtype=complex)
    blocks[1] = np.array([[1, 2, 0], [2, 1, 0], [0, 0, 1]]) / 9
    with pytest.raises(NonPsdBlockError) as err:
        from_class_blocks(ClassBlocks(3, PermutationZd.identity(3), blocks))
    assert err.value.x == 1 and err.value.min_eig < 0


def test_json_round_trip_keeps_flags():
    rho = werner(3, 0.7)
    back = DensityMatrix.from_json(json.loads(json.dumps(rho.to_json())))
    np.testing.assert_array_equal(back.entries, rho.entries)
    assert back.partial_transpose_form and back.permutation == rho.permutation


def test_json_family_shorthand():
    rho = DensityMatrix.from_json({"family": "isotropic", "d": 3, "lambda": 0.25})
    np.testing.assert_allclose(rho.entries, isotropic(3, 0.25).entries)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_every_family_builds_a_density(name):
    params = {"isotropic": {"lambda": 0.2}, "horodecki": {"alpha": 3}}.get(name, {})
    rho = build_family(name, **params)
    assert np.trace(rho.entries).real == pytest.approx(1.0)


def test_build_family_errors():
    with pytest.raises(ValueError, match="unknown family"):
        build_family("nope")
    with pytest.raises(ValueError, match="bad parameters"):
        build_family("isotropic", d=3)
    with pytest.raises(ValueError, match="d=3 only"):
        build_family("horodecki", alpha=3, d=5)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_random_circulant_is_psd_and_on_pattern(d):
    rng = np.random.default_rng(d)
    for _ in range(5):
        rho = random_circulant(d, rng, PermutationZd.random(d, rng))
        assert np.linalg.eigvalsh(rho.entries)[0] > -1e-12


def test_general_cr_layout():
    rho = general_cr_density(3, [0.02, -0.01, 0.01], np.full(9, 1 / 9))
    # rho[n1 n2, (n1+k)(n2+k)] = c_{n2 - n1}
    assert rho.entries[0 * 3 + 1, 1 * 3 + 2] == pytest.approx(-0.01)
    assert rho.entries[2 * 3 + 1, 0 * 3 + 2] == pytest.approx(0.01)


def test_product_entry_density_layout_and_psd_check():
    rng = np.random.default_rng(7)
    spec = random_product_entry_spec(3, rng, spread=0.5)
    rho = product_entry_density(spec)
    x = spec.x
    # rho[n (n+r), (n+k)(n+r+k)] = x(n, r) conj(x(n+k, r)) with n=1, r=2, k=1
    assert rho.entries[1 * 3 + 0, 2 * 3 + 1] == pytest.approx(x[1, 2] * np.conj(x[2, 2]))
    bad = ProductEntrySpec(3, np.full((3, 3), 0.5), np.full(9, 1 / 9))
    with pytest.raises(NonPsdBlockError):
        product_entry_density(bad)


def test_line_state_family_tag():
    assert bhn_line_state(3, vertical=2).family == {"family": "bhn-line", "d": 3, "vertical": 2}
