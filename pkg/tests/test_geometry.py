from pathlib import Path

import numpy as np
import pytest

from circsep.algebra import PermutationZd, gf_add_table, invert_permutation
from circsep.geometry import (
    flat_to_tensor,
    gf_support_pattern,
    horizontal_line,
    render_svg,
    render_text,
    slope_one_line,
    support_pattern,
    tensor_to_flat,
    vertical_line,
)
from circsep.weyl import relabel_operator, spin_tensor_support

DATA = Path(__file__).parent / "data"


def test_flat_index_round_trip():
    for d in (2, 3, 5):
        for r in range(d * d):
            assert tensor_to_flat(d, *flat_to_tensor(d, r)) == r
    assert tensor_to_flat(3, 1, 2) == 5


@pytest.mark.parametrize("make", [slope_one_line, vertical_line, horizontal_line])
def test_lines_have_d_points(make):
    for off in range(5):
        line = make(5, off)
        assert line.as_matrix().sum() == 5


def test_parallel_slope_one_lines_tile_the_grid():
    total = sum(slope_one_line(5, off).as_matrix() for off in range(5))
    np.testing.assert_array_equal(total, np.ones((5, 5)))


def test_render_d3_identity_matches_golden():
    expected = (DATA / "m3_identity.txt").read_text()
    assert render_text(support_pattern(3)) == expected


def test_render_d2_identity():
    assert render_text(support_pattern(2)) == (
        "x_0 . . x_0\n"
        ". x_1 x_1 .\n"
        ". x_1 x_1 .\n"
        "x_0 . . x_0\n"
    )


def test_svg_is_well_formed_and_labelled():
    svg = render_svg(support_pattern(3))
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<text") == 27


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_classes_partition_support_one_per_block(d):
    rng = np.random.default_rng(d)
    pat = support_pattern(d, PermutationZd.random(d, rng))
    seen = set()
    for cls in pat.classes:
        blocks = {(r // d, s // d) for r, s in cls.positions}
        assert len(blocks) == d * d
        assert seen.isdisjoint(cls.positions)
        seen.update(cls.positions)
    assert len(seen) == d**3 == pat.mask().sum()


@pytest.mark.parametrize("d", [3, 5])
def test_support_equals_relabelled_spin_support(d):
    # M_p is the support of sum_k S_{0,k}(sigma) (x) S_{0,k} with sigma = p^{-1}
    rng = np.random.default_rng(10 + d)
    p = PermutationZd.random(d, rng)
    assert set(support_pattern(d, p).support) == spin_tensor_support(d, invert_permutation(p))


def test_identity_support_is_diagonal_block_structure():
    # identity pattern: entry (n1 n2, m1 m2) nonzero iff m1 - n1 == m2 - n2
    d = 3
    mask = support_pattern(d).mask()
    for r in range(d * d):
        for s in range(d * d):
            n1, n2 = divmod(r, d)
            m1, m2 = divmod(s, d)
            assert mask[r, s] == ((m1 - n1) % d == (m2 - n2) % d)


def test_relabel_operator_maps_basis():
    sigma = PermutationZd((0, 2, 1))
    pi = relabel_operator(sigma)
    for m in range(3):
        e = np.zeros(3)
        e[m] = 1
        assert np.argmax(pi @ e) == sigma(m)


@pytest.mark.parametrize("q", [4, 8, 9])
def test_gf_pattern_classes_disjoint(q):
    pat = gf_support_pattern(q)
    positions = [pos for cls in pat.classes for pos in cls.positions]
    assert len(positions) == len(set(positions)) == q**3
    for cls in pat.classes:
        assert len({(r // q, s // q) for r, s in cls.positions}) == q * q


def test_gf4_render_is_16_by_16():
    lines = render_text(gf_support_pattern(gf_add_table(4))).splitlines()
    assert len(lines) == 16
    assert all(len(line.split()) == 16 for line in lines)
    # every row meets each class once per block row: 4 labelled cells per line
    assert all(sum(tok != "." for tok in line.split()) == 4 for line in lines)


def test_gf4_differs_from_z4_cyclic():
    from circsep.algebra import PermutationZd as P

    cyclic = support_pattern(4, P.identity(4))
    assert set(gf_support_pattern(4).support) != set(cyclic.support)
