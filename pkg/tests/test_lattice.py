from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tyzlab.lattice import (CASES, LatticePolytope, Unbounded, UnimodularMap, UnknownCase, apply_map,
                            builtin, dilate, lattice_points, satisfies_assumption1)

COUNTS = {"dp6": 7, "dim3": 25, "dim4a": 51, "dim4b": 59, "dim4c": 55}


@pytest.mark.parametrize("case", CASES)
def test_builtin_counts_and_normalization(case):
    b = builtin(case)
    assert len(lattice_points(b.polytope)) == COUNTS[case]
    assert satisfies_assumption1(b.polytope)
    assert b.polytope.is_integral()
    assert b.polytope.contains((0,) * b.polytope.dim)


def test_unknown_case():
    with pytest.raises(UnknownCase):
        builtin("nope")


def test_dilation():
    hexagon = builtin("dp6").polytope
    twice, integral = dilate(hexagon, 2)
    assert integral and len(lattice_points(twice)) == 19
    _, integral = dilate(hexagon, Fraction(1, 2))
    assert not integral


def test_unbounded_rejected():
    with pytest.raises(Unbounded):
        LatticePolytope(2, [((-1, 0), 0), ((0, -1), 0), ((1, -1), 1)])


def test_json_round_trip():
    p = builtin("dim3").polytope
    assert LatticePolytope.from_json(p.to_json()) == p


def test_assumption1_detects_bad_corner():
    # origin is a vertex but one edge runs along (1, 1)
    p = LatticePolytope(2, [((-1, 1), 0), ((0, -1), 0), ((1, 0), 2)])
    assert not satisfies_assumption1(p)


elementary = st.tuples(st.integers(0, 1), st.integers(-2, 2), st.booleans())


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["dp6", "dim3"]), st.lists(elementary, min_size=1, max_size=5),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_lattice_count_is_unimodular_invariant(case, ops, shift):
    poly = builtin(case).polytope
    n = poly.dim
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for row, c, swap in ops:
        i, j = row % n, (row + 1) % n
        M[i] = [a + c * b for a, b in zip(M[i], M[j])]
        if swap:
            M[i], M[j] = M[j], M[i]
    image = apply_map(poly, UnimodularMap(M, shift[:n]))
    assert len(lattice_points(image)) == COUNTS[case]
