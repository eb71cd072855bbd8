import math
from fractions import Fraction

import numpy as np
import pytest

from tyzlab.distortion import (IllConditionedFit, PolarizedToricMetric, balancing_iterate,
                               dimension_integral, kempf_T, kempf_T_rotated, mixed_inner_product,
                               moment_inverse, monomial_norms, pullback_identity_residual,
                               random_unitary, sample_points, tyz_fit)
from tyzlab.exactpoly import Polynomial
from tyzlab.lattice import LatticePolytope


def line(text, m=1):
    return PolarizedToricMetric.line(Polynomial.parse(text, ["x"]), m)


SQUARE = LatticePolytope(2, [((-1, 0), 0), ((0, -1), 0), ((1, 0), 1), ((0, 1), 1)])
TRIANGLE = LatticePolytope(2, [((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)])


def plane(text, poly, m=1):
    return PolarizedToricMetric(Polynomial.parse(text, ["x", "y"]), poly, m)


@pytest.mark.parametrize("m", [1, 4, 9])
def test_line_norms_closed_form(m):
    gram = monomial_norms(line("1 + x", m))
    want = [Fraction(math.factorial(j) * math.factorial(m - j), math.factorial(m + 1)) for j in range(m + 1)]
    assert gram.backend == "beta" and gram.exact == want


@pytest.mark.parametrize("metric", [line("1 + x", 3), line("1 + 2*x + x^2", 2),
                                    plane("1 + x + y + x*y", SQUARE, 2),
                                    plane("1 + 2*x + 2*y + x^2 + 2*x*y + y^2",
                                          LatticePolytope(2, [((-1, 0), 0), ((0, -1), 0), ((1, 1), 2)]))])
def test_beta_agrees_with_quadrature(metric):
    a = monomial_norms(metric, backend="beta").norms
    b = monomial_norms(metric, backend="quadrature").norms
    assert np.allclose(a, b, rtol=1e-9, atol=0)


@pytest.mark.parametrize("metric", [line("1 + x", 3), line("1 + x + x^2", 2),
                                    plane("1 + x + y", TRIANGLE, 2), plane("1 + x + 2*y + x*y", SQUARE)])
def test_dimension_identity(metric):
    gram = monomial_norms(metric)
    assert dimension_integral(metric, gram) == pytest.approx(len(gram.sections), rel=1e-6)


@pytest.mark.parametrize("metric", [line("1 + x + x^2", 2), plane("1 + x + 2*y + x*y", SQUARE, 2)])
def test_rotated_basis_invariance_and_positivity(metric):
    rng = np.random.default_rng(5)
    gram = monomial_norms(metric)
    for _ in range(10):
        z = rng.normal(size=metric.n) + 1j * rng.normal(size=metric.n)
        ref = kempf_T(metric, points=np.abs(z)[None] ** 2, gram=gram, check_integral=False).values[0]
        U = random_unitary(len(gram.sections), rng)
        assert ref > 0
        assert kempf_T_rotated(metric, gram, z, U) == pytest.approx(ref, rel=1e-10)


def test_monomials_are_orthogonal():
    metric = line("1 + x + x^2")
    assert abs(mixed_inner_product(metric, (0,), (1,))) < 1e-8
    diag = mixed_inner_product(metric, (1,), (1,))
    assert diag.real == pytest.approx(monomial_norms(metric).norms[1], rel=1e-7)


def test_sample_points_lie_in_moment_polytope():
    metric = plane("1 + x + y", TRIANGLE)
    pts = sample_points(metric, 64)
    assert pts.shape == (64, 2) and (pts > 0).all()
    x = moment_inverse(metric, [0.25, 0.5])
    F = 1 + x.sum()
    assert x / F == pytest.approx([0.25, 0.5], rel=1e-10)


def test_product_of_lines_is_balanced():
    tab = kempf_T(plane("1 + x + y + x*y", SQUARE, 3))
    assert tab.ratio - 1 < 1e-8
    assert tab.mean == pytest.approx(16 / math.pi ** 2, rel=1e-8)


def test_balancing_reaches_binomial_weights():
    trace = balancing_iterate(line("1 + x + x^2"))
    assert trace.converged
    weights = dict(trace.final_potential())
    assert weights[(1,)] == pytest.approx(2, rel=1e-5) and weights[(2,)] == pytest.approx(1, rel=1e-5)


def test_tyz_fit_needs_enough_levels():
    with pytest.raises(IllConditionedFit):
        tyz_fit(line("1 + x"), [1, 2, 3], [1.0])


def test_tyz_fit_on_projective_plane():
    fit = tyz_fit(plane("1 + x + y", TRIANGLE), range(1, 9), [0.5, 2.0])
    a1, a2 = fit.ratios
    # volume pi^2/2 and (m+1)(m+2)/2 sections give T = (m^2 + 3m + 2) / pi^2: rho/2 = 3, a2 = 2
    assert fit.coefficients[0] == pytest.approx(1 / math.pi ** 2, rel=1e-8)
    assert a1 == pytest.approx(3, rel=1e-8) and a2 == pytest.approx(2, rel=1e-6)


def test_pullback_identity_needs_the_distortion_term():
    res = pullback_identity_residual(plane("1 + x + 2*y + x*y", SQUARE, 2))
    assert res.points == 64 and res.max_residual < 1e-6
    assert res.max_residual_without_T > 1e-2
