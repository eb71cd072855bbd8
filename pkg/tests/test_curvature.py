from fractions import Fraction

import pytest

from tyzlab.curvature import (WirtingerMetric, curvature, einstein_constant, evaluate_report,
                              finite_difference_scalars, kahler_symmetric, metric_from_potential,
                              point_images, ricci_from_determinant, scalars_at)
from tyzlab.exactpoly import Polynomial, RationalFunction
from tyzlab.kecheck import projective_space_potential

F_ = Fraction


def P(text, n):
    return Polynomial.parse(text, [f"x{i + 1}" for i in range(n)])


def constant(v):
    assert v.den == {} and v.num.is_constant()
    return v.num.constant_term()


# Fubini-Study on CP^n at the normalization (i/2) dd^c log(1 + sum x):
# rho = n(n+1), |R|^2 = 2n(n+1), |Ric|^2 = n(n+1)^2
@pytest.mark.parametrize("n,a2", [(1, F_(0)), (2, F_(2))])
def test_fubini_study_scalars(n, a2):
    r = curvature(projective_space_potential(n))
    assert constant(r.rho) == n * (n + 1)
    assert constant(r.normR2) == 2 * n * (n + 1)
    assert constant(r.normRic2) == n * (n + 1) ** 2
    assert constant(r.a2) == a2
    assert not r.laplacian_rho
    assert einstein_constant(r) == n + 1


def test_line_metric():
    md = metric_from_potential(P("1 + x1", 1))
    x = Polynomial.generators(["x1"])[0]
    one = Polynomial.constant(1, ["x1"])
    assert md.g_rational()[0][0] == RationalFunction(one, (one + x) * (one + x))


GENERAL = [P("1 + x1 + x1^2", 1), P("1 + x1 + 2*x2 + x1*x2", 2), P("1 + x1 + x2 + 1/3*x1^2 + x1*x2^2", 2)]


@pytest.mark.parametrize("F", GENERAL)
def test_kahler_symmetry_and_ricci_from_determinant(F):
    r = curvature(F)
    assert kahler_symmetric(r.R)
    ric = ricci_from_determinant(r.metric)
    for i in range(F.nvars):
        for j in range(F.nvars):
            a, b = r.Ric[i][j], ric[i][j]
            assert (not a and not b) or not (a - b).reduced()


@pytest.mark.parametrize("F", GENERAL[:2])
@pytest.mark.parametrize("c", [2, 3])
def test_scaling_covariance(F, c):
    base = curvature(F)
    r = curvature(F, scale=c)
    p = [F_(2, 3)] * F.nvars
    e0, e1 = evaluate_report(base, p), evaluate_report(r, p)
    assert e1["rho"] == e0["rho"] / c
    assert e1["normR2"] == e0["normR2"] / c ** 2
    assert e1["normRic2"] == e0["normRic2"] / c ** 2
    assert e1["laplacian_rho"] == e0["laplacian_rho"] / c ** 2


@pytest.mark.parametrize("F,point", [
    (GENERAL[0], (F_(1, 5),)), (GENERAL[0], (F_(7, 2),)),
    (GENERAL[1], (F_(1, 2), F_(3))), (GENERAL[1], (F_(4), F_(1, 9))), (GENERAL[1], (F_(1), F_(1))),
])
def test_symbolic_matches_finite_differences(F, point):
    exact = evaluate_report(curvature(F), point)
    fd = finite_difference_scalars(F, point)
    for key in ("rho", "normR2", "normRic2", "laplacian_rho", "a2"):
        a, b = float(exact[key]), float(fd[key])
        assert abs(a - b) <= 1e-6 * max(1.0, abs(a)), key


def test_wirtinger_engine_agrees_with_log_frame():
    F = GENERAL[1]
    x = (F_(1, 2), F_(3))
    c = scalars_at(WirtingerMetric.from_toric(F), point_images([1, 1], list(x)))
    exact = evaluate_report(curvature(F), x)
    assert c.rho == exact["rho"]
    assert c.normR2 == exact["normR2"]
    assert c.normRic2 == exact["normRic2"]


def test_flat_metric_has_no_curvature():
    metric = WirtingerMetric.from_radial(2, lambda b: b.frac(1), lambda b: b.frac(0))
    c = scalars_at(metric, point_images([1, 2], [3, 1], 5))
    assert c.rho == 0 and c.normR2 == 0 and c.normRic2 == 0
