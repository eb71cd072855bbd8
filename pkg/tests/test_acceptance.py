"""Acceptance criteria, one test each.

Reference values are frozen here rather than read from the library so that a
regression in the library cannot silently move its own target.
"""
import math
import time
from fractions import Fraction

import numpy as np

from tyzlab.curvature import (KAPPA, curvature, einstein_constant, evaluate_report,
                              finite_difference_scalars, kahler_symmetric)
from tyzlab.distortion import (PolarizedToricMetric, balancing_iterate, dimension_integral,
                               kempf_T, kempf_T_rotated, monomial_norms, pullback_identity_residual,
                               random_unitary, tyz_fit)
from tyzlab.exactpoly import Polynomial, det_poly_matrix
from tyzlab.kecheck import (a_matrix, certify_case, check_numeric_potential, literal_a_matrix,
                            power_bundle_reduction, projective_space_potential,
                            substitute_values, taylor_equations, tilde_values)
from tyzlab.lattice import CASES, LatticePolytope, UnimodularMap, apply_map, builtin, lattice_points
from tyzlab.lbs import axis_defect

F = Fraction

KE_REFERENCE = {
    "dp6": {"values": {"Ft_1_1": 2, "Ft_2_1": 2, "Ft_1_2": 2}, "point": None},
    "dim3": {"values": {"Ft_1_1_0": 1, "Ft_0_1_1": 2, "Ft_0_2_1": 2, "Ft_0_0_2": F(1, 2), "Ft_1_0_1": 0},
             "point": (1, 0, 1)},
    "dim4a": {"values": {k: 2 for k in ("Ft_1_0_0_1", "Ft_0_1_0_1", "Ft_1_0_0_2", "Ft_0_1_0_2",
                                         "Ft_1_0_1_0", "Ft_0_1_1_0", "Ft_1_0_2_0", "Ft_0_1_2_0",
                                         "Ft_2_0_1_0", "Ft_2_0_0_1", "Ft_0_2_1_0", "Ft_0_2_0_1",
                                         "Ft_1_1_1_0", "Ft_1_1_0_1", "Ft_1_0_1_1", "Ft_0_1_1_1")},
              "point": None},
    "dim4b": {"values": {"Ft_1_0_1_0": 1, "Ft_0_1_1_0": 1, "Ft_1_0_0_1": 1, "Ft_0_1_0_1": 1,
                         "Ft_0_0_1_1": 2, "Ft_0_0_2_1": 2, "Ft_0_0_1_2": 2, "Ft_0_2_0_0": 0},
              "point": (0, 2, 0, 0)},
    "dim4c": {"values": {"Ft_1_1_0_0": 1, "Ft_1_0_0_1": 1, "Ft_0_1_1_0": 1, "Ft_1_0_1_0": 2,
                         "Ft_2_0_1_0": 2, "Ft_0_1_0_1": 2, "Ft_0_2_0_1": 2},
              "point": None},
}


def line(text, m=1):
    return PolarizedToricMetric.line(Polynomial.parse(text, ["x"]), m)


def test_criterion_1_ke_case_regression(verdict):
    t0 = time.perf_counter()
    problems = []
    for case in CASES:
        cert = certify_case(case, strict=False)
        ref = KE_REFERENCE[case]
        for name, want in ref["values"].items():
            got = cert.values.get(name)
            if got != F(want):
                problems.append(f"{case}: {name} = {got}, expected {F(want)}")
        if not cert.violated:
            problems.append(f"{case}: no contradiction")
        if ref["point"] is not None and cert.violated_point != ref["point"]:
            problems.append(f"{case}: violated point {cert.violated_point}, expected {ref['point']}")
        if ref["point"] is None and cert.violated_point is not None:
            problems.append(f"{case}: positivity violation instead of an inconsistency")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60:
        problems.append(f"runtime {elapsed:.1f} s")
    verdict(1, not problems, "; ".join(problems) or f"all five cases in {elapsed:.1f} s")
    assert not problems


def simplex(n, k=1):
    ineqs = [(tuple(-int(i == j) for j in range(n)), 0) for i in range(n)]
    return LatticePolytope(n, ineqs + [((1,) * n, k)])


def test_criterion_2_fubini_study(verdict):
    # det A = c F^(2n-1) is posed on the anticanonical polytope; for projective
    # space that is (n+1) times the simplex with potential G = (1 + sum x)^(n+1),
    # the same metric as 1 + sum x up to the factor n+1.
    t0 = time.perf_counter()
    problems = []
    literal = []
    for n in (1, 2, 3):
        F_fs = projective_space_potential(n)
        G = F_fs.pow(n + 1)
        system = taylor_equations(simplex(n, n + 1), max_total_degree=2 * n + 1)
        actual = tilde_values(G)
        if any(substitute_values(e.poly, actual).terms for e in system.equations):
            problems.append(f"n={n}: Taylor system rejects the Fubini-Study values")
        if check_numeric_potential(G, 2 * n + 1):
            problems.append(f"n={n}: numeric Taylor equations violated")
        if power_bundle_reduction(G, n + 1).F != F_fs:
            problems.append(f"n={n}: power-bundle reduction does not return 1 + sum x")
        literal.append(len(check_numeric_potential(F_fs, 2 * n + 1)))
        lam = einstein_constant(curvature(F_fs))
        if lam != n + 1:
            problems.append(f"n={n}: Einstein constant {lam}, expected {n + 1}")
    elapsed = time.perf_counter() - t0
    verdict(2, not problems, "; ".join(problems) or
            f"n = 1,2,3 satisfied, Ric = (n+1) g ({elapsed:.1f} s); "
            f"unnormalized 1 + sum x leaves {literal} nonzero equations")
    assert not problems


def test_criterion_3_lbs_dim2(verdict):
    t0 = time.perf_counter()
    res = axis_defect(2)
    got = tuple(res.coefficients[k] for k in ("normR2", "normRic2", "defect"))
    want = (F(31), F(36), F(-113))
    elapsed = time.perf_counter() - t0
    ok = got == want and elapsed < 60
    verdict(3, ok, f"|R|^2, |Ric|^2, defect = {tuple(map(str, got))} ({res.model} model), "
                   f"reference {tuple(map(str, want))}, {elapsed:.1f} s")
    assert ok


def test_criterion_4_lbs_higher_dims(verdict):
    t0 = time.perf_counter()
    rows = []
    for n in range(3, 9):
        res = axis_defect(n)
        assert set(res.matches) >= {"normR2", "normRic2", "defect"}
        rows.append((n, res.coefficients["defect"], res.defect_negative, res.matches["defect"]))
    elapsed = time.perf_counter() - t0
    ok = all(neg for _, _, neg, _ in rows) and elapsed < 300
    detail = ", ".join(f"n={n}: {d} ({'agrees' if m else 'differs from reference bracket'})"
                       for n, d, _, m in rows)
    verdict(4, ok, f"defects {detail}; {elapsed:.1f} s")
    assert ok


def test_criterion_5_distortion_constancy(verdict):
    problems = []
    for m in range(1, 11):
        tab = kempf_T(line("1 + x", m))
        if not tab.ratio - 1 < 1e-8:
            problems.append(f"1+x, m={m}: ratio-1 = {tab.ratio - 1:.2e}")
        if abs(tab.mean * math.pi / (m + 1) - 1) > 1e-8:
            problems.append(f"1+x, m={m}: T = {tab.mean}")
    tab = kempf_T(line("1 + 2*x + x^2"))
    if tab.ratio - 1 >= 1e-8 or abs(tab.mean * 2 * math.pi / 3 - 1) > 1e-8:
        problems.append(f"(1+x)^2: ratio {tab.ratio}, T = {tab.mean}")
    tab = kempf_T(line("1 + x + x^2"))
    if not tab.ratio - 1 > 1e-3:
        problems.append(f"1+x+x^2: ratio-1 = {tab.ratio - 1:.2e}, expected non-constant")
    verdict(5, not problems, "; ".join(problems) or f"non-balanced ratio-1 = {tab.ratio - 1:.3f}")
    assert not problems


def test_criterion_6_pullback_identity(verdict):
    worst = 0.0
    for text in ("1 + x", "1 + 2*x + x^2", "1 + x + x^2"):
        res = pullback_identity_residual(line(text))
        assert res.points == 64
        worst = max(worst, res.max_residual)
    ok = worst < 1e-6
    verdict(6, ok, f"max residual {worst:.2e} over 3 x 64 points")
    assert ok


def test_criterion_7_balancing(verdict):
    trace = balancing_iterate(line("1 + x + x^2"), max_iters=50, tol=1e-6)
    ok = trace.converged and trace.final_ratio - 1 < 1e-6 and len(trace.steps) - 1 <= 50
    verdict(7, ok, f"ratio-1 = {trace.final_ratio - 1:.2e} after {len(trace.steps) - 1} iterations")
    assert ok


def test_criterion_8_tyz_fit(verdict):
    fit = tyz_fit(line("1 + x"), range(1, 11), [1.0])
    r1, r2 = fit.ratios
    rho = curvature(Polynomial.parse("1 + x", ["x"])).rho
    assert rho.den == {} and rho.num.is_constant()
    half_rho = float(rho.num.constant_term() * KAPPA / 2)
    ok = abs(r1 - 1) < 1e-6 and abs(r1 - half_rho) < 1e-6 and abs(r2) < 1e-4
    verdict(8, ok, f"a1/a0 = {r1:.12f}, rho/2 = {half_rho}, a2/a0 = {r2:.2e}")
    assert ok


# -- criterion 9 --------------------------------------------------------------

def _random_potential(rng, n):
    terms = {(0,) * n: F(1)}
    for i in range(n):
        terms[tuple(int(i == j) for j in range(n))] = F(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    for _ in range(int(rng.integers(1, 4))):
        e = tuple(int(k) for k in rng.integers(0, 3, size=n))
        if sum(e) >= 2:
            terms[e] = F(int(rng.integers(1, 7)), int(rng.integers(1, 4)))
    return Polynomial([f"x{i + 1}" for i in range(n)], terms)


def _float_eval(p, x):
    return sum(float(c) * math.prod(xi ** k for xi, k in zip(x, e)) for e, c in p.terms.items())


def substitution_soundness(trials=200, seed=7):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in range(trials):
        n = 2 if t % 2 == 0 else 3
        Fn = _random_potential(rng, n)
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        lit = np.linalg.det(np.array(literal_a_matrix(Fn, z)))
        sub = _float_eval(det_poly_matrix(a_matrix(Fn)), np.abs(z) ** 2)
        worst = max(worst, abs(lit - sub) / abs(sub))
    return worst


def _random_unimodular(rng, n):
    M = np.eye(n, dtype=int)
    for _ in range(6):
        i, j = rng.choice(n, size=2, replace=False)
        E = np.eye(n, dtype=int)
        E[i, j] = int(rng.integers(-2, 3))
        M = M @ E
        if rng.random() < 0.3:
            M[:, [i, j]] = M[:, [j, i]]
    return M


def unimodular_invariance(seed=11):
    rng = np.random.default_rng(seed)
    for case in CASES:
        poly = builtin(case).polytope
        count = len(lattice_points(poly))
        for _ in range(3):
            A = _random_unimodular(rng, poly.dim)
            b = [int(v) for v in rng.integers(-3, 4, size=poly.dim)]
            image = apply_map(poly, UnimodularMap(A.tolist(), b))
            if len(lattice_points(image)) != count:
                return False
    return True


def basis_independence(seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for metric in (line("1 + x + x^2", 2), PolarizedToricMetric(
            Polynomial.parse("1 + x + y + x*y", ["x", "y"]),
            LatticePolytope(2, [((-1, 0), 0), ((0, -1), 0), ((1, 0), 1), ((0, 1), 1)]), 2)):
        gram = monomial_norms(metric)
        k = len(gram.sections)
        for _ in range(5):
            z = rng.normal(size=metric.n) + 1j * rng.normal(size=metric.n)
            U = random_unitary(k, rng)
            ref = kempf_T(metric, points=np.abs(z)[None] ** 2, gram=gram, check_integral=False).values[0]
            worst = max(worst, abs(kempf_T_rotated(metric, gram, z, U) / ref - 1))
    return worst


def dimension_identity():
    worst = 0.0
    metrics = [line("1 + x", 3), line("1 + x + x^2", 2),
               PolarizedToricMetric(Polynomial.parse("1 + x + y", ["x", "y"]), simplex(2), 2)]
    for metric in metrics:
        gram = monomial_norms(metric)
        worst = max(worst, abs(dimension_integral(metric, gram) / len(gram.sections) - 1))
    return worst


def curvature_checks():
    """Kahler symmetries and symbolic-vs-finite-difference agreement."""
    symmetric = True
    worst = 0.0
    cases = [(Polynomial.parse("1 + x + x^2", ["x"]), [(F(1, 2),), (F(3),)]),
             (Polynomial.parse("1 + x + 2*y + x*y", ["x", "y"]), [(F(1, 3), F(2)), (F(5, 2), F(1, 7))])]
    for poly, points in cases:
        report = curvature(poly)
        symmetric = symmetric and kahler_symmetric(report.R)
        for p in points:
            exact = evaluate_report(report, p)
            fd = finite_difference_scalars(poly, p)
            for key in ("rho", "normR2", "normRic2", "laplacian_rho", "a2"):
                a, b = float(exact[key]), float(fd[key])
                worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return symmetric, worst


def test_criterion_9_property_suites(verdict):
    t0 = time.perf_counter()
    sub = substitution_soundness()
    uni = unimodular_invariance()
    basis = basis_independence()
    dim = dimension_identity()
    sym, fd = curvature_checks()
    elapsed = time.perf_counter() - t0
    ok = sub < 1e-10 and uni and basis < 1e-10 and dim < 1e-6 and sym and fd < 1e-6 and elapsed < 300
    verdict(9, ok, f"substitution {sub:.1e}, unimodular {uni}, basis {basis:.1e}, dimension {dim:.1e}, "
                   f"symmetries {sym}, finite differences {fd:.1e}; {elapsed:.1f} s")
    assert ok
