import json
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from tyzlab.exactpoly import Polynomial, det_poly_matrix
from tyzlab.kecheck import (CertificationDiverged, a_matrix, certify_case, check_numeric_potential,
                            detA, literal_a_matrix, power_bundle_reduction, projective_space_potential,
                            solve_system, taylor_equations, tilde_values)
from tyzlab.lattice import builtin


def _sympy_det_oracle(F: Polynomial):
    """det A = F^(2n) det(theta_i theta_j log F) / prod x, computed by sympy."""
    xs = sp.symbols(f"x1:{F.nvars + 1}", positive=True)
    f = sum(sp.Rational(c.numerator, c.denominator) * sp.prod([x ** k for x, k in zip(xs, e)])
            for e, c in F.terms.items())
    theta = lambda expr, x: x * sp.diff(expr, x)
    H = sp.Matrix(len(xs), len(xs), lambda i, j: theta(theta(sp.log(f), xs[j]), xs[i]))
    return sp.expand(sp.cancel(H.det() * f ** (2 * len(xs)) / sp.prod(xs))), xs


@pytest.mark.parametrize("text,vars_", [
    ("1 + 2*x1 + x1^2*x2 + 3*x2 + 1/2*x1*x2", ["x1", "x2"]),
    ("1 + x1 + 2*x2 + x3 + x1*x3 + x2^2*x3", ["x1", "x2", "x3"]),
])
def test_det_a_matches_sympy(text, vars_):
    F = Polynomial.parse(text, vars_)
    want, xs = _sympy_det_oracle(F)
    got = det_poly_matrix(a_matrix(F))
    poly = sp.Poly(want, *xs)
    assert {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in poly.terms()} == got.terms


def test_substitution_rule_soundness():
    rng = np.random.default_rng(2024)
    for trial in range(200):
        n = 2 + trial % 2
        terms = {(0,) * n: Fraction(1)}
        for i in range(n):
            terms[tuple(int(i == j) for j in range(n))] = Fraction(int(rng.integers(1, 5)))
        for _ in range(3):
            e = tuple(int(k) for k in rng.integers(0, 3, size=n))
            terms[e] = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5)))
        F = Polynomial([f"x{i + 1}" for i in range(n)], terms)
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        lit = np.linalg.det(np.array(literal_a_matrix(F, z)))
        x = np.abs(z) ** 2
        sub = sum(float(c) * np.prod(x ** np.array(e)) for e, c in det_poly_matrix(a_matrix(F)).terms.items())
        assert abs(lit - sub) <= 1e-10 * abs(sub)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_projective_space_is_not_rejected(n):
    G = projective_space_potential(n).pow(n + 1)
    assert check_numeric_potential(G, 2 * n + 1) == []
    assert power_bundle_reduction(G, n + 1).F == projective_space_potential(n)


def test_alpha_rescaling_keeps_solutions():
    # x_i -> beta_i x_i changes F but not its tilde values, so the equations stay satisfied
    G = projective_space_potential(2).pow(3)
    scaled = G.substitute([Polynomial.parse("2*x1", ["x1", "x2"]), Polynomial.parse("1/3*x2", ["x1", "x2"])])
    assert tilde_values(scaled) == tilde_values(G)
    assert check_numeric_potential(scaled, 5) == []


def test_non_ke_potential_is_rejected():
    # (1 + x1)(1 + x2) is CP1 x CP1 at the wrong polarization
    assert check_numeric_potential(Polynomial.parse("1 + x1 + x2 + x1*x2", ["x1", "x2"]), 4)
    G = Polynomial.parse("1 + 2*x1 + x1^2", ["x1", "x2"]) * Polynomial.parse("1 + 2*x2 + x2^2", ["x1", "x2"])
    assert check_numeric_potential(G, 5) == []


def test_power_bundle_failure():
    G = Polynomial.parse("1 + x1 + x2 + x1*x2^2", ["x1", "x2"])
    red = power_bundle_reduction(G, 2)
    assert not red.possible and red.F is None


def test_solver_examples():
    a, b = Polynomial.generators(["a", "b"])
    one = Polynomial.constant(1, ["a", "b"])
    res = solve_system([a + b - one.scale(3), a * b - one.scale(2), a - b + one])
    assert res.unique == {"a": 1, "b": 2}
    res = solve_system([a + b - one, a + b - one.scale(2)])
    assert res.status == "inconsistent"
    res = solve_system([a * a - one.scale(2), b - a])
    assert res.status == "inconsistent" and res.irrational_roots


def test_taylor_system_has_polytope_unknowns():
    system = taylor_equations(builtin("dp6").polytope, max_total_degree=2)
    assert set(system.unknowns) == {"Ft_1_1", "Ft_2_1", "Ft_1_2"}
    assert detA(Polynomial.parse("1 + x1", ["x1"])) == Polynomial.constant(1, ["x1"])


@pytest.mark.parametrize("case", ["dp6", "dim4a", "dim4b", "dim4c"])
def test_certificates_match_reference(case):
    cert = certify_case(case)
    assert cert.matches_reference and cert.violated
    json.dumps(cert.to_json())


def test_dim3_diverges_and_keeps_certificate():
    with pytest.raises(CertificationDiverged) as info:
        certify_case("dim3")
    cert = info.value.certificate
    assert cert.values["Ft_0_0_2"] == 0 and cert.values["Ft_1_0_1"] == 1
    assert cert.violated_point == (0, 0, 2)
    assert any("reference x3-system" in note for note in cert.notes)
