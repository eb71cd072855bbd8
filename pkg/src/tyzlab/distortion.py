"""Kempf distortion functions of polarized toric metrics.

Conventions.  ``omega = p (i/2) dd^c log F`` on C^n (``p = 1`` unless a
metric is built from a level-m Bergman potential, where ``p = 1/m``), the
hermitian weight on L^m is ``F^(-p m)`` and the volume form is
``omega^n / n!`` with respect to Lebesgue measure ``(i/2) dz ^ dzbar``.  In
polar coordinates with ``x_i = |z_i|^2``

    ||z^J||^2 = pi^n p^n  integral_{x > 0}  x^J F^(-p m) det(A) / F^(2n) dx

so the Fubini-Study line has ``T = (m + 1) / pi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import cubature
from scipy.stats import qmc

from .exactpoly import Polynomial, det_poly_matrix
from .kecheck import a_matrix
from .lattice import LatticePolytope, dilate, lattice_points

QUAD_RTOL = 1e-10
QUAD_MAX_SUBDIVISIONS = 20000


class QuadratureNotConverged(RuntimeError):
    pass


class IllConditionedFit(ValueError):
    pass


class NotConverged(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------------------
# numeric polynomials
# ---------------------------------------------------------------------------

class NumericPolynomial:
    """Vectorized float evaluation of a Polynomial (and of its logarithm)."""

    def __init__(self, p: Polynomial):
        items = sorted(p.terms.items())
        self.n = p.nvars
        self.exps = np.array([e for e, _ in items], dtype=float).reshape(len(items), self.n)
        self.coefs = np.array([float(c) for _, c in items])

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.prod(X[:, None, :] ** self.exps[None], axis=2) @ self.coefs

    def log(self, logX: np.ndarray) -> np.ndarray:
        """``log p(exp(logX))`` for polynomials with positive coefficients."""
        logX = np.atleast_2d(logX)
        z = logX @ self.exps.T + np.log(self.coefs)[None]
        top = z.max(axis=1, keepdims=True)
        return top[:, 0] + np.log(np.exp(z - top).sum(axis=1))

    def gradient_log(self, logX: np.ndarray) -> np.ndarray:
        """``x_i p_i / p`` (moment map of ``log p``)."""
        logX = np.atleast_2d(logX)
        z = logX @ self.exps.T + np.log(self.coefs)[None]
        w = np.exp(z - z.max(axis=1, keepdims=True))
        w /= w.sum(axis=1, keepdims=True)
        return w @ self.exps

    def hessian_log(self, logx: np.ndarray) -> np.ndarray:
        z = logx @ self.exps.T + np.log(self.coefs)
        w = np.exp(z - z.max())
        w /= w.sum()
        mean = w @ self.exps
        cen = self.exps - mean
        return (cen * w[:, None]).T @ cen


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def interval_polytope(d: int) -> LatticePolytope:
    return LatticePolytope(1, [((1,), d), ((-1,), 0)])


@dataclass
class PolarizedToricMetric:
    F: Polynomial
    polytope: LatticePolytope
    m: int = 1
    power: Fraction = Fraction(1)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("level m must be at least 1")
        if self.F.constant_term() <= 0 or any(c < 0 for c in self.F.terms.values()):
            raise ValueError("F must have nonnegative coefficients and positive constant term")
        if self.polytope.dim != self.F.nvars:
            raise ValueError("polytope dimension differs from the number of variables")
        self.power = Fraction(self.power)

    @classmethod
    def line(cls, F: Polynomial, m: int = 1) -> "PolarizedToricMetric":
        """One-variable metric with polytope ``[0, deg F]``."""
        return cls(F, interval_polytope(F.total_degree()), m)

    @property
    def n(self) -> int:
        return self.F.nvars

    def at_level(self, m: int) -> "PolarizedToricMetric":
        return PolarizedToricMetric(self.F, self.polytope, m, self.power)

    def sections(self) -> list[tuple[int, ...]]:
        """Exponents J of the monomial basis, J in m Delta."""
        poly, integral = dilate(self.polytope, self.m)
        return lattice_points(poly)

    @property
    def weight_exponent(self) -> float:
        return float(self.power * self.m)

    def det_polynomial(self) -> Polynomial:
        return det_poly_matrix(a_matrix(self.F))


@dataclass
class GramMatrix:
    """Diagonal of the Gram matrix in the monomial basis (off-diagonal entries vanish)."""
    sections: list
    norms: np.ndarray
    backend: str
    exact: list | None = None          # rational multiples of pi^n when available
    error: np.ndarray | None = None

    def to_json(self) -> dict:
        out = {"backend": self.backend,
               "sections": [list(J) for J in self.sections],
               "norms": [float(v) for v in self.norms]}
        if self.exact is not None:
            out["norms_over_pi_n"] = [f"{q.numerator}/{q.denominator}" for q in self.exact]
        return out


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _beta_form(metric: PolarizedToricMetric):
    """Recognize ``F = (1 + sum x)^k`` or ``F = prod (1 + x_i)^(k_i)``."""
    F, n = metric.F, metric.n
    xs = Polynomial.generators(F.vars)
    one = Polynomial.constant(1, F.vars)
    lin = one
    for x in xs:
        lin = lin + x
    k = F.total_degree()
    if k > 0 and F == lin ** k:
        return ("simplex", k)
    ks = [F.degree(i) for i in range(n)]
    prod = one
    for x, ki in zip(xs, ks):
        prod = prod * (one + x) ** ki
    if all(ks) and F == prod:
        return ("product", ks)
    return None


def _exact_norms(metric: PolarizedToricMetric, sections) -> list[Fraction] | None:
    form = _beta_form(metric)
    if form is None:
        return None
    n = metric.n
    p = metric.power
    kind, k = form
    out = []
    if kind == "simplex":
        # omega = p k FS;  det g = (p k)^n / (1 + sum x)^(n+1);  weight (1+sum x)^(-p m k)
        e = p * metric.m * k
        if e.denominator != 1:
            return None
        e = int(e)
        for J in sections:
            s = sum(J)
            if s > e:
                return None
            num = Fraction(math.prod(math.factorial(j) for j in J) * math.factorial(e - s),
                           math.factorial(e + n))
            out.append((p * k) ** n * num)
        return out
    for J in sections:
        val = Fraction(1)
        for j, ki in zip(J, k):
            e = p * metric.m * ki
            if e.denominator != 1 or j > e:
                return None
            e = int(e)
            # integral x^j (1+x)^(-e-2) dx = B(j+1, e+1-j)
            val *= p * ki * Fraction(math.factorial(j) * math.factorial(e - j), math.factorial(e + 1))
        out.append(val)
    return out


def _log_integrand(metric: PolarizedToricMetric, exps: np.ndarray):
    """Return ``f(t)`` for the substituted integrand, vector valued over ``exps``."""
    n = metric.n
    NF = NumericPolynomial(metric.F)
    NA = NumericPolynomial(metric.det_polynomial())
    w = metric.weight_exponent + 2 * n
    const = n * math.log(math.pi * float(metric.power))

    def f(T: np.ndarray) -> np.ndarray:
        T = np.atleast_2d(T)
        logt = np.log(T)
        log1mt = np.log1p(-T)
        logx = logt - log1mt
        jac = -2.0 * log1mt.sum(axis=1)          # dx = dt / (1 - t)^2
        base = -w * NF.log(logx) + np.log(NA(np.exp(logx))) + jac + const
        return np.exp(logx @ exps.T + base[:, None])

    return f


def _quadrature_norms(metric: PolarizedToricMetric, sections, rtol: float):
    exps = np.array(sections, dtype=float).reshape(len(sections), metric.n)
    f = _log_integrand(metric, exps)
    n = metric.n
    res = cubature(f, np.zeros(n), np.ones(n), rtol=rtol, atol=0,
                   max_subdivisions=QUAD_MAX_SUBDIVISIONS)
    if res.status != "converged":
        raise QuadratureNotConverged(f"cubature stopped with status {res.status}")
    return np.asarray(res.estimate, dtype=float), np.asarray(res.error, dtype=float)


def monomial_norms(metric: PolarizedToricMetric, backend: str = "auto",
                   rtol: float = QUAD_RTOL) -> GramMatrix:
    sections = metric.sections()
    exact = _exact_norms(metric, sections) if backend in ("auto", "beta") else None
    if backend == "beta" and exact is None:
        raise ValueError("F is not of product or simplex Beta form")
    if exact is not None:
        scale = math.pi ** metric.n
        return GramMatrix(sections, np.array([float(q) * scale for q in exact]), "beta", exact)
    est, err = _quadrature_norms(metric, sections, rtol)
    return GramMatrix(sections, est, "quadrature", None, err)


def mixed_inner_product(metric: PolarizedToricMetric, J, K, rtol: float = 1e-8) -> complex:
    """``<z^J, z^K>`` by cubature over radii and angles (vanishes for J != K)."""
    n = metric.n
    NF = NumericPolynomial(metric.F)
    NA = NumericPolynomial(metric.det_polynomial())
    w = metric.weight_exponent + 2 * n
    J = np.asarray(J, dtype=float)
    K = np.asarray(K, dtype=float)
    pn = float(metric.power) ** n

    def f(Y):
        T, TH = Y[:, :n], Y[:, n:]
        logx = np.log(T) - np.log1p(-T)
        jac = -2.0 * np.log1p(-T).sum(axis=1)
        radial = np.exp(logx @ ((J + K) / 2) - w * NF.log(logx) + jac) * NA(np.exp(logx))
        phase = TH @ (J - K)
        # d lambda = (1/2) dx dtheta per coordinate
        val = pn * radial * 0.5 ** n
        return np.stack([val * np.cos(phase), val * np.sin(phase)], axis=1)

    lo = np.zeros(2 * n)
    hi = np.concatenate([np.ones(n), np.full(n, 2 * np.pi)])
    res = cubature(f, lo, hi, rtol=rtol, atol=1e-14, max_subdivisions=QUAD_MAX_SUBDIVISIONS)
    if res.status != "converged":
        raise QuadratureNotConverged("mixed inner product did not converge")
    return complex(res.estimate[0], res.estimate[1])


# ---------------------------------------------------------------------------
# sample points
# ---------------------------------------------------------------------------

def moment_inverse(metric: PolarizedToricMetric, target: Sequence[float], tol: float = 1e-13) -> np.ndarray:
    """``x`` with ``p x_i F_i / F = target`` by damped Newton in ``u = log x``."""
    NF = NumericPolynomial(metric.F)
    p = float(metric.power)
    y = np.asarray(target, dtype=float)
    u = np.zeros(metric.n)
    for _ in range(200):
        r = p * NF.gradient_log(u[None])[0] - y
        if np.max(np.abs(r)) < tol:
            break
        H = p * NF.hessian_log(u)
        step = np.linalg.solve(H, r)
        lam = 1.0
        while lam > 1e-6:
            cand = u - lam * step
            if np.max(np.abs(p * NF.gradient_log(cand[None])[0] - y)) < np.max(np.abs(r)):
                u = cand
                break
            lam /= 2
        else:
            break
    return np.exp(u)


def sample_points(metric: PolarizedToricMetric, count: int = 64, margin: float = 0.05,
                  seed: int = 0) -> np.ndarray:
    """Low-discrepancy points in the interior of the moment polytope, mapped back to ``x``."""
    poly = metric.polytope
    box = np.array(poly.bounding_box(), dtype=float)
    normals = np.array([u for u, _ in poly.inequalities], dtype=float)
    bounds = np.array([float(b) for _, b in poly.inequalities])
    center = np.mean(np.array(poly.vertices, dtype=float), axis=0)
    sampler = qmc.Halton(d=poly.dim, scramble=False, seed=seed)
    pts = []
    while len(pts) < count:
        for q in sampler.random(4 * count):
            y = box[:, 0] + q * (box[:, 1] - box[:, 0])
            y = center + (1 - margin) * (y - center)
            if np.all(normals @ y < bounds - 1e-12):
                pts.append(y)
                if len(pts) == count:
                    break
    # the moment image of p log F is p Newton(F), which is the polytope for every metric built here
    return np.array([moment_inverse(metric, y) for y in pts])


def axis_points(n: int, values=(0.25, 1.0, 4.0)) -> np.ndarray:
    out = []
    for v in values:
        for i in range(n):
            x = np.full(n, 1e-3)
            x[i] = v
            out.append(x)
    return np.array(out)


# ---------------------------------------------------------------------------
# distortion function
# ---------------------------------------------------------------------------

@dataclass
class DistortionTable:
    m: int
    gram: GramMatrix
    points: np.ndarray
    values: np.ndarray
    integral: float | None = None
    dimension: int = 0

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def ratio(self) -> float:
        return self.max / self.min

    def to_json(self) -> dict:
        return {"m": self.m, "dimension": self.dimension, "min": self.min, "max": self.max,
                "mean": self.mean, "constancy_ratio": self.ratio, "integral": self.integral,
                "gram": self.gram.to_json(),
                "points": self.points.tolist(), "values": self.values.tolist()}


def _T_values(metric: PolarizedToricMetric, gram: GramMatrix, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    exps = np.array(gram.sections, dtype=float).reshape(len(gram.sections), metric.n)
    NF = NumericPolynomial(metric.F)
    logx = np.log(X)
    logT = logx @ exps.T - np.log(gram.norms)[None] - metric.weight_exponent * NF.log(logx)[:, None]
    return np.exp(logT).sum(axis=1)


def kempf_T(metric: PolarizedToricMetric, points=None, gram: GramMatrix | None = None,
            check_integral: bool = True) -> DistortionTable:
    gram = gram or monomial_norms(metric)
    pts = sample_points(metric) if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    vals = _T_values(metric, gram, pts)
    integral = dimension_integral(metric, gram) if check_integral else None
    return DistortionTable(metric.m, gram, pts, vals, integral, len(gram.sections))


def kempf_T_rotated(metric: PolarizedToricMetric, gram: GramMatrix, z: Sequence[complex],
                    U: np.ndarray) -> float:
    """``T`` from the basis ``U s`` where ``s_J = z^J / ||z^J||`` is orthonormal."""
    z = np.asarray(z, dtype=complex)
    exps = np.array(gram.sections, dtype=int).reshape(len(gram.sections), metric.n)
    s = np.prod(z[None, :] ** exps, axis=1) / np.sqrt(gram.norms)
    x = np.abs(z) ** 2
    weight = float(NumericPolynomial(metric.F)(x[None])[0]) ** (-metric.weight_exponent)
    return float(np.sum(np.abs(U @ s) ** 2) * weight)


def random_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def dimension_integral(metric: PolarizedToricMetric, gram: GramMatrix, rtol: float = 1e-9) -> float:
    """``integral T omega^n / n!`` by quadrature of the full sum (equals the section count)."""
    n = metric.n
    exps = np.array(gram.sections, dtype=float).reshape(len(gram.sections), n)
    f_all = _log_integrand(metric, exps)
    inv = 1.0 / gram.norms

    def f(T):
        return f_all(T) @ inv

    res = cubature(f, np.zeros(n), np.ones(n), rtol=rtol, atol=0,
                   max_subdivisions=QUAD_MAX_SUBDIVISIONS)
    if res.status != "converged":
        raise QuadratureNotConverged("dimension integral did not converge")
    return float(res.estimate)


# ---------------------------------------------------------------------------
# coherent states pullback identity
# ---------------------------------------------------------------------------

@dataclass
class PullbackResidual:
    max_residual: float
    max_residual_without_T: float
    points: int

    def to_json(self) -> dict:
        return {"max_residual": self.max_residual,
                "max_residual_without_T": self.max_residual_without_T, "points": self.points}


def _ddbar_fd(f, z: Sequence[complex], h: float = 1e-4):
    """Matrix ``d_i dbar_j f`` by central differences in the real coordinates."""
    import mpmath as mp

    n = len(z)
    re = [mp.mpf(c.real) for c in z]
    im = [mp.mpf(c.imag) for c in z]
    h = mp.mpf(h)

    def F(vec):
        return f([vec[2 * i] + 1j * vec[2 * i + 1] for i in range(n)])

    base = []
    for i in range(n):
        base += [re[i], im[i]]

    def second(a, b):
        def shifted(da, db):
            v = list(base)
            v[a] += da
            v[b] += db
            return F(v)
        if a == b:
            return (-shifted(2 * h, 0) + 16 * shifted(h, 0) - 30 * F(base)
                    + 16 * shifted(-h, 0) - shifted(-2 * h, 0)) / (12 * h * h)
        return (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h)

    D = [[second(a, b) for b in range(2 * n)] for a in range(2 * n)]
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            xi, yi, xj, yj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
            val = (D[xi][xj] + D[yi][yj]) + 1j * (D[xi][yj] - D[yi][xj])
            out[i, j] = complex(val) / 4
    return out


def pullback_identity_residual(metric: PolarizedToricMetric, points=None, gram: GramMatrix | None = None,
                               angle_seed: int = 1) -> PullbackResidual:
    """Compare ``phi_m^* omega_FS`` with ``m omega + (i/2) dd^c log T`` at sample points.

    The left side is the Fubini-Study metric pulled back through the Jacobian
    of the orthonormal sections; the right side is the closed-form Hessian of
    ``p m log F(|z|^2)`` plus a finite-difference Hessian of ``log T``.
    """
    import mpmath as mp

    if metric.n > 2:
        raise ValueError("finite-difference check supports n <= 2")
    mp.mp.dps = 40
    n = metric.n
    gram = gram or monomial_norms(metric)
    pts = sample_points(metric) if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    rng = np.random.default_rng(angle_seed)
    exps = [tuple(int(k) for k in J) for J in gram.sections]
    roots = [mp.sqrt(mp.mpf(float(v))) for v in gram.norms]
    wexp = mp.mpf(metric.power.numerator) / metric.power.denominator * metric.m

    def as_mp(p: Polynomial):
        terms = [(tuple(int(k) for k in e), mp.mpf(c.numerator) / c.denominator) for e, c in p.terms.items()]
        return lambda x: mp.fsum(c * mp.fprod(xi ** k for xi, k in zip(x, e)) for e, c in terms)

    Fx = as_mp(metric.F)
    dF = [as_mp(metric.F.differentiate(i)) for i in range(n)]
    ddF = [[as_mp(metric.F.diff(i, j)) for j in range(n)] for i in range(n)]

    def pulled_back_fs(z):
        s = [mp.fprod(zi ** k for zi, k in zip(z, J)) / r for J, r in zip(exps, roots)]
        ds = [[(J[i] * mp.fprod(zk ** (k - (t == i)) for t, (zk, k) in enumerate(zip(z, J))) / r
                if J[i] else mp.mpc(0)) for J, r in zip(exps, roots)] for i in range(n)]
        S = mp.fsum(abs(v) ** 2 for v in s)
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                a = mp.fsum(ds[i][k] * mp.conj(ds[j][k]) for k in range(len(s)))
                b = mp.fsum(ds[i][k] * mp.conj(s[k]) for k in range(len(s)))
                c = mp.fsum(s[k] * mp.conj(ds[j][k]) for k in range(len(s)))
                out[i, j] = complex(a / S - b * c / S ** 2)
        return out

    def polarization(z):
        x = [abs(zi) ** 2 for zi in z]
        F0 = Fx(x)
        Fi = [d(x) for d in dF]
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                v = mp.conj(z[i]) * z[j] * (F0 * ddF[i][j](x) - Fi[i] * Fi[j]) / F0 ** 2
                if i == j:
                    v += Fi[i] / F0
                out[i, j] = complex(wexp * v)
        return out

    def log_T(z):
        x = [abs(zi) ** 2 for zi in z]
        total = mp.fsum(mp.fprod(xi ** k for xi, k in zip(x, J)) / r ** 2 for J, r in zip(exps, roots))
        return mp.log(total) - wexp * mp.log(Fx(x))

    worst = worst_noT = 0.0
    for x in pts:
        ang = rng.uniform(0, 2 * np.pi, size=n)
        z = np.sqrt(x) * np.exp(1j * ang)
        zm = [mp.mpc(c.real, c.imag) for c in z]
        L = pulled_back_fs(zm)
        R0 = polarization(zm)
        R = R0 + _ddbar_fd(log_T, z)
        scale = max(1.0, float(np.max(np.abs(L))))
        worst = max(worst, float(np.max(np.abs(L - R))) / scale)
        worst_noT = max(worst_noT, float(np.max(np.abs(L - R0))) / scale)
    return PullbackResidual(worst, worst_noT, len(pts))


# ---------------------------------------------------------------------------
# balancing iteration
# ---------------------------------------------------------------------------

@dataclass
class BalancingStep:
    iteration: int
    ratio: float
    damping: float
    weights: list

    def to_json(self) -> dict:
        return {"iteration": self.iteration, "ratio": self.ratio, "damping": self.damping,
                "weights": list(self.weights)}


@dataclass
class BalancingTrace:
    m: int
    steps: list
    converged: bool
    sections: list

    @property
    def final_ratio(self) -> float:
        return self.steps[-1].ratio

    @property
    def final_weights(self) -> list:
        return self.steps[-1].weights

    def final_potential(self) -> list[tuple[tuple, float]]:
        w = np.array(self.final_weights)
        w = w / w[0]
        return [(tuple(J), float(c)) for J, c in zip(self.sections, w)]

    def to_json(self) -> dict:
        return {"m": self.m, "converged": self.converged, "final_ratio": self.final_ratio,
                "sections": [list(J) for J in self.sections],
                "steps": [s.to_json() for s in self.steps]}


def _bergman_metric(metric: PolarizedToricMetric, sections, weights) -> PolarizedToricMetric:
    terms = {tuple(J): Fraction(float(w)).limit_denominator(10 ** 15) for J, w in zip(sections, weights)}
    Fc = Polynomial(metric.F.vars, terms)
    return PolarizedToricMetric(Fc, metric.polytope, metric.m, Fraction(1, metric.m))


def balancing_iterate(metric: PolarizedToricMetric, max_iters: int = 50, tol: float = 1e-6,
                      points=None, raise_on_failure: bool = False) -> BalancingTrace:
    """Fixed-point iteration ``c_J <- 1 / ||z^J||^2`` for the level-m Bergman potentials.

    ``F_c = sum c_J x^J`` defines ``omega_c = (1/m) (i/2) dd^c log F_c``; the
    map sends ``c`` to the inverse norms under ``omega_c`` and ``F_c^(-1)``.
    The distortion of ``omega_c`` is ``T_c = F_{c'} / F_c`` with ``c'`` the image,
    so a fixed point (up to scale) is exactly a balanced metric.
    Damping starts at 1 and halves whenever the ratio increases.
    """
    gram = monomial_norms(metric)
    sections = gram.sections
    pts = sample_points(metric) if points is None else points
    T0 = _T_values(metric, gram, pts)
    ratio0 = float(T0.max() / T0.min())
    c = 1.0 / gram.norms
    c = c / c[0]
    steps = [BalancingStep(0, ratio0, 1.0, c.tolist())]
    if ratio0 - 1 < tol or len(sections) == 1:
        return BalancingTrace(metric.m, steps, True, sections)
    damping = 1.0
    prev = ratio0
    for it in range(1, max_iters + 1):
        cur = _bergman_metric(metric, sections, c)
        g = monomial_norms(cur)
        Tc = _T_values(cur, g, pts)
        ratio = float(Tc.max() / Tc.min())
        steps.append(BalancingStep(it, ratio, damping, c.tolist()))
        if ratio - 1 < tol:
            return BalancingTrace(metric.m, steps, True, sections)
        if ratio > prev and damping > 1 / 64:
            damping /= 2
        prev = ratio
        target = 1.0 / g.norms
        target = target / target[0]
        c = np.exp((1 - damping) * np.log(c) + damping * np.log(target))
        c = c / c[0]
    trace = BalancingTrace(metric.m, steps, False, sections)
    if raise_on_failure:
        raise NotConverged(f"constancy ratio {trace.final_ratio} after {max_iters} iterations", trace)
    return trace


# ---------------------------------------------------------------------------
# TYZ fit
# ---------------------------------------------------------------------------

@dataclass
class TYZFit:
    levels: list
    values: list
    coefficients: tuple          # (a0, a1, a2) with a0 = gamma
    residual: float
    constant_in_x: bool | None = None

    @property
    def ratios(self) -> tuple[float, float]:
        a0, a1, a2 = self.coefficients
        return a1 / a0, a2 / a0

    def to_json(self) -> dict:
        return {"levels": list(self.levels), "values": list(self.values),
                "coefficients": list(self.coefficients), "a1_over_a0": self.ratios[0],
                "a2_over_a0": self.ratios[1], "residual": self.residual,
                "constant_in_x": self.constant_in_x}


def tyz_fit(metric: PolarizedToricMetric, levels: Sequence[int], point: Sequence[float],
            constancy_points=None, constancy_tol: float = 1e-8) -> TYZFit:
    """Least-squares fit of ``T_m(point) = gamma (m^n + a1 m^(n-1) + a2 m^(n-2))``."""
    levels = sorted(set(int(m) for m in levels))
    if len(levels) < 5 or levels[-1] - levels[0] < 4:
        raise IllConditionedFit("need at least five levels spanning four steps")
    n = metric.n
    vals = []
    const = True if constancy_points is not None else None
    for m in levels:
        mm = metric.at_level(m)
        gram = monomial_norms(mm)
        vals.append(float(_T_values(mm, gram, np.atleast_2d(point))[0]))
        if constancy_points is not None:
            Tc = _T_values(mm, gram, constancy_points)
            const = const and (Tc.max() / Tc.min() - 1 < constancy_tol)
    ms = np.array(levels, dtype=float)
    M = np.stack([ms ** n, ms ** (n - 1), ms ** (n - 2)], axis=1)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise IllConditionedFit(f"design matrix condition number {cond:.3g}")
    coef, *_ = np.linalg.lstsq(M, np.array(vals), rcond=None)
    resid = float(np.max(np.abs(M @ coef - vals)) / max(abs(v) for v in vals))
    return TYZFit(levels, vals, tuple(float(c) for c in coef), resid, const)
