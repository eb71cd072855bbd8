"""Curvature of torus-invariant Kahler metrics.

Two engines share one contraction routine:

* the toric engine works in logarithmic coordinates ``zeta_i = log z_i``.
  There the metric of ``omega = (i/2) dd^c log F`` is the real Hessian
  ``H_ij = theta_i theta_j log F`` with ``theta_i = x_i d/dx_i`` and every
  tensor component is a rational function of ``x``.  Scalars (rho, |R|^2,
  |Ric|^2, Laplacians) are frame independent.
* the Wirtinger engine treats ``v_i`` and ``w_i = conj(v_i)`` as independent
  variables, differentiates symbolically and only then specializes to a
  point, an axis ``v = (1, 0, ..), w = (t, 0, ..)`` or a series in ``1/t``.

Index conventions (fixed throughout):

    g^{p q}       with  sum_q g^{p q} g_{r q} = delta_{p r}
    R_{i j k l} = -d_k dbar_l g_{i j} + sum_{p,q} g^{p q} (d_k g_{i q}) (dbar_l g_{p j})
    Ric_{k l}   =  sum_{i,j} g^{i j} R_{i j k l}
    rho         =  KAPPA * sum g^{k l} Ric_{k l}
    |R|^2       =  sum R_{i j k l} R_{b a d c} g^{i a} g^{b j} g^{k c} g^{d l}
    |Ric|^2     =  sum Ric_{i j} Ric_{b a} g^{i a} g^{b j}
    a1 = rho / 2,   a2 = Lap(rho) / 3 + (|R|^2 - 4 |Ric|^2 + 3 rho^2) / 24

(second index of g and R slots 2, 4 are the barred ones).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .exactpoly import (FactorBase, FactoredFraction, Polynomial, RationalFunction, SingularMatrix,
                        det_poly_matrix, fraction_str, matrix_inverse)

# Trace normalization for the scalar curvature.  With KAPPA = 1 the
# Fubini-Study line F = 1 + x has rho = 2, so a1 = rho/2 = 1 agrees with the
# distortion expansion T_m = (m + 1)/pi = (m + a1)/pi.
KAPPA = Fraction(1)


class DegenerateMetric(ValueError):
    pass


# ---------------------------------------------------------------------------
# generic contraction over any field-like ring
# ---------------------------------------------------------------------------

def _sum(items, zero):
    total = None
    for x in items:
        if not x:
            continue
        total = x if total is None else total + x
    return zero if total is None else total


@dataclass
class Jets:
    """``g``, its first derivatives and mixed second derivatives at one place.

    ``dg[k][i][j] = d_k g_{i j}``, ``dbg[l][i][j] = dbar_l g_{i j}``,
    ``ddg[k][l][i][j] = d_k dbar_l g_{i j}``.
    """
    g: list
    dg: list
    dbg: list
    ddg: list


@dataclass
class Contracted:
    ginv: list            # ginv[p][q] = g^{p q}
    R: dict               # (i, j, k, l) -> component, zeros omitted
    Ric: list
    rho: object
    normR2: object
    normRic2: object


def inverse_upper(g: list) -> list:
    """``g^{p q}`` with ``sum_q g^{p q} g_{r q} = delta``, i.e. ``(g^T)^{-1}``."""
    n = len(g)
    gt = [[g[j][i] for j in range(n)] for i in range(n)]
    try:
        return matrix_inverse(gt)
    except SingularMatrix as exc:
        raise DegenerateMetric(str(exc)) from exc


def _identity(v):
    return v


def _reduce(v):
    return v.reduced() if isinstance(v, FactoredFraction) else v


def contract(j: Jets, kappa=KAPPA, ginv: list | None = None, simplify: Callable = _reduce) -> Contracted:
    """Curvature tensor and scalars from jets.  ``simplify`` is applied to partial sums."""
    n = len(j.g)
    zero = j.g[0][0] * 0
    gu = ginv if ginv is not None else inverse_upper(j.g)
    rng = range(n)

    def total(items):
        return simplify(_sum(items, zero))

    # X[k][i][p] = sum_q g^{p q} d_k g_{i q}
    X = [[[total(gu[p][q] * j.dg[k][i][q] for q in rng if gu[p][q] and j.dg[k][i][q])
           for p in rng] for i in rng] for k in rng]
    R: dict = {}
    for i in rng:
        for jj in rng:
            for k in rng:
                for l in rng:
                    quad = _sum((X[k][i][p] * j.dbg[l][p][jj] for p in rng
                                 if X[k][i][p] and j.dbg[l][p][jj]), zero)
                    val = quad - j.ddg[k][l][i][jj] if j.ddg[k][l][i][jj] else quad
                    if val:
                        val = simplify(val)
                    if val:
                        R[(i, jj, k, l)] = val
    Ric = [[total(gu[i][jj] * R[(i, jj, k, l)] for i in rng for jj in rng
                  if gu[i][jj] and (i, jj, k, l) in R) for l in rng] for k in rng]
    rho = simplify(_sum((gu[k][l] * Ric[k][l] for k in rng for l in rng), zero) * kappa)

    def raise_slot(T: dict, slot: int, upper_first: bool) -> dict:
        # replace index in ``slot`` by a contraction with g^{..}
        out: dict = {}
        for key, v in T.items():
            idx = key[slot]
            for a in rng:
                h = gu[idx][a] if upper_first else gu[a][idx]
                if not h:
                    continue
                nk = key[:slot] + (a,) + key[slot + 1:]
                out[nk] = out[nk] + v * h if nk in out else v * h
        return {k: simplify(v) for k, v in out.items() if v}

    # |R|^2 = sum R_{ijkl} R_{badc} g^{ia} g^{bj} g^{kc} g^{dl}
    T = raise_slot(R, 0, True)
    T = raise_slot(T, 1, False)
    T = raise_slot(T, 2, True)
    T = raise_slot(T, 3, False)
    normR2 = _sum((v * R[(b, a, d, c)] for (a, b, c, d), v in T.items() if (b, a, d, c) in R), zero)
    # |Ric|^2 = sum Ric_{ij} Ric_{ba} g^{ia} g^{bj}
    S = [[total(gu[i][a] * Ric[i][jj] for i in rng if gu[i][a] and Ric[i][jj]) for jj in rng] for a in rng]
    U = [[total(gu[b][jj] * Ric[b][a] for b in rng if gu[b][jj] and Ric[b][a]) for a in rng] for jj in rng]
    normRic2 = _sum((S[a][jj] * U[jj][a] for a in rng for jj in rng if S[a][jj] and U[jj][a]), zero)
    return Contracted(gu, R, Ric, rho, simplify(normR2), simplify(normRic2))


def tyz_a2(laplacian_rho, normR2, normRic2, rho):
    return laplacian_rho * Fraction(1, 3) + (normR2 - normRic2 * 4 + rho * rho * 3) * Fraction(1, 24)


# ---------------------------------------------------------------------------
# toric engine
# ---------------------------------------------------------------------------

@dataclass
class ToricPotential:
    """``F(x)`` defining ``omega = (i/2) dd^c log F``; optional polytope."""
    F: Polynomial
    polytope: object = None

    def __post_init__(self):
        if self.F.constant_term() <= 0:
            raise ValueError("F must have a positive constant term")

    @property
    def n(self) -> int:
        return self.F.nvars

    @classmethod
    def from_json(cls, data) -> "ToricPotential":
        return cls(Polynomial.from_json(data))


def theta(f: FactoredFraction, i: int) -> FactoredFraction:
    """``x_i d/dx_i``."""
    x = Polynomial.variable(i, f.base.vars)
    return f.differentiate(i) * x


def theta_poly(p: Polynomial, i: int) -> Polynomial:
    return p.differentiate(i) * Polynomial.variable(i, p.vars)


@dataclass
class MetricData:
    """Metric of a toric potential.

    ``g`` is the matrix with ``conj(z_i) z_j`` replaced by ``x_i``:
    ``g_ij = ((F F_ij - F_i F_j) x_i + F F_j delta_ij) / F^2``.  ``H`` is the
    same metric in logarithmic coordinates, ``H_ij = g_ij x_j``.
    """
    potential: ToricPotential
    base: FactorBase
    H: list
    g: list
    ginv: list
    det_g: FactoredFraction
    detA: Polynomial
    scale: Fraction = Fraction(1)

    @property
    def n(self) -> int:
        return self.potential.n

    def g_rational(self) -> list[list[RationalFunction]]:
        return [[e.to_rational() for e in row] for row in self.g]

    def ginv_rational(self) -> list[list[RationalFunction]]:
        return [[e.to_rational() for e in row] for row in self.ginv]


def metric_from_potential(pot: ToricPotential | Polynomial, scale=1) -> MetricData:
    """Metric, inverse and determinant; checks ``det g * F^(2n) = det(A)``.

    ``scale`` multiplies the metric (used for covariance checks).
    """
    if isinstance(pot, Polynomial):
        pot = ToricPotential(pot)
    F = pot.F
    n = F.nvars
    scale = Fraction(scale)
    base = FactorBase(F.vars)
    kF = base.register(F)
    # register may have normalized F by its content; keep exact bookkeeping
    Fb = base.factors[kF]
    cF = F.content() if F.leading_coefficient() > 0 else -F.content()
    th = [theta_poly(F, i) for i in range(n)]
    H = []
    for i in range(n):
        row = []
        for j in range(n):
            num = F * theta_poly(th[i], j) - th[i] * th[j]
            row.append(FactoredFraction(base, num.scale(scale / (cF * cF)), {kF: 2}).reduced())
        H.append(row)
    x = Polynomial.generators(F.vars)
    Fi = [F.differentiate(i) for i in range(n)]
    A = []
    for i in range(n):
        arow = []
        for j in range(n):
            e = (F * F.diff(i, j) - Fi[i] * Fi[j]) * x[i]
            if i == j:
                e = e + F * Fi[j]
            arow.append(e)
        A.append(arow)
    dA = det_poly_matrix(A)
    if not dA.terms:
        raise DegenerateMetric("det(A) vanishes identically")
    g = [[FactoredFraction(base, A[i][j].scale(scale / (cF * cF)), {kF: 2}).reduced() for j in range(n)]
         for i in range(n)]
    det_g = det_poly_matrix(g).reduced()
    # identity det g * F^(2n) = det(A) (up to the scale^n factor)
    lhs = (det_g * FactoredFraction(base, F ** (2 * n), {})).reduced()
    if not (lhs.den == {} and lhs.num == dA.scale(scale ** n)):
        raise AssertionError("det g * F^(2n) != det(A)")
    # independent path through H: det H = det g * prod x
    dH = det_poly_matrix(H)
    px = Polynomial.constant(1, F.vars)
    for xi in x:
        px = px * xi
    if (dH - det_g * FactoredFraction(base, px, {})).reduced():
        raise AssertionError("log-frame determinant disagrees")
    ginv = inverse_upper(g)
    return MetricData(pot, base, H, g, ginv, det_g, dA, scale)


def toric_jets(md: MetricData) -> Jets:
    n = md.n
    H = md.H
    dH = [[[theta(H[i][j], k) for j in range(n)] for i in range(n)] for k in range(n)]
    ddH = [[[[theta(dH[k][i][j], l) for j in range(n)] for i in range(n)] for l in range(n)] for k in range(n)]
    return Jets(H, dH, dH, ddH)


@dataclass
class CurvatureReport:
    """Curvature data.  Components are in the logarithmic frame; scalars are frame free."""
    n: int
    R: dict
    Ric: list
    rho: object
    normR2: object
    normRic2: object
    laplacian_rho: object = None
    a1: object = None
    a2: object = None
    kappa: Fraction = KAPPA
    frame: str = "log"
    metric: MetricData | None = None

    def scalars(self) -> dict:
        return {"rho": self.rho, "normR2": self.normR2, "normRic2": self.normRic2,
                "laplacian_rho": self.laplacian_rho, "a1": self.a1, "a2": self.a2}

    def simplified(self) -> "CurvatureReport":
        def s(v):
            return v.reduced() if isinstance(v, FactoredFraction) else v
        return CurvatureReport(self.n, {k: s(v) for k, v in self.R.items()},
                               [[s(v) for v in row] for row in self.Ric],
                               s(self.rho), s(self.normR2), s(self.normRic2), s(self.laplacian_rho),
                               s(self.a1), s(self.a2), self.kappa, self.frame, self.metric)


def riemann_tensor(md: MetricData) -> dict:
    """Nonzero components ``R_{i j k l}`` (log frame) as factored fractions."""
    c = contract(toric_jets(md), ginv=inverse_upper(md.H))
    return {k: v.reduced() for k, v in c.R.items()}


def curvature_norms(md: MetricData, riem: dict | None = None) -> CurvatureReport:
    jets = toric_jets(md)
    hinv = inverse_upper(md.H)
    c = contract(jets, ginv=hinv)
    rho = c.rho.reduced()
    n = md.n
    lap = _sum((hinv[k][l] * theta(theta(rho, k), l) for k in range(n) for l in range(n)), rho * 0) * KAPPA
    lap = lap.reduced() if lap else lap
    normR2 = c.normR2.reduced() if c.normR2 else c.normR2
    normRic2 = c.normRic2.reduced() if c.normRic2 else c.normRic2
    a1 = rho * Fraction(1, 2)
    a2 = tyz_a2(lap, normR2, normRic2, rho)
    a2 = a2.reduced() if a2 else a2
    R = riem if riem is not None else {k: v.reduced() for k, v in c.R.items()}
    Ric = [[v.reduced() if v else v for v in row] for row in c.Ric]
    return CurvatureReport(n, R, Ric, rho, normR2, normRic2, lap, a1, a2, KAPPA, "log", md)


def curvature(F: Polynomial, scale=1) -> CurvatureReport:
    md = metric_from_potential(F, scale)
    return curvature_norms(md)


def einstein_constant(report: CurvatureReport) -> Fraction | None:
    """``lambda`` with ``Ric = lambda g`` exactly, or None."""
    md = report.metric
    n = report.n
    lam = None
    for i in range(n):
        for j in range(n):
            ric, h = report.Ric[i][j], md.H[i][j]
            if not h:
                if ric:
                    return None
                continue
            q = (ric / h).reduced() if ric else ric * 0
            if q and not (q.den == {} and q.num.is_constant()):
                return None
            val = q.num.constant_term() if q else Fraction(0)
            if lam is None:
                lam = val
            elif lam != val:
                return None
    return lam


def kahler_symmetric(R: dict) -> bool:
    """``R_{ijkl} = R_{kjil} = R_{ilkj}`` for every stored component."""
    for (i, j, k, l), v in R.items():
        for key in ((k, j, i, l), (i, l, k, j)):
            w = R.get(key)
            if w is None or not v == w:
                return False
    return True


def evaluate_report(report: CurvatureReport, point: Sequence) -> dict:
    """Exact values of every scalar and component at a rational point."""
    point = [Fraction(p) for p in point]

    def ev(v):
        if v is None:
            return None
        if isinstance(v, FactoredFraction):
            return v.evaluate(point)
        if isinstance(v, RationalFunction):
            return v.evaluate(point)
        return Fraction(v)

    out = {k: ev(v) for k, v in report.scalars().items()}
    out["R"] = {k: ev(v) for k, v in sorted(report.R.items())}
    out["Ric"] = [[ev(v) for v in row] for row in report.Ric]
    return out


# ---------------------------------------------------------------------------
# Wirtinger engine
# ---------------------------------------------------------------------------

class WirtingerMetric:
    """Hermitian metric ``g_{i j}(v, w)`` given symbolically in ``v``, ``w`` (and ``s``).

    ``s`` (if used) stands for ``sum v_i w_i`` and is differentiated by the
    chain rule, so radial potentials never expand powers of ``s``.
    """

    def __init__(self, n: int, g: list, base: FactorBase, uses_s: bool):
        self.n = n
        self.g = g
        self.base = base
        self.uses_s = uses_s
        self._jets = None

    @staticmethod
    def variables(n: int, uses_s: bool) -> tuple[str, ...]:
        vs = tuple(f"v{i + 1}" for i in range(n)) + tuple(f"w{i + 1}" for i in range(n))
        return vs + (("s",) if uses_s else ())

    def _chain(self, var: int) -> dict:
        if not self.uses_s:
            return {}
        n = self.n
        V = self.base.vars
        s_idx = 2 * n
        # d s / d v_k = w_k ; d s / d w_k = v_k
        partner = var + n if var < n else var - n
        return {s_idx: Polynomial.variable(partner, V)}

    def d(self, f: FactoredFraction, k: int) -> FactoredFraction:
        return f.differentiate(k, self._chain(k)) if f else f

    def dbar(self, f: FactoredFraction, l: int) -> FactoredFraction:
        return f.differentiate(self.n + l, self._chain(self.n + l)) if f else f

    def jets(self) -> Jets:
        if self._jets is None:
            n = self.n
            rng = range(n)
            dg = [[[self.d(self.g[i][j], k) for j in rng] for i in rng] for k in rng]
            dbg = [[[self.dbar(self.g[i][j], l) for j in rng] for i in rng] for l in rng]
            ddg = [[[[self.dbar(dg[k][i][j], l) for j in rng] for i in rng] for l in rng] for k in rng]
            self._jets = Jets(self.g, dg, dbg, ddg)
        return self._jets

    @classmethod
    def from_toric(cls, F: Polynomial) -> "WirtingerMetric":
        """``g = d dbar log F(v w)``."""
        n = F.nvars
        V = cls.variables(n, False)
        vs = Polynomial.generators(V)
        Fvw = F.substitute([vs[i] * vs[n + i] for i in range(n)], V)
        base = FactorBase(V)
        k = base.register(Fvw)
        c = Fvw.content() if Fvw.leading_coefficient() > 0 else -Fvw.content()
        g = []
        for i in range(n):
            row = []
            for j in range(n):
                num = Fvw * Fvw.diff(i, n + j) - Fvw.differentiate(i) * Fvw.differentiate(n + j)
                row.append(FactoredFraction(base, num.scale(1 / (c * c)), {k: 2}).reduced())
            g.append(row)
        return cls(n, g, base, False)

    @classmethod
    def from_radial(cls, n: int, dphi: Callable, ddphi: Callable, scale=1) -> "WirtingerMetric":
        """``g = scale * d dbar phi(s)`` from callables returning phi'(s), phi''(s).

        Each callable receives the FactorBase and must return a FactoredFraction
        in the variable ``s``.
        """
        V = cls.variables(n, True)
        base = FactorBase(V)
        vs = Polynomial.generators(V)
        p1 = dphi(base)
        p2 = ddphi(base)
        g = []
        for i in range(n):
            row = []
            for j in range(n):
                e = p2 * (vs[n + i] * vs[j])
                if i == j:
                    e = e + p1
                row.append((e * Fraction(scale)).reduced())
            g.append(row)
        return cls(n, g, base, True)

    @classmethod
    def from_matrix(cls, n: int, build: Callable, uses_s: bool = True) -> "WirtingerMetric":
        """Explicit matrix: ``build(base, gens)`` returns the n x n entries."""
        V = cls.variables(n, uses_s)
        base = FactorBase(V)
        g = build(base, Polynomial.generators(V))
        return cls(n, [[e.reduced() for e in row] for row in g], base, uses_s)

    # specialization ---------------------------------------------------
    def specialize(self, images: Sequence, to: Callable):
        """Map every jet entry through ``to(num_image, den_image)``.

        ``images`` gives the value of each variable (Fractions, polynomials
        in ``t`` or series); ``to`` builds a field element from the images of
        numerator and denominator.
        """
        cache_fac: dict = {}

        def conv(f: FactoredFraction):
            if not f:
                return None
            num = f.num.substitute(images)
            den = None
            for k, e in sorted(f.den.items()):
                if k not in cache_fac:
                    cache_fac[k] = self.base.factors[k].substitute(images)
                part = cache_fac[k] ** e
                den = part if den is None else den * part
            return to(num, den)

        j = self.jets()
        n = self.n
        rng = range(n)
        zero = to(images[0] * 0, None)

        def z(v):
            return zero if v is None else v

        g = [[z(conv(j.g[i][k])) for k in rng] for i in rng]
        dg = [[[z(conv(j.dg[k][i][q])) for q in rng] for i in rng] for k in rng]
        dbg = [[[z(conv(j.dbg[l][p][q])) for q in rng] for p in rng] for l in rng]
        ddg = [[[[z(conv(j.ddg[k][l][i][q])) for q in rng] for i in rng] for l in rng] for k in rng]
        return Jets(g, dg, dbg, ddg)


def axis_images(n: int, uses_s: bool, var: str = "t") -> list[Polynomial]:
    """``v = (1, 0, ..)``, ``w = (t, 0, ..)``, ``s = t`` as polynomials in ``t``."""
    T = (var,)
    t = Polynomial.variable(0, T)
    one = Polynomial.constant(1, T)
    zero = Polynomial.zero(T)
    imgs = [one] + [zero] * (n - 1) + [t] + [zero] * (n - 1)
    if uses_s:
        imgs.append(t)
    return imgs


def to_rational_t(num, den) -> RationalFunction:
    if not isinstance(num, Polynomial):
        num = Polynomial.constant(num, ("t",))
    if den is None:
        return RationalFunction(num)
    if not isinstance(den, Polynomial):
        den = Polynomial.constant(den, num.vars)
    return RationalFunction(num, den)


def point_images(v: Sequence, w: Sequence | None = None, s=None) -> list:
    v = [Fraction(c) for c in v]
    w = list(v) if w is None else [Fraction(c) for c in w]
    imgs = v + w
    if s is not None:
        imgs.append(Fraction(s))
    return imgs


def to_fraction(num, den):
    num = Fraction(num) if not isinstance(num, Polynomial) else num.constant_term()
    if den is None:
        return num
    den = Fraction(den) if not isinstance(den, Polynomial) else den.constant_term()
    return num / den


def scalars_at(metric: WirtingerMetric, images: Sequence, to: Callable = to_fraction) -> Contracted:
    return contract(metric.specialize(images, to))


# ---------------------------------------------------------------------------
# independent checks
# ---------------------------------------------------------------------------

def ricci_from_determinant(md: MetricData) -> list:
    """``-theta_k theta_l log det H``; equals the Ricci tensor for Kahler metrics."""
    n = md.n
    D = det_poly_matrix(md.H).reduced()
    dD = [theta(D, k) for k in range(n)]
    Dinv = D.inverse()
    out = []
    for k in range(n):
        row = []
        for l in range(n):
            val = (theta(dD[k], l) * D - dD[k] * dD[l]) * Dinv * Dinv
            row.append((-val).reduced())
        out.append(row)
    return out


def finite_difference_scalars(F: Polynomial, x: Sequence, dps: int = 40, kappa=KAPPA) -> dict:
    """Curvature scalars of ``(i/2) dd^c log F`` from numerical derivatives of ``log F(e^u)``.

    Shares no code with the symbolic engine except the contraction, which is
    applied to mpmath numbers.
    """
    import mpmath as mp

    n = F.nvars
    terms = [(e, mp.mpf(c.numerator) / c.denominator) for e, c in F.terms.items()]

    with mp.workdps(dps):
        def psi(*u):
            return mp.log(mp.fsum(c * mp.exp(mp.fsum(k * ui for k, ui in zip(e, u))) for e, c in terms))

        def partial(f, u, orders):
            return mp.diff(f, u, tuple(orders))

        def unit(*idx):
            o = [0] * n
            for i in idx:
                o[i] += 1
            return o

        def jets_at(u):
            H = [[partial(psi, u, unit(i, j)) for j in range(n)] for i in range(n)]
            dH = [[[partial(psi, u, unit(i, j, k)) for j in range(n)] for i in range(n)] for k in range(n)]
            ddH = [[[[partial(psi, u, unit(i, j, k, l)) for j in range(n)] for i in range(n)]
                    for l in range(n)] for k in range(n)]
            return Jets(H, dH, dH, ddH)

        def rho_at(*u):
            return contract(jets_at(list(u)), kappa=kappa, simplify=_identity).rho

        u0 = [mp.log(mp.mpf(Fraction(v).numerator) / Fraction(v).denominator) for v in x]
        c = contract(jets_at(u0), kappa=kappa, simplify=_identity)
        lap = mp.fsum(c.ginv[k][l] * partial(rho_at, u0, unit(k, l)) for k in range(n) for l in range(n)) * kappa
        a2 = lap / 3 + (c.normR2 - 4 * c.normRic2 + 3 * c.rho ** 2) / 24
        g = [[c.ginv[0][0] * 0 + jets_at(u0).g[i][j] / mp.exp(u0[j]) for j in range(n)] for i in range(n)]
        return {"rho": c.rho, "normR2": c.normR2, "normRic2": c.normRic2, "laplacian_rho": lap,
                "a1": c.rho / 2, "a2": a2, "g": g}
