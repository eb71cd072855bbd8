"""LeBrun-Simanca model on the blow-up of C^n at the origin.

Everything is evaluated on the axis ``v = (v1, 0, .., 0)`` with
``t = |v1|^2``; Laurent coefficients are reported in ``u = 1/t`` so that the
``|v1|^(-4n)`` coefficient is the ``u^(2n)`` coefficient.

Models
------
``potential``
    ``g = 2 d dbar phi(s)``, ``s = |v|^2``, with ``phi = s/2 + (log s)/2``
    for ``n = 2`` (exact) and ``phi = s/2 - s^(2-n)`` for ``n >= 3``
    (leading terms; the tail is dropped).
``displayed``
    the reference closed forms: for ``n = 2`` the closed form
    ``g_{i jbar} = delta_ij + (delta_ij + conj(v_i) v_j) / |v|^4``, for
    ``n >= 3`` the leading-order form
    ``g_{i jbar} = delta_ij (1 + |v|^(2-2n)) + conj(v_i) v_j |v|^(-2n)``.
    Neither is closed, so the curvature is the Chern curvature of a
    Hermitian metric.
``displayed-transpose``
    the same matrices with ``v_i conj(v_j)`` in the off-diagonal slot, which is
    what the reference derivative table differentiates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .curvature import WirtingerMetric, axis_images, contract, to_rational_t
from .exactpoly import (OrderTooSmall, Polynomial, RationalFunction, TruncatedLaurentSeries,
                        fraction_str, laurent_expand)

MODELS = ("potential", "displayed", "displayed-transpose")
SERIES_VAR = "1/t"


class TruncationInsufficient(ValueError):
    pass


def default_model(n: int) -> str:
    return "displayed" if n == 2 else "potential"


def _check_n(n: int) -> None:
    if not 2 <= n <= 8:
        raise ValueError("n must satisfy 2 <= n <= 8")


@dataclass(frozen=True)
class RadialPotential:
    """``phi(s)``; ``tail`` adds ``tail * s^(-n)`` (a stand-in for the dropped o(s^(1-n)) terms)."""
    n: int
    tail: Fraction = Fraction(0)

    @property
    def exact(self) -> bool:
        return self.n == 2

    def describe(self) -> str:
        if self.n == 2:
            return "phi = s/2 + log(s)/2"
        out = f"phi = s/2 - s^{2 - self.n}"
        if self.tail:
            out += f" + {fraction_str(self.tail)} s^{-self.n}"
        return out

    def dphi(self, base):
        ks = base.vars.index("s")
        n = self.n
        if n == 2:
            return base.frac(Fraction(1, 2)) + base.frac(Fraction(1, 2), {ks: 1})
        out = base.frac(Fraction(1, 2)) + base.frac(n - 2, {ks: n - 1})
        if self.tail:
            out = out + base.frac(-n * self.tail, {ks: n + 1})
        return out

    def ddphi(self, base):
        ks = base.vars.index("s")
        n = self.n
        if n == 2:
            return base.frac(Fraction(-1, 2), {ks: 2})
        out = base.frac(-(n - 2) * (n - 1), {ks: n})
        if self.tail:
            out = out + base.frac(n * (n + 1) * self.tail, {ks: n + 2})
        return out


def lbs_metric(n: int, model: str | None = None, tail=0) -> WirtingerMetric:
    _check_n(n)
    model = model or default_model(n)
    if model == "potential":
        pot = RadialPotential(n, Fraction(tail))
        return WirtingerMetric.from_radial(n, pot.dphi, pot.ddphi, scale=2)
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    transpose = model == "displayed-transpose"

    def build(base, X):
        ks = base.vars.index("s")
        v, w = X[:n], X[n:2 * n]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                num = v[i] * w[j] if transpose else w[i] * v[j]
                if n == 2:
                    if i == j:
                        num = num + 1
                    e = base.frac(num, {ks: 2})
                else:
                    e = base.frac(num, {ks: n})
                    if i == j:
                        e = e + base.frac(1, {ks: n - 1})
                row.append(e + 1 if i == j else e)
            rows.append(row)
        return rows

    return WirtingerMetric.from_matrix(n, build)


# ---------------------------------------------------------------------------
# specialization to the axis
# ---------------------------------------------------------------------------

def _series_images(metric: WirtingerMetric, order: int) -> list:
    n = metric.n
    one = TruncatedLaurentSeries.constant(1, SERIES_VAR, order)
    zero = TruncatedLaurentSeries.exact_zero(SERIES_VAR, order)
    t = TruncatedLaurentSeries(SERIES_VAR, -1, [1], order)
    imgs = [one] + [zero] * (n - 1) + [t] + [zero] * (n - 1)
    if metric.uses_s:
        imgs.append(t)
    return imgs


def _to_series(order: int):
    def conv(num, den):
        if not isinstance(num, TruncatedLaurentSeries):
            num = TruncatedLaurentSeries.constant(num, SERIES_VAR, order)
        if den is None:
            return num
        if not isinstance(den, TruncatedLaurentSeries):
            den = TruncatedLaurentSeries.constant(den, SERIES_VAR, order)
        return num / den
    return conv


def axis_jets(metric: WirtingerMetric, path: str = "exact", order: int = 12):
    if path == "exact":
        return metric.specialize(axis_images(metric.n, metric.uses_s), to_rational_t)
    if path == "series":
        return metric.specialize(_series_images(metric, order), _to_series(order))
    raise ValueError(f"unknown path {path!r}")


def _coeff(value, k: int, order: int) -> Fraction:
    """Coefficient of ``u^k`` of an exact rational function of t or a series."""
    if isinstance(value, RationalFunction):
        if not value:
            return Fraction(0)
        try:
            return laurent_expand(value, True, max(order, k)).coefficient(k)
        except OrderTooSmall:
            return Fraction(0)
    if isinstance(value, TruncatedLaurentSeries):
        try:
            return value.coefficient(k)
        except OrderTooSmall as exc:
            raise TruncationInsufficient(str(exc)) from exc
    return Fraction(value) if k == 0 else Fraction(0)


def _render(value, order: int) -> str:
    if isinstance(value, RationalFunction):
        return laurent_expand(value, True, order).render() if value else "0"
    return value.render()


# ---------------------------------------------------------------------------
# published reference values
# ---------------------------------------------------------------------------

def reference_values(n: int) -> dict[str, Fraction]:
    """Coefficients of |v1|^(-4n) as displayed (n = 2 values, general-n brackets)."""
    if n == 2:
        return {"normR2": Fraction(31), "normRic2": Fraction(36), "defect": Fraction(-113)}
    m = n - 1
    r2 = 4 * m ** 4 + m * (1 - 2 * n) ** 2 + (1 - n) ** 2 + (1 - n) ** 2 + (2 - n) ** 2
    ric2 = -4 * m ** 4 + m * (2 - n) ** 2
    defect = m * (-12 * m ** 3 + (1 - 2 * n) ** 2 + 2 * (1 - n) - 4 * (2 - n) ** 2) + (2 - n) ** 2
    return {"normR2": Fraction(r2), "normRic2": Fraction(ric2), "defect": Fraction(defect)}


def reference_second_derivatives(n: int) -> dict[tuple, Fraction]:
    """Keys ``(i, l, k, j)`` for d^2 g_{i lbar} / d v_k d conj(v_j), 1-based, r = 2."""
    if n == 2:
        return {(1, 1, 1, 1): Fraction(-5), (2, 1, 1, 2): Fraction(-1),
                (1, 1, 2, 2): Fraction(-2), (2, 2, 2, 2): Fraction(1)}
    r = 2
    return {(1, 1, 1, 1): Fraction(2 * (n - 1) ** 2), (1, r, 1, r): Fraction(1 - n),
            (1, 1, r, r): Fraction(1 - 2 * n), (r, r, 1, 1): Fraction((1 - n) ** 2),
            (r, r, r, r): Fraction(2 - n)}


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class AxisAsymptotics:
    n: int
    model: str
    path: str
    exponent: int                      # in |v1|
    coefficients: dict                 # normR2, normRic2, defect, rho -> Fraction
    reference: dict
    matches: dict
    expansions: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def defect_negative(self) -> bool:
        return self.coefficients["defect"] < 0

    def to_json(self) -> dict:
        return {
            "n": self.n, "model": self.model, "path": self.path,
            "exponent_in_abs_v1": self.exponent,
            "coefficients": {k: fraction_str(v) for k, v in self.coefficients.items()},
            "reference": {k: fraction_str(v) for k, v in self.reference.items()},
            "matches": dict(self.matches),
            "defect_negative": self.defect_negative,
            "expansions": dict(self.expansions),
            "notes": list(self.notes),
        }


def _axis_scalars(metric: WirtingerMetric, path: str, order: int):
    c = contract(axis_jets(metric, path, order))
    return {"normR2": c.normR2, "normRic2": c.normRic2,
            "defect": c.normR2 - c.normRic2 * 4, "rho": c.rho}


def axis_defect(n: int, model: str | None = None, path: str | None = None,
                order: int | None = None) -> AxisAsymptotics:
    """Leading ``|v1|^(-4n)`` coefficients of |R|^2, |Ric|^2 and their defect on the axis."""
    _check_n(n)
    model = model or default_model(n)
    path = path or ("exact" if n == 2 else "series")
    k = 2 * n
    order = order if order is not None else k + 2
    metric = lbs_metric(n, model)
    vals = _axis_scalars(metric, path, order)
    coeffs = {name: _coeff(v, k, order) for name, v in vals.items()}
    notes = []
    if model == "potential" and n >= 3:
        # the requested coefficient must not see the dropped tail
        perturbed = _axis_scalars(lbs_metric(n, model, tail=1), path, order)
        for name in ("normR2", "normRic2", "defect"):
            if _coeff(perturbed[name], k, order) != coeffs[name]:
                raise TruncationInsufficient(f"{name} coefficient depends on the dropped tail")
        notes.append("coefficient unchanged under a tail perturbation s^(-n)")
    reference = reference_values(n)
    matches = {name: coeffs[name] == reference[name] for name in reference}
    if n >= 3 and reference["normRic2"] < 0:
        notes.append("displayed |Ric|^2 bracket is negative, impossible for a norm square")
    expansions = {name: _render(v, k + 2) for name, v in vals.items()}
    return AxisAsymptotics(n, model, path, -4 * n, coeffs, reference, matches, expansions, notes)


@dataclass
class SecondDerivativeEntry:
    i: int
    l: int
    k: int
    j: int
    coefficient: Fraction
    reference: Fraction | None

    @property
    def matches(self) -> bool | None:
        return None if self.reference is None else self.reference == self.coefficient

    def to_json(self) -> dict:
        return {"entry": f"d^2 g_{self.i}{self.l} / dv_{self.k} dvbar_{self.j}",
                "coefficient": fraction_str(self.coefficient),
                "reference": None if self.reference is None else fraction_str(self.reference),
                "matches": self.matches}


def second_derivative_table(n: int, model: str | None = None) -> dict:
    """Leading axis coefficients of every ``d_k dbar_j g_{i lbar}``.

    The reference exponent is ``|v1|^(-4)`` for n = 2 and ``|v1|^(-2n)``
    otherwise; ``higher_order`` lists entries whose expansion starts later.
    """
    _check_n(n)
    model = model or "displayed-transpose"
    metric = lbs_metric(n, model)
    jets = axis_jets(metric, "exact")
    k_ref = 2 if n == 2 else n
    reference = reference_second_derivatives(n)
    entries, higher, earlier = [], [], []
    rng = range(n)
    for i in rng:
        for l in rng:
            for k in rng:
                for j in rng:
                    e = jets.ddg[k][j][i][l]
                    if not e:
                        continue
                    lead, _ = laurent_expand(e, True, k_ref + 4).leading()
                    key = (i + 1, l + 1, k + 1, j + 1)
                    coef = _coeff(e, k_ref, k_ref + 4)
                    if lead < k_ref:
                        earlier.append(key)
                    if coef or key in reference:
                        entries.append(SecondDerivativeEntry(*key, coef, reference.get(key)))
                    elif lead > k_ref:
                        higher.append(key)
    for key, val in reference.items():
        if not any((e.i, e.l, e.k, e.j) == key for e in entries):
            entries.append(SecondDerivativeEntry(*key, Fraction(0), val))
    return {"n": n, "model": model, "exponent_in_t": -k_ref, "entries": entries,
            "higher_order": higher, "earlier_order": earlier}
