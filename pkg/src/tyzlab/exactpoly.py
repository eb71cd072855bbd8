"""Exact sparse multivariate polynomials, rational functions and truncated
Laurent series over the rationals.

Coefficients are :class:`fractions.Fraction` by default.  A polynomial may
also carry coefficients that are themselves :class:`Polynomial` objects in a
different set of variables (the "symbolic unknowns" layer); the two rings are
told apart by their variable tuples.
"""
from __future__ import annotations

import heapq
import itertools
import json
import re
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Callable, Iterable, Mapping, Sequence


class SingularMatrix(ValueError):
    pass


class NotAPerfectPower(ValueError):
    pass


class OrderTooSmall(ValueError):
    pass


class PoleAtPoint(ZeroDivisionError):
    pass


def _is_zero(c) -> bool:
    return not c


def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def fraction_str(q: Fraction) -> str:
    """Render a rational as the wire string ``"p/q"`` (always with a slash)."""
    q = as_fraction(q)
    return f"{q.numerator}/{q.denominator}"


class Polynomial:
    """Sparse polynomial ``sum c_e x^e`` with an ordered tuple of variable names.

    Instances are treated as immutable; every operation returns a new object.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None,
                 _clean: bool = False):
        self.vars = tuple(variables)
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms  # type: ignore[assignment]
        else:
            n = len(self.vars)
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n or any(k < 0 for k in e):
                    raise ValueError(f"bad exponent {e} for variables {self.vars}")
                if isinstance(c, (int, str)):
                    c = as_fraction(c)
                if not _is_zero(c):
                    clean[e] = c
            self.terms = clean
        self._hash = None

    # ----- constructors -------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables, {}, _clean=True)

    @classmethod
    def constant(cls, c, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        if isinstance(c, (int, str)):
            c = as_fraction(c)
        if _is_zero(c):
            return cls.zero(variables)
        return cls(variables, {(0,) * len(variables): c}, _clean=True)

    @classmethod
    def variable(cls, name_or_index, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        i = variables.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): Fraction(1)}, _clean=True)

    @classmethod
    def monomial(cls, exp: Sequence[int], variables: Sequence[str], coef=1) -> "Polynomial":
        return cls(variables, {tuple(exp): coef})

    @classmethod
    def generators(cls, variables: Sequence[str]) -> list["Polynomial"]:
        return [cls.variable(i, variables) for i in range(len(variables))]

    # ----- basic queries ------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, exp: Sequence[int]):
        return self.terms.get(tuple(exp), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var) -> int:
        i = self._index(var)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def min_degree(self, var) -> int:
        i = self._index(var)
        return min(e[i] for e in self.terms) if self.terms else 0

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.terms, key=_grlex_key, reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], object]:
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def leading_coefficient(self):
        return self.leading_term()[1]

    def used_variables(self) -> list[str]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return [self.vars[i] for i in sorted(used)]

    def _index(self, var) -> int:
        return self.vars.index(var) if isinstance(var, str) else int(var)

    # ----- ring operations ----------------------------------------------
    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial) and other.vars == self.vars:
            return other
        if isinstance(other, (int, Fraction, Polynomial)):
            return Polynomial.constant(other, self.vars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if _is_zero(v):
                    del out[e]
                else:
                    out[e] = v
        return Polynomial(self.vars, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "Polynomial":
        if _is_zero(c):
            return Polynomial.zero(self.vars)
        out = {}
        for e, v in self.terms.items():
            w = v * c
            if not _is_zero(w):
                out[e] = w
        return Polynomial(self.vars, out, _clean=True)

    def __mul__(self, other):
        if isinstance(other, Polynomial) and other.vars == self.vars:
            return self.mul(other)
        if isinstance(other, (int, Fraction, Polynomial)):
            return self.scale(as_fraction(other) if isinstance(other, int) else other)
        return NotImplemented

    __rmul__ = __mul__

    def mul(self, other: "Polynomial", keep: Callable[[tuple], bool] | None = None) -> "Polynomial":
        """Product, optionally discarding monomials for which ``keep`` is false.

        ``keep`` must describe a monomial ideal complement (e.g. a degree or box
        truncation) for the result to be a ring homomorphism image.
        """
        if not self.terms or not other.terms:
            return Polynomial.zero(self.vars)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if keep is not None and not keep(e):
                    continue
                v = out.get(e)
                out[e] = ca * cb if v is None else v + ca * cb
        return Polynomial(self.vars, {e: c for e, c in out.items() if not _is_zero(c)}, _clean=True)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        return self.pow(k)

    def pow(self, k: int, keep: Callable[[tuple], bool] | None = None) -> "Polynomial":
        result = Polynomial.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result.mul(base, keep)
            k >>= 1
            if k:
                base = base.mul(base, keep)
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                if self.is_constant() and other.is_constant():
                    return self.constant_term() == other.constant_term()
                return False
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # ----- calculus / substitution --------------------------------------
    def differentiate(self, var) -> "Polynomial":
        i = self._index(var)
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Polynomial(self.vars, out, _clean=True)

    def diff(self, *vars_) -> "Polynomial":
        p = self
        for v in vars_:
            p = p.differentiate(v)
        return p

    def truncate(self, keep: Callable[[tuple], bool]) -> "Polynomial":
        return Polynomial(self.vars, {e: c for e, c in self.terms.items() if keep(e)}, _clean=True)

    def evaluate(self, point):
        """Evaluate at ``point`` (sequence aligned with ``vars`` or a name map).

        Values may be Fractions, floats, complex numbers or ring elements
        (anything supporting ``+``, ``*`` and ``**``).
        """
        if isinstance(point, Mapping):
            point = [point[v] for v in self.vars]
        point = list(point)
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        return total

    def substitute(self, images: Sequence, target_vars: Sequence[str] | None = None):
        """Ring homomorphism sending variable ``i`` to ``images[i]``.

        Images may be Polynomials (all in one ring), RationalFunctions, or
        scalars.  Powers are cached per variable.
        """
        if isinstance(images, Mapping):
            images = [images.get(v, Polynomial.variable(v, target_vars) if target_vars else None)
                      for v in self.vars]
        images = list(images)
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
            return cache[key]

        total = None
        for e, c in self.terms.items():
            t = None
            for i, k in enumerate(e):
                if k:
                    t = power(i, k) if t is None else t * power(i, k)
            if t is None:
                term = c
            else:
                term = t * c
            total = term if total is None else total + term
        if total is None:
            if target_vars is not None:
                return Polynomial.zero(target_vars)
            return Fraction(0)
        return total

    def rename(self, variables: Sequence[str]) -> "Polynomial":
        if len(variables) != self.nvars:
            raise ValueError("rename must keep the variable count")
        return Polynomial(variables, self.terms, _clean=True)

    def embed(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express in a larger (or reordered) variable tuple."""
        variables = tuple(variables)
        pos = [variables.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, k in zip(pos, e):
                ne[i] = k
            out[tuple(ne)] = c
        return Polynomial(variables, out, _clean=True)

    def map_coefficients(self, f: Callable) -> "Polynomial":
        return Polynomial(self.vars, {e: f(c) for e, c in self.terms.items()})

    # ----- content, division --------------------------------------------
    def content(self) -> Fraction:
        """Positive rational ``c`` such that ``self / c`` has coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        nums = [abs(c.numerator) for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        return Fraction(reduce(gcd, nums), reduce(lcm, dens))

    def primitive(self) -> "Polynomial":
        """Integer-coefficient primitive part with positive leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self) -> "Polynomial":
        return self.scale(1 / self.leading_coefficient())

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Multivariate division by a single polynomial under grlex.

        The remainder is zero exactly when ``divisor`` divides ``self``.
        """
        if not divisor.terms:
            raise ZeroDivisionError("division by zero polynomial")
        le, lc = divisor.leading_term()
        if len(divisor.terms) == 1:
            q, r = {}, {}
            for e, c in self.terms.items():
                if all(a >= b for a, b in zip(e, le)):
                    q[tuple(a - b for a, b in zip(e, le))] = c / lc
                else:
                    r[e] = c
            return Polynomial(self.vars, q, _clean=True), Polynomial(self.vars, r, _clean=True)
        rest = [(de, dc) for de, dc in divisor.terms.items() if de != le]
        q: dict = {}
        r: dict = {}
        p = dict(self.terms)
        heap = [(-sum(e), tuple(-k for k in e)) for e in p]
        heapq.heapify(heap)
        while heap:
            _, neg = heapq.heappop(heap)
            e = tuple(-k for k in neg)
            c = p.pop(e, None)
            if c is None or _is_zero(c):
                continue
            if all(a >= b for a, b in zip(e, le)):
                qe = tuple(a - b for a, b in zip(e, le))
                qc = c / lc
                q[qe] = qc
                for de, dc in rest:
                    te = tuple(a + b for a, b in zip(qe, de))
                    v = p.get(te)
                    if v is None:
                        p[te] = -qc * dc
                        heapq.heappush(heap, (-sum(te), tuple(-k for k in te)))
                    else:
                        p[te] = v - qc * dc
            else:
                r[e] = c
        return Polynomial(self.vars, q), Polynomial(self.vars, r)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial | None":
        if not self.terms:
            return self
        q, r = self.divmod(divisor)
        return None if r.terms else q

    def __floordiv__(self, other):
        q = self.exact_div(other)
        if q is None:
            raise ValueError("polynomial division is not exact")
        return q

    # ----- univariate helpers -------------------------------------------
    def univariate_coeffs(self) -> list:
        """Dense coefficient list (lowest degree first) for a one-variable polynomial."""
        if self.nvars != 1:
            used = self.used_variables()
            if used:
                raise ValueError("not univariate")
            return [self.constant_term()] if self.terms else []
        d = self.degree(0)
        out = [Fraction(0)] * (d + 1)
        for e, c in self.terms.items():
            out[e[0]] = c
        return out

    @classmethod
    def from_univariate(cls, coeffs: Sequence, var: str = "t") -> "Polynomial":
        return cls((var,), {(i,): c for i, c in enumerate(coeffs)})

    # ----- text / JSON ---------------------------------------------------
    def render(self) -> str:
        """Canonical text form ``p/q * x1^e1*x2^e2 + ...`` in descending grlex order."""
        if not self.terms:
            return "0/1"
        parts = []
        for e in self.support():
            c = self.terms[e]
            if isinstance(c, Polynomial):
                cs = f"({c.render()})"
            else:
                cs = fraction_str(c)
            mono = "*".join(f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            parts.append(f"{cs} * {mono}" if mono else cs)
        return " + ".join(parts)

    __str__ = render

    def __repr__(self):
        return f"Polynomial({list(self.vars)!r}, {self.render()!r})"

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "Polynomial":
        """Parse the canonical text form (rational coefficients only).

        Terms are separated by ``+``; a leading ``-`` inside a coefficient is
        allowed (``-3/2 * x^2``).  Bare monomials default to coefficient 1.
        """
        variables = tuple(variables)
        out: dict = {}
        text = text.strip()
        if not text:
            return cls.zero(variables)
        for raw in re.split(r"\s\+\s|(?<=[0-9a-zA-Z_])\+(?=[\-0-9a-zA-Z_])", text):
            term = raw.strip()
            coef = Fraction(1)
            exp = [0] * len(variables)
            for factor in [f.strip() for f in term.split("*") if f.strip()]:
                if re.fullmatch(r"[-+]?\d+(/\d+)?", factor):
                    coef *= Fraction(factor)
                    continue
                neg = factor.startswith("-")
                name, _, power = factor.lstrip("-").partition("^")
                if name not in variables:
                    raise ValueError(f"unknown variable {name!r}")
                exp[variables.index(name)] += int(power) if power else 1
                if neg:
                    coef = -coef
            e = tuple(exp)
            out[e] = out.get(e, 0) + coef
        return cls(variables, out)

    def to_json(self) -> dict:
        if any(isinstance(c, Polynomial) for c in self.terms.values()):
            raise TypeError("JSON form is defined for rational coefficients only")
        return {
            "vars": list(self.vars),
            "terms": [{"exp": list(e), "coef": fraction_str(self.terms[e])} for e in self.support()],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        variables = data["vars"]
        terms: dict = {}
        for t in data["terms"]:
            e = tuple(int(k) for k in t["exp"])
            terms[e] = terms.get(e, 0) + as_fraction(t["coef"])
        return cls(variables, terms)


# ---------------------------------------------------------------------------
# univariate gcd and rational roots
# ---------------------------------------------------------------------------

def univariate_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd of two one-variable polynomials over Q."""
    if a.nvars != 1 or b.nvars != 1:
        raise ValueError("univariate_gcd needs one-variable polynomials")
    while b.terms:
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if a.terms else a


def _integer_nth_root(n: int, k: int) -> int | None:
    if n < 0:
        if k % 2 == 0:
            return None
        r = _integer_nth_root(-n, k)
        return None if r is None else -r
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x if x ** k == n else None


def rational_nth_root(q: Fraction, k: int) -> Fraction | None:
    q = as_fraction(q)
    a = _integer_nth_root(q.numerator, k)
    b = _integer_nth_root(q.denominator, k)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: Polynomial) -> list[Fraction]:
    """All rational roots of a one-variable polynomial (rational root theorem)."""
    coeffs = p.univariate_coeffs()
    if not any(coeffs):
        raise ValueError("zero polynomial has every number as a root")
    roots: list[Fraction] = []
    # strip factors of t
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if len(coeffs) <= 1:
        return sorted(roots)
    den = reduce(lcm, (c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    g = reduce(gcd, (abs(c) for c in ints))
    ints = [c // g for c in ints]
    for pnum in _divisors(ints[0]):
        for qden in _divisors(ints[-1]):
            for sign in (1, -1):
                r = Fraction(sign * pnum, qden)
                if r in roots:
                    continue
                if sum(c * r ** i for i, c in enumerate(ints)) == 0:
                    roots.append(r)
    return sorted(roots)


def sturm_count(p: Polynomial, lo: Fraction | None = None, hi: Fraction | None = None) -> int:
    """Number of distinct real roots of a univariate polynomial in ``(lo, hi]``.

    ``None`` bounds stand for -inf / +inf.
    """
    coeffs = p.univariate_coeffs()
    var = p.vars[0] if p.nvars else "t"
    f = Polynomial.from_univariate(coeffs, var)
    if f.total_degree() <= 0:
        return 0
    seq = [f, f.differentiate(0)]
    while seq[-1].terms and seq[-1].total_degree() > 0:
        _, r = seq[-2].divmod(seq[-1])
        if not r.terms:
            break
        seq.append(-r)

    def sign_changes(x):
        vals = []
        for s in seq:
            if x is None or isinstance(x, str):
                d = s.total_degree()
                lc = s.leading_coefficient()
                v = lc if x == "+inf" else lc * (-1) ** d
            else:
                v = s.evaluate([x])
            if v != 0:
                vals.append(v > 0)
        return sum(1 for a, b in zip(vals, vals[1:]) if a != b)

    return sign_changes("-inf" if lo is None else lo) - sign_changes("+inf" if hi is None else hi)


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """Quotient ``num / den`` of polynomials over Q in a common variable tuple.

    Normalization: the denominator is made monic under grlex.  Common factors
    are removed by a full gcd for one-variable inputs and by trial exact
    division otherwise (content-only in general).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, _normalized: bool = False):
        if den is None:
            den = Polynomial.constant(1, num.vars)
        if num.vars != den.vars:
            raise ValueError("numerator and denominator must share variables")
        if not den.terms:
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @property
    def vars(self):
        return self.num.vars

    @classmethod
    def constant(cls, c, variables) -> "RationalFunction":
        return cls(Polynomial.constant(c, variables), _normalized=True) if c else cls.zero(variables)

    @classmethod
    def zero(cls, variables) -> "RationalFunction":
        return cls(Polynomial.zero(variables), Polynomial.constant(1, variables), _normalized=True)

    @classmethod
    def variable(cls, name_or_index, variables) -> "RationalFunction":
        return cls(Polynomial.variable(name_or_index, variables), _normalized=True)

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other, _normalized=True)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(Fraction(other), self.vars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.num.terms:
            return self
        if not self.num.terms:
            return o
        a, b, c, d = self.num, self.den, o.num, o.den
        if b == d:
            return RationalFunction(a + c, b)
        if b.is_constant() and d.is_constant():
            return RationalFunction(a.scale(1 / b.constant_term()) + c.scale(1 / d.constant_term()),
                                    _normalized=True)
        if b.is_constant():
            return RationalFunction(a.scale(1 / b.constant_term()) * d + c, d)
        if d.is_constant():
            return RationalFunction(a + b * c.scale(1 / d.constant_term()), b)
        q = d.exact_div(b) if b.total_degree() <= d.total_degree() else None
        if q is not None:
            return RationalFunction(a * q + c, d)
        q = b.exact_div(d) if d.total_degree() <= b.total_degree() else None
        if q is not None:
            return RationalFunction(a + c * q, b)
        return RationalFunction(a * d + c * b, b * d)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RationalFunction.zero(self.vars)
            return RationalFunction(self.num.scale(Fraction(other)), self.den, _normalized=True)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.num.terms or not o.num.terms:
            return RationalFunction.zero(self.vars)
        a, b, c, d = self.num, self.den, o.num, o.den
        # cheap cross-cancellation when a denominator divides the other numerator
        if not d.is_constant():
            q = a.exact_div(d)
            if q is not None:
                a, d = q, Polynomial.constant(1, self.vars)
        if not b.is_constant():
            q = c.exact_div(b)
            if q is not None:
                c, b = q, Polynomial.constant(1, self.vars)
        return RationalFunction(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num.terms:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k, _normalized=True) if k else \
            RationalFunction.constant(1, self.vars)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return not (self.num * o.den - o.num * self.den).terms

    def __hash__(self):
        return hash((self.num, self.den))

    def differentiate(self, var) -> "RationalFunction":
        a, b = self.num, self.den
        da = a.differentiate(var)
        if b.is_constant():
            return RationalFunction(da, b, _normalized=True)
        db = b.differentiate(var)
        if not db.terms:
            return RationalFunction(da, b)
        return RationalFunction(da * b - a * db, b * b)

    def total_derivative(self, var, chain: Mapping[int, Polynomial]) -> "RationalFunction":
        """Derivative along ``var`` where other variables depend on it.

        ``chain[j]`` is d(var_j)/d(var) as a polynomial; used to treat an
        auxiliary variable such as ``s = sum v_i w_i`` as a function.
        """
        def d(p: Polynomial) -> Polynomial:
            out = p.differentiate(var)
            for j, dj in chain.items():
                pj = p.differentiate(j)
                if pj.terms:
                    out = out + pj * dj
            return out

        a, b = self.num, self.den
        da = d(a)
        if b.is_constant():
            return RationalFunction(da, b, _normalized=True)
        db = d(b)
        if not db.terms:
            return RationalFunction(da, b)
        return RationalFunction(da * b - a * db, b * b)

    def evaluate(self, point):
        den = self.den.evaluate(point)
        if den == 0:
            raise PoleAtPoint(f"denominator vanishes at {point}")
        return self.num.evaluate(point) / den

    def substitute(self, images, target_vars=None):
        n = self.num.substitute(images, target_vars)
        d = self.den.substitute(images, target_vars)
        if isinstance(d, (Polynomial, RationalFunction)):
            if not d:
                raise PoleAtPoint("denominator vanishes under substitution")
            if isinstance(n, Polynomial) and isinstance(d, Polynomial):
                return RationalFunction(n, d)
            return _as_rf(n, d.vars) / d
        if d == 0:
            raise PoleAtPoint("denominator vanishes under substitution")
        return n / d

    def render(self) -> str:
        if self.den.is_constant() and self.den.constant_term() == 1:
            return self.num.render()
        return f"({self.num.render()}) / ({self.den.render()})"

    __str__ = render

    def __repr__(self):
        return f"RationalFunction({self.render()!r})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def _as_rf(x, variables) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    return RationalFunction.constant(x, variables)


def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if not num.terms:
        return num, Polynomial.constant(1, num.vars)
    if den.is_constant():
        c = den.constant_term()
        return num.scale(1 / c), Polynomial.constant(1, num.vars)
    if num.nvars == 1:
        g = univariate_gcd(num, den)
        if g.total_degree() > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    else:
        q = num.exact_div(den) if num.total_degree() >= den.total_degree() else None
        if q is not None:
            return q, Polynomial.constant(1, num.vars)
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return num, den


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def det_poly_matrix(M: Sequence[Sequence], keep: Callable[[tuple], bool] | None = None,
                    method: str = "cofactor"):
    """Exact determinant of a small square matrix over any commutative ring.

    ``cofactor`` is Laplace expansion along rows with memoized minors
    (O(n 2^n) products); ``leibniz`` sums over permutations.  ``keep`` is an
    optional truncation applied to Polynomial products.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix must be square")
    if n > 8:
        raise ValueError("det_poly_matrix is meant for n <= 8")
    if n == 0:
        return Fraction(1)

    def mul(a, b):
        if keep is not None and isinstance(a, Polynomial) and isinstance(b, Polynomial):
            return a.mul(b, keep)
        return a * b

    if method == "leibniz":
        total = None
        for perm in itertools.permutations(range(n)):
            inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
            t = None
            for i, j in enumerate(perm):
                t = M[i][j] if t is None else mul(t, M[i][j])
            if inv % 2:
                t = -t
            total = t if total is None else total + t
        return total

    memo: dict = {}

    def minor(row: int, cols: tuple[int, ...]):
        if row == n - 1:
            return M[row][cols[0]]
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = None
        for pos, j in enumerate(cols):
            entry = M[row][j]
            if not entry:
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            if not sub:
                continue
            t = mul(entry, sub)
            if pos % 2:
                t = -t
            total = t if total is None else total + t
        if total is None:
            total = M[row][cols[0]] * 0
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def matrix_inverse(M: Sequence[Sequence]) -> list[list]:
    """Inverse via adjugate over any field-like ring (Fraction, RationalFunction, series)."""
    n = len(M)
    det = det_poly_matrix(M)
    if not det:
        raise SingularMatrix("determinant is identically zero")
    inv_det = 1 / det if not hasattr(det, "inverse") else det.inverse()
    if n == 1:
        return [[inv_det]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[M[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = det_poly_matrix(sub)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof * inv_det
    return out


def invert_poly_matrix(M: Sequence[Sequence[Polynomial]]) -> list[list[RationalFunction]]:
    """Inverse of a polynomial matrix as rational functions (adjugate / det)."""
    n = len(M)
    variables = next(e.vars for row in M for e in row if isinstance(e, Polynomial))
    P = [[e if isinstance(e, Polynomial) else Polynomial.constant(e, variables) for e in row] for row in M]
    det = det_poly_matrix(P)
    if not det.terms:
        raise SingularMatrix("determinant is identically zero")
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if n == 1:
                cof = Polynomial.constant(1, variables)
            else:
                sub = [[P[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                cof = det_poly_matrix(sub)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = RationalFunction(cof, det)
    return out


# ---------------------------------------------------------------------------
# perfect powers
# ---------------------------------------------------------------------------

def poly_root(G: Polynomial, alpha: int) -> Polynomial:
    """Return ``F`` with ``F**alpha == G`` or raise :class:`NotAPerfectPower`.

    Terms of ``F`` are peeled off in descending grlex order: if ``F = L + rest``
    with leading term ``L`` then the leading term of ``G - (current)^alpha``
    equals ``alpha * L^(alpha-1) * next``.  For even ``alpha`` the root with a
    positive leading coefficient is returned.
    """
    if alpha < 1:
        raise ValueError("alpha must be a positive integer")
    if alpha == 1:
        return G
    if not G.terms:
        return G
    le, lc = G.leading_term()
    if any(k % alpha for k in le):
        raise NotAPerfectPower(f"leading exponent {le} is not divisible by {alpha}")
    root_c = rational_nth_root(lc, alpha)
    if root_c is None:
        raise NotAPerfectPower(f"leading coefficient {lc} has no rational {alpha}-th root")
    lead = Polynomial.monomial(tuple(k // alpha for k in le), G.vars, root_c)
    F = lead
    denom_c = alpha * root_c ** (alpha - 1)
    denom_e = tuple(k * (alpha - 1) for k in lead.leading_term()[0])
    max_deg = G.total_degree() // alpha
    min_deg = min(sum(e) for e in G.terms) // alpha if G.terms else 0
    for _ in range(10_000):
        resid = G - F ** alpha
        if not resid.terms:
            return F
        re_, rc = resid.leading_term()
        e = tuple(a - b for a, b in zip(re_, denom_e))
        if any(k < 0 for k in e) or sum(e) > max_deg or sum(e) < min_deg \
                or _grlex_key(e) >= _grlex_key(lead.leading_term()[0]):
            raise NotAPerfectPower("residual leading term cannot come from a root term")
        F = F + Polynomial.monomial(e, G.vars, rc / denom_c)
    raise NotAPerfectPower("term budget exhausted")


# ---------------------------------------------------------------------------
# truncated Laurent series
# ---------------------------------------------------------------------------

class TruncatedLaurentSeries:
    """``sum_{k=lowest}^{order} c_k u^k + O(u^(order+1))`` with rational ``c_k``.

    For expansions at infinity of a function of ``t`` the series variable is
    ``u = 1/t`` and ``var`` is recorded as ``"1/t"``.
    """

    __slots__ = ("var", "lowest", "coeffs", "order")

    def __init__(self, var: str, lowest: int, coeffs: Sequence, order: int):
        coeffs = [as_fraction(c) for c in coeffs]
        if order < lowest - 1:
            raise ValueError("truncation order below the lowest exponent")
        coeffs = coeffs[: max(0, order - lowest + 1)]
        # strip leading zeros
        while coeffs and coeffs[0] == 0:
            coeffs = coeffs[1:]
            lowest += 1
        if not coeffs:
            lowest = order + 1
        self.var = var
        self.lowest = lowest
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def exact_zero(cls, var: str, order: int) -> "TruncatedLaurentSeries":
        return cls(var, order + 1, [], order)

    @classmethod
    def constant(cls, c, var: str, order: int) -> "TruncatedLaurentSeries":
        return cls(var, 0, [c], order)

    def coefficient(self, k: int) -> Fraction:
        if k > self.order:
            raise OrderTooSmall(f"coefficient of {self.var}^{k} is beyond the truncation order {self.order}")
        i = k - self.lowest
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def leading(self) -> tuple[int, Fraction]:
        if not self.coeffs:
            raise OrderTooSmall("series is zero to the stored order")
        return self.lowest, self.coeffs[0]

    def _coerce(self, other):
        if isinstance(other, TruncatedLaurentSeries):
            if other.var != self.var:
                raise ValueError("series in different variables")
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedLaurentSeries.constant(other, self.var, self.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        lo = min(self.lowest, o.lowest)
        cs = [self.coefficient(k) + o.coefficient(k) if k <= order else 0 for k in range(lo, order + 1)]
        return TruncatedLaurentSeries(self.var, lo, cs, order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedLaurentSeries(self.var, self.lowest, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedLaurentSeries(self.var, self.lowest, [c * other for c in self.coeffs], self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order + o.lowest, o.order + self.lowest)
        if not self.coeffs or not o.coeffs:
            return TruncatedLaurentSeries.exact_zero(self.var, order)
        lo = self.lowest + o.lowest
        cs = [Fraction(0)] * max(0, order - lo + 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(o.coeffs):
                k = i + j
                if k < len(cs):
                    cs[k] += a * b
        return TruncatedLaurentSeries(self.var, lo, cs, order)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedLaurentSeries":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a series that is zero to the stored order")
        v, a0 = self.lowest, self.coeffs[0]
        rel = self.order - v  # relative precision
        out_lo = -v
        out = []
        for k in range(rel + 1):
            s = Fraction(1) if k == 0 else Fraction(0)
            for j in range(1, k + 1):
                if j < len(self.coeffs):
                    s -= self.coeffs[j] * out[k - j]
            out.append(s / a0)
        return TruncatedLaurentSeries(self.var, out_lo, out, out_lo + rel)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = TruncatedLaurentSeries.constant(1, self.var, self.order - self.lowest if self.coeffs else self.order)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.lowest, self.coeffs, self.order) == (o.lowest, o.coeffs, o.order) or \
            (not self.coeffs and not o.coeffs and self.order == o.order)

    def evaluate(self, u: float | Fraction):
        return sum(c * u ** (self.lowest + i) for i, c in enumerate(self.coeffs))

    def terms(self) -> list[tuple[int, Fraction]]:
        return [(self.lowest + i, c) for i, c in enumerate(self.coeffs) if c]

    def render(self) -> str:
        body = " + ".join(f"{fraction_str(c)} * {self.var}^{k}" for k, c in self.terms()) or "0"
        return f"{body} + O({self.var}^{self.order + 1})"

    __str__ = render

    def __repr__(self):
        return f"TruncatedLaurentSeries({self.render()!r})"

    def to_json(self) -> dict:
        return {"var": self.var, "lowest": self.lowest,
                "coeffs": [fraction_str(c) for c in self.coeffs], "order": self.order}


def polynomial_series(p: Polynomial, at_infinity: bool, order: int) -> TruncatedLaurentSeries:
    coeffs = p.univariate_coeffs()
    var = f"1/{p.vars[0]}" if at_infinity else p.vars[0]
    if not coeffs:
        return TruncatedLaurentSeries.exact_zero(var, order)
    if at_infinity:
        d = len(coeffs) - 1
        # t^k = u^(-k)
        return TruncatedLaurentSeries(var, -d, list(reversed(coeffs)), order)
    return TruncatedLaurentSeries(var, 0, coeffs, order)


def laurent_expand(f: RationalFunction | Polynomial, at_infinity: bool = True,
                   order: int = 4) -> TruncatedLaurentSeries:
    """Laurent expansion of a one-variable rational function.

    At infinity the result is a series in ``u = 1/t`` whose exponent ``k``
    stands for ``t^(-k)``; ``order`` is the last exponent of ``u`` kept.
    Otherwise it expands at ``t = 0`` in ``t`` itself.
    """
    if isinstance(f, Polynomial):
        f = RationalFunction(f)
    if f.num.nvars != 1:
        raise ValueError("laurent_expand needs a one-variable rational function")
    nc = f.num.univariate_coeffs()
    dc = f.den.univariate_coeffs()
    var = f"1/{f.vars[0]}" if at_infinity else f.vars[0]
    if not nc:
        return TruncatedLaurentSeries.exact_zero(var, order)
    if at_infinity:
        v = (len(dc) - 1) - (len(nc) - 1)
    else:
        vn = next(i for i, c in enumerate(nc) if c)
        vd = next(i for i, c in enumerate(dc) if c)
        v = vn - vd
    if order < v:
        raise OrderTooSmall(f"expansion starts at exponent {v} but order {order} was requested")
    rel = order - v
    if at_infinity:
        a = list(reversed(nc))
        b = list(reversed(dc))
    else:
        a = nc[next(i for i, c in enumerate(nc) if c):]
        b = dc[next(i for i, c in enumerate(dc) if c):]
    out = []
    for k in range(rel + 1):
        s = a[k] if k < len(a) else Fraction(0)
        for j in range(1, k + 1):
            if j < len(b):
                s -= b[j] * out[k - j]
        out.append(s / b[0])
    return TruncatedLaurentSeries(var, v, out, order)


# ---------------------------------------------------------------------------
# fractions over a registry of known denominator factors
# ---------------------------------------------------------------------------

class FactorBase:
    """Shared registry of denominator factors for :class:`FactoredFraction`.

    Denominators are kept as products of powers of registered polynomials, so
    common denominators never need a multivariate gcd.  The registry only
    grows; indices are stable.
    """

    def __init__(self, variables: Sequence[str], factors: Iterable[Polynomial] = ()):
        self.vars = tuple(variables)
        self.factors: list[Polynomial] = []
        self._derivs: dict = {}
        for v in self.vars:
            self.register(Polynomial.variable(v, self.vars))
        for f in factors:
            self.register(f)

    def register(self, p: Polynomial) -> int:
        p = p.primitive()
        if p.is_constant():
            raise ValueError("constant denominator factors are not registered")
        for i, f in enumerate(self.factors):
            if f == p:
                return i
        self.factors.append(p)
        return len(self.factors) - 1

    def derivative(self, k: int, var) -> Polynomial:
        key = (k, var)
        if key not in self._derivs:
            self._derivs[key] = self.factors[k].differentiate(var)
        return self._derivs[key]

    def frac(self, num, den: Mapping[int, int] | None = None) -> "FactoredFraction":
        if not isinstance(num, Polynomial):
            num = Polynomial.constant(num, self.vars)
        return FactoredFraction(self, num, dict(den or {}))

    def split(self, p: Polynomial) -> tuple[Fraction, dict[int, int], Polynomial]:
        """Write ``p = c * prod(factor^e) * rest`` pulling out registered factors."""
        c = p.content()
        if p.leading_coefficient() < 0:
            c = -c
        rest = p.scale(1 / c)
        exps: dict[int, int] = {}
        for k, f in enumerate(self.factors):
            while not rest.is_constant():
                q = rest.exact_div(f)
                if q is None:
                    break
                rest = q
                exps[k] = exps.get(k, 0) + 1
        return c, exps, rest


class FactoredFraction:
    """``num / prod(base_k ^ e_k)`` over a :class:`FactorBase`."""

    __slots__ = ("base", "num", "den")

    def __init__(self, base: FactorBase, num: Polynomial, den: dict[int, int]):
        self.base = base
        self.num = num
        self.den = {k: e for k, e in den.items() if e} if num.terms else {}

    def _wrap(self, other) -> "FactoredFraction | None":
        if isinstance(other, FactoredFraction):
            return other
        if isinstance(other, (int, Fraction)):
            return self.base.frac(Fraction(other))
        if isinstance(other, Polynomial):
            return self.base.frac(other)
        return None

    def __bool__(self):
        return bool(self.num.terms)

    def _den_poly(self, exps: Mapping[int, int]) -> Polynomial:
        out = Polynomial.constant(1, self.base.vars)
        for k, e in sorted(exps.items()):
            if e:
                out = out * self.base.factors[k] ** e
        return out

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if not o.num.terms:
            return self
        if not self.num.terms:
            return o
        keys = set(self.den) | set(o.den)
        common = {k: max(self.den.get(k, 0), o.den.get(k, 0)) for k in keys}
        a = self.num * self._den_poly({k: common[k] - self.den.get(k, 0) for k in keys})
        b = o.num * self._den_poly({k: common[k] - o.den.get(k, 0) for k in keys})
        return FactoredFraction(self.base, a + b, common)

    __radd__ = __add__

    def __neg__(self):
        return FactoredFraction(self.base, -self.num, self.den)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FactoredFraction(self.base, self.num.scale(Fraction(other)), self.den)
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if not self.num.terms or not o.num.terms:
            return self.base.frac(0)
        den = dict(self.den)
        for k, e in o.den.items():
            den[k] = den.get(k, 0) + e
        return FactoredFraction(self.base, self.num * o.num, den)

    __rmul__ = __mul__

    def inverse(self) -> "FactoredFraction":
        if not self.num.terms:
            raise ZeroDivisionError("inverse of zero")
        c, exps, rest = self.base.split(self.num)
        den = dict(exps)
        if not rest.is_constant():
            k = self.base.register(rest)
            den[k] = den.get(k, 0) + 1
        else:
            c = c * rest.constant_term()
        return FactoredFraction(self.base, self._den_poly(self.den).scale(1 / c), den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FactoredFraction(self.base, self.num ** k, {i: e * k for i, e in self.den.items()})

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return not (self - o).num.terms

    def __hash__(self):
        r = self.reduced()
        return hash((r.num, tuple(sorted(r.den.items()))))

    def reduced(self) -> "FactoredFraction":
        """Cancel registered factors that divide the numerator."""
        num = self.num
        den = dict(self.den)
        for k in sorted(den):
            f = self.base.factors[k]
            while den[k] and num.terms:
                q = num.exact_div(f)
                if q is None:
                    break
                num = q
                den[k] -= 1
        return FactoredFraction(self.base, num, den)

    def differentiate(self, var, chain: Mapping[int, Polynomial] | None = None) -> "FactoredFraction":
        """Partial derivative; ``chain[j]`` supplies d(var_j)/d(var) for dependent variables."""
        def d(p: Polynomial) -> Polynomial:
            out = p.differentiate(var)
            for j, dj in (chain or {}).items():
                pj = p.differentiate(j)
                if pj.terms:
                    out = out + pj * dj
            return out

        if not self.num.terms:
            return self
        # d(N / prod B^e) = (N' * prod B - N * sum e_k B_k' prod_{j!=k} B_j) / prod B^(e+1)
        ks = sorted(self.den)
        full = Polynomial.constant(1, self.base.vars)
        for k in ks:
            full = full * self.base.factors[k]
        out = d(self.num) * full
        for k in ks:
            dk = d(self.base.factors[k])
            if not dk.terms:
                continue
            others = Polynomial.constant(self.den[k], self.base.vars)
            for j in ks:
                if j != k:
                    others = others * self.base.factors[j]
            out = out - self.num * dk * others
        return FactoredFraction(self.base, out, {k: self.den[k] + 1 for k in ks}).reduced()

    def evaluate(self, point):
        if isinstance(point, Mapping):
            point = [point[v] for v in self.base.vars]
        den = 1
        for k, e in self.den.items():
            v = self.base.factors[k].evaluate(point)
            if v == 0:
                raise PoleAtPoint(f"denominator factor {self.base.factors[k]} vanishes")
            den = den * v ** e
        return self.num.evaluate(point) / den

    def to_rational(self) -> RationalFunction:
        r = self.reduced()
        return RationalFunction(r.num, r._den_poly(r.den))

    def render(self) -> str:
        return self.to_rational().render()

    __str__ = render

    def __repr__(self):
        return f"FactoredFraction({self.render()!r})"
