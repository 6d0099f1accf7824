"""Truncated formal power series with exact rational coefficients.

The generating-function proof of the identity is replayed here one displayed
line at a time: each stage of ``g_series_stages`` is an independent series
built the way the corresponding expression reads, and all of them must agree
with ``(d-1) z / ((1 - d z)(1 - z))``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence, Union

from .hcomp import count_bounded_compositions, count_hcomps_by, totient

Number = Union[int, Fraction]


class SeriesDomainError(ArithmeticError):
    pass


class FormalPowerSeries:
    """Coefficients ``c_0 .. c_N`` of a series known modulo ``z^(N+1)``.

    Values are immutable; mixing truncation orders truncates to the smaller.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number], order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, order: int) -> "FormalPowerSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "FormalPowerSeries":
        return cls([1], order)

    @classmethod
    def monomial(cls, k: int, order: int, c: Number = 1) -> "FormalPowerSeries":
        if k > order:
            return cls.zero(order)
        return cls([0] * k + [c], order)

    @classmethod
    def polynomial(cls, coeffs: Sequence[Number], order: int) -> "FormalPowerSeries":
        return cls(list(coeffs)[: order + 1], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _coerce(self, other) -> "FormalPowerSeries":
        if isinstance(other, FormalPowerSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return FormalPowerSeries([other], self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        N = min(self.order, other.order)
        return FormalPowerSeries(
            [self.coeffs[k] + other.coeffs[k] for k in range(N + 1)], N
        )

    __radd__ = __add__

    def __neg__(self):
        return FormalPowerSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "FormalPowerSeries":
        c = Fraction(c)
        return FormalPowerSeries([c * a for a in self.coeffs], self.order)

    def shift(self, k: int) -> "FormalPowerSeries":
        """Multiply by ``z^k``."""
        return FormalPowerSeries([0] * k + list(self.coeffs), self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, FormalPowerSeries):
            return NotImplemented
        N = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        nz_a = [(i, x) for i, x in enumerate(a[: N + 1]) if x]
        out = [Fraction(0)] * (N + 1)
        for j in range(N + 1):
            y = b[j]
            if not y:
                continue
            for i, x in nz_a:
                if i + j > N:
                    break
                out[i + j] += x * y
        return FormalPowerSeries(out, N)

    __rmul__ = __mul__

    def invert_unit(self) -> "FormalPowerSeries":
        a = self.coeffs
        if a[0] == 0:
            raise SeriesDomainError("series with zero constant term has no inverse")
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, self.order + 1):
            s = sum((a[i] * out[k - i] for i in range(1, k + 1) if a[i]), Fraction(0))
            out.append(-s * inv0)
        return FormalPowerSeries(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * other.invert_unit()

    def __pow__(self, e: int) -> "FormalPowerSeries":
        if e < 0:
            return self.invert_unit() ** (-e)
        result = FormalPowerSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalPowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if len(self.coeffs) > 8 else ""
        return f"FormalPowerSeries([{shown}{more}], order={self.order})"

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def as_ints(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("series has non-integer coefficients")
        return [int(c) for c in self.coeffs]


def series_arith(op: str, *operands, order: int | None = None) -> FormalPowerSeries:
    """Dispatch helper: ``add``, ``mul``, ``scale``, ``invert_unit`` or ``pow``."""
    if op == "add":
        a, b = operands
        return a + b
    if op == "mul":
        a, b = operands
        return a * b
    if op == "scale":
        a, c = operands
        return a.scale(c)
    if op == "invert_unit":
        (a,) = operands
        return a.invert_unit()
    if op == "pow":
        a, e = operands
        return a**e
    raise ValueError(f"unknown series operation {op!r}")


def _geometric_tail(m: int, N: int, coeff: Number = 1) -> list[Fraction]:
    # coefficients of coeff * z^m / (1 - z^m)
    out = [Fraction(0)] * (N + 1)
    for k in range(m, N + 1, m):
        out[k] = Fraction(coeff)
    return out


def lambert_series(N: int) -> FormalPowerSeries:
    """``sum_{m>=1} phi(m) z^m / (1 - z^m)`` through ``z^N``."""
    if N < 1:
        raise ValueError("order must be positive")
    total = [Fraction(0)] * (N + 1)
    for m in range(1, N + 1):
        for k, c in enumerate(_geometric_tail(m, N, totient(m))):
            total[k] += c
    return FormalPowerSeries(total, N)


def z_over_one_minus_z_squared(N: int) -> FormalPowerSeries:
    one_minus_z = FormalPowerSeries.polynomial([1, -1], N)
    return FormalPowerSeries.monomial(1, N) * (one_minus_z**2).invert_unit()


def bounded_composition_gf(b: int, s: int, N: int) -> FormalPowerSeries:
    """``(1-z)^(-b) z^b (1-z^s)^b``: generating function of C(n, b, s) in n."""
    return _bounded_gf_cached(b, s, N)


@lru_cache(maxsize=4096)
def _bounded_gf_cached(b: int, s: int, N: int) -> FormalPowerSeries:
    if b < 0 or s < 0:
        raise ValueError("b and s must be non-negative")
    if b == 0:
        return FormalPowerSeries.one(N)
    if s == 0 or b > N:
        return FormalPowerSeries.zero(N)
    # binomial expansions: (1-z)^(-b) = sum C(b-1+k, k) z^k,
    # (1-z^s)^b = sum (-1)^i C(b, i) z^(s i)
    top = N - b
    neg_binom = [comb(b - 1 + k, k) for k in range(top + 1)]
    out = [0] * (N + 1)
    for i in range(0, min(b, top // s) + 1):
        c = (-1) ** i * comb(b, i)
        off = s * i
        for k in range(top - off + 1):
            out[b + off + k] += c * neg_binom[k]
    return FormalPowerSeries(out, N)


def closed_form_series(d: int, N: int) -> FormalPowerSeries:
    """``(d-1) z / ((1 - d z)(1 - z))`` expanded exactly."""
    one_minus_dz = FormalPowerSeries.polynomial([1, -d], N)
    one_minus_z = FormalPowerSeries.polynomial([1, -1], N)
    num = FormalPowerSeries.monomial(1, N, d - 1)
    return num * one_minus_dz.invert_unit() * one_minus_z.invert_unit()


def _stage_triple(d: int, N: int) -> FormalPowerSeries:
    # sum over (first part m, multiplicity w, length r) weighted by the term
    out = [Fraction(0)] * (N + 1)
    for n in range(1, N + 1):
        total = 0
        for m in range(1, n + 1):
            w = 0
            while (w + 1) * m <= n:
                for r in range(w + 1, n + 1):
                    cnt = count_hcomps_by(m, w, r, n)
                    if cnt:
                        total += cnt * totient(m) * (d - 1) ** (r - w) * d**w
                w += 1
        out[n] = Fraction(total)
    return FormalPowerSeries(out, N)


def _stage_bounded_gf(d: int, N: int) -> FormalPowerSeries:
    # after shifting r -> r+w+1 and n -> n+(w+1)m, with the inner n-sum
    # replaced by the bounded-composition generating function
    acc = [Fraction(0)] * (N + 1)
    for m in range(1, N + 1):
        phi = totient(m)
        for w in range(0, N // m):
            lead = (w + 1) * m
            for r in range(0, N - lead + 1):
                coef = comb(r + w, w) * phi * (d - 1) ** (r + 1) * d**w
                gf = bounded_composition_gf(r, m - 1, N).coeffs
                # z^r is the lowest power in the bounded gf
                for k in range(r, N - lead + 1):
                    if gf[k]:
                        acc[k + lead] += coef * gf[k]
    return FormalPowerSeries(acc, N)


def _stage_w_collapsed(d: int, N: int) -> FormalPowerSeries:
    # sum_w C(r+w, w) q^w = (1 - q)^(-r-1) with q = d z^m
    one = FormalPowerSeries.one(N)
    acc = FormalPowerSeries.zero(N)
    for m in range(1, N + 1):
        inv = (one - FormalPowerSeries.monomial(m, N, d)).invert_unit()
        phi = totient(m)
        inv_pow = inv  # (1 - d z^m)^(-r-1), starting at r = 0
        for r in range(0, N - m + 1):
            term = bounded_composition_gf(r, m - 1, N) * inv_pow
            acc = acc + term.shift(m).scale(phi * (d - 1) ** (r + 1))
            inv_pow = inv_pow * inv
    return acc


def _stage_r_collapsed(d: int, N: int) -> FormalPowerSeries:
    # geometric sum over r: phi(m)(d-1)z^m / ((1-dz^m) - (d-1)z(1-z^(m-1))/(1-z))
    one = FormalPowerSeries.one(N)
    inv_one_minus_z = FormalPowerSeries.polynomial([1, -1], N).invert_unit()
    acc = FormalPowerSeries.zero(N)
    for m in range(1, N + 1):
        inner = (one - FormalPowerSeries.monomial(m - 1, N)).shift(1).scale(d - 1)
        denom = (one - FormalPowerSeries.monomial(m, N, d)) - inner * inv_one_minus_z
        numer = FormalPowerSeries.monomial(m, N, totient(m) * (d - 1))
        acc = acc + numer * denom.invert_unit()
    return acc


def _stage_lambert(d: int, N: int) -> FormalPowerSeries:
    one_minus_dz = FormalPowerSeries.polynomial([1, -d], N)
    one_minus_z = FormalPowerSeries.polynomial([1, -1], N)
    prefactor = one_minus_z.scale(d - 1) * one_minus_dz.invert_unit()
    return prefactor * lambert_series(N)


STAGES = {
    "triple": _stage_triple,
    "bounded_gf": _stage_bounded_gf,
    "w_collapsed": _stage_w_collapsed,
    "r_collapsed": _stage_r_collapsed,
    "lambert": _stage_lambert,
}


def g_series_stages(d: int, N: int) -> dict[str, FormalPowerSeries]:
    """Every intermediate form of G(z), each built independently."""
    if d < 1 or N < 1:
        raise ValueError("d and N must be positive")
    return {name: fn(d, N) for name, fn in STAGES.items()}


def g_series(d: int, N: int) -> FormalPowerSeries:
    """G(z) from the triple sum over first part, multiplicity and length."""
    if d < 1 or N < 1:
        raise ValueError("d and N must be positive")
    return _stage_triple(d, N)
