"""Gleason polynomials and numerical censuses of d-centers.

``h_0 = z``, ``h_r = h_{r-1}^d + z``.  The roots of ``h_{n-1}`` are the
parameters ``c`` for which the critical orbit of ``z^d + c`` returns to 0
after ``n`` steps.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np

from .hcomp import divisors

log = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 100_000


class PolynomialSizeError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


class CensusError(RuntimeError):
    pass


class IntPolynomial:
    """Dense polynomial over the integers, coefficients low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[int, ...] = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other) -> bool:
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPolynomial(degree={self.degree})"

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return IntPolynomial([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + IntPolynomial([-c for c in other.coeffs])

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolynomial([])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPolynomial(out)

    def __pow__(self, e: int) -> "IntPolynomial":
        result = IntPolynomial([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def divmod(self, divisor: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        """Long division by a monic polynomial, exact over the integers."""
        if not divisor.is_monic():
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dv = divisor.coeffs
        m = len(dv) - 1
        if len(rem) <= m:
            return IntPolynomial([]), IntPolynomial(rem)
        quot = [0] * (len(rem) - m)
        for k in range(len(rem) - 1, m - 1, -1):
            c = rem[k]
            if c:
                quot[k - m] = c
                for i in range(m + 1):
                    rem[k - m + i] -= c * dv[i]
        return IntPolynomial(quot), IntPolynomial(rem[:m])

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


def gleason_poly(d: int, n: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> IntPolynomial:
    """h_{n-1}, monic of degree d^(n-1)."""
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    if d ** (n - 1) > degree_cap:
        raise PolynomialSizeError(f"degree {d ** (n - 1)} exceeds cap {degree_cap}")
    z = IntPolynomial([0, 1])
    h = z
    for _ in range(n - 1):
        h = h**d + z
    return h


def divisibility_check(d: int, m: int, n: int) -> tuple[IntPolynomial, bool]:
    if m < 1 or n % m:
        raise ValueError(f"{m} does not divide {n}")
    quot, rem = gleason_poly(d, n).divmod(gleason_poly(d, m))
    return quot, rem.is_zero()


@dataclass(frozen=True)
class SolverSettings:
    residual_tol: float = 1e-8
    separation_tol: float = 1e-8
    period_tol: float = 1e-6
    period_gap: float = 1e3
    max_iter: int = 5000
    step_tol: float = 1e-14
    newton_steps: int = 5
    newton_dps: int = 40
    degree_cap: int = DEFAULT_DEGREE_CAP


@dataclass(frozen=True)
class DCenter:
    c: complex
    target_n: int
    exact_period: int
    residual: float


def _gleason_eval(z: np.ndarray, d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    # h_{n-1} and its derivative through the recursion, not the expanded form
    h = z.copy()
    dh = np.ones_like(z)
    for _ in range(n - 1):
        dh = d * h ** (d - 1) * dh + 1
        h = h**d + z
    return h, dh


def aberth(d: int, n: int, cfg: SolverSettings = SolverSettings()) -> np.ndarray:
    """All d^(n-1) roots of h_{n-1} by Aberth-Ehrlich simultaneous iteration."""
    deg = d ** (n - 1)
    if deg > cfg.degree_cap:
        raise PolynomialSizeError(f"degree {deg} exceeds cap {cfg.degree_cap}")
    if deg == 1:
        return np.zeros(1, dtype=complex)
    # every center has |c| <= 2^(1/(d-1)); start just outside that disk
    radius = 1.1 * 2.0 ** (1.0 / (d - 1))
    k = np.arange(deg)
    z = radius * np.exp(2j * np.pi * (k + 0.25) / deg + 0.4j / deg)
    step = np.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(cfg.max_iter):
            h, dh = _gleason_eval(z, d, n)
            newton = h / dh
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            w = newton / (1.0 - newton * inv.sum(axis=1))
            if not np.all(np.isfinite(w)):
                raise SolverError(f"non-finite Aberth step at iteration {it} (d={d}, n={n})")
            z = z - w
            step = float(np.max(np.abs(w)))
            if step < cfg.step_tol:
                log.debug("aberth d=%d n=%d converged in %d sweeps", d, n, it + 1)
                return z
    raise SolverError(
        f"Aberth did not converge for d={d}, n={n}: last max step {step:.3e} "
        f"after {cfg.max_iter} sweeps"
    )


def _mp_gleason(c, d: int, n: int):
    h, dh = c, mpmath.mpc(1)
    for _ in range(n - 1):
        dh = d * h ** (d - 1) * dh + 1
        h = h**d + c
    return h, dh


def newton_refine(c: complex, d: int, n: int, cfg: SolverSettings = SolverSettings()):
    """A few Newton steps in extended precision; returns (root, |h(root)|)."""
    with mpmath.workdps(cfg.newton_dps):
        x = mpmath.mpc(c)
        for _ in range(cfg.newton_steps):
            h, dh = _mp_gleason(x, d, n)
            x = x - h / dh
        h, _ = _mp_gleason(x, d, n)
        return x, float(abs(h))


def critical_orbit_mp(c, d: int, n: int) -> list:
    z = mpmath.mpc(0)
    out = []
    for _ in range(n):
        z = z**d + c
        out.append(z)
    return out


def _classify(c_mp, d: int, n: int, cfg: SolverSettings) -> int:
    with mpmath.workdps(cfg.newton_dps):
        orbit = critical_orbit_mp(c_mp, d, n)
        vals = {m: float(abs(orbit[m - 1])) for m in divisors(n)}
    accepted = [m for m, v in vals.items() if v <= cfg.period_tol]
    if not accepted:
        raise CensusError(f"c={complex(c_mp)} does not return to 0 within tolerance: {vals}")
    m0 = min(accepted)
    # non-periods must sit far above the tolerance, and every multiple of
    # the period must be accepted
    for m, v in vals.items():
        is_multiple = m % m0 == 0
        if is_multiple and v > cfg.period_tol:
            raise CensusError(f"c={complex(c_mp)}: period {m0} accepted but multiple {m} rejected")
        if not is_multiple and v < cfg.period_tol * cfg.period_gap:
            raise CensusError(
                f"c={complex(c_mp)}: |f^{m}(0)| = {v:.3e} inside the gap band; ambiguous"
            )
    return m0


def min_separation(roots: Sequence[complex]) -> float:
    z = np.asarray(roots, dtype=complex)
    if len(z) < 2:
        return float("inf")
    diff = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def find_centers(d: int, n: int, cfg: SolverSettings = SolverSettings()) -> list[DCenter]:
    """The d^(n-1) centers of period n, refined and classified by exact period."""
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    raw = aberth(d, n, cfg)
    centers = []
    for c0 in raw:
        c_mp, res = newton_refine(complex(c0), d, n, cfg)
        if res > cfg.residual_tol:
            raise SolverError(f"residual {res:.3e} above {cfg.residual_tol} at c={complex(c_mp)}")
        period = _classify(c_mp, d, n, cfg)
        centers.append(DCenter(complex(c_mp), n, period, res))
    expected = d ** (n - 1)
    sep = min_separation([x.c for x in centers])
    if len(centers) != expected or sep <= cfg.separation_tol:
        raise CensusError(
            f"expected {expected} separated roots, got {len(centers)} with min separation {sep:.3e}"
        )
    centers.sort(key=lambda x: (round(x.c.real, 12), round(x.c.imag, 12)))
    return centers


def mobius(k: int) -> int:
    result, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            result = -result
        p += 1
    return -result if k > 1 else result


def exact_period_count(d: int, m: int) -> int:
    """Centers of exact period m: sum over j | m of mu(m/j) d^(j-1)."""
    return sum(mobius(m // j) * d ** (j - 1) for j in divisors(m))


def exact_period_census(
    d: int, n: int, cfg: SolverSettings = SolverSettings(), centers: Optional[list[DCenter]] = None
) -> dict[int, int]:
    if centers is None:
        centers = find_centers(d, n, cfg)
    census = {m: 0 for m in divisors(n)}
    for x in centers:
        census[x.exact_period] += 1
    return census


def critical_orbit(c: complex, d: int, n: int, bailout: float = 1e100) -> tuple[list[complex], bool]:
    """z_1..z_n with z_j = f_c^j(0); stops early once the orbit blows past ``bailout``.

    The flag reports escape, i.e. some |z_j| exceeded max(|c|, 2^(1/(d-1))).
    """
    escape_r = max(abs(c), 2.0 ** (1.0 / (d - 1)))
    z = 0j
    out = []
    escaped = False
    for _ in range(n):
        z = z**d + c
        out.append(z)
        if abs(z) > escape_r:
            escaped = True
        if abs(z) > bailout:
            break
    return out, escaped


def roots_contained(small: Sequence[complex], big: Sequence[complex], tol: float = 1e-8) -> bool:
    b = np.asarray(big, dtype=complex)
    return all(np.min(np.abs(b - s)) < tol for s in small)


def write_root_dump(path, d: int, n: int, centers: Sequence[DCenter]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "n", "re", "im", "exact_period", "residual"])
        for x in centers:
            w.writerow([d, n, repr(x.c.real), repr(x.c.imag), x.exact_period, f"{x.residual:.3e}"])
