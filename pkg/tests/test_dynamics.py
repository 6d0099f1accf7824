import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dcenters.dynamics import (
    IntPolynomial,
    PolynomialSizeError,
    SolverSettings,
    critical_orbit,
    divisibility_check,
    exact_period_census,
    exact_period_count,
    find_centers,
    gleason_poly,
    min_separation,
    mobius,
    roots_contained,
    write_root_dump,
)
from dcenters.hcomp import divisors

ints = st.lists(st.integers(-20, 20), max_size=8)


def convolve(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def expand_gleason(d, n):
    # independent expansion via repeated plain convolution
    h = [0, 1]
    for _ in range(n - 1):
        p = [1]
        for _ in range(d):
            p = convolve(p, h)
        p[1] += 1
        h = p
    return h


def test_small_gleason_polys():
    assert gleason_poly(2, 2).coeffs == (0, 1, 1)
    assert gleason_poly(3, 2).coeffs == (0, 1, 0, 1)
    assert gleason_poly(5, 1).coeffs == (0, 1)


@pytest.mark.parametrize("d, n", [(2, 4), (2, 6), (3, 4), (4, 3)])
def test_gleason_matches_convolution(d, n):
    h = gleason_poly(d, n)
    assert list(h.coeffs) == expand_gleason(d, n)
    assert h.is_monic() and h.degree == d ** (n - 1) and h.coeffs[0] == 0


def test_gleason_size_cap():
    with pytest.raises(PolynomialSizeError):
        gleason_poly(2, 30)
    with pytest.raises(PolynomialSizeError):
        gleason_poly(2, 8, degree_cap=100)


@given(ints, ints)
def test_poly_mul_matches_convolution(a, b):
    assert (IntPolynomial(a) * IntPolynomial(b)) == IntPolynomial(convolve(a, b))


@given(ints, st.lists(st.integers(-20, 20), max_size=5))
def test_divmod_reconstructs(a, b):
    divisor = IntPolynomial(b + [1])
    q, r = IntPolynomial(a).divmod(divisor)
    assert q * divisor + r == IntPolynomial(a)
    assert r.degree < divisor.degree


@given(ints, st.integers(-5, 5))
def test_horner_matches_sum(a, z):
    assert IntPolynomial(a)(z) == sum(c * z**k for k, c in enumerate(a))


def test_divmod_needs_monic():
    with pytest.raises(ValueError):
        IntPolynomial([1, 2, 3]).divmod(IntPolynomial([1, 2]))


@pytest.mark.parametrize("d, m, n", [(2, 2, 4), (3, 1, 3), (2, 1, 5), (3, 2, 4), (2, 3, 6)])
def test_divisibility_examples(d, m, n):
    quot, exact = divisibility_check(d, m, n)
    assert exact
    assert quot * gleason_poly(d, m) == gleason_poly(d, n)


def test_divisibility_precondition():
    with pytest.raises(ValueError):
        divisibility_check(2, 3, 4)


def test_center_examples():
    assert [c.c for c in find_centers(2, 1)] == [0j]
    roots = [c.c for c in find_centers(2, 2)]
    assert np.allclose(roots, [-1, 0])
    roots = [c.c for c in find_centers(2, 3)]
    assert len(roots) == 4
    assert roots_contained([-1.754877666, -0.122561166 + 0.744861767j, -0.122561166 - 0.744861767j], roots, 1e-8)


@pytest.mark.parametrize("d, n", [(2, 5), (3, 3), (4, 3), (5, 2)])
def test_centers_are_simple_refined_roots(d, n):
    cfg = SolverSettings()
    centers = find_centers(d, n, cfg)
    assert len(centers) == d ** (n - 1)
    assert min_separation([x.c for x in centers]) > cfg.separation_tol
    h = gleason_poly(d, n)
    for x in centers:
        assert x.residual < cfg.residual_tol
        assert n % x.exact_period == 0
        assert abs(h(x.c)) < 1e-6 * max(1, abs(x.c)) ** h.degree
    keys = [(x.c.real, x.c.imag) for x in centers]
    assert keys == sorted(keys)


def test_centers_are_deterministic():
    assert find_centers(3, 4) == find_centers(3, 4)


@pytest.mark.parametrize("d, n, census", [(2, 4, {1: 1, 2: 1, 4: 6}), (3, 1, {1: 1}), (3, 2, {1: 1, 2: 2})])
def test_census_examples(d, n, census):
    assert exact_period_census(d, n) == census


@pytest.mark.parametrize("d, n", [(2, 6), (3, 4), (4, 3)])
def test_census_matches_mobius(d, n):
    census = exact_period_census(d, n)
    assert sum(census.values()) == d ** (n - 1)
    assert census == {m: exact_period_count(d, m) for m in divisors(n)}


def brute_mobius(k):
    primes = [p for p in range(2, k + 1) if k % p == 0 and all(p % q for q in range(2, p))]
    if any(k % (p * p) == 0 for p in primes):
        return 0
    return (-1) ** len(primes)


@pytest.mark.parametrize("k", range(1, 200))
def test_mobius(k):
    assert mobius(k) == brute_mobius(k)


def test_lower_period_roots_persist():
    small = [x.c for x in find_centers(2, 3)]
    big = [x.c for x in find_centers(2, 6)]
    assert roots_contained(small, big)


def test_critical_orbit_examples():
    assert critical_orbit(0, 3, 4) == ([0j] * 4, False)
    pts, escaped = critical_orbit(-1, 2, 6)
    assert pts == [-1, 0, -1, 0, -1, 0] and not escaped
    pts, escaped = critical_orbit(1, 2, 4)
    assert pts == [1, 2, 5, 26] and escaped


def test_critical_orbit_bailout():
    pts, escaped = critical_orbit(1, 2, 50)
    assert escaped and len(pts) < 50 and all(cmath.isfinite(z) for z in pts)


def test_root_dump(tmp_path):
    path = tmp_path / "roots.csv"
    centers = find_centers(2, 3)
    write_root_dump(path, 2, 3, centers)
    lines = path.read_text().splitlines()
    assert lines[0] == "d,n,re,im,exact_period,residual"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert complex(float(first[2]), float(first[3])) == centers[0].c
