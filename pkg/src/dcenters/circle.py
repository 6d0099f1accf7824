"""Exact combinatorics of the circle map ``theta -> d*theta (mod 1)``.

Angles are ``fractions.Fraction`` values in ``[0, 1)``.  Arcs are stored as
(start, length) and always run counterclockwise, so an arc may straddle 0.

The puzzle around the alpha fixed point is modelled by arcs of the circle:
level 0 is cut out by a rotation set, level 1 by its full preimage.  Pulling
the widest gap back along an itinerary gives the angle pairs that bound the
critical-value piece, which is where the per-composition counts come from.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, NamedTuple, Optional, Sequence

from .hcomp import HComposition, block_period, rotation_numerators, totient

Angle = Fraction


class CircleDomainError(ValueError):
    pass


class BoundedComputationError(RuntimeError):
    pass


class WidestGapTieError(ValueError):
    pass


class ArcBoundaryError(ValueError):
    pass


class SpecialCaseError(ValueError):
    """The all-ones composition has no rotation set; it is the center c = 0."""


class PortraitError(ValueError):
    def __init__(self, prop: str, detail: str, pair: Optional[tuple[int, int]] = None):
        self.prop = prop
        self.pair = pair
        where = f" (sets {pair[0]} and {pair[1]})" if pair else ""
        super().__init__(f"property {prop} violated{where}: {detail}")


def as_angle(x) -> Angle:
    return Fraction(x) % 1


def is_periodic(theta: Angle, d: int) -> bool:
    den = as_angle(theta).denominator
    return gcd(den, d) == 1


def exact_period(theta: Angle, d: int) -> int:
    """Period of a periodic angle: multiplicative order of d modulo the denominator."""
    theta = as_angle(theta)
    den = theta.denominator
    if gcd(den, d) != 1:
        raise CircleDomainError(f"{theta} is not periodic under multiplication by {d}")
    k, x = 1, d % den
    while x != 1 % den:
        x = x * d % den
        k += 1
    return k


class OrbitInfo(NamedTuple):
    orbit: list[Angle]
    period: Optional[int]
    preperiod: int
    cycle_length: int


def dmap_orbit(theta, d: int, max_steps: int = 100_000) -> OrbitInfo:
    """Orbit up to (not including) the first repeat.

    ``period`` is set only when ``theta`` itself lies on the cycle.
    """
    if d < 2:
        raise CircleDomainError("degree must be at least 2")
    x = as_angle(theta)
    seen: dict[Angle, int] = {}
    orbit: list[Angle] = []
    while x not in seen:
        if len(orbit) >= max_steps:
            raise BoundedComputationError(
                f"no cycle detected within {max_steps} steps from {theta}"
            )
        seen[x] = len(orbit)
        orbit.append(x)
        x = (d * x) % 1
    pre = seen[x]
    cyc = len(orbit) - pre
    return OrbitInfo(orbit, cyc if pre == 0 else None, pre, cyc)


def ccw_offset(x: Angle, base: Angle) -> Angle:
    return (x - base) % 1


@dataclass(frozen=True)
class Arc:
    start: Angle
    length: Angle
    label: tuple

    @property
    def end(self) -> Angle:
        return (self.start + self.length) % 1

    def contains(self, x: Angle) -> bool:
        """Open-arc membership."""
        off = ccw_offset(x, self.start)
        return 0 < off < self.length

    def contains_arc(self, start: Angle, length: Angle) -> bool:
        return ccw_offset(start, self.start) + length <= self.length

    @property
    def name(self) -> str:
        kind, *idx = self.label
        if kind == "B":
            return f"B[{idx[0]},{idx[1]}]"
        return kind + "".join(str(i) for i in idx)


@dataclass(frozen=True)
class RotationSet:
    d: int
    p: int
    q: int
    angles: tuple[Angle, ...]

    def check(self) -> None:
        """Raise CircleDomainError unless every invariant holds."""
        d, p, q, s = self.d, self.p, self.q, self.angles
        if d < 2 or not (0 < p < q) or gcd(p, q) != 1:
            raise CircleDomainError(f"bad parameters d={d}, p={p}, q={q}")
        if len(s) != q or list(s) != sorted(set(s)):
            raise CircleDomainError("angles must be q distinct values in increasing order")
        pos = {a: i for i, a in enumerate(s)}
        for i, a in enumerate(s):
            img = (d * a) % 1
            if pos.get(img) != (i + p) % q:
                raise CircleDomainError(f"{a} -> {img} does not advance by {p}")
        mod = d**q - 1
        if any(mod % a.denominator for a in s):
            raise CircleDomainError(f"denominators must divide {mod}")

    def sector(self) -> int:
        """Index k of the sector [k/(d-1), (k+1)/(d-1)) holding the set."""
        return int(self.angles[0] * (self.d - 1))


@lru_cache(maxsize=None)
def _cycles_of_length(d: int, q: int) -> tuple[tuple[int, ...], ...]:
    # all exact-period-q cycles of k -> d k mod (d^q - 1), as sorted numerators
    N = d**q - 1
    seen = bytearray(N)
    found = []
    for k in range(N):
        if seen[k]:
            continue
        orb = [k]
        x = k * d % N
        while x != k:
            orb.append(x)
            x = x * d % N
        for v in orb:
            seen[v] = 1
        if len(orb) == q:
            found.append(tuple(sorted(orb)))
    return tuple(found)


def _advances_by(cycle: Sequence[int], d: int, N: int, p: int) -> bool:
    q = len(cycle)
    pos = {v: i for i, v in enumerate(cycle)}
    return all(pos[v * d % N] == (i + p) % q for i, v in enumerate(cycle))


def enumerate_rotation_sets(d: int, p: int, q: int) -> list[RotationSet]:
    """The d-1 single-cycle rotation sets with rotation number p/q.

    Brute force over all q-cycles with denominator dividing d^q - 1.  A
    cycle qualifies when d advances every element by p circular positions
    and the whole cycle sits inside one sector between consecutive fixed
    angles k/(d-1).  Sets are returned in increasing order of their
    smallest angle.
    """
    if d < 2:
        raise CircleDomainError("degree must be at least 2")
    if q < 2 or not (0 < p < q) or gcd(p, q) != 1:
        raise CircleDomainError(f"need q >= 2 and 0 < p < q coprime, got p={p}, q={q}")
    N = d**q - 1
    out = []
    for cyc in _cycles_of_length(d, q):
        if not _advances_by(cyc, d, N, p):
            continue
        if len({v * (d - 1) // N for v in cyc}) != 1:
            continue
        out.append(RotationSet(d, p, q, tuple(Fraction(v, N) for v in cyc)))
    out.sort(key=lambda rs: rs.angles[0])
    return out


def all_rotation_sets(d: int, q: int) -> list[RotationSet]:
    """Rotation sets for every admissible p/q with denominator q."""
    return [rs for p in rotation_numerators(q) for rs in enumerate_rotation_sets(d, p, q)]


def _gaps(angles: Sequence[Angle]) -> list[Angle]:
    q = len(angles)
    return [(angles[(i + 1) % q] - angles[i]) % 1 or Fraction(1) for i in range(q)]


def _widest_index(rs: RotationSet) -> int:
    gaps = _gaps(rs.angles)
    widest = max(gaps)
    where = [i for i, g in enumerate(gaps) if g == widest]
    if len(where) > 1:
        raise WidestGapTieError(f"{len(where)} gaps of length {widest} in {rs.angles}")
    return where[0]


def widest_gap(rs: RotationSet) -> tuple[Angle, Angle]:
    """Endpoints (tau-, tau+) of the widest complementary arc, counterclockwise."""
    i = _widest_index(rs)
    return rs.angles[i], rs.angles[(i + 1) % rs.q]


@dataclass(frozen=True)
class ArcModel:
    rotation_set: RotationSet
    level0_arcs: tuple[Arc, ...]  # level0_arcs[j] is Y_j
    level1_arcs: tuple[Arc, ...]  # counterclockwise from tau-

    @property
    def d(self) -> int:
        return self.rotation_set.d

    @property
    def q(self) -> int:
        return self.rotation_set.q

    @property
    def tau(self) -> tuple[Angle, Angle]:
        y0 = self.level0_arcs[0]
        return y0.start, y0.end

    def arc(self, *label) -> Arc:
        return self._by_label[tuple(label)]

    @property
    def _by_label(self) -> dict:
        return {a.label: a for a in self.level1_arcs}

    def c_arcs(self) -> list[Arc]:
        return [a for a in self.level1_arcs if a.label[0] == "C"]

    def locate(self, x: Angle) -> Arc:
        """Level-1 arc containing x; boundary points raise ArcBoundaryError."""
        x = as_angle(x)
        for a in self.level1_arcs:
            if a.contains(x):
                return a
        raise ArcBoundaryError(f"{x} lies on a level-1 arc boundary")

    def label_counts(self) -> tuple[int, int, int]:
        kinds = [a.label[0] for a in self.level1_arcs]
        return kinds.count("C"), kinds.count("A"), kinds.count("B")


def build_arc_model(rs: RotationSet) -> ArcModel:
    d, p, q, s = rs.d, rs.p, rs.q, rs.angles
    i0 = _widest_index(rs)
    gaps = _gaps(s)
    level0 = []
    for j in range(q):
        i = (i0 + j * p) % q
        level0.append(Arc(s[i], gaps[i], ("Y", j)))
    for j in range(1, q):
        # non-critical pieces advance Y_j -> Y_{j+1}
        img = level0[(j + 1) % q]
        if (d * level0[j].start) % 1 != img.start or d * level0[j].length != img.length:
            raise CircleDomainError(f"Y{j} does not map onto Y{(j + 1) % q}")
    start_to_j = {a.start: j for j, a in enumerate(level0)}

    y0 = level0[0]
    pre = sorted({(a + t) / d for a in s for t in range(d)}, key=lambda x: ccw_offset(x, y0.start))
    k_count: dict[int, int] = {}
    c_count = 0
    level1 = []
    for idx, a in enumerate(pre):
        b = pre[(idx + 1) % len(pre)]
        length = ccw_offset(b, a) or Fraction(1)
        j_img = start_to_j[(d * a) % 1]
        if d * length != level0[j_img].length:
            raise CircleDomainError("level-1 arc does not map onto a level-0 arc")
        inside = ccw_offset(a, y0.start) + length <= y0.length
        if j_img == 1:
            c_count += 1
            label = ("C", c_count)
        elif not inside:
            label = ("A", (j_img - 1) % q)
        else:
            j = (j_img - 1) % q
            k_count[j] = k_count.get(j, 0) + 1
            label = ("B", k_count[j], j)
        level1.append(Arc(a, length, label))
    return ArcModel(rs, tuple(level0), tuple(level1))


@dataclass(frozen=True)
class Itinerary:
    d: int
    q: int
    legs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        legs = tuple((int(a), int(b)) for a, b in self.legs)
        object.__setattr__(self, "legs", legs)
        if not legs or legs[0][0] != self.q:
            raise CircleDomainError(f"first leg must have length q={self.q}: {legs}")
        for a, b in legs:
            if not 1 <= a <= self.q:
                raise CircleDomainError(f"leg length {a} outside [1, {self.q}]")
            if (b == 0) != (a == self.q) or not 0 <= b <= self.d - 1:
                raise CircleDomainError(f"bad branch label in leg {(a, b)}")

    @property
    def n(self) -> int:
        return sum(a for a, _ in self.legs)

    @property
    def composition(self) -> HComposition:
        return HComposition(tuple(a for a, _ in self.legs))

    def is_renormalizing(self) -> bool:
        return block_period(self.legs) < len(self.legs)


def arc_itinerary(theta, model: ArcModel) -> Itinerary:
    """Itinerary of a periodic angle read through the level-1 arcs.

    The angle is read as the critical value: the critical point is the first
    orbit point lying in a C arc, scanning forward from the predecessor of
    ``theta``.  When that predecessor is itself in a C arc, ``theta`` is the
    critical value proper.
    """
    theta = as_angle(theta)
    d, q = model.d, model.q
    if not is_periodic(theta, d):
        raise CircleDomainError(f"{theta} is not periodic under multiplication by {d}")
    orbit = dmap_orbit(theta, d).orbit
    per = len(orbit)
    labels = [model.locate(x).label for x in orbit]
    start = None
    for t in range(per):
        i = (per - 1 + t) % per
        if labels[i][0] == "C":
            start = i
            break
    if start is None:
        raise CircleDomainError(f"the orbit of {theta} never enters a C arc")
    legs = []
    t = 0
    while t < per:
        lab = labels[(start + t) % per]
        if lab[0] == "C":
            a, b = q, 0
        elif lab[0] == "B":
            a, b = q - lab[2], lab[1]
        else:
            raise CircleDomainError(f"return point outside the widest gap: {lab}")
        legs.append((a, b))
        t += a
    if t != per:
        raise CircleDomainError("legs overshoot the period")
    return Itinerary(d, q, tuple(legs))


def enumerate_itineraries(P: HComposition, d: int) -> list[Itinerary]:
    if d < 2:
        raise CircleDomainError("degree must be at least 2")
    q = P.first
    if q == 1:
        raise SpecialCaseError("first part 1: the only center is c = 0")
    choices = [[0] if a == q else list(range(1, d)) for a in P.parts[1:]]
    out = []
    for bs in itertools.product(*choices):
        out.append(Itinerary(d, q, ((q, 0),) + tuple(zip(P.parts[1:], bs))))
    return out


@dataclass(frozen=True)
class AnglePairChoice:
    """One admissible pair of angles bounding the critical-value piece.

    ``kappa_*`` are the base-d digits of ``X_*`` (least significant first),
    one per inverse branch applied, so ``eta = (tau + X) / d^(n-1)``.
    ``c_choices`` records which C arc (1..d) was taken at each free step.
    """

    tau_minus: Angle
    tau_plus: Angle
    kappa_minus: tuple[int, ...]
    kappa_plus: tuple[int, ...]
    X_minus: int
    X_plus: int
    eta_minus: Angle
    eta_plus: Angle
    c_choices: tuple[int, ...]


def _digits(x: int, d: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        x, r = divmod(x, d)
        out.append(r)
    return tuple(out)


def _locations(it: Itinerary, model: ArcModel) -> list[Optional[Arc]]:
    # level-1 arc holding z_t for t = 1..n-1; None marks a free C step
    q = it.q
    n = it.n
    loc: list[Optional[Arc]] = [None] * (n + 1)
    t = 0
    for a, b in it.legs:
        if t > 0:
            loc[t] = None if a == q else model.arc("B", b, q - a)
        first_piece = 1 if a == q else q - a + 1
        for u in range(1, a):
            loc[t + u] = model.arc("A", first_piece + u - 1)
        t += a
    return loc


def _pullback_candidates(start: Angle, length: Angle, d: int) -> list[tuple[Angle, Angle]]:
    return [((start + i) / d, length / d) for i in range(d)]


def angle_pair_choices(it: Itinerary, rs: RotationSet, n: Optional[int] = None) -> list[AnglePairChoice]:
    """Pull the widest gap back along the itinerary, branching at free C steps.

    Returns one choice per combination of C arcs, d**omega in total.
    """
    if it.d != rs.d or it.q != rs.q:
        raise CircleDomainError("itinerary and rotation set disagree on d or q")
    if n is None:
        n = it.n
    elif n != it.n:
        raise CircleDomainError(f"n={n} but legs sum to {it.n}")
    model = build_arc_model(rs)
    return _pullbacks(it, model, n)


def _pullbacks(it: Itinerary, model: ArcModel, n: int) -> list[AnglePairChoice]:
    d = model.d
    tau_m, tau_p = model.tau
    y0 = model.level0_arcs[0]
    loc = _locations(it, model)
    c_arcs = model.c_arcs()
    scale = d ** (n - 1)
    out: list[AnglePairChoice] = []

    def descend(t: int, start: Angle, length: Angle, picks: tuple[int, ...]) -> None:
        if t == 0:
            eta_m = start
            eta_p = (start + length) % 1
            xm = eta_m * scale - tau_m
            xp = eta_p * scale - tau_p
            if xm.denominator != 1 or xp.denominator != 1:
                raise AssertionError("pullback endpoints are not branch images of tau")
            xm, xp = int(xm), int(xp)
            out.append(
                AnglePairChoice(
                    tau_m, tau_p,
                    _digits(xm, d, n - 1), _digits(xp, d, n - 1),
                    xm, xp, eta_m, eta_p, picks,
                )
            )
            return
        cands = _pullback_candidates(start, length, d)
        target = loc[t]
        if target is None:
            for k, arc in enumerate(c_arcs, start=1):
                hit = [c for c in cands if arc.contains_arc(*c)]
                if len(hit) != 1:
                    raise AssertionError(f"C arc {k} holds {len(hit)} preimages")
                descend(t - 1, *hit[0], picks + (k,))
        else:
            hit = [c for c in cands if target.contains_arc(*c)]
            if len(hit) != 1:
                raise AssertionError(f"{target.name} holds {len(hit)} preimages")
            descend(t - 1, *hit[0], picks)

    if n == 1:
        raise CircleDomainError("n must be at least 2")
    descend(n - 1, y0.start, y0.length, ())
    # order by the C choices read from the earliest time
    out.sort(key=lambda c: c.c_choices[::-1])
    return out


def fixed_angles(choice: AnglePairChoice, d: int, n: int) -> tuple[Angle, Angle]:
    """Fixed points of ``theta -> (theta + X) / d^(n-1)`` for both endpoints.

    Their period divides n - 1; kept for experimentation only.
    """
    m = d ** (n - 1) - 1
    return as_angle(Fraction(choice.X_minus, m)), as_angle(Fraction(choice.X_plus, m))


def characteristic_angles(choice: AnglePairChoice, model: ArcModel, n: int) -> tuple[Angle, Angle]:
    """The two period-n angles of the critical-value piece nearest its ends.

    theta- is fixed by the n-fold inverse branch carrying Y1 into the
    critical-value piece with dtau- landing on eta-; likewise theta+.
    """
    d = model.d
    y1 = model.level0_arcs[1]
    k = d**n - 1
    off_m = ccw_offset(choice.eta_minus, y1.start)
    off_p = ccw_offset(y1.end, choice.eta_plus)
    return as_angle(choice.eta_minus + off_m / k), as_angle(choice.eta_plus - off_p / k)


def angle_pair_count(P: HComposition, d: int) -> int:
    """Number of admissible angle pairs for P, assembled by enumeration.

    Sums, over every rotation number p/a1, every rotation set and every
    itinerary, the number of pullback choices.
    """
    if P.first == 1:
        raise SpecialCaseError("first part 1: the only center is c = 0")
    total = 0
    its = enumerate_itineraries(P, d)
    for rs in all_rotation_sets(d, P.first):
        model = build_arc_model(rs)
        for it in its:
            total += len(_pullbacks(it, model, P.n))
    return total


def angle_pair_factors(P: HComposition, d: int) -> tuple[int, int, int]:
    """(rotation sets, itineraries, pairs per itinerary) as counted by enumeration."""
    if P.first == 1:
        raise SpecialCaseError("first part 1: the only center is c = 0")
    sets = all_rotation_sets(d, P.first)
    its = enumerate_itineraries(P, d)
    pairs = len(_pullbacks(its[0], build_arc_model(sets[0]), P.n))
    return len(sets), len(its), pairs


def renormalized_count(P: HComposition, d: int) -> int:
    """Centers of a renormalizing itinerary, counted through the small copy.

    rotation sets * d^w' choices for the block * centers of period r/r' for
    the degree d^(w'+1) straightened map.
    """
    rp = block_period(P.parts)
    block = HComposition(P.parts[:rp])
    wp = block.omega
    return totient(P.first) * (d - 1) * d**wp * (d ** (wp + 1)) ** (P.r // rp - 1)


@dataclass(frozen=True)
class OrbitPortrait:
    theta_sets: tuple[frozenset, ...]
    d: int
    period: int

    def sorted_sets(self) -> list[list[Angle]]:
        return [sorted(s) for s in self.theta_sets]


def _arc_index(sorted_s: Sequence[Angle], x: Angle) -> int:
    # index i such that x lies in the complementary arc (s[i], s[i+1])
    i = bisect.bisect_left(sorted_s, x)
    return (i - 1) % len(sorted_s)


def unlinked(S: Iterable, T: Iterable) -> bool:
    """True iff T sits inside a single complementary arc of S."""
    S = sorted({as_angle(x) for x in S})
    T = sorted({as_angle(x) for x in T})
    if set(S) & set(T):
        raise CircleDomainError(f"sets overlap at {sorted(set(S) & set(T))}")
    if not S or not T:
        return True
    return len({_arc_index(S, t) for t in T}) == 1


def build_portrait(theta_minus, theta_plus, d: int, n: int) -> OrbitPortrait:
    """Orbit of the pair {theta-, theta+}, checked against properties a-d."""
    t0 = frozenset({as_angle(theta_minus), as_angle(theta_plus)})
    for x in t0:
        if not is_periodic(x, d):
            raise CircleDomainError(f"{x} is not periodic under multiplication by {d}")
    sets = [t0]
    for _ in range(n):
        sets.append(frozenset((d * x) % 1 for x in sets[-1]))
    # a: finite sets of angles, by construction
    # b: bijective steps closing up after n
    for j in range(1, n + 1):
        if len(sets[j]) != len(sets[j - 1]):
            raise PortraitError("b", "the map is not injective on the set", (j - 1, j % n))
    if sets[n] != sets[0]:
        raise PortraitError("b", f"the sets do not close up after {n} steps")
    sets = sets[:n]
    # c: common period
    periods = {exact_period(x, d) for s in sets for x in s}
    if len(periods) != 1:
        raise PortraitError("c", f"angles have different periods {sorted(periods)}")
    # d: pairwise unlinked
    for i, j in itertools.combinations(range(n), 2):
        if sets[i] & sets[j]:
            raise PortraitError("d", "the sets share an angle, so no disjoint intervals", (i, j))
        if not unlinked(sets[i], sets[j]):
            raise PortraitError("d", "the sets are linked", (i, j))
    return OrbitPortrait(tuple(sets), d, periods.pop())
