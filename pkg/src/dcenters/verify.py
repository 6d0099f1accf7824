"""The acceptance checks and the report they produce.

Each check is a plain function returning a ``CheckRecord``; ``run_checks``
dispatches them to a process pool and reassembles the report in canonical
order.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import circle, dynamics, hcomp, render, series
from .hcomp import HComposition


@dataclass
class CheckRecord:
    check_id: str
    parameters: dict[str, Any]
    expected: Any
    actual: Any
    passed: bool
    elapsed_ms: float = 0.0


@dataclass
class VerifyReport:
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        return {"total": len(self.records), "failed": sum(not r.passed for r in self.records)}

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0

    def to_dict(self) -> dict:
        return {"records": [asdict(r) for r in self.records], "summary": self.summary}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "VerifyReport":
        data = json.loads(text)
        report = cls([CheckRecord(**r) for r in data["records"]])
        if report.summary != data["summary"]:
            raise ValueError("summary does not match the records")
        return report

    def lines(self) -> list[str]:
        out = []
        for r in self.records:
            flag = "PASS" if r.passed else "FAIL"
            out.append(f"{flag}  {r.check_id:<22} {r.elapsed_ms:9.1f} ms  actual={r.actual}")
        s = self.summary
        out.append(f"{s['total'] - s['failed']}/{s['total']} checks passed")
        return out


H5_TERMS_D3 = [8, 8, 8, 16, 12, 12, 16, 162]
CUBIC_TWO_FIFTHS_SET = [Fraction(k, 121) for k in (5, 14, 15, 42, 45)]


def check_identity(n_max: int = 18, d_max: int = 6) -> CheckRecord:
    bad = []
    for n in range(1, n_max + 1):
        comps = hcomp.enumerate_hcompositions(n)
        for d in range(1, d_max + 1):
            lhs = sum(hcomp.term_value(P, d) for P in comps)
            if lhs != d**n - 1:
                bad.append((n, d))
    terms = [hcomp.term_value(P, 3) for P in hcomp.enumerate_hcompositions(5)]
    lhs53, rhs53, _ = hcomp.identity_check(5, 3)
    actual = {"failures": bad, "h5_terms_d3": terms, "lhs_5_3": lhs53, "rhs_5_3": rhs53}
    expected = {"failures": [], "h5_terms_d3": H5_TERMS_D3, "lhs_5_3": 242, "rhs_5_3": 242}
    return CheckRecord("identity", {"n_max": n_max, "d_max": d_max}, expected, actual, actual == expected)


def check_series(order: int = 30, d_max: int = 5, lambert_order: int = 200, bs_max: int = 8, gf_order: int = 40) -> CheckRecord:
    g_bad = [
        d for d in range(1, d_max + 1)
        if series.g_series(d, order) != series.closed_form_series(d, order)
    ]
    lam = series.lambert_series(lambert_order).as_ints()[1:]
    lam_ok = lam == list(range(1, lambert_order + 1))
    gf_bad = []
    for b in range(0, bs_max + 1):
        for s in range(1, bs_max + 1):
            got = series.bounded_composition_gf(b, s, gf_order).as_ints()
            want = [hcomp.count_bounded_compositions(n, b, s) for n in range(gf_order + 1)]
            if got != want:
                gf_bad.append((b, s))
    actual = {"g_mismatch_d": g_bad, "lambert_ok": lam_ok, "bounded_gf_mismatch": gf_bad}
    expected = {"g_mismatch_d": [], "lambert_ok": True, "bounded_gf_mismatch": []}
    params = {"order": order, "d_max": d_max, "lambert_order": lambert_order, "bs_max": bs_max, "gf_order": gf_order}
    return CheckRecord("generating_functions", params, expected, actual, actual == expected)


def _gap_contains_zero(rs: circle.RotationSet) -> bool:
    tm, tp = circle.widest_gap(rs)
    # the arc runs counterclockwise from tau- to tau+; it holds 0 iff it wraps
    return tm > tp


def check_rotation_sets(d_max: int = 5, q_max: int = 7) -> CheckRecord:
    bad_count, bad_inv, bad_gap = [], [], []
    for d in range(2, d_max + 1):
        for q in range(2, q_max + 1):
            for p in hcomp.rotation_numerators(q):
                sets = circle.enumerate_rotation_sets(d, p, q)
                members = [a for rs in sets for a in rs.angles]
                if len(sets) != d - 1 or len(set(members)) != len(members):
                    bad_count.append((d, p, q, len(sets)))
                for rs in sets:
                    try:
                        rs.check()
                    except circle.CircleDomainError:
                        bad_inv.append((d, p, q))
                    if not _gap_contains_zero(rs):
                        bad_gap.append((d, p, q))
    found = any(list(rs.angles) == CUBIC_TWO_FIFTHS_SET for rs in circle.enumerate_rotation_sets(3, 2, 5))
    actual = {"count_failures": bad_count, "invariant_failures": bad_inv, "gap_failures": bad_gap, "two_fifths_set_found": found}
    expected = {"count_failures": [], "invariant_failures": [], "gap_failures": [], "two_fifths_set_found": True}
    return CheckRecord("rotation_sets", {"d_max": d_max, "q_max": q_max}, expected, actual, actual == expected)


def check_count_ledger(n_max: int = 8, d_max: int = 4) -> CheckRecord:
    bad_terms, bad_totals = [], []
    for d in range(2, d_max + 1):
        for n in range(1, n_max + 1):
            total = 1  # the all-ones composition: the center c = 0
            for P in hcomp.iter_hcompositions(n):
                if P.first == 1:
                    continue
                cnt = circle.angle_pair_count(P, d)
                if cnt != hcomp.term_value(P, d):
                    bad_terms.append((str(P), d, cnt))
                total += cnt
            if total != d ** (n - 1):
                bad_totals.append((n, d, total))
    actual = {"term_failures": bad_terms, "total_failures": bad_totals}
    expected = {"term_failures": [], "total_failures": []}
    return CheckRecord("count_ledger", {"n_max": n_max, "d_max": d_max}, expected, actual, actual == expected)


CENSUS_SWEEP = [(2, 9), (3, 6), (4, 5)]


def check_gleason_census(sweep=tuple(CENSUS_SWEEP)) -> CheckRecord:
    cfg = dynamics.SolverSettings()
    problems = []
    worst_sep, worst_res = float("inf"), 0.0
    for d, n_max in sweep:
        roots_by_n = {}
        for n in range(1, n_max + 1):
            try:
                centers = dynamics.find_centers(d, n, cfg)
            except (dynamics.SolverError, dynamics.CensusError) as exc:
                problems.append(f"d={d} n={n}: {exc}")
                continue
            roots_by_n[n] = [x.c for x in centers]
            worst_sep = min(worst_sep, dynamics.min_separation(roots_by_n[n]))
            worst_res = max(worst_res, max(x.residual for x in centers))
            census = dynamics.exact_period_census(d, n, cfg, centers)
            oracle = {m: dynamics.exact_period_count(d, m) for m in hcomp.divisors(n)}
            if len(centers) != d ** (n - 1) or census != oracle:
                problems.append(f"d={d} n={n}: census {census} vs {oracle}")
            for m in hcomp.divisors(n):
                if not dynamics.divisibility_check(d, m, n)[1]:
                    problems.append(f"d={d}: h_{m - 1} does not divide h_{n - 1}")
                if m in roots_by_n and not dynamics.roots_contained(roots_by_n[m], roots_by_n[n]):
                    problems.append(f"d={d}: roots for period {m} missing at {n}")
    passed = not problems and worst_sep > cfg.separation_tol and worst_res < cfg.residual_tol
    actual = {"problems": problems, "min_separation": worst_sep, "max_residual": worst_res}
    expected = {"problems": [], "min_separation": f"> {cfg.separation_tol}", "max_residual": f"< {cfg.residual_tol}"}
    return CheckRecord("gleason_census", {"sweep": [list(x) for x in sweep]}, expected, actual, passed)


def check_renormalization(n_max: int = 12, d_max: int = 4) -> CheckRecord:
    bad = []
    seen = 0
    for n in range(1, n_max + 1):
        for P in hcomp.iter_hcompositions(n):
            data = hcomp.renormalization_split(P)
            if data is None:
                continue
            seen += 1
            if Fraction(P.r * (data.w_prime + 1), data.r_prime) - 1 != P.omega:
                bad.append((str(P), "omega"))
            if Fraction(data.r_prime * n, P.r) != data.n_prime:
                bad.append((str(P), "n_prime"))
            if P.first > 1:
                for d in range(2, d_max + 1):
                    want = hcomp.totient(P.first) * (d - 1) * d**P.omega
                    if circle.renormalized_count(P, d) != want:
                        bad.append((str(P), "count", d))
    actual = {"failures": bad, "renormalizable": seen}
    return CheckRecord("renormalization", {"n_max": n_max}, {"failures": []}, actual, not bad and seen > 0)


def check_portraits() -> CheckRecord:
    d = 2
    f = Fraction
    valid = circle.build_portrait(f(1, 7), f(6, 7), d, 3)
    want = [[f(1, 7), f(6, 7)], [f(2, 7), f(5, 7)], [f(3, 7), f(4, 7)]]
    valid_ok = valid.sorted_sets() == want
    try:
        circle.build_portrait(f(1, 7), f(2, 7), d, 3)
        rejected, prop = False, None
    except circle.PortraitError as exc:
        rejected, prop = True, exc.prop
    actual = {"valid_sets_match": valid_ok, "sharing_rejected": rejected, "violated_property": prop}
    expected = {"valid_sets_match": True, "sharing_rejected": True, "violated_property": "d"}
    return CheckRecord("portraits", {"d": d, "n": 3}, expected, actual, actual == expected)


def check_render(size: int = 256) -> CheckRecord:
    vp = render.Viewport(0j, 2.0, size, size)
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp, "a.ppm"), Path(tmp, "b.ppm")
        render.render_julia(0j, 2, vp, a)
        render.render_julia(0j, 2, vp, b)
        data = a.read_bytes()
        identical = data == b.read_bytes()
    header_ok = data.startswith(f"P6\n{size} {size}\n255\n".encode())
    mask = render.mask_from_ppm(data)
    r = np.abs(vp.grid())
    s = vp.pixel_size
    wrong = int(((r < 1 - s) & ~mask).sum() + ((r > 1 + s) & mask).sum())
    actual = {"identical": identical, "header_ok": header_ok, "pixels_off_disk": wrong}
    expected = {"identical": True, "header_ok": True, "pixels_off_disk": 0}
    return CheckRecord("render", {"size": size, "c": "0", "d": 2}, expected, actual, actual == expected)


CHECKS: dict[str, Callable[[], CheckRecord]] = {
    "identity": check_identity,
    "generating_functions": check_series,
    "rotation_sets": check_rotation_sets,
    "count_ledger": check_count_ledger,
    "gleason_census": check_gleason_census,
    "renormalization": check_renormalization,
    "portraits": check_portraits,
    "render": check_render,
}


def _timed(name: str) -> CheckRecord:
    t0 = time.perf_counter()
    rec = CHECKS[name]()
    rec.elapsed_ms = round((time.perf_counter() - t0) * 1000, 1)
    # tuples become lists so a record equals its own JSON round trip
    for attr in ("parameters", "expected", "actual"):
        setattr(rec, attr, json.loads(json.dumps(getattr(rec, attr))))
    return rec


def worker_count() -> int:
    raw = os.environ.get("DCENTER_THREADS")
    if raw is None:
        return min(len(CHECKS), os.cpu_count() or 1)
    n = int(raw)
    if n < 1:
        raise ValueError("DCENTER_THREADS must be a positive integer")
    return n


def run_checks(names=None, workers: int | None = None) -> VerifyReport:
    names = list(CHECKS) if names is None else list(names)
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        records = [_timed(n) for n in names]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_timed, names))
    return VerifyReport(records)
