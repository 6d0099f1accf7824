"""One test per acceptance criterion, each printing a PASS/FAIL line."""

import json
import time

import pytest

from dcenters import cli, verify

RESULTS = {}

CRITERIA = [
    (1, "identity", verify.check_identity, 60),
    (2, "generating_functions", verify.check_series, 10),
    (3, "rotation_sets", verify.check_rotation_sets, 60),
    (4, "count_ledger", verify.check_count_ledger, 30),
    (5, "gleason_census", verify.check_gleason_census, 180),
    (6, "renormalization", verify.check_renormalization, 60),
    (7, "portraits", verify.check_portraits, 60),
    (8, "render", verify.check_render, 60),
]


@pytest.mark.parametrize("number, name, check, limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, name, check, limit, capsys):
    t0 = time.perf_counter()
    rec = check()
    elapsed = time.perf_counter() - t0
    ok = rec.passed and elapsed < limit
    RESULTS[name] = rec
    with capsys.disabled():
        flag = "PASS" if ok else "FAIL"
        print(f"\n[acceptance {number}] {flag} {name} ({elapsed:.1f}s, limit {limit}s): {rec.actual}")
    assert rec.passed, rec.actual
    assert elapsed < limit


def test_verify_all_reproduces_criteria(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = cli.main(["verify-all", "--json", str(out)])
    capsys.readouterr()
    assert code == 0
    report = verify.VerifyReport.from_json(out.read_text())
    assert [r.check_id for r in report.records] == list(verify.CHECKS)
    assert report.summary == {"total": len(CRITERIA), "failed": 0}
    # identical content to the direct runs above, apart from timing
    for rec in report.records:
        if rec.check_id in RESULTS:
            direct = RESULTS[rec.check_id]
            assert rec.actual == json.loads(json.dumps(direct.actual))
            assert rec.expected == json.loads(json.dumps(direct.expected))
