import json

import pytest

from dcenters import cli
from dcenters.render import decode_ppm
from dcenters.verify import CheckRecord, VerifyReport, run_checks, worker_count


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_identity_table(capsys):
    code, out, _ = run(capsys, "identity", "--n-max", "5", "--d-max", "3")
    assert code == 0
    row = [line.split() for line in out.splitlines() if line.split()[:2] == ["5", "3"]]
    assert row == [["5", "3", "242", "=", "242"]]


def test_counts_ledger(capsys):
    code, out, _ = run(capsys, "counts", "--n", "5", "--d", "3")
    assert code == 0
    rows = [line.split() for line in out.splitlines()[2:10]]
    assert [r[0] for r in rows][:3] == ["5", "4+1", "3+2"]
    assert [int(r[7]) for r in rows] == [8, 8, 8, 16, 12, 12, 16, 162]
    assert [r[6] for r in rows[:7]] == ["8", "8", "8", "16", "12", "12", "16"]
    assert "sum of counts + 1 = 81; d^(n-1) = 81" in out


def test_trivial_center(capsys):
    code, out, _ = run(capsys, "centers", "--d", "2", "--n", "1")
    assert code == 0
    assert "+0.000000000000000" in out.splitlines()[2]


def test_center_dump(capsys, tmp_path):
    path = tmp_path / "c.csv"
    code, _, _ = run(capsys, "centers", "--d", "3", "--n", "3", "--dump", str(path))
    assert code == 0
    assert len(path.read_text().splitlines()) == 10


def test_rotation_sets(capsys):
    code, out, _ = run(capsys, "rotation-sets", "--d", "3", "--p", "2", "--q", "5")
    assert code == 0
    assert "5/121 14/121 15/121 42/121 45/121" in out
    assert "(45/121, 5/121)" in out


def test_series(capsys):
    code, out, _ = run(capsys, "series", "--d", "3", "--order", "6")
    assert code == 0
    assert out.splitlines()[7].split() == ["5"] + ["242"] * 6


def test_render(capsys, tmp_path):
    out_path = tmp_path / "j.ppm"
    code, out, _ = run(capsys, "render", "--c=-1+0i", "--d", "2", "--out", str(out_path), "--width", "64")
    assert code == 0
    assert decode_ppm(out_path.read_bytes()).shape == (64, 64, 3)


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["identity", "--n-max", "3"],
        ["identity", "--n-max", "3", "--d-max", "2", "--frobnicate"],
        ["counts", "--n", "0", "--d", "3"],
        ["rotation-sets", "--d", "3", "--p", "2", "--q", "4"],
        ["render", "--c", "zz", "--d", "2", "--out", "x.ppm"],
        ["render", "--c", "0", "--d", "2", "--out", "x.ppm", "--width", "0"],
        ["centers", "--d", "2", "--n", "40"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = cli.main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_failing_check_exits_1(capsys, monkeypatch):
    monkeypatch.setattr(cli.hcomp, "term_value", lambda P, d: 0)
    code, _, _ = run(capsys, "identity", "--n-max", "2", "--d-max", "2")
    assert code == 1


def test_format_table_alignment():
    text = cli.format_table(["a", "bbb"], [(1, 2), (333, 4)])
    lines = text.splitlines()
    assert len({len(line) for line in lines}) == 1


def test_report_round_trip_and_summary():
    report = run_checks(["portraits", "render"], workers=1)
    assert report.summary == {"total": 2, "failed": 0}
    text = report.to_json()
    assert VerifyReport.from_json(text) == report
    assert VerifyReport.from_json(text).to_json() == text
    data = json.loads(text)
    assert list(data) == sorted(data)


def test_report_rejects_inconsistent_summary():
    report = VerifyReport([CheckRecord("x", {}, 1, 2, False)])
    data = json.loads(report.to_json())
    data["summary"]["failed"] = 0
    with pytest.raises(ValueError):
        VerifyReport.from_json(json.dumps(data))


def test_parallel_order_is_canonical():
    names = ["render", "portraits", "renormalization"]
    report = run_checks(names, workers=2)
    assert [r.check_id for r in report.records] == names


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("DCENTER_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("DCENTER_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()


def test_verify_all_rejects_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("DCENTER_THREADS", "-1")
    code, _, err = run(capsys, "verify-all")
    assert code == 2
