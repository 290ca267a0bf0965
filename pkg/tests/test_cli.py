import json

import pytest

from staircase.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_PRECISION,
    EXIT_USAGE,
    ResultCache,
    ScanResult,
    main,
    run_scan,
)
from staircase.exact import (
    IntegerPolynomial,
    LogConcavityReport,
    UnimodalityReport,
    check_log_concave,
    check_unimodal,
    staircase_gf_dp,
)
from staircase.piecewise import irwin_hall_lemma_case, log_concavity_margin
from staircase.saddle import convergence_study, discriminant, jm_integral


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_gf_pretty(capsys):
    assert run(capsys, "gf", 3, 2)[:2] == (EXIT_OK, "[1,1,1,2,1,1]\n")
    assert run(capsys, "gf", 5, 1)[1] == "[1,1,1,1,1,1]\n"


def test_gf_json_and_clamp(capsys):
    code, rec = run_json(capsys, "gf", 19, 6)
    assert code == EXIT_OK and rec["schema"] == "staircase.gf/1"
    assert len(rec["coefficients"]) == 100 and rec["clamped_b"] is None
    _, rec = run_json(capsys, "gf", 3, 5)
    assert rec["clamped_b"] == 3
    assert rec["coefficients"] == staircase_gf_dp((3, 3)).to_strings()


def test_gf_csv(capsys, tmp_path):
    out = tmp_path / "gf.csv"
    assert main(["gf", "3", "2", "--format", "csv", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "ell,coefficient"
    assert lines[4] == "3,2"


def test_check_exit_codes(capsys):
    code, out, _ = run(capsys, "check", 19, 6)
    assert code == EXIT_FAIL and "NOT unimodal" in out
    assert run(capsys, "check", 30, 3)[0] == EXIT_OK
    code, rec = run_json(capsys, "check", 100, 5, "--mode", "logconcave")
    assert code == EXIT_OK and rec["passed"]
    assert rec["report"]["checked_range"] == [100, 400]


def test_check_json_report(capsys):
    _, rec = run_json(capsys, "check", 19, 6)
    assert rec["length"] == 100 and not rec["passed"]
    rep = UnimodalityReport.from_dict(rec["report"])
    assert rep == check_unimodal(staircase_gf_dp((19, 6)))


def test_scan(capsys):
    code, rec = run_json(capsys, "scan", 6, 5, 30, "--jobs", 1)
    assert code == EXIT_OK and 19 in rec["failures"]
    assert rec["clamped"] == [5]
    assert run_json(capsys, "scan", 3, 3, 150, "--jobs", 1)[1]["failures"] == []
    assert run_json(capsys, "scan", 1, 1, 50, "--jobs", 1)[1]["failures"] == []


def test_scan_parallel_is_deterministic():
    serial = run_scan(6, 5, 40, jobs=1)
    parallel = run_scan(6, 5, 40, jobs=3)
    assert serial.failures == parallel.failures
    assert list(serial.peaks.items()) == list(parallel.peaks.items())


def test_scan_rejects_empty_range(capsys):
    assert run(capsys, "scan", 6, 30, 5)[0] == EXIT_USAGE


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gf", "three", "2"])
    assert exc.value.code == EXIT_USAGE
    assert run(capsys, "gf", 0, 2)[0] == EXIT_USAGE
    assert run(capsys, "jm", 10, 3, 2, 0)[0] == EXIT_USAGE
    assert run(capsys, "irwinhall", 2, "--eval", "1/0")[0] == EXIT_USAGE


def test_asymptotics(capsys):
    code, rec = run_json(capsys, "asymptotics", 5, 0, 2.5, "128,256,512")
    assert code == EXIT_OK and rec["schema"] == "staircase.asymptotics/1"
    assert all(0.5 <= o <= 1.5 for o in rec["empirical_orders"])


def test_asymptotics_csv_header(capsys):
    code, out, _ = run(capsys, "asymptotics", 5, 1, 2.5, "64,128", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "n,b,ell,m,jm,main_term,ratio,error"


def test_irwinhall(capsys):
    code, out, _ = run(capsys, "irwinhall", 3, "--eval", "3/2")
    assert code == EXIT_OK and out.strip() == "I_3^(0)(3/2) = 3/4"
    _, rec = run_json(capsys, "irwinhall", 3, "--eval", "3/2", "1/2", "--derivative", 1)
    assert [v["value"] for v in rec["values"]] == ["0/1", "1/2"]
    _, rec = run_json(capsys, "irwinhall", 4, "--margin", "1/2", "7/2", "1/64")
    assert rec["margin"]["min_value"] == "2249882185728/906949570921"


def test_irwinhall_random_points_seeded(capsys):
    a = run_json(capsys, "irwinhall", 5, "--random-points", 5, "--seed", 3)[1]
    b = run_json(capsys, "irwinhall", 5, "--random-points", 5, "--seed", 3)[1]
    assert a["values"] == b["values"] and len(a["values"]) == 5


def test_irwinhall_one_sided_is_usage_error(capsys):
    assert run(capsys, "irwinhall", 1, "--eval", "1")[0] == EXIT_USAGE


def test_lemma(capsys):
    code, rec = run_json(capsys, "lemma", "--gaussian", 1, 1)
    assert code == EXIT_OK and rec["holds"]
    assert float(rec["min_slack"].split("/")[0]) == 0
    code, out, _ = run(capsys, "lemma", "--irwin-hall", 4, 4)
    assert code == EXIT_OK and "holds" in out


def test_lemma_bad_hypothesis(capsys):
    assert run(capsys, "lemma", "--gaussian", 0, 1)[0] == EXIT_USAGE
    assert run(capsys, "lemma", "--irwin-hall", 2, 4)[0] == EXIT_USAGE


def test_jm(capsys):
    code, rec = run_json(capsys, "jm", 40, 5, 80, 0)
    assert code == EXIT_OK
    assert rec["value"] == pytest.approx(int(rec["exact"]), rel=1e-6)


def test_cache_round_trip(capsys, tmp_path):
    path = tmp_path / "cache.jsonl"
    assert run(capsys, "gf", 12, 4, "--cache", path)[0] == EXIT_OK
    assert len(path.read_text().splitlines()) == 1
    assert run(capsys, "gf", 12, 4, "--cache", path, "--verify-cache")[0] == EXIT_OK
    # a hit does not append
    assert len(path.read_text().splitlines()) == 1
    assert ResultCache(path).get(12, 4) == staircase_gf_dp((12, 4))
    assert ResultCache(path, version="0.0.0").get(12, 4) is None


def test_cache_tamper_detected(capsys, tmp_path):
    path = tmp_path / "cache.jsonl"
    run(capsys, "gf", 10, 3, "--cache", path)
    rec = json.loads(path.read_text())
    rec["coefficients"][7] = str(int(rec["coefficients"][7]) + 1)
    path.write_text(json.dumps(rec) + "\n")
    # without verification the bad entry is served as is
    assert run(capsys, "gf", 10, 3, "--cache", path)[0] == EXIT_OK
    code, _, err = run(capsys, "gf", 10, 3, "--cache", path, "--verify-cache")
    assert code == EXIT_PRECISION and "l=7" in err


def test_report_json_round_trips():
    poly = staircase_gf_dp((19, 6))
    rep = check_unimodal(poly)
    assert UnimodalityReport.from_dict(json.loads(json.dumps(rep.to_dict()))) == rep
    lc = check_log_concave(poly, 10, 80)
    assert LogConcavityReport.from_dict(json.loads(json.dumps(lc.to_dict()))) == lc
    scan = run_scan(6, 15, 20)
    assert ScanResult.from_json(json.loads(json.dumps(scan.to_json()))) == scan
    assert IntegerPolynomial.from_strings(json.loads(json.dumps(poly.to_strings()))) == poly
    for obj in (
        log_concavity_margin(5, "1/2", "9/2", "1/8"),
        irwin_hall_lemma_case(4, 4, "1/8"),
        jm_integral((20, 4), 30, 1),
        discriminant((64, 5), 160),
        convergence_study(5, 0, 2.5, [32])[0],
    ):
        blob = json.dumps(obj.to_json())
        assert json.loads(blob) == obj.to_json()
