import json
import os

import pytest

from data_utils.data_io import load_rows, load_sparse_family, save_rows
from main_pipeline.main import EXIT_ASSERTION, EXIT_CONFIG, EXIT_OK, golden_failures, main
from processing.report_rows import CSV_COLUMNS, make_row

from conftest import SMOKE_CONFIG


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    # smoke.cfg keeps golden caps under a relative folder
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_missing_config_exits_2(workdir):
    assert main(["bounds", "--config", str(workdir / "absent.cfg")]) == EXIT_CONFIG


def test_malformed_config_exits_2(workdir):
    path = workdir / "bad.cfg"
    path.write_text("[grid]\nlevle = 3\n")
    assert main(["bounds", "--config", str(path)]) == EXIT_CONFIG


def test_invalid_thread_count_exits_2(workdir):
    assert main(["bounds", "--config", SMOKE_CONFIG, "--threads", "0"]) == EXIT_CONFIG


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["everything"])


def test_report_on_an_empty_folder(workdir):
    assert main(["report", "--out", str(workdir / "out")]) == EXIT_OK
    df = load_rows(str(workdir / "out" / "report" / "rows.csv"))
    assert list(df.columns) == CSV_COLUMNS and len(df) == 0


def test_bounds_then_report(workdir):
    out = str(workdir / "out")
    assert main(["bounds", "--config", SMOKE_CONFIG, "--out", out, "--freeze"]) == EXIT_OK
    assert os.path.isfile(os.path.join(out, "bounds", "report.json"))
    assert os.path.isfile(os.path.join(out, "bounds", "plotdata", "1.6.csv"))
    assert len(load_rows(os.path.join(out, "bounds", "rows.csv"))) == 24
    assert main(["report", "--out", out]) == EXIT_OK
    assert len(load_rows(os.path.join(out, "report", "rows.csv"))) == 24


def test_threads_give_identical_rows(workdir):
    contents = []
    for threads in ("1", "8"):
        out = str(workdir / f"out{threads}")
        args = ["weights", "--config", SMOKE_CONFIG, "--out", out, "--threads", threads, "--freeze"]
        assert main(args) == EXIT_OK
        with open(os.path.join(out, "weights", "rows.csv"), "rb") as handle:
            contents.append(handle.read())
    assert contents[0] == contents[1]


def test_freeze_then_check(workdir):
    out = str(workdir / "out")
    assert main(["weights", "--config", SMOKE_CONFIG, "--out", out, "--freeze"]) == EXIT_OK
    golden = workdir / "pipeline" / "tests" / "golden"
    assert len(list(golden.glob("*.json"))) == 1
    assert main(["weights", "--config", SMOKE_CONFIG, "--out", out]) == EXIT_OK


def test_checking_without_golden_caps_exits_1(workdir):
    out = str(workdir / "out")
    assert main(["weights", "--config", SMOKE_CONFIG, "--out", out]) == EXIT_ASSERTION
    with open(os.path.join(out, "weights", "report.json"), encoding="utf-8") as handle:
        report = json.load(handle)
    assert "--freeze" in report["failures"]["golden"]


def test_golden_failures():
    rows = [make_row("1.6", 3.0, 1.0), make_row("1.6", 1.0, 1.0), make_row("3.6", 9.0, 1.0)]
    failures = golden_failures(rows, {"1.6": 2.0})
    assert list(failures) == ["1.6#0", "3.6"]
    assert list(golden_failures(rows, {"1.6": 4.0, "3.6": 10.0})) == []
    assert EXIT_ASSERTION == 1


def test_dominate_saves_families(workdir):
    out = str(workdir / "out")
    assert main(["dominate", "--config", SMOKE_CONFIG, "--out", out, "--seed", "3", "--freeze"]) == EXIT_OK
    folder = os.path.join(out, "dominate", "families")
    names = sorted(os.listdir(folder))
    assert names
    family = load_sparse_family(os.path.join(folder, names[0]))
    assert family.eta > 0


def test_report_fails_on_refinement_drift(workdir):
    out = workdir / "out"
    save_rows([make_row("1.11", 1.0, 1.0, L=7)], str(out / "weights"))
    save_rows([make_row("1.11", 100.0, 1.0, L=8)], str(out / "weights-fine"))
    assert main(["report", "--out", str(out)]) == EXIT_ASSERTION
    with open(out / "report" / "report.json", encoding="utf-8") as handle:
        stability = json.load(handle)["stability"]
    assert stability["1.11"]["max_change"] == pytest.approx(99.0)


def test_report_accepts_small_drift(workdir):
    out = workdir / "out"
    save_rows([make_row("1.11", 1.0, 1.0, L=7)], str(out / "weights"))
    save_rows([make_row("1.11", 1.2, 1.0, L=8)], str(out / "weights-fine"))
    assert main(["report", "--out", str(out)]) == EXIT_OK
