import csv
import json

import pytest

from statsp.cli import main
from statsp.core import parse_tour, tour_length, validate_tour
from statsp.tsplib import build_distance_matrix, load_bundled

FAST = ["--iters", "20", "--sa-iters", "400"]


def _rows(path):
    with path.open() as fh:
        return list(csv.reader(fh))


def test_solve_writes_artifacts(tmp_path, capsys):
    assert main(["solve", "--instance", "berlin52", "--solver", "sta", "--seed", "1", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "berlin52_sta.json").read_text())
    tour = parse_tour(doc["best_tour"])
    assert validate_tour(tour, 52) is None
    assert doc["eval_count"] == 3 * 20 * 200 + 1
    assert doc["config"]["params"] == {"ma": 2, "mb": 1, "mc": 0}
    assert doc["instance"]["metric"] == "RAW_EUC"
    rows = _rows(tmp_path / "berlin52_sta_trace.csv")
    assert rows[0] == ["iteration", "sta_best"] and len(rows) == 201
    assert "length=" in capsys.readouterr().out


def test_solve_is_byte_identical(tmp_path):
    args = ["solve", "--instance", "ulysses16", "--seed", "9", *FAST]
    main([*args, "--out", str(tmp_path / "a")])
    main([*args, "--out", str(tmp_path / "b")])
    for name in ("ulysses16_sta.json", "ulysses16_sta_trace.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_metric_flag_changes_the_length(tmp_path):
    lengths = {}
    for metric in ("raw", "euc2d"):
        out = tmp_path / metric
        main(["solve", "--instance", "berlin52", "--seed", "2", "--metric", metric, "--out", str(out), *FAST])
        doc = json.loads((out / "berlin52_sta.json").read_text())
        inst = load_bundled("berlin52", doc["instance"]["metric"])
        assert doc["best_length"] == tour_length(parse_tour(doc["best_tour"]), build_distance_matrix(inst))
        lengths[metric] = doc["best_length"]
    assert lengths["euc2d"] == int(lengths["euc2d"])
    assert lengths["raw"] != lengths["euc2d"]


def test_solve_baselines_and_file_path(tmp_path):
    src = tmp_path / "tri.tsp"
    src.write_text("NAME: tri\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 0 3\n3 4 0\n4 4 3\nEOF\n")
    for solver in ("sa", "aco"):
        assert main(["solve", "--instance", str(src), "--solver", solver, "--seed", "0", "--out", str(tmp_path), *FAST]) == 0
    assert _rows(tmp_path / "tri_sa_trace.csv")[0] == ["iteration", "sa_best", "sa_current"]
    assert json.loads((tmp_path / "tri_aco.json").read_text())["best_length"] == pytest.approx(14.0)


def test_seed_is_recorded_when_omitted(tmp_path):
    main(["solve", "--instance", "ulysses16", "--out", str(tmp_path), *FAST])
    doc = json.loads((tmp_path / "ulysses16_sta.json").read_text())
    assert isinstance(doc["seed"], int) and doc["config"]["seed"] == doc["seed"]


def test_bench_outputs(tmp_path, capsys):
    code = main(["bench", "--instance", "ulysses16", "--solvers", "sta,sa,aco", "--trials", "1", "--seed", "0",
                 "--out", str(tmp_path), *FAST])
    assert code == 0
    for solver in ("sta", "sa", "aco"):
        doc = json.loads((tmp_path / f"ulysses16_{solver}_report.json").read_text())
        assert doc["stats"]["stdev"] == 0.0
        assert doc["stats"]["best"] == doc["stats"]["mean"] == doc["stats"]["worst"]
        assert _rows(tmp_path / f"ulysses16_{solver}_trace.csv")[0] == ["iteration", f"{solver}_avg_fitness"]
    table = (tmp_path / "ulysses16_table.txt").read_text().splitlines()
    assert [line.split()[-4] for line in table[2:]] == ["best", "mean", "worst", "st.dev.", "time(s)"]
    assert "STA" in capsys.readouterr().out


def test_compare_condenses_sa(tmp_path):
    code = main(["compare", "--instance", "ulysses16", "--trials", "2", "--seed", "4", "--out", str(tmp_path)])
    assert code == 0
    rows = _rows(tmp_path / "ulysses16_compare.csv")
    assert rows[0] == ["iteration", "sta", "sa", "aco"]
    assert len(rows) == 201
    assert rows[-1][0] == "200"
    meta = json.loads((tmp_path / "ulysses16_compare.json").read_text())
    assert meta["source_lengths"] == {"sta": 200, "sa": 4000, "aco": 200}
    assert meta["configs"]["sa"]["iters"] == 4000


@pytest.mark.parametrize(
    "argv, message",
    [
        (["compare", "--instance", "ulysses16", "--solvers", "sta,sta"], "more than once"),
        (["compare", "--instance", "ulysses16", "--solvers", "sta"], "at least 2"),
        (["bench", "--instance", "ulysses16", "--solvers", "sta,ga"], "unknown solver"),
        (["solve", "--instance", "nowhere.tsp"], "not found"),
        (["solve", "--instance", "berlin52", "--metric", "geo"], "does not match"),
        (["bench", "--instance", "ulysses16", "--trials", "0"], "--trials"),
        (["solve", "--instance", "ulysses16", "--se", "0"], "se must be"),
    ],
)
def test_errors_exit_nonzero(argv, message, tmp_path, capsys):
    assert main([*argv, "--out", str(tmp_path)]) == 2
    assert message in capsys.readouterr().err


def test_parse_error_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.tsp"
    bad.write_text("NAME: bad\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nNODE_COORD_SECTION\n1 0 0\nEOF\n")
    assert main(["solve", "--instance", str(bad), "--out", str(tmp_path)]) == 2
    assert "line 3" in capsys.readouterr().err
