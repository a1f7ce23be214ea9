import csv
import io
import json
import os

import pytest

from bdiv.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def box(lo, hi):
    (a, b), (c, e) = lo, hi
    return {"vertices": [[a, b], [c, b], [a, e], [c, e]]}


SQUARE_MEASURE = {"atoms": [{"direction": d, "weight": 1} for d in ([1, 0], [-1, 0], [0, 1], [0, -1])]}
OCTAGON_DIRS = [[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]]


@pytest.fixture
def files(tmp_path):
    f = {
        "a": write(tmp_path / "a.json", box((0, 0), (1, 2))),
        "b": write(tmp_path / "b.json", box((0, 0), (3, 1))),
        "sq": write(tmp_path / "sq.json", box((0, 0), (1, 1))),
        "unit": write(tmp_path / "unit.json", box((-1, -1), (1, 1))),
        "disk": write(tmp_path / "disk.json", {"oracle": "disk"}),
        "m_sq": write(tmp_path / "m_sq.json", SQUARE_MEASURE),
        "m_line": write(tmp_path / "m_line.json", {"atoms": SQUARE_MEASURE["atoms"][:2]}),
        "axes": write(tmp_path / "axes.json", {"dim": 2, "rays": [[1, 0], [-1, 0], [0, 1], [0, -1]]}),
        "pts": write(tmp_path / "pts.json", {"points": [[0, 0], [1, 0], [0, 1], ["1/4", "1/4"]]}),
        "weil": write(tmp_path / "weil.json", {"model": {"rays": [[1, 0], [0, 1], [-1, -1]]}, "values": [1, 1, 1]}),
        "cart": write(tmp_path / "cart.json", {"plus": box((0, 0), (3, 3)), "minus": box((10, 10), (11, 11))}),
        "tall": write(tmp_path / "tall.json", box((0, 0), (1, 10))),
    }
    # a rational octagon measure: surface measure of the circumscribed octagon around the unit disk
    from bdiv.convex_core.measure import surface_area_measure
    from bdiv.schedules import octagon
    from bdiv.serialize import dumps

    (tmp_path / "m_oct.json").write_text(dumps(surface_area_measure(octagon())))
    f["m_oct"] = str(tmp_path / "m_oct.json")
    return f


def test_mixed_volume_of_boxes(capsys, files):
    code, rep = run(capsys, "mixed-volume", "--bodies", files["a"], files["b"])
    assert code == 0 and rep["pass"]
    assert rep["results"][0]["mixed_volume"] == "7/2"
    assert rep["results"][0]["intersection_number"] == 7


def test_solve_square(capsys, files):
    code, rep = run(capsys, "solve", "--measure", files["m_sq"], "--tol", "1e-8")
    assert code == 0
    r = rep["results"][0]["report"]
    assert r["residual"] <= 1e-8
    assert len(r["body"]["vertices"]) == 4


def test_solve_line_only_is_not_big(capsys, files):
    code, rep = run(capsys, "solve", "--measure", files["m_line"])
    assert code == 2 and not rep["pass"]
    assert rep["violations"][0]["error"] == "NotBig"


def test_malformed_input_points_at_field(capsys, tmp_path):
    bad = write(tmp_path / "bad.json", {"atoms": [{"direction": [1, 0], "weight": "x"}]})
    assert main(["solve", "--measure", bad]) == 1
    assert "atoms[0].weight" in capsys.readouterr().err


def test_missing_file_and_bad_json(capsys, tmp_path):
    assert main(["volume", "--body", str(tmp_path / "nope.json")]) == 1
    (tmp_path / "broken.json").write_text("{")
    assert main(["volume", "--body", str(tmp_path / "broken.json")]) == 1
    assert main(["no-such-command"]) == 1


def test_unbalanced_measure_rejected(capsys, tmp_path):
    g = write(tmp_path / "g.json", {"atoms": [{"direction": [1, 0], "weight": 1}, {"direction": [0, 1], "weight": 1}]})
    assert main(["bigcurve", "--measure", g]) == 1


@pytest.mark.parametrize(
    "argv, check",
    [
        (["hull", "--points", "pts"], lambda r: len(r["results"][0]["polytope"]["vertices"]) == 3),
        (["sum", "--bodies", "sq", "sq"], lambda r: r["results"][0]["polytope"]["vertices"][2] == [2, 2]),
        (["volume", "--body", "a", "b"], lambda r: [x["volume"] for x in r["results"]] == [2, 3]),
        (["surface-measure", "--body", "sq"], lambda r: len(r["results"][0]["measure"]["atoms"]) == 4),
        (["inradius", "--outer", "unit", "--inner", "sq"], lambda r: r["results"][0]["s"] == 2),
        (["circumscribe", "--body", "disk", "--model", "axes"], lambda r: r["results"][0]["polytope"]["vertices"][0] == [-1, -1]),
        (["envelope", "--weil", "weil"], lambda r: r["results"][0]["volume"] == "9/2"),
        (["psef", "--divisor", "cart"], lambda r: r["results"][0]["certificate"]["feasible"]),
        (["norm-omega", "--divisor", "unit"], lambda r: r["results"][0]["norm"]["value"] == 1),
        (["pair", "--divisor", "sq", "--measure", "m_sq"], lambda r: r["results"][0]["pairing"] == 2),
        (["intersect", "--bodies", "a", "b"], lambda r: r["results"][0]["intersection_number"] == 7),
        (["approx", "--body", "disk", "--schedule", "2k-gon", "--levels", "3"], lambda r: len(r["results"]) == 3),
        (["sandwich", "--body", "disk", "--eps", "1/10"], lambda r: r["results"][0]["result"]["rays"] >= 8),
        (["diskant", "--alpha", "unit", "--beta", "sq"], lambda r: r["results"][0]["report"]["s"] == 2),
        (["kt", "--alpha", "sq", "--beta", "a"], lambda r: r["results"][0]["sequence"]["logconcave"]),
        (["siu", "--alpha", "tall", "--beta", "sq"], lambda r: r["results"][0]["report"]["ratio"] == 10),
        (["cln", "--alphas", "unit", "--measure", "m_sq"], lambda r: r["results"][0]["report"]["nonnegative"]),
        (["volhat", "--measure", "m_sq"], lambda r: abs(r["results"][0]["functional"]["value"] - 2) < 1e-8),
        (["lx", "--measure", "m_oct", "--model", "axes"], lambda r: abs(r["results"][0]["decomposition"]["value"] - 8) < 1e-8),
        (["mfun", "--measure", "m_oct", "--model", "axes"], lambda r: abs(r["results"][0]["functional"]["value"] - 8) < 1e-8),
        (["lx-run", "--measure", "m_oct", "--schedule", "2k-gon", "--levels", "3"], lambda r: len(r["results"]) == 3),
        (["mv-run", "--measure", "m_oct", "--schedule", "2k-gon", "--levels", "3"], lambda r: len(r["results"]) == 3),
        (["bigcurve", "--measure", "m_sq", "m_line"], lambda r: [x["big"] for x in r["results"]] == [True, False]),
    ],
)
def test_subcommands(capsys, files, argv, check):
    argv = [files.get(a, a) for a in argv]
    code, rep = run(capsys, *argv)
    assert code == 0, rep
    assert rep["pass"] and rep["violations"] == []
    assert rep["command"][1] == argv[0]
    assert check(rep), rep["results"]


def test_psef_infeasible_exit(capsys, files, tmp_path):
    d = write(tmp_path / "d.json", {"plus": {"vertices": [[0, 0]]}, "minus": box((0, 0), (1, 1))})
    code, rep = run(capsys, "psef", "--divisor", d)
    assert code == 2 and rep["status"] == "infeasible"


def test_threshold_violation_exit(capsys, files):
    # axis rays alone cannot reach the octagon: a strict threshold is violated
    code, rep = run(capsys, "lx-run", "--measure", files["m_oct"], "--schedule", "2k-gon", "--levels", "1", "--threshold", "1e-3")
    assert code == 4 and rep["violations"] and not rep["pass"]


def test_csv_output(capsys, files):
    code, out = run(capsys, "volume", "--body", files["a"], files["b"], "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2


def test_config_override(capsys, files, tmp_path):
    cfg = write(tmp_path / "cfg.json", {"siu_constant": 20})
    code, rep = run(capsys, "siu", "--alpha", files["tall"], "--beta", files["sq"], "--config", cfg)
    assert code == 0 and rep["config"]["siu_constant"] == 20
    bad = write(tmp_path / "bad_cfg.json", {"W": box((0, 0), (1, 1))})
    assert main(["siu", "--alpha", files["tall"], "--beta", files["sq"], "--config", bad]) == 1


def test_jobs_do_not_change_output(capsys, files):
    _, one = run(capsys, "solve", "--measure", files["m_sq"], files["m_oct"])
    _, two = run(capsys, "solve", "--measure", files["m_sq"], files["m_oct"], "--jobs", "2")
    assert one["results"] == two["results"]


def test_corpus_deterministic(capsys, tmp_path):
    for out in ("x", "y"):
        code, _ = run(capsys, "corpus", "--seed", 1, "--dim", 2, "--count", 3, "--out", tmp_path / out)
        assert code == 0
    names = sorted(os.listdir(tmp_path / "x"))
    assert len(names) == 4
    for n in names:
        assert (tmp_path / "x" / n).read_bytes() == (tmp_path / "y" / n).read_bytes()


def test_suite_subset(capsys):
    code, rep = run(capsys, "suite", "--criteria", "5", "--scale", "0.2")
    assert code == 0 and rep["summary"] == {"passed": 1, "total": 1}
