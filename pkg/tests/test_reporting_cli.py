import csv
import io
import json
import math
import re

import numpy as np
import pytest

from aniso_trace.cli import angle_arg, main
from aniso_trace.construction import ConstructionConfig, build
from aniso_trace.experiments import level_datum
from aniso_trace.norms import parse_norm, lp
from aniso_trace.reporting import (
    SOLVE_CSV_COLUMNS,
    construction_to_dict,
    dump_construction,
    dumps,
    fmt_float,
    load_construction,
    report_summary_csv,
    rows_to_csv,
)
from aniso_trace.experiments import square_example
from aniso_trace.svg import VIEWBOX, render_svg


def test_fmt_float_round_trips():
    for x in (0.1, 1 / 3, math.pi, 1e-300, -2.5e17, 5e-324):
        assert float(fmt_float(x)) == x
        mant = fmt_float(x).split("e")[0].replace("-", "").replace(".", "").lstrip("0")
        assert len(mant) <= 17
    assert fmt_float(0.1) == "0.10000000000000001"
    assert fmt_float(math.inf) == "inf" and fmt_float(math.nan) == "nan"


def test_dumps_non_finite():
    d = json.loads(dumps({"a": math.inf, "b": None, "c": [1, 2.5]}))
    assert d == {"a": "inf", "b": None, "c": [1, 2.5]}


@pytest.mark.parametrize(
    "cfg",
    [
        ConstructionConfig(lp(2), 0.1, 0.0, 5),
        ConstructionConfig(parse_norm("lp:2+0.1*lp:1"), 0.07, 1.3, 4, "equality_fraction", rho=0.8),
        ConstructionConfig(lp(3), 0.3, 5.0, 3, "fixed_ratio", rho=0.6, tol=1e-11),
        ConstructionConfig(lp(2), 0.1, 0.0, 0),
    ],
)
def test_construction_round_trip(cfg):
    c = build(cfg)
    text = dump_construction(c)
    again = load_construction(text)
    assert dump_construction(again) == text
    assert np.array_equal(again.start, c.start)
    assert again.config == c.config


def test_depth10_dump_size():
    d = construction_to_dict(build(ConstructionConfig(lp(2), 0.1, 0.0, 10)))
    assert len(d["nodes"]) == 2**11 - 1
    assert d["nodes"][-1]["child_alpha"] is None
    assert d["nodes"][5]["path"] == "10"


def test_load_rejects_bad_paths():
    d = construction_to_dict(build(ConstructionConfig(lp(2), 0.1, 0.0, 2)))
    d["nodes"][1]["path"] = "1"
    with pytest.raises(ValueError):
        load_construction(json.dumps(d))


def test_csv_columns():
    text = rows_to_csv([{"level": 0, "m": 1, "optimal_value": 0.1, "uniqueness_gap": math.inf, "n_ties": 1, "area_in": 2.0}], SOLVE_CSV_COLUMNS)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == SOLVE_CSV_COLUMNS
    assert rows[1][2] == fmt_float(0.1) and rows[1][3] == "inf"
    summary = report_summary_csv(square_example())
    assert summary.splitlines()[0] == "experiment,kind,key,value"


def test_svg_contract(eq_l2):
    d = level_datum(eq_l2, 2)
    svg = render_svg(d, eq_l2.eprime_pairs(2))
    assert f'viewBox="{VIEWBOX}"' in svg and VIEWBOX == "-1.1 -1.1 2.2 2.2"
    assert "<circle" in svg
    assert svg.count("<line") == 4
    assert svg.count('stroke="#d62728"') == 4
    assert 'fill="#9ecae1"' in svg


def test_angle_arg():
    assert angle_arg("30deg") == pytest.approx(math.pi / 6)
    assert angle_arg("0.5") == 0.5
    assert angle_arg("-60deg") == pytest.approx(-math.pi / 3)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_square(capsys):
    code, out, _ = run(capsys, "square-example", "--a", "0.5", "--b", "0.4", "--p", "2", "--p", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["winner"] for r in rows] == ["E2", "E1"]
    assert float(rows[0]["value_e1"]) == pytest.approx(1.280625, abs=1e-6)


def test_cli_construct(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "--norm", "lp:2", "--alpha0", "0.1", "--depth", "10", "--mode", "equality")
    assert code == 0 and len(json.loads(out)["nodes"]) == 2**11 - 1
    code, out, _ = run(capsys, "construct", "--depth", "0", "--out", str(tmp_path), "--svg")
    assert code == 0 and len(json.loads(out)["nodes"]) == 1
    assert (tmp_path / "construction.json").read_text() == out
    assert (tmp_path / "construction.svg").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--alpha0", "2"],
        ["construct", "--mode", "equality_fraction"],
        ["construct", "--depth", "25"],
        ["perturbation", "--phi1", "lp:2", "--theta-center", "0", "--depth", "3"],
        ["render", "--depth", "2", "--level", "3"],
        ["solve", "--arcs", "0:1,0.5:1"],
    ],
)
def test_cli_precondition_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["construct", "--norm", "lp:x"], ["construct", "--depth", "two"], ["square-example", "--p"], ["solve", "--arcs", "0"]],
)
def test_cli_usage_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_cli_solve_and_indicator(capsys):
    code, out, _ = run(capsys, "solve", "--depth", "3", "--levels", "3")
    assert code == 0
    assert out.splitlines()[0] == ",".join(SOLVE_CSV_COLUMNS)
    assert len(out.splitlines()) == 5
    code, _, _ = run(capsys, "solve", "--mode", "equality_fraction", "--rho", "0.8", "--depth", "5", "--indicator", "nonexistence")
    assert code == 0
    # equality data has ties, so the strict indicator is inconclusive
    code, _, err = run(capsys, "solve", "--depth", "3", "--indicator", "nonexistence")
    assert code == 1 and "inconclusive" in err
    code, out, _ = run(capsys, "solve", "--arcs", "0:0.5,1:0.3,3:1", "--json")
    assert code == 0 and json.loads(out)["m"] == 3


def test_cli_check_h(capsys):
    assert run(capsys, "check-h", "--depth", "4", "--expect", "zero")[0] == 0
    assert run(capsys, "check-h", "--depth", "4", "--other", "lp:3", "--expect", "zero")[0] == 1


def test_cli_experiments(capsys, tmp_path):
    code, out, _ = run(
        capsys, "cross-norm", "--phi1", "lp:3", "--phi2", "lp:2", "--theta-center=-60deg", "--alpha0", "0.05",
        "--depth", "6", "--out", str(tmp_path), "--figures", "--svg",
    )
    assert code == 0 and "sign_certified,true" in out
    assert (tmp_path / "cross-norm.json").exists() and (tmp_path / "cross-norm-h.png").exists()
    code, _, _ = run(capsys, "cross-norm", "--phi1", "lp:3", "--phi2", "lp:3", "--theta-center=-60deg", "--alpha0", "0.05", "--depth", "4")
    assert code == 1
    code, out, _ = run(capsys, "perturbation", "--phi1", "lp:2", "--k", "10", "--theta-center", "45deg", "--alpha0", "0.05", "--depth", "6", "--json")
    assert code == 0 and json.loads(out)["verdicts"]["sign_certified"] is True
    code, _, _ = run(capsys, "l1-quadrant", "--theta-center", "45deg", "--alpha0", "0.05", "--depth", "6")
    assert code == 0


def test_cli_render(capsys, tmp_path):
    code, out, _ = run(capsys, "render", "--depth", "3", "--matching", "eprime")
    assert code == 0 and 'viewBox="-1.1 -1.1 2.2 2.2"' in out
    target = tmp_path / "pic.svg"
    assert run(capsys, "render", "--depth", "2", "--matching", "optimal", "--out", str(target))[0] == 0
    assert re.search(r"<line ", target.read_text())


def test_cli_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "1", "--only", "3")
    assert code == 0 and "2/2" in out
    assert run(capsys, "verify", "--only", "99")[0] == 1
