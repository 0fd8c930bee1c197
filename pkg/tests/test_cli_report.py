import csv
import dataclasses
import io
import json
import math

import pytest

from ptlhen.case_data import PerfModel, PerformanceModels, minimal_case, reference_case_path, save_case
from ptlhen.cli import main, make_parser
from ptlhen.empirical import Fixture, evaluate_fixture, fixture_from_design, load_fixture
from ptlhen.milp import INFEASIBLE, SolveOptions
from ptlhen.pareto import ParetoPoint
from ptlhen.pwl_fit import Pwl1D
from ptlhen.report import PARETO_COLUMNS, export_stream_plot, pareto_csv, solver_time_report
from ptlhen.superstructure import HenDesign, MatchRecord, UtilityRecord


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def _toy_case():
    c = minimal_case([("H1", 150, 50, 1.0), ("H2", 120, 60, 2.0)],
                     [("C1", 20, 120, 1.0), ("C2", 40, 100, 1.5)], n_stages=2, name="toy")
    line = lambda a, b: PerfModel(Pwl1D.from_points([0, 1], [a, b]))  # noqa: E731
    return dataclasses.replace(c, performance=PerformanceModels(line(2.0, 4.0), line(1.0, 2.0), line(1.2, 1.8), ()))


@pytest.fixture(scope="module")
def toy_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("case") / "toy.json"
    save_case(_toy_case(), p)
    return p


@pytest.fixture(scope="module")
def fixed_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixed")
    code = main(["--mode", "fixed:1.305", "--mip-gap", "0.01", "--time-limit", "120", "--out", str(out)])
    return code, out


def _point(seconds, design=True, status="optimal"):
    d = HenDesign(1.3, (), (), {}, {}) if design else None
    return ParetoPoint(0.6, 1.9, 1.3, d, 0.0, seconds, 0, status)


class TestArguments:
    def test_defaults(self):
        a = make_parser().parse_args([])
        assert (a.mode, a.points, a.mip_gap, a.backend) == ("coupled", 10, 0.01, "highs")

    def test_missing_case(self, tmp_path, capsys):
        missing = tmp_path / "nope.json"
        assert main(["--case", str(missing), "--out", str(tmp_path)]) == 2
        assert str(missing) in capsys.readouterr().err

    def test_invalid_case(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"name": "x"}))
        assert main(["--case", str(bad), "--out", str(tmp_path)]) == 2
        assert "invalid case" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [["--points", "1"], ["--mode", "sideways"],
                                      ["--mode", "empirical:/no/such/fixture.json"]])
    def test_usage_errors(self, argv, tmp_path, toy_path):
        assert main(["--case", str(toy_path), "--out", str(tmp_path)] + argv) == 2

    def test_reference_case_is_packaged(self):
        assert reference_case_path().is_file()


class TestRuns:
    def test_fixed_upper_voltage(self, fixed_run):
        code, out = fixed_run
        assert code == 0
        assert sorted(p.name for p in out.glob("design_*.dot")) == ["design_0.dot"]
        (row,) = _rows((out / "pareto.csv").read_text())
        assert float(row["sum_q_hu_kW"]) == pytest.approx(0.0, abs=1e-6)
        assert float(row["u_V"]) == pytest.approx(1.305)
        assert "minimum production cost" in (out / "summary.txt").read_text()

    def test_coupled_five_points(self, tmp_path, toy_path):
        assert main(["--case", str(toy_path), "--points", "5", "--mip-gap", "0.001", "--out", str(tmp_path)]) == 0
        rows = _rows((tmp_path / "pareto.csv").read_text())
        assert len(rows) == 5
        assert list(rows[0]) == PARETO_COLUMNS
        assert len(list(tmp_path.glob("design_*.dot"))) == 5
        costs = [float(r["c_prod_eur_per_kg"]) for r in rows]
        assert costs[0] == min(costs)
        times = _rows((tmp_path / "times.csv").read_text())
        assert times[-1]["window"] == "mean" and times[-1]["status"] == "5 solved"

    def test_empirical_round_trip(self, tmp_path, ref_case):
        fx_path = reference_case_path().with_name("example_fixture.json")
        assert main(["--mode", f"empirical:{fx_path}", "--out", str(tmp_path)]) == 0
        (row,) = _rows((tmp_path / "pareto.csv").read_text())
        fx = load_fixture(fx_path)
        assert int(row["n_hex"]) == len(fx.matches) + len(fx.utilities)
        p = evaluate_fixture(ref_case, fx, SolveOptions(mip_gap_target=0.01))
        again = fixture_from_design(p.design)
        assert set(again.matches) == set(fx.matches) and set(again.utilities) == set(fx.utilities)
        assert Fixture.from_dict(fx.to_dict()) == fx


class TestStreamPlot:
    def test_empty_design_has_lanes_only(self):
        c = minimal_case([("H1", 150, 50, 1.0)], [("C1", 20, 120, 1.0)])
        dot = export_stream_plot(HenDesign(0.5, (), (), {}, {"H1": (150.0, 50.0), "C1": (120.0, 20.0)}), c)
        assert dot.startswith("digraph") and dot.rstrip().endswith("}")
        assert "cluster_H1" in dot and "cluster_C1" in dot
        assert "shape=circle" not in dot and "doublecircle" not in dot

    def test_one_node_per_match(self):
        c = minimal_case([("H1", 150, 50, 1.0), ("H2", 120, 60, 2.0)], [("C1", 20, 120, 1.0)], n_stages=2)
        recs = (MatchRecord("H1", "C1", 0, 40.0, 2.0, 20.0), MatchRecord("H2", "C1", 1, 30.0, 1.5, 15.0))
        utils = (UtilityRecord("H1", "cu", 60.0, 3.0, 25.0),)
        dot = export_stream_plot(HenDesign(0.5, recs, utils, {}, {}), c)
        assert dot.count("shape=circle") == 2
        assert dot.count("shape=doublecircle") == 1
        assert '"m_H1_C1_0" -> "m_H2_C1_1"' not in dot
        assert '"C1_in" -> "m_H2_C1_1"' in dot


class TestTimeReport:
    def test_single_point_mean(self):
        rows = _rows(solver_time_report([_point(10.0)]))
        assert rows[-1]["window"] == "mean" and float(rows[-1]["solve_s"]) == 10.0

    def test_all_skipped(self):
        rows = _rows(solver_time_report([_point(3.0, False, INFEASIBLE), _point(600.0, False, "timeout")]))
        assert rows[-1]["status"] == "0 solved"
        assert [r["note"] for r in rows[:-1]] == [f"skipped: {INFEASIBLE}", "skipped: timeout"]

    def test_rejected_points_not_in_pareto_csv(self):
        text = pareto_csv([_point(1.0), _point(2.0, False, INFEASIBLE)])
        assert len(_rows(text)) == 1

    def test_nan_written_as_blank(self):
        (row,) = _rows(pareto_csv([_point(1.0)]))
        assert row["eta_exact_pct"] == "" and not math.isnan(float(row["eta_pct"]))
