"""CLI tests: dispatch, exit codes, report formatting, determinism."""

import json

import pytest

from jsda.cli import dispatch, write_report


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "sc.json"
    assert dispatch(["scenario", "make", "--kind", "label-shift",
                     "--params", json.dumps({
                         "source_label_marginal": [0.5, 0.5],
                         "target_label_marginal": [0.8, 0.2]}),
                     "--out", str(path)]) == 0
    return path


class TestDispatch:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            dispatch(["--help"])
        assert exc.value.code == 0

    def test_unknown_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            dispatch(["definitely-not-a-command"])
        assert exc.value.code == 2

    def test_missing_file_is_runtime_error(self, capsys):
        assert dispatch(["label-shift", "--scenario", "/nonexistent.json"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_scenario_actions_require_their_files(self, capsys):
        assert dispatch(["scenario", "sample"]) == 1
        assert dispatch(["scenario", "make", "--kind", "conditional-shift"]) == 1
        capsys.readouterr()

    def test_counterexamples_pass(self, capsys):
        assert dispatch(["counterexamples"]) == 0
        out = capsys.readouterr().out
        assert "disjoint_interleaving: PASS" in out
        assert "same_support_reweighting: PASS" in out

    def test_counterexamples_tolerance_override_fails(self, capsys):
        assert dispatch(["counterexamples", "--tol", "1e-15"]) == 1

    def test_counterexamples_base_prints_divergences(self, capsys):
        assert dispatch(["counterexamples", "--base", "e"]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines()
                 if l.startswith("{")]
        parsed = [json.loads(l) for l in lines]
        assert {p["kind"] for p in parsed} == {"KL", "JS"}
        assert all(p["base"] == "e" for p in parsed)


class TestVerifyBounds:
    def test_clean_suite_exits_zero(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        code = dispatch(["verify-bounds", "--suite", "js-triangle",
                         "--trials", "50", "--seed", "3", "--out", str(out)])
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header == "name,lhs,bound_lo,bound_hi,holds"

    def test_defective_bound_suite_exits_nonzero(self, tmp_path):
        # the printed zero-one band constants genuinely fail at this trial count
        out = tmp_path / "r.csv"
        code = dispatch(["verify-bounds", "--suite", "zero-one-band",
                         "--trials", "400", "--seed", "7", "--out", str(out)])
        assert code == 1
        body = out.read_text()
        assert ",false" in body

    def test_reports_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            dispatch(["verify-bounds", "--suite", "sandwich", "--trials", "30",
                      "--seed", "11", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()


class TestScenarioCommands:
    def test_make_sample_discretize(self, scenario_file, tmp_path, capsys):
        assert dispatch(["scenario", "sample", "--scenario", str(scenario_file),
                         "--domain", "target", "--n", "5"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "x0,x1,y"
        assert len(out.strip().splitlines()) == 6

        joint_path = tmp_path / "joint.json"
        assert dispatch(["scenario", "discretize", "--scenario", str(scenario_file),
                         "--domain", "source", "--grid", "8",
                         "--out", str(joint_path)]) == 0
        from jsda import JointPmf
        joint = JointPmf.from_json(joint_path.read_text())
        assert joint.shape == (64, 2)

    def test_label_shift_command(self, scenario_file, capsys):
        assert dispatch(["label-shift", "--scenario", str(scenario_file),
                         "--n", "4000", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "true_alpha" in out and "sup error" in out


class TestTrainCommands:
    def test_train_and_ablate(self, scenario_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epochs": 2, "n_source": 150,
                                   "n_target": 150, "seed": 4}))
        trace = tmp_path / "trace.csv"
        assert dispatch(["train", "--scenario", str(scenario_file),
                         "--config", str(cfg), "--out", str(trace)]) == 0
        lines = trace.read_text().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("epoch,weighted_source_loss,conditional_loss")

        table = tmp_path / "abl.csv"
        assert dispatch(["ablate", "--scenario", str(scenario_file),
                         "--config", str(cfg), "--seeds", "2",
                         "--out", str(table)]) == 0
        rows = table.read_text().splitlines()
        assert rows[0] == "principles,mean_accuracy,std_accuracy,n_seeds"
        names = [r.split(",")[0] for r in rows[1:]]
        assert names == ["III", "I+III", "I+II", "II+III", "I+II+III"]

    def test_unknown_config_field_is_runtime_error(self, scenario_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epochs": 2, "optimizer": "adam"}))
        assert dispatch(["train", "--scenario", str(scenario_file),
                         "--config", str(cfg)]) == 1


class TestWriteReport:
    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_report([], "csv", str(path), columns=["a", "b"])
        assert path.read_text() == "a,b\n"

    def test_six_significant_digits(self, tmp_path):
        path = tmp_path / "r.csv"
        write_report([{"x": 0.123456789, "y": 1e-12}], "csv", str(path))
        assert path.read_text().splitlines()[1] == "0.123457,1e-12"

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "r.json"
        rows = [{"name": "t", "value": 0.25, "holds": True}]
        write_report(rows, "json", str(path))
        back = json.loads(path.read_text())
        assert back == [{"name": "t", "value": 0.25, "holds": True}]

    def test_infinities_are_stable_tokens(self, tmp_path):
        path = tmp_path / "r.csv"
        write_report([{"lo": float("-inf"), "hi": float("inf")}], "csv", str(path))
        assert path.read_text().splitlines()[1] == "-inf,inf"
