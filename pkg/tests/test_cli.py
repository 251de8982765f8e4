import json
import subprocess
import sys

import pytest

from evoqc.cli import main


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def learn_output(tmp_path_factory):
    out = tmp_path_factory.mktemp("learn") / "run.json"
    code = main(["learn", "--n", "1", "--seed", "3", "--out", str(out)])
    assert code == 0
    return out


class TestLearnCommand:
    def test_run_document_structure(self, learn_output):
        doc = read_json(learn_output)
        assert doc["spec_version"] == "1"
        assert doc["n"] == 1
        assert doc["seed"] == 3
        assert doc["config"]["n_pop"] == 10
        assert len(doc["trace"]) == doc["completion_iteration"] + 1
        assert doc["final_pair"]["d"] == 2
        assert len(doc["final_pair"]["p1"]) == 3

    def test_completed_run_reaches_halt(self, learn_output):
        doc = read_json(learn_output)
        assert doc["completed"] is True
        assert doc["trace"][-1] >= doc["config"]["halt_fitness"]
        assert doc["stages_used"] == 1


class TestVerifyCommand:
    def test_verify_learned_params(self, learn_output, tmp_path):
        out = tmp_path / "report.json"
        code = main(
            ["verify", "--params", str(learn_output), "--n", "1", "--out", str(out)]
        )
        assert code == 0
        doc = read_json(out)
        assert doc["spec_version"] == "1"
        assert doc["holdout_size"] == 2
        assert doc["xi"] >= 0.99

    def test_wrong_size_rejected(self, learn_output, tmp_path):
        with pytest.raises(SystemExit):
            main(["verify", "--params", str(learn_output), "--n", "2"])


def run_sweep(out_dir, jobs, max_iter=300, trials=3):
    return main(
        [
            "sweep",
            "--n-min", "1",
            "--n-max", "1",
            "--trials", str(trials),
            "--base-seed", "77",
            "--out-dir", str(out_dir),
            "--max-iter", str(max_iter),
            "--jobs", str(jobs),
        ]
    )


class TestSweepCommand:
    def test_outputs_exist_and_parse(self, tmp_path):
        out_dir = tmp_path / "sweep"
        assert run_sweep(out_dir, jobs=1) == 0
        doc = read_json(out_dir / "ensemble_n1.json")
        assert doc["trial_count"] == 3
        assert doc["base_seed"] == 77
        assert "seed" not in doc["config"]
        trace = (out_dir / "trace_n1.csv").read_text().splitlines()
        assert trace[0] == "iteration,mean_best_fitness"
        cdf = (out_dir / "cdf_n1.csv").read_text().splitlines()
        assert cdf[0] == "iteration,learning_probability"

    def test_byte_identical_across_jobs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_sweep(a, jobs=1)
        run_sweep(b, jobs=2)
        for name in ("ensemble_n1.json", "trace_n1.csv", "cdf_n1.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestFitScalingCommand:
    def test_fit_over_synthetic_sweep(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        # hand-built ensemble documents lying on r_c = 2*sqrt(D) + 1
        for n, D in ((1, 6), (2, 30), (3, 126)):
            r_c = 2.0 * D**0.5 + 1.0
            doc = {
                "n": n,
                "trial_count": 2,
                "completion_iterations": [r_c, r_c],
            }
            (in_dir / f"ensemble_n{n}.json").write_text(json.dumps(doc))
        out = tmp_path / "scaling.json"
        assert main(["fit-scaling", "--in-dir", str(in_dir), "--out", str(out)]) == 0
        doc = read_json(out)
        assert doc["A"] == pytest.approx(2.0, abs=1e-9)
        assert doc["B"] == pytest.approx(1.0, abs=1e-9)
        csv_lines = (tmp_path / "scaling.csv").read_text().splitlines()
        assert csv_lines[0] == "n,D,sqrtD,r_c,delta_r"
        assert len(csv_lines) == 4

    def test_requires_two_ensembles(self, tmp_path):
        in_dir = tmp_path / "only-one"
        in_dir.mkdir()
        (in_dir / "ensemble_n1.json").write_text(
            json.dumps({"n": 1, "trial_count": 2, "completion_iterations": [3, 5]})
        )
        with pytest.raises(SystemExit):
            main(["fit-scaling", "--in-dir", str(in_dir), "--out", "-"])


class TestEntryPoint:
    def test_console_script_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "evoqc.cli", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        for command in ("learn", "sweep", "fit-scaling", "verify"):
            assert command in proc.stdout
