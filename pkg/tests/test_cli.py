import csv
import json

import numpy as np
import pytest

from jetsketch.cli import main

SEED = "12" * 32


@pytest.fixture
def workspace(tmp_path):
    rng = np.random.default_rng(40)
    features = rng.standard_normal((8, 3))
    targets = 0.5 * rng.standard_normal(8)
    data = tmp_path / "data.csv"
    with open(data, "w") as fh:
        for x, y in zip(features, targets):
            fh.write(",".join(str(v) for v in x) + f",{y}\n")
    trainer = tmp_path / "trainer.json"
    trainer.write_text(
        json.dumps(
            {
                "model": "linear_regression",
                "learning_rate": 0.05,
                "epochs": 2,
                "init_seed": 9,
            }
        )
    )
    measure = tmp_path / "measure.json"
    measure.write_text(
        json.dumps(
            {
                "kind": "loss_on_example",
                "features": [0.2, -0.4, 0.9],
                "target": 0.1,
            }
        )
    )
    circuit = tmp_path / "circuit.json"
    circuit.write_text(
        json.dumps(
            {
                "version": 1,
                "n": 2,
                "p": 1,
                "nodes": [
                    {"id": 0, "op": "input", "index": 1},
                    {"id": 1, "op": "input", "index": 2},
                    {"id": 2, "op": "mul", "args": [0, 1]},
                    {"id": 3, "op": "const", "value": [3.0, 0.0]},
                    {"id": 4, "op": "add", "args": [2, 3]},
                ],
                "outputs": [4],
            }
        )
    )
    base = tmp_path / "base.json"
    base.write_text("[0.0, 0.0]")
    point = tmp_path / "point.json"
    point.write_text("[[0.5, 0.0], [2.0, 0.0]]")
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    payload = json.loads(out.out) if out.out.strip() else None
    return code, payload, out.err


class TestParams:
    def test_worked_example(self, capsys):
        code, payload, _ = run(
            capsys, "params", "--epsilon", "0.125", "--delta", "0.01"
        )
        assert code == 0
        assert payload["s"] == 2 and payload["m"] == 48 and payload["k"] == 49152

    def test_bad_epsilon_exit_2(self, capsys):
        code, _, err = run(capsys, "params", "--epsilon", "2.0", "--delta", "0.1")
        assert code == 2
        assert "epsilon" in err


class TestPipeline:
    def test_precompute_predict_retrain_sweep(self, workspace, capsys):
        sketch_path = workspace / "sketch.tskd"
        code, payload, _ = run(
            capsys,
            "precompute",
            "--trainer", str(workspace / "trainer.json"),
            "--data", str(workspace / "data.csv"),
            "--s", "3", "--k", "4000", "--seed", SEED,
            "--out", str(sketch_path),
        )
        assert code == 0
        assert payload["n"] == 8 and payload["p"] == 3
        assert sketch_path.exists()

        code, pred, _ = run(
            capsys,
            "predict",
            "--sketch", str(sketch_path),
            "--measure", str(workspace / "measure.json"),
            "--delete", "3,7",
            "--m", "8",
        )
        assert code == 0

        code, truth, _ = run(
            capsys,
            "retrain",
            "--trainer", str(workspace / "trainer.json"),
            "--data", str(workspace / "data.csv"),
            "--measure", str(workspace / "measure.json"),
            "--delete", "3,7",
        )
        assert code == 0
        assert abs(pred["prediction"] - truth["measurement"]) <= 0.05 * max(
            1.0, abs(truth["measurement"])
        )

        curve = workspace / "curve.csv"
        code, payload, _ = run(
            capsys,
            "sweep",
            "--trainer", str(workspace / "trainer.json"),
            "--data", str(workspace / "data.csv"),
            "--measure", str(workspace / "measure.json"),
            "--delete", "3,7",
            "--grid", "0:1:0.1",
            "--out", str(curve),
            "--sketch", str(sketch_path),
            "--m", "8",
        )
        assert code == 0 and payload["points"] == 11
        with open(curve, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 11
        assert set(rows[0]) == {"z", "empirical", "predicted"}
        assert float(rows[-1]["empirical"]) == truth["measurement"]

    def test_sketch_fn_and_eval(self, workspace, capsys):
        out_path = workspace / "fn.tskd"
        code, _, _ = run(
            capsys,
            "sketch-fn",
            "--circuit", str(workspace / "circuit.json"),
            "--base", str(workspace / "base.json"),
            "--s", "2", "--k", "3000", "--seed", SEED,
            "--out", str(out_path),
        )
        assert code == 0
        code, payload, _ = run(
            capsys,
            "eval",
            "--sketch", str(out_path),
            "--point", str(workspace / "point.json"),
            "--m", "8",
        )
        assert code == 0
        # f(0.5, 2) = 0.5*2 + 3 = 4, degree-2 polynomial so s=2 is exact
        assert abs(payload["estimate_real"][0] - 4.0) <= 0.5

    def test_stability_csv(self, workspace, capsys):
        out_path = workspace / "profile.csv"
        code, payload, _ = run(
            capsys,
            "stability",
            "--trainer", str(workspace / "trainer.json"),
            "--data", str(workspace / "data.csv"),
            "--measure", str(workspace / "measure.json"),
            "--rmax", "4", "--trials", "6", "--seed", SEED,
            "--out", str(out_path),
        )
        assert code == 0
        assert len(payload["rms"]) == 4
        with open(out_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["r", "trial", "estimate", "log_estimate"]
        assert len(rows) == 1 + 4 * 6

    def test_oracle_command(self, workspace, capsys):
        code, payload, _ = run(
            capsys,
            "oracle",
            "--circuit", str(workspace / "circuit.json"),
            "--base", str(workspace / "base.json"),
            "--s", "2",
        )
        assert code == 0
        assert payload["complete"] is True
        # f = x1 x2 + 3: order-2 norm 1/2! * sqrt(2)
        assert payload["frobenius_profile"][2] == pytest.approx(
            np.sqrt(2) / 2
        )


class TestExitCodes:
    def test_corrupt_sketch_is_domain_error(self, workspace, capsys):
        bad = workspace / "bad.tskd"
        bad.write_bytes(b"NOPE" + b"\x00" * 60)
        code, _, err = run(
            capsys,
            "eval",
            "--sketch", str(bad),
            "--point", str(workspace / "point.json"),
            "--m", "2",
        )
        assert code == 3
        assert "magic" in err

    def test_gate_domain_error_exit_3(self, workspace, capsys):
        circuit = workspace / "log.json"
        circuit.write_text(
            json.dumps(
                {
                    "version": 1,
                    "n": 1,
                    "p": 1,
                    "nodes": [
                        {"id": 0, "op": "input", "index": 1},
                        {"id": 1, "op": "unary", "gate": "log", "arg": 0},
                    ],
                    "outputs": [1],
                }
            )
        )
        base = workspace / "zero.json"
        base.write_text("[0.0]")
        code, _, err = run(
            capsys,
            "sketch-fn",
            "--circuit", str(circuit),
            "--base", str(base),
            "--s", "2", "--k", "4", "--seed", SEED,
            "--out", str(workspace / "x.tskd"),
        )
        assert code == 3
        assert "log" in err

    def test_bad_seed_exit_2(self, workspace, capsys):
        code, _, err = run(
            capsys,
            "sketch-fn",
            "--circuit", str(workspace / "circuit.json"),
            "--base", str(workspace / "base.json"),
            "--s", "2", "--k", "4", "--seed", "zz",
            "--out", str(workspace / "x.tskd"),
        )
        assert code == 2
        assert "hex" in err

    def test_missing_file_exit_2(self, workspace, capsys):
        code, _, _ = run(
            capsys,
            "eval",
            "--sketch", str(workspace / "missing.tskd"),
            "--point", str(workspace / "point.json"),
            "--m", "2",
        )
        assert code == 2

    def test_unknown_flag_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["params", "--nonsense", "1"])
        assert exc.value.code == 2
