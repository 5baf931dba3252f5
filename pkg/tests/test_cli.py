import json

import numpy as np
import pytest

from supaq import (
    CapacityResult,
    Ensemble,
    DensityMatrix,
    bloch_to_density,
    identity_channel,
    save_channel,
)
from supaq.cli import channel_from_uri, load_state_set, run, write_report
from conftest import gaussian_cluster


def state_file(tmp_path, states, weights=None):
    payload = {
        "name": "fixture",
        "dim": states[0].dim,
        "states": [
            [[float(v.real), float(v.imag)] for v in s.data.ravel()] for s in states
        ],
    }
    if weights is not None:
        payload["weights"] = list(weights)
    path = tmp_path / "states.json"
    path.write_text(json.dumps(payload))
    return path


class TestChannelUri:
    def test_builtins(self):
        assert channel_from_uri("builtin:identity:3").dim_in == 3
        assert channel_from_uri("builtin:depolarizing:0.25").dim_out == 2
        assert channel_from_uri("builtin:erasure:0.5").dim_out == 3

    def test_file_uri(self, tmp_path):
        path = tmp_path / "id.chan"
        save_channel(identity_channel(2), path)
        assert channel_from_uri(f"file:{path}").dim_in == 2

    def test_unknown(self):
        from supaq import ParameterError

        with pytest.raises(ParameterError):
            channel_from_uri("builtin:teleporter:1")


class TestSweepCommand:
    def test_writes_expected_csv(self, tmp_path):
        out = tmp_path / "r.csv"
        code = run(
            ["sweep", "--evaluator", "paper-constants", "--grid", "0:0.1:1e-4",
             "--out", str(out)]
        )
        assert code == 0
        text = out.read_text()
        assert "p,r_HH,r_HA,r_AA,r_super" in text
        assert "0.002,0,0.01,0,3.992e-05" in text
        assert "# domain = 0.0001:0.004" in text

    def test_byte_identical_runs(self, tmp_path, monkeypatch):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        argv = ["sweep", "--grid", "0:0.02:1e-3", "--seed", "3"]
        assert run(argv + ["--out", str(first)]) == 0
        monkeypatch.setenv("SUPAQ_THREADS", "4")
        assert run(argv + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_stdout_fallback(self, capsys):
        assert run(["sweep", "--grid", "0:0.01:0.005"]) == 0
        captured = capsys.readouterr()
        assert "p,r_HH,r_HA,r_AA,r_super" in captured.out

    def test_bad_grid(self, capsys):
        assert run(["sweep", "--grid", "1:0:-1"]) == 1


class TestCapacityCommand:
    def test_half_erasure_coherent_prints_zero(self, capsys):
        code = run(
            ["capacity", "--channel", "builtin:erasure:0.5", "--quantity", "coherent",
             "--restarts", "2", "--max-evals", "300"]
        )
        assert code == 0
        printed = float(capsys.readouterr().out.strip())
        assert abs(printed) <= 1e-9

    def test_writes_report(self, tmp_path, capsys):
        out = tmp_path / "cap.csv"
        code = run(
            ["capacity", "--channel", "builtin:identity:2", "--quantity", "holevo",
             "--restarts", "2", "--max-evals", "2000", "--out", str(out)]
        )
        assert code == 0
        text = out.read_text()
        assert "value,converged,iterations" in text
        assert "# quantity = holevo" in text


class TestValidateChannelCommand:
    def test_valid_file(self, tmp_path, capsys):
        path = tmp_path / "id.chan"
        save_channel(identity_channel(2), path)
        assert run(["validate-channel", "--file", str(path)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_incomplete_kraus(self, tmp_path, capsys):
        payload = {
            "name": "bad",
            "dim_in": 2,
            "dim_out": 2,
            "kraus": [[[0.9, 0.0], [0.0, 0.0], [0.0, 0.0], [0.9, 0.0]]],
        }
        path = tmp_path / "bad.chan"
        path.write_text(json.dumps(payload))
        assert run(["validate-channel", "--file", str(path)]) == 1
        assert "completeness" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert run(["validate-channel", "--file", "/does/not/exist.chan"]) == 1


class TestBallCommand:
    def test_writes_center_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        path = state_file(tmp_path, gaussian_cluster(rng, (0.4, 0, 0), 4))
        out = tmp_path / "ball.csv"
        assert run(["ball", "--states", str(path), "--out", str(out)]) == 0
        text = out.read_text()
        assert "# radius = " in text
        assert "row,col,re,im" in text


class TestClusterCommand:
    def test_writes_medians_csv(self, tmp_path):
        rng = np.random.default_rng(1)
        states = gaussian_cluster(rng, (0.5, 0, 0), 6) + gaussian_cluster(
            rng, (-0.5, 0, 0), 6
        )
        path = state_file(tmp_path, states)
        out = tmp_path / "medians.csv"
        assert run(
            ["cluster", "--states", str(path), "--k", "2", "--seed", "4",
             "--out", str(out)]
        ) == 0
        text = out.read_text()
        assert "median,row,col,re,im" in text
        assert "# cost = " in text

    def test_coreset_path(self, tmp_path):
        rng = np.random.default_rng(2)
        states = gaussian_cluster(rng, (0.5, 0, 0), 8) + gaussian_cluster(
            rng, (-0.5, 0, 0), 8
        )
        path = state_file(tmp_path, states)
        out = tmp_path / "medians.csv"
        code = run(
            ["cluster", "--states", str(path), "--k", "2", "--coreset-m", "3",
             "--out", str(out)]
        )
        assert code == 0
        assert out.exists()


class TestUsageErrors:
    def test_unknown_command(self, capsys):
        assert run(["teleport"]) == 2

    def test_missing_required(self, capsys):
        assert run(["capacity"]) == 2

    def test_no_arguments(self, capsys):
        assert run([]) == 2


class TestStateFileParsing:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        states = gaussian_cluster(rng, (0.2, 0.1, 0), 3)
        path = state_file(tmp_path, states, weights=[1.0, 2.0, 3.0])
        loaded, weights = load_state_set(path)
        assert len(loaded) == 3
        assert np.allclose(weights, [1.0, 2.0, 3.0])
        assert np.allclose(loaded[0].data, states[0].data)

    def test_bad_json(self, tmp_path):
        from supaq import ParameterError

        path = tmp_path / "bad.json"
        path.write_text("[not json")
        with pytest.raises(ParameterError):
            load_state_set(path)


class TestWriteReport:
    def test_capacity_result(self, tmp_path):
        result = CapacityResult(
            0.5, Ensemble([DensityMatrix(np.eye(2) / 2)], [1.0]), True, 123
        )
        out = tmp_path / "cap.csv"
        write_report(result, out)
        assert "0.5,true,123" in out.read_text()

    def test_unknown_type_rejected(self, tmp_path):
        from supaq import ParameterError

        with pytest.raises(ParameterError):
            write_report(object(), tmp_path / "x.csv")

    def test_bit_stable(self, tmp_path):
        from supaq import SweepConfig, sweep

        report = sweep(SweepConfig(p_grid=(0.0, 0.002, 0.05)))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_report(report, a)
        write_report(report, b)
        assert a.read_bytes() == b.read_bytes()
