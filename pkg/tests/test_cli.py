import json

import numpy as np
import pytest

from io_utils import dump_density_json, load_density_json
from main import EXIT_DETECTED, EXIT_INPUT_ERROR, EXIT_NOT_DETECTED, main
from quantum_core import random_real_density


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("IMKIT_TOL", "IMKIT_TOL_PSD", "IMKIT_TOL_MOMENT", "IMKIT_TOL_DET", "IMKIT_SEED", "IMKIT_GRID_SIZE"):
        monkeypatch.delenv(name, raising=False)


class TestDetect:

    def test_detected_prints_report(self, qubit_state_file, capsys):
        code = main(["detect", "--state", str(qubit_state_file()), "--basis", "fourier"])
        assert code == EXIT_DETECTED
        report = json.loads(capsys.readouterr().out)
        assert report["detected"] is True
        assert report["minimal_order"] == 2
        assert report["verdict"] == "Imaginarity detected"

    def test_beta_basis_and_out_file(self, qubit_state_file, tmp_path):
        out = tmp_path / "report.json"
        code = main(["detect", "--state", str(qubit_state_file()), "--basis", "beta:1.5707963267948966", "--out", str(out)])
        assert code == EXIT_DETECTED
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["minimal_order"] == 1
        assert report["determinants"][0]["value"] == pytest.approx(-3 / 16, abs=1e-12)
        assert (tmp_path / "report.json.run.json").exists()

    def test_real_state_not_detected(self, tmp_path):
        path = tmp_path / "real.json"
        dump_density_json(random_real_density(3, seed=1), path)
        assert main(["detect", "--state", str(path), "--basis", "fourier"]) == EXIT_NOT_DETECTED

    def test_ground_state_not_detected(self, tmp_path, capsys):
        path = tmp_path / "ground.json"
        path.write_text(json.dumps({"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}), encoding="utf-8")
        assert main(["detect", "--state", str(path), "--basis", "fourier"]) == EXIT_NOT_DETECTED
        report = json.loads(capsys.readouterr().out)
        assert report["reference_M_l1"] == 0.0

    def test_mmax_one_misses_second_order(self, qubit_state_file):
        code = main(["detect", "--state", str(qubit_state_file()), "--basis", "fourier", "--mmax", "1"])
        assert code == EXIT_NOT_DETECTED

    def test_input_errors(self, tmp_path, qubit_state_file, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dim": 2, "re": [[0.5, 0.3], [0.1, 0.5]], "im": [[0, 0], [0, 0]]}), encoding="utf-8")
        assert main(["detect", "--state", str(bad), "--basis", "fourier"]) == EXIT_INPUT_ERROR
        assert "NotHermitian" in capsys.readouterr().err

        ragged = tmp_path / "ragged.json"
        ragged.write_text(json.dumps({"dim": 2, "re": [[1, 0]], "im": [[0, 0]]}), encoding="utf-8")
        assert main(["detect", "--state", str(ragged), "--basis", "fourier"]) == EXIT_INPUT_ERROR

        missing = tmp_path / "missing.json"
        assert main(["detect", "--state", str(missing), "--basis", "fourier"]) == EXIT_INPUT_ERROR

        assert main(["detect", "--state", str(qubit_state_file()), "--basis", "hadamard"]) == EXIT_INPUT_ERROR

    def test_truncated_json(self, tmp_path, capsys):
        cut = tmp_path / "cut.json"
        cut.write_text('{"dim": 2, "re": [[1', encoding="utf-8")
        assert main(["detect", "--state", str(cut), "--basis", "fourier"]) == EXIT_INPUT_ERROR
        err = capsys.readouterr().err
        assert "Invalid JSON" in err
        assert "cut.json" in err

    def test_beta_basis_needs_qubit(self, tmp_path):
        path = tmp_path / "real3.json"
        dump_density_json(random_real_density(3, seed=2), path)
        assert main(["detect", "--state", str(path), "--basis", "beta:0.5"]) == EXIT_INPUT_ERROR

    def test_state_file_roundtrip(self, qubit_state_file):
        rho = load_density_json(qubit_state_file())
        assert rho.matrix[0, 1] == pytest.approx(-0.5j, abs=1e-15)


class TestSweep:

    def _run(self, out):
        return main(["sweep", "--alpha", "0:3.141592653589793:5", "--beta", "0,0.7853981633974483,1.5707963267948966", "--out", str(out)])

    def test_csv_layout(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert self._run(out) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "alpha,beta,det_h1,det_h2,det_h3,minimal_order,m_l1"
        assert len(lines) == 1 + 15
        mid = lines[1 + 2].split(",")  # beta = 0, alpha = pi/2
        assert float(mid[0]) == pytest.approx(np.pi / 2)
        assert float(mid[3]) == pytest.approx(-1 / 1024, abs=1e-14)
        assert mid[5] == "2"
        assert float(mid[6]) == pytest.approx(1.0)
        first = lines[1].split(",")
        assert first[5] == "0"
        assert (tmp_path / "sweep.csv.run.json").exists()

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        self._run(a)
        self._run(b)
        assert a.read_bytes() == b.read_bytes()

    def test_mmax_caps_minimal_order(self, tmp_path):
        out = tmp_path / "capped.csv"
        code = main(["sweep", "--alpha", "1.5707963267948966:1.5707963267948966:2", "--beta", "0", "--mmax", "1", "--out", str(out)])
        assert code == 0
        rows = [line.split(",") for line in out.read_text(encoding="utf-8").splitlines()[1:]]
        assert [r[5] for r in rows] == ["0", "0"]
        assert float(rows[0][4]) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize(
        "alpha,beta",
        [("0:1:1", "0"), ("0:1", "0"), ("0:1:5", "7"), ("0:1:5", ""), ("a:1:5", "0")],
    )
    def test_bad_arguments(self, tmp_path, alpha, beta):
        assert main(["sweep", "--alpha", alpha, "--beta", beta, "--out", str(tmp_path / "x.csv")]) == EXIT_INPUT_ERROR


class TestInterfere:

    def test_generator(self, qubit_state_file, tmp_path, capsys):
        out = tmp_path / "fringe.csv"
        code = main(["interfere", "--state", str(qubit_state_file()), "--unitary", "generator:0,1:1.5707963267948966", "--grid", "36", "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["summary"]["visibility"] == pytest.approx(1.0, abs=1e-12)
        assert summary["summary"]["analytic_visibility"] == pytest.approx(1.0, abs=1e-12)
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# abs_trace=")
        assert lines[1] == "theta,intensity"
        assert len(lines) == 2 + 36
        saved = json.loads((tmp_path / "fringe.csv.summary.json").read_text(encoding="utf-8"))
        assert saved["internal_dim"] == 2

    def test_s_n_on_twirled_copies(self, qubit_state_file, tmp_path, capsys):
        out = tmp_path / "s2.csv"
        code = main(["interfere", "--state", str(qubit_state_file()), "--unitary", "s_n:2", "--basis", "beta:1.5707963267948966", "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        # ancilla qubit plus two copies
        assert summary["internal_dim"] == 8
        assert summary["copies"] == 2
        assert summary["dilated"] is True
        assert summary["operator_unitarity_residual"] > 0.1
        assert summary["summary"]["visibility"] == pytest.approx(0.5, abs=1e-9)
        assert summary["signed_moment"] == pytest.approx(0.5, abs=1e-9)

    def test_matrix_file(self, qubit_state_file, tmp_path):
        u_path = tmp_path / "u.json"
        u_path.write_text(json.dumps({"dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}), encoding="utf-8")
        assert main(["interfere", "--state", str(qubit_state_file()), "--unitary", str(u_path), "--out", str(tmp_path / "x.csv")]) == 0

        bad = tmp_path / "bad_u.json"
        bad.write_text(json.dumps({"dim": 2, "re": [[1, 1], [0, 1]], "im": [[0, 0], [0, 0]]}), encoding="utf-8")
        assert main(["interfere", "--state", str(qubit_state_file()), "--unitary", str(bad), "--out", str(tmp_path / "y.csv")]) == EXIT_INPUT_ERROR

    @pytest.mark.parametrize("spec", ["generator:0,0:1.0", "generator:0,5:1.0", "generator:0,1", "s_n:0", "s_n:two"])
    def test_bad_unitary_specs(self, qubit_state_file, tmp_path, spec):
        code = main(["interfere", "--state", str(qubit_state_file()), "--unitary", spec, "--out", str(tmp_path / "z.csv")])
        assert code == EXIT_INPUT_ERROR
