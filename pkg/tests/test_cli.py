from __future__ import annotations

import io
import json
import pathlib
import subprocess
import sys

import pytest

from superpoint import cli
from superpoint.cli import BACKEND_ENV, SCHEMA, build_eta, load_input, run
from superpoint.errors import InternalConsistencyError
from superpoint.supermatrix import SuperMatrix

GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"
sys.path.insert(0, str(GOLDEN))
from regenerate import COMMANDS, FORMATS, INPUTS, golden_path  # noqa: E402


def path(name: str) -> str:
    return str(GOLDEN / f"{name}.json")


def header(out: str) -> dict:
    first = out.splitlines()[0]
    assert first.startswith("# ")
    return dict(kv.split("=", 1) for kv in first[2:].split())


@pytest.fixture(autouse=True)
def _no_env_backend(monkeypatch):
    monkeypatch.delenv(BACKEND_ENV, raising=False)


class TestGolden:
    @pytest.mark.parametrize("name", INPUTS)
    @pytest.mark.parametrize("command", COMMANDS)
    @pytest.mark.parametrize("fmt", FORMATS)
    def test_matches_frozen_output(self, name, command, fmt):
        code, out, err = run([command, path(name), "--format", fmt])
        assert (code, err) == (0, "")
        assert out == golden_path(name, command, fmt).read_text(encoding="utf-8")

    @pytest.mark.parametrize("command", COMMANDS)
    def test_byte_stable_across_processes(self, command):
        outs = {
            subprocess.run(
                [sys.executable, "-m", "superpoint", command, path("odd_pair"), "--format", "json"],
                capture_output=True,
                check=True,
            ).stdout
            for _ in range(2)
        }
        assert len(outs) == 1

    def test_json_is_valid_and_ordered(self):
        _, out, _ = run(["spectral", path("diag"), "--format", "json"])
        data = json.loads(out)
        assert list(data) == ["header", "report"]
        assert list(data["header"]) == ["tool", "version", "command", "backend", "tol", "tol_applies", "merge"]
        assert data["report"]["summary"] == "{q=(1): rank 1, ν=1; q=(2): rank 1, ν=1}"


class TestCommands:
    def test_decompose_two_blocks(self):
        code, out, _ = run(["decompose", path("diag"), "--format", "json"])
        assert code == 0
        blocks = json.loads(out)["report"]["blocks"]
        assert [b["point"] for b in blocks] == [["1"], ["2"]]
        assert [b["rank"] for b in blocks] == [1, 1]

    def test_validate_bad_theta(self):
        code, out, _ = run(["validate", path("bad_theta"), "--format", "json"])
        assert code == 1
        (v,) = json.loads(out)["report"]["violations"]
        assert v["operands"] == ["theta1", "theta1"]

    def test_validate_rotation(self):
        code, out, _ = run(["validate", path("rotation")])
        assert code == 1
        assert "real spectrum y1" in out

    def test_eval_generator_echoes_matrix(self):
        code, out, _ = run(["eval", path("odd_pair"), "--format", "json"])
        assert code == 0
        data = json.loads(out)
        raw = json.loads(pathlib.Path(path("odd_pair")).read_text())
        assert data["report"]["results"][0]["function"] == "y1*y2"

        eta = build_eta(raw, "exact", 1e-8, "anticommute")
        tmp = dict(raw, functions=["y1"])
        code, out, _ = run(["eval", "-", "--format", "json"], stdin=io.StringIO(json.dumps(tmp)))
        assert code == 0
        assert json.loads(out)["report"]["results"][0]["image"] == eta.ys[0].to_json()

    def test_eval_soul_scalar(self):
        code, out, _ = run(["eval", path("soul_scalar")])
        assert code == 0
        assert "[9 + 6θ1θ2]" in out.splitlines()

    def test_verify_passes(self):
        code, out, _ = run(["verify", path("odd_pair"), "--format", "json"])
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["generator_fidelity"] and rep["passed"]

    def test_hull_passes(self):
        code, out, _ = run(["hull", path("diag")])
        assert code == 0
        assert out.count(": pass") == 4

    def test_hull_noncommuting_is_validation_failure(self):
        data = {"n": 2, "s1": 0, "r": 2, "matrices": {"y": [[[1, 1], [0, 2]], [[1, 0], [0, 3]]]}, "samples": ["y1"]}
        code, _, err = run(["hull", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 1
        assert "do not commute" in err

    def test_out_flag(self, tmp_path):
        target = tmp_path / "report.txt"
        code = cli.main(["spectral", path("diag"), "--out", str(target)])
        assert code == 0
        assert target.read_text(encoding="utf-8") == golden_path("diag", "spectral", "text").read_text(encoding="utf-8")

    def test_main_exit_code_via_subprocess(self):
        proc = subprocess.run([sys.executable, "-m", "superpoint", "validate", path("bad_theta")], capture_output=True)
        assert proc.returncode == 1


class TestErrors:
    def test_json_syntax_error_has_position(self):
        code, out, err = run(["validate", "-"], stdin=io.StringIO('{"n": 1,\n  "s1": }'))
        assert code == 2 and out == ""
        assert "<stdin>:2:9" in err

    def test_schema_violation_names_field(self):
        data = {"n": 1, "s1": 0, "r": 2, "matrices": {"y": [[[1, 0], [0, "x"]]]}, "bogus": 1}
        code, _, err = run(["validate", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 2
        assert "bogus" in err

    def test_wrong_shape(self):
        data = {"n": 1, "s1": 0, "r": 2, "matrices": {"y": [[[1, 0]]]}}
        code, _, err = run(["validate", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 2
        assert "$.matrices.y[0]" in err

    def test_bad_expression(self):
        data = {"n": 1, "s1": 0, "r": 1, "matrices": {"y": [[[1]]]}, "functions": ["y1 +"]}
        code, _, err = run(["eval", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 2
        assert "$.functions[0]" in err

    def test_missing_file(self, tmp_path):
        code, _, err = run(["validate", str(tmp_path / "nope.json")])
        assert code == 2 and "cannot read" in err

    def test_domain_error_is_input_error(self):
        data = {"n": 1, "s1": 0, "r": 1, "matrices": {"y": [[[-1]]]}, "functions": ["log(y1)"]}
        code, _, err = run(["eval", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 2
        assert "q=(-1)" in err

    def test_internal_error(self, monkeypatch):
        def boom(handle, data):
            raise InternalConsistencyError("idempotents do not sum to one")

        monkeypatch.setattr(cli, "cmd_spectral", boom)
        code, _, err = run(["spectral", path("diag")])
        assert code == 3 and "internal error" in err

    def test_unexpected_exception_is_internal(self, monkeypatch):
        def boom(handle, data):
            raise RuntimeError("unexpected")

        monkeypatch.setattr(cli, "cmd_spectral", boom)
        assert run(["spectral", path("diag")])[0] == 3

    def test_nonpositive_tol(self):
        assert run(["validate", path("diag"), "--tol", "0"])[0] == 2


class TestBackend:
    def test_default_exact(self):
        assert header(run(["spectral", path("diag")])[1])["backend"] == "exact"

    def test_env_var(self, monkeypatch):
        monkeypatch.setenv(BACKEND_ENV, "numeric")
        h = header(run(["spectral", path("diag")])[1])
        assert h["backend"] == "numeric" and h["tol_applies"] == "True"

    def test_file_beats_env(self, monkeypatch):
        monkeypatch.setenv(BACKEND_ENV, "numeric")
        data = json.loads(pathlib.Path(path("diag")).read_text())
        data["backend"] = "exact"
        code, out, _ = run(["spectral", "-"], stdin=io.StringIO(json.dumps(data)))
        assert header(out)["backend"] == "exact"

    def test_flag_beats_file(self):
        data = json.loads(pathlib.Path(path("diag")).read_text())
        data["backend"] = "exact"
        _, out, _ = run(["spectral", "-", "--backend", "numeric"], stdin=io.StringIO(json.dumps(data)))
        assert header(out)["backend"] == "numeric"

    def test_bad_env(self, monkeypatch):
        monkeypatch.setenv(BACKEND_ENV, "fast")
        assert run(["spectral", path("diag")])[0] == 2

    def test_numeric_spectral_matches(self):
        _, out, _ = run(["spectral", path("fat_point"), "--backend", "numeric"])
        assert "rank 2, ν=2" in out

    def test_merge_recorded(self):
        assert header(run(["validate", path("diag"), "--merge", "commute"])[1])["merge"] == "commute"


class TestSchema:
    def test_field_names(self):
        assert set(SCHEMA["properties"]) == {
            "n", "s1", "s2", "r", "backend", "tol", "matrices", "eigen_hints", "functions", "samples", "composers",
        }
        assert set(SCHEMA["properties"]["matrices"]["properties"]) == {"y", "theta"}

    @pytest.mark.parametrize("name", [*INPUTS, "bad_theta", "rotation"])
    def test_goldens_conform(self, name):
        load_input(pathlib.Path(path(name)).read_text(encoding="utf-8"))

    def test_term_list_round_trip(self):
        data = json.loads(pathlib.Path(path("soul_scalar")).read_text())
        eta = build_eta(data, "exact", 1e-8, "anticommute")
        js = eta.ys[0].to_json()
        assert SuperMatrix.from_json(js).to_json() == js

    def test_irrational_spectrum_needs_hint(self):
        # spectrum ±sqrt(2) is real but not rational
        data = {"n": 1, "s1": 0, "r": 2, "matrices": {"y": [[[0, 2], [1, 0]]]}}
        code, _, err = run(["spectral", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 2
        code, out, _ = run(["spectral", "-", "--backend", "numeric"], stdin=io.StringIO(json.dumps(data)))
        assert code == 0 and "rank sum: 2" in out

    def test_eigen_hint_accepted(self):
        data = {
            "n": 1, "s1": 0, "r": 2, "matrices": {"y": [[[1, 1], [0, 2]]]},
            "eigen_hints": [{"eigenvalues": ["1", "2"], "multiplicities": [1, 1]}],
        }
        code, out, _ = run(["spectral", "-"], stdin=io.StringIO(json.dumps(data)))
        assert code == 0 and out.splitlines()[1] == "{q=(1): rank 1, ν=1; q=(2): rank 1, ν=1}"
