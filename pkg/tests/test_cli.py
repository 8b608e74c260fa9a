import dataclasses
import io
import json

import pytest

from wittheight import cli
from wittheight.exact_linalg import Subspace
from wittheight.heights import certify
from wittheight.isometry import det_on_z
from wittheight.serialize import parse_instance, parse_mat


def run(monkeypatch, capsys, argv, payload=None):
    if payload is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(payload)))
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def run_json(monkeypatch, capsys, argv, payload=None):
    code, out = run(monkeypatch, capsys, argv, payload)
    data = json.loads(out)
    assert data.get("exit_code", code) == code
    return code, data


DIAG_SPLIT = {"form": [[1, 0], [0, -1]]}
ROT = [[0, -1], [1, 0]]


class TestHeight:
    def test_diag_split(self, monkeypatch, capsys):
        code, rep = run_json(monkeypatch, capsys, ["height"], DIAG_SPLIT)
        assert code == 0
        assert rep["outputs"]["H_F_sq"] == "2" and rep["outputs"]["H_Z_sq"] == "1"

    def test_subspace(self, monkeypatch, capsys):
        inst = {"form": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                "subspace": [["1", "0", "1"], ["0", "1", "1"]]}
        code, rep = run_json(monkeypatch, capsys, ["height"], inst)
        assert code == 0 and rep["outputs"]["H_Z_sq"] == "3"

    def test_vector(self, monkeypatch, capsys):
        inst = {"form": [[1, 0], [0, 1]], "vector": ["1/2", "3"]}
        _, rep = run_json(monkeypatch, capsys, ["height"], inst)
        # (1/2, 3) ~ (1, 6): H^2 = 37, inhomogeneous (2, 1, 6): 41
        assert rep["outputs"]["H_x_sq"] == "37" and rep["outputs"]["h_x_sq"] == "41"

    @pytest.mark.parametrize("payload", [{"form": [[1, 2], [0, 1]]}, {"nope": 1}, [1, 2]])
    def test_invalid(self, monkeypatch, capsys, payload):
        code, rep = run_json(monkeypatch, capsys, ["height"], payload)
        assert code == 2

    def test_not_json(self, monkeypatch, capsys):
        monkeypatch.setattr("sys.stdin", io.StringIO("{not json"))
        assert cli.main(["height"]) == 2
        capsys.readouterr()

    def test_file_input(self, tmp_path, capsys):
        p = tmp_path / "inst.json"
        p.write_text(json.dumps(DIAG_SPLIT))
        assert cli.main(["height", "--input", str(p)]) == 0
        assert cli.main(["height", "--input", str(tmp_path / "missing.json")]) == 2
        capsys.readouterr()


class TestWitt:
    def test_split(self, monkeypatch, capsys):
        code, rep = run_json(monkeypatch, capsys, ["witt"], DIAG_SPLIT)
        assert code == 0 and rep["verdict"] == "pass"
        assert rep["outputs"]["decomposition"]["witt_index"] == 1

    def test_sum_of_three_squares(self, monkeypatch, capsys):
        inst = {"form": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
        code, rep = run_json(monkeypatch, capsys, ["witt"], inst)
        d = rep["outputs"]["decomposition"]
        assert code == 0 and d["witt_index"] == 0
        assert d["anisotropic"]["dim"] == 3

    def test_budget(self, monkeypatch, capsys):
        inst = {"form": [[1, 0, 0], [0, 1, 0], [0, 0, -1000033]]}
        code, rep = run_json(monkeypatch, capsys, ["witt", "--enum-budget", "50"], inst)
        assert code == 5 and rep["verdict"] == "budget"
        assert rep["outputs"]["nodes"] > 0 and rep["outputs"]["bound_sq"] is not None
        assert rep["enum_budget"] == 50

    def test_structural_failure_exits_4(self, monkeypatch, capsys):
        real = cli.witt_decompose

        def corrupted(s, **kw):
            d = real(s, **kw)
            p = d.planes[0]
            return dataclasses.replace(d, planes=(dataclasses.replace(p, y=(1, 0)),))

        monkeypatch.setattr(cli, "witt_decompose", corrupted)
        code, rep = run_json(monkeypatch, capsys, ["witt"], DIAG_SPLIT)
        assert code == 4 and rep["verdict"] == "fail"

    def test_zero_subspace_invalid(self, monkeypatch, capsys):
        inst = {"form": [[1, 0], [0, 1]], "subspace": {"ambient_dim": 2, "dim": 0, "basis": []}}
        code, _ = run_json(monkeypatch, capsys, ["witt"], inst)
        assert code == 2


def _fake_command(verdict):
    def cmd(spec, args):
        c = certify("siegel-1", 1, {"N": 2, "J": 1, "H_U_sq": 1})
        return {}, [dataclasses.replace(c, verdict=verdict)]
    return cmd


@pytest.mark.parametrize("verdict,code", [("pass", 0), ("indeterminate", 3), ("fail", 4)])
def test_verdict_exit_codes(monkeypatch, capsys, verdict, code):
    monkeypatch.setitem(cli.COMMANDS, "height", _fake_command(verdict))
    got, rep = run_json(monkeypatch, capsys, ["height"], DIAG_SPLIT)
    assert got == code and rep["verdict"] == verdict


class TestFactor:
    def test_identity(self, monkeypatch, capsys):
        inst = {"form": [[1, 0], [0, 1]], "isometry": [[1, 0], [0, 1]]}
        code, rep = run_json(monkeypatch, capsys, ["factor"], inst)
        assert code == 0 and rep["outputs"]["reflections"] == []

    def test_rotation(self, monkeypatch, capsys):
        inst = {"form": [[1, 0], [0, 1]], "isometry": ROT}
        code, rep = run_json(monkeypatch, capsys, ["factor"], inst)
        out = rep["outputs"]
        assert code == 0 and out["verified"]
        assert [r["mirror"] for r in out["reflections"]] == [["-1", "1"], ["0", "1"]]

    @pytest.mark.parametrize("iso", [[[2, 0], [0, 1]], None])
    def test_invalid(self, monkeypatch, capsys, iso):
        inst = {"form": [[1, 0], [0, 1]], "isometry": iso}
        code, _ = run_json(monkeypatch, capsys, ["factor"], inst)
        assert code == 2


class TestOtherCommands:
    def test_orthobasis(self, monkeypatch, capsys):
        code, rep = run_json(monkeypatch, capsys, ["orthobasis"], {"form": [[0, 1], [1, 0]]})
        assert code == 0 and len(rep["outputs"]["orthogonal_basis"]) == 2

    def test_radical(self, monkeypatch, capsys):
        code, rep = run_json(monkeypatch, capsys, ["radical"], {"form": [[1, 0], [0, 0]]})
        assert code == 0 and rep["outputs"]["radical"]["dim"] == 1

    @pytest.mark.parametrize("strategy", ["hybrid", "enumeration"])
    def test_isotropic(self, monkeypatch, capsys, strategy):
        code, rep = run_json(monkeypatch, capsys, ["isotropic", "--strategy", strategy], DIAG_SPLIT)
        assert code == 0 and rep["outputs"]["isotropy"]["witness"] == ["1", "1"]

    def test_reflect(self, monkeypatch, capsys):
        inst = {"form": [[1, 0], [0, 1]], "vector": ["1", "1"]}
        code, rep = run_json(monkeypatch, capsys, ["reflect"], inst)
        assert code == 0 and parse_mat(rep["outputs"]["matrix"]) == ((0, -1), (-1, 0))
        code, _ = run_json(monkeypatch, capsys, ["reflect"], {"form": [[1, 0], [0, 1]]})
        assert code == 0
        bad = {"form": [[1, 0], [0, -1]], "vector": ["1", "1"]}
        assert run_json(monkeypatch, capsys, ["reflect"], bad)[0] == 2

    def test_text_output(self, monkeypatch, capsys):
        code, out = run(monkeypatch, capsys, ["witt", "--output", "text"], DIAG_SPLIT)
        assert code == 0 and "witt_index" in out
        with pytest.raises(json.JSONDecodeError):
            json.loads(out)


class TestGen:
    def test_deterministic(self, capsys):
        outs = []
        for _ in range(2):
            assert cli.main(["gen", "--seed", "42", "--count", "3"]) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]
        assert cli.main(["gen", "--seed", "43", "--count", "3"]) == 0
        assert capsys.readouterr().out != outs[0]

    def test_isometry_determinant(self, capsys):
        assert cli.main(["gen", "--kind", "isometry", "--k", "3", "--n", "3", "--seed", "1",
                         "--count", "5"]) == 0
        data = json.loads(capsys.readouterr().out)
        for inst in data["instances"]:
            spec = parse_instance(inst)
            assert det_on_z(spec.space(), spec.isometry.matrix) == -1

    def test_form_range(self, capsys):
        cli.main(["gen", "--n", "4", "--coeff-bound", "2", "--count", "10"])
        for inst in json.loads(capsys.readouterr().out)["instances"]:
            f = parse_instance(inst).form
            assert all(abs(x) <= 2 for row in f.coeffs for x in row)

    def test_l_greater_than_n(self, capsys):
        assert cli.main(["gen", "--kind", "subspace", "--n", "2", "--l", "3"]) == 2
        capsys.readouterr()

    def test_gen_output_feeds_commands(self, monkeypatch, capsys):
        cli.main(["gen", "--kind", "isometry", "--n", "3", "--k", "2", "--count", "4"])
        batch = json.loads(capsys.readouterr().out)
        code, data = run(monkeypatch, capsys, ["factor"], batch)
        reps = json.loads(data)["reports"]
        assert code == 0 and len(reps) == 4 and all(r["outputs"]["verified"] for r in reps)


class TestVerify:
    def test_heights(self, capsys):
        assert cli.main(["verify", "--suite", "heights", "--count", "100", "--seed", "7"]) == 0
        s = json.loads(capsys.readouterr().out)["summary"]
        assert s["pass"] == 100 and s["fail"] == 0

    def test_bogus(self, capsys):
        assert cli.main(["verify", "--suite", "bogus"]) == 2
        capsys.readouterr()

    def test_workers_preserve_order(self, capsys):
        cli.main(["verify", "--suite", "witt", "--count", "6", "--seed", "3"])
        a = capsys.readouterr().out
        cli.main(["verify", "--suite", "witt", "--count", "6", "--seed", "3", "--workers", "2"])
        assert capsys.readouterr().out == a


def test_timing_only_on_request(monkeypatch, capsys):
    _, rep = run_json(monkeypatch, capsys, ["height"], DIAG_SPLIT)
    assert "timing_seconds" not in rep
    _, rep = run_json(monkeypatch, capsys, ["height", "--timing"], DIAG_SPLIT)
    assert rep["timing_seconds"] >= 0


def test_unknown_subcommand(capsys):
    assert cli.main(["frobnicate"]) == 2
    capsys.readouterr()
