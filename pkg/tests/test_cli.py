"""Command-line interface: payload shapes, determinism, exit codes."""

import json

import pytest

from liouville_ep import cli

QUBIT_EP = [
    "--model",
    "qubit",
    "--bind",
    "gamma_e=1",
    "--bind",
    "gamma_f=0",
    "--bind",
    "J=1/4",
]
SPIN_SLICE = [
    "--model",
    "spin_half",
    "--bind",
    "Omega=1",
    "--bind",
    "gamma_minus=0",
    "--bind",
    "gamma_y=2",
]


def run_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


class TestBuild:
    def test_bound_entries(self, capsys):
        payload = run_json(capsys, ["build"] + QUBIT_EP)
        assert payload["schema"] == 1
        assert payload["model"] == "qubit"
        assert payload["dim"] == 4
        assert payload["params"] == ["gamma_e", "gamma_f", "J"]
        assert payload["bound"] == {"gamma_e": "1", "gamma_f": "0", "J": "1/4"}
        assert payload["entries"][0][0] == "-1"
        assert payload["entries"][0][3] == "0"

    def test_symbolic_entries(self, capsys):
        payload = run_json(capsys, ["build", "--model", "qubit"])
        assert payload["bound"] == {}
        assert payload["entries"][0][0] == "-gamma_e"
        assert payload["entries"][3][3] == "-gamma_f"

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "gen.json"
        assert cli.main(["build", "--model", "spin_half", "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        payload = json.loads(out.read_text())
        assert payload["model"] == "spin_half"
        assert payload["dim"] == 4


class TestPolygon:
    def test_rate_perturbation_payload(self, capsys):
        payload = run_json(
            capsys,
            ["polygon"] + QUBIT_EP + ["--omega0", "-1/2", "--perturb", "gamma_f"],
        )
        assert payload["schema"] == 1
        assert payload["omega0"] == "-1/2"
        assert payload["perturbation"] == "gamma_f"
        slopes = [s["slope"] for s in payload["polygon"]["segments"]]
        assert slopes == ["-1", "-1/3"]
        assert payload["valuations"] == [
            {"valuation": "1/3", "multiplicity": 3},
            {"valuation": "1", "multiplicity": 1},
        ]
        assert payload["tentacle_directions"] == ["1", "3"]
        assert payload["classification"]["label"] == "EP(3)"
        assert payload["classification"]["alg_mult"] == 4
        assert payload["classification"]["geom_mult"] == 2

    def test_shift_sign_minus_is_equivalent(self, capsys):
        base = run_json(
            capsys,
            ["polygon"] + QUBIT_EP + ["--omega0", "-1/2", "--perturb", "gamma_f"],
        )
        flipped = run_json(
            capsys,
            ["polygon"]
            + QUBIT_EP
            + ["--omega0", "1/2", "--shift-sign", "minus", "--perturb", "gamma_f"],
        )
        assert flipped == base

    def test_generic_default(self, capsys):
        payload = run_json(
            capsys, ["polygon"] + SPIN_SLICE + ["--bind", "gamma_x=1", "--omega0", "-3"]
        )
        assert payload["perturbation"] == "generic"
        assert payload["seed"] == 42
        assert payload["classification"]["label"] == "EP(2)"
        slopes = [s["slope"] for s in payload["polygon"]["segments"]]
        assert slopes == ["-1/2", "0"]

    def test_svg_written(self, tmp_path, capsys):
        out = tmp_path / "poly.json"
        code = cli.main(
            ["polygon"]
            + QUBIT_EP
            + ["--omega0", "-1/2", "--perturb", "gamma_f", "--svg", "--out", str(out)]
        )
        assert code == 0
        svg = (tmp_path / "poly.svg").read_text()
        assert svg.startswith("<svg")
        assert json.loads(out.read_text())["schema"] == 1


class TestScan:
    def test_frozen_slice(self, capsys):
        payload = run_json(capsys, ["scan"] + SPIN_SLICE)
        assert payload["target"] == "gamma_x"
        assert payload["continuum"] is False
        values = [c["value"] for c in payload["candidates"]]
        assert values == ["-2", "-1/8", "1", "3"]
        by_value = {c["value"]: c for c in payload["candidates"]}
        ep = by_value["1"]
        assert ep["exact"] is True
        assert ep["omega0"] == ["-3"]
        assert ep["flags"] == []
        assert ep["classifications"][0]["label"] == "EP(2)"
        dia = by_value["-2"]
        assert "nonphysical" in dia["flags"]
        assert dia["classifications"][0]["label"] == "diabolic"
        assert set(by_value["-1/8"]["omega0"]) == {"0", "-15/4"}

    def test_continuum(self, capsys):
        payload = run_json(
            capsys,
            ["scan", "--model", "qubit", "--bind", "gamma_f=0", "--bind", "J=0"],
        )
        assert payload["target"] == "gamma_e"
        assert payload["continuum"] is True
        assert payload["candidates"] == []

    def test_needs_exactly_one_free_parameter(self, capsys):
        assert cli.main(["scan"] + QUBIT_EP) == 3
        assert cli.main(["scan", "--model", "qubit", "--bind", "J=0"]) == 3


class TestAmoeba:
    ARGS = (
        ["amoeba"]
        + QUBIT_EP
        + [
            "--omega0",
            "-1/2",
            "--perturb",
            "gamma_f",
            "--eps-points",
            "6",
            "--phases",
            "8",
        ]
    )

    def test_csv_shape(self, capsys):
        code = cli.main(self.ARGS)
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("# amoeba model=qubit perturbation=gamma_f omega0=-1/2")
        assert "grid=6x8" in lines[0]
        assert lines[1] == "logeps,logmag"
        for row in lines[2:]:
            le, lm = row.split(",")
            float(le), float(lm)
        assert len(lines) > 2

    def test_determinism(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert cli.main(self.ARGS + ["--out", str(a)]) == 0
        assert cli.main(self.ARGS + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestScale:
    def test_cube_root_slope(self, capsys):
        code = cli.main(
            ["scale"]
            + QUBIT_EP
            + ["--omega0", "-1/2", "--perturb", "gamma_f", "--eps-points", "10"]
        )
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        header = lines[0]
        assert header.startswith("# scale model=qubit perturbation=gamma_f")
        slope = float(header.split("slope=")[1].split(" ")[0])
        assert abs(slope - 1 / 3) < 0.05
        assert "npoints=10" in header
        assert lines[1] == "epsilon,re,im,logeps,logmag"
        assert len(lines) == 12
        eps0 = float(lines[2].split(",")[0])
        assert eps0 == pytest.approx(1e-6)

    def test_svg_written(self, tmp_path):
        out = tmp_path / "fit.csv"
        code = cli.main(
            ["scale"]
            + QUBIT_EP
            + [
                "--omega0",
                "-1/2",
                "--perturb",
                "gamma_f",
                "--eps-points",
                "8",
                "--svg",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert (tmp_path / "fit.svg").read_text().startswith("<svg")
        assert out.read_text().startswith("# scale")


class TestEncircle:
    def test_cycles_header_and_rows(self, capsys):
        code = cli.main(
            ["encircle"]
            + QUBIT_EP
            + ["--perturb", "gamma_f", "--radius", "0.01", "--steps", "64"]
        )
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("# encircle model=qubit perturbation=gamma_f")
        assert "cycles=[3,1]" in lines[0]
        assert lines[1] == "t,index,re,im"
        assert len(lines) == 2 + 65 * 4
        t, idx, re, im = lines[2].split(",")
        assert float(t) == 0.0
        assert idx == "0"
        float(re), float(im)


class TestExitCodes:
    def test_unknown_model(self):
        assert cli.main(["build", "--model", "nope"]) == 2

    def test_malformed_binding(self):
        assert cli.main(["build", "--model", "qubit", "--bind", "gamma_e"]) == 2

    def test_unknown_parameter(self):
        assert cli.main(["build", "--model", "qubit", "--bind", "zeta=1"]) == 2

    def test_bad_omega0_expression(self):
        assert cli.main(["polygon"] + QUBIT_EP + ["--omega0", "1/"]) == 2

    def test_missing_omega0(self):
        assert cli.main(["polygon"] + QUBIT_EP) == 2

    def test_unbound_parameters(self):
        assert (
            cli.main(["polygon", "--model", "qubit", "--bind", "gamma_e=1", "--omega0", "0"])
            == 3
        )

    def test_omega0_not_an_eigenvalue(self):
        assert cli.main(["polygon"] + QUBIT_EP + ["--omega0", "17"]) == 3

    def test_invalid_model_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("not json at all")
        assert cli.main(["build", "--model", str(bad)]) == 2

    def test_malformed_model_dict(self, tmp_path):
        bad = tmp_path / "incomplete.json"
        bad.write_text(json.dumps({"name": "x"}))
        assert cli.main(["build", "--model", str(bad)]) == 2

    def test_numerical_failure(self, tmp_path):
        # a parameter that never enters the generator gives a zero
        # perturbation: the tracked branch cannot move, exit code 4
        flat = tmp_path / "flat.json"
        flat.write_text(
            json.dumps(
                {
                    "name": "flat",
                    "dim": 2,
                    "params": ["g"],
                    "hamiltonian": [["0", "0"], ["0", "0"]],
                    "jumps": [],
                }
            )
        )
        code = cli.main(
            [
                "scale",
                "--model",
                str(flat),
                "--bind",
                "g=0",
                "--omega0",
                "0",
                "--perturb",
                "g",
            ]
        )
        assert code == 4


class TestCustomModelFlow:
    def test_json_model_end_to_end(self, tmp_path, capsys):
        # a plain decay channel: L has eigenvalues {0, -g/2, -g/2, -g}
        model = tmp_path / "decay.json"
        model.write_text(
            json.dumps(
                {
                    "name": "decay",
                    "dim": 2,
                    "params": ["g"],
                    "hamiltonian": [["0", "0"], ["0", "0"]],
                    "jumps": [{"rate": "g", "operator": [["0", "1"], ["0", "0"]]}],
                }
            )
        )
        payload = run_json(
            capsys, ["build", "--model", str(model), "--bind", "g=2"]
        )
        assert payload["model"] == "decay"
        assert payload["entries"][0][0] == "0"
        assert payload["entries"][0][3] == "2"
        assert payload["entries"][3][3] == "-2"
        polygon = run_json(
            capsys,
            [
                "polygon",
                "--model",
                str(model),
                "--bind",
                "g=2",
                "--omega0",
                "-1",
            ],
        )
        assert polygon["classification"]["kind"] in ("ep", "diabolic", "inconclusive")
