import json
from pathlib import Path

import pytest

from fockpart.cli import run
from fockpart.gallery import ALL_PRESETS

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def _json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None, out


def test_gallery_json(capsys):
    code, doc, _ = _json(capsys, ["--gallery", "tmsv", "--param", "lambda=0.5",
                                  "--nmax", "8", "--format", "json"])
    assert code == 0
    assert doc["version"] == "report_v1"
    assert doc["name"] == "tmsv"
    assert doc["config"] == {"stats": "distinguishable", "nmax": 8, "tol_rel": 1e-8, "seed": 42}
    assert doc["verdicts"]["field"]["status"] == "entangled"
    assert doc["verdicts"]["field"]["witness"]["mode_ranks"] == [9, 9]
    assert doc["verdicts"]["particle_dist"]["status"] == "factorizable"
    assert set(doc["verdicts"]) == {"field", "particle_dist", "particle_indist_boson",
                                    "particle_identical_boson", "particle_fermion"}
    assert {c["n"] for c in doc["per_component"]} == set(range(0, 17, 2))


def test_nmax_flag_reaches_gallery(capsys):
    _, doc, _ = _json(capsys, ["--gallery", "tmsv", "--nmax", "4", "--format", "json"])
    assert doc["verdicts"]["field"]["witness"]["mode_ranks"] == [5, 5]


@pytest.mark.parametrize("name", sorted(p for p in PROGRAMS.glob("*.fp")))
def test_run_programs_table(capsys, name):
    code = run(["run", str(name), "--format", "table"])
    out = capsys.readouterr().out
    assert code == 0
    assert "field" in out and "entangled" in out or "factorizable" in out


def test_run_chi_program(capsys):
    code, docs, _ = _json(capsys, ["run", str(PROGRAMS / "chi.fp"), "--format", "json"])
    assert code == 0
    assert [d["name"] for d in docs] == ["chi", "x"]
    for d in docs:
        assert d["verdicts"]["particle_indist_boson"]["status"] == "entangled"


def test_gallery_all_is_deterministic(capsys):
    argv = ["--gallery", "all", "--format", "json", "--seed", "42"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    docs = json.loads(first)
    assert len(docs) == len(ALL_PRESETS)
    for doc in docs:
        for slot, status in doc["gallery"]["expected"].items():
            assert doc["verdicts"][slot]["status"] == status


def test_out_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    assert run(["--gallery", "x_state", "--format", "json", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["name"] == "x_state"


def test_table_marks_expectations(capsys):
    assert run(["--gallery", "boson_psi"]) == 0
    out = capsys.readouterr().out
    assert "boson_psi" in out and "EXPECTED" not in out


@pytest.mark.parametrize("argv", [
    ["--gallery", "nope"],
    ["--gallery", "tmsv", "--param", "lambda=2"],
    ["--gallery", "tmsv", "--param", "lambda"],
    ["--gallery", "all", "--param", "nmax=3"],
    ["run", "/no/such/file.fp"],
    ["run"],
    [],
    ["run", "x.fp", "--gallery", "tmsv"],
    ["--format", "xml", "--gallery", "tmsv"],
])
def test_errors_exit_2(capsys, argv):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_program_error_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.fp"
    f.write_text("let z = adag(ket(0))^2 |vac>;\nclassify z stats=fermion;\n")
    assert run(["run", str(f)]) == 2
    err = capsys.readouterr().err
    assert "ZeroState" in err and "line 2" in err


def test_syntax_error_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.fp"
    f.write_text("let a = ;\n")
    assert run(["run", str(f)]) == 2
    assert "line 1, column 9" in capsys.readouterr().err


def test_strict_indeterminate(tmp_path, capsys):
    f = tmp_path / "edge.fp"
    f.write_text("let s = fock(1, 0) + 0.00000003 * fock(0, 1); classify s stats=dist;\n"
                 "let t = fock(1, 1) + 0.00000003 * fock(2, 0); classify t stats=boson;\n")
    assert run(["run", str(f)]) == 0
    capsys.readouterr()
    code = run(["run", str(f), "--strict"])
    capsys.readouterr()
    assert code == 1


def test_strict_passes_when_decided(capsys):
    assert run(["--gallery", "tmsv", "--strict"]) == 0


def test_version(capsys):
    assert run(["--version"]) == 0
    assert "fockpart" in capsys.readouterr().out
