import inspect
import json

import pytest

import stabkit
from stabkit.cli import COMMANDS, OPERATION_COMMANDS, main

LIBRARY_MODULES = ["exact_linalg", "complexes", "injective_words", "fm_trees",
                   "symmetric_powers", "cdga", "stability", "acceptance"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def result(out):
    body = json.loads(out)
    assert body["schema"] == "stabkit/1"
    return body["result"]


@pytest.fixture
def octahedron(tmp_path):
    path = tmp_path / "oct.json"
    faces = [[x, y, z] for x in (1, 2) for y in (3, 4) for z in (5, 6)]
    path.write_text(json.dumps({"schema": "stabkit/1", "vertices": [1, 2, 3, 4, 5, 6],
                                "maximal_faces": faces}))
    return str(path)


@pytest.fixture
def circle(tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(json.dumps({"schema": "stabkit/1", "maximal_faces": [["a", "b"], ["b", "c"],
                                                                         ["a", "c"]]}))
    return str(path)


def test_every_operation_has_one_subcommand():
    seen = set()
    for mod in LIBRARY_MODULES:
        m = __import__(f"stabkit.{mod}", fromlist=["__all__"])
        for name in m.__all__:
            if inspect.isfunction(getattr(m, name)):
                key = f"{mod}.{name}"
                assert key in OPERATION_COMMANDS, key
                seen.add(key)
    # no stale entries, and every target is a real subcommand
    assert set(OPERATION_COMMANDS) == seen
    assert set(OPERATION_COMMANDS.values()) <= set(COMMANDS)
    assert set(COMMANDS) == set(OPERATION_COMMANDS.values())


def test_homology_octahedron(capsys, octahedron):
    code, out, _ = run(capsys, "homology", "--input", octahedron)
    assert code == 0
    assert result(out)["betti"] == {"0": 1, "1": 0, "2": 1}


def test_homology_rational(capsys, circle):
    code, out, _ = run(capsys, "homology", "--input", circle, "--over", "Q")
    assert code == 0 and result(out)["betti"] == {"0": 1, "1": 1}


def test_links(capsys, octahedron):
    code, out, _ = run(capsys, "links", "--input", octahedron, "--simplex", "1")
    assert code == 0
    assert result(out)["link_f_vector"] == [4, 4]


def test_links_bad_simplex(capsys, octahedron):
    assert run(capsys, "links", "--input", octahedron, "--simplex", "1,2")[0] == 2
    assert run(capsys, "links", "--input", octahedron, "--simplex", "9")[0] == 2


def test_join(capsys, circle):
    code, out, _ = run(capsys, "join", "--input", circle, "--other", circle)
    r = result(out)
    assert code == 0 and r["passed"] and r["required"] == 2
    code, out, _ = run(capsys, "join", "--input", circle, "--other", circle, "--cone-only")
    assert code == 0 and result(out)["cone_acyclic"]


def test_wcm_check(capsys):
    code, out, _ = run(capsys, "wcm-check", "--charges", "1,1,1,1,1,1", "--c", "2")
    assert code == 0
    r = result(out)
    assert r["passed"] and r["target_dim"] == 2


def test_wcm_check_budget_exit(capsys):
    code, out, err = run(capsys, "wcm-check", "--charges", "1,1,1,1,1,1", "--c", "2",
                         "--cell-budget", "10")
    assert code == 3
    assert result(out)["complete"] is False


def test_env_budget_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("STABKIT_CELL_BUDGET", "10")
    assert run(capsys, "wcm-check", "--charges", "1,1,1,1", "--c", "2")[0] == 3
    assert run(capsys, "wcm-check", "--charges", "1,1,1,1", "--c", "2",
               "--cell-budget", "1000")[0] == 0
    monkeypatch.setenv("STABKIT_CELL_BUDGET", "lots")
    assert run(capsys, "wcm-check", "--charges", "1,1", "--c", "1")[0] == 2


def test_max_degree_env(capsys, octahedron, monkeypatch):
    monkeypatch.setenv("STABKIT_MAX_DEGREE", "1")
    code, out, _ = run(capsys, "homology", "--input", octahedron)
    assert result(out)["betti"] == {"0": 1, "1": 0}
    code, out, _ = run(capsys, "homology", "--input", octahedron, "--max-degree", "2")
    assert result(out)["betti"] == {"0": 1, "1": 0, "2": 1}


def test_charged_set_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"schema": "stabkit/1", "charges": [1, 1, 1, 2, 2], "c": 2}))
    code, out, _ = run(capsys, "wcm-check", "--input", str(path))
    assert code == 0 and result(out)["target_dim"] == 1


def test_inj_build(capsys):
    code, out, _ = run(capsys, "inj-build", "--charges", "1,1,1", "--c", "1", "--faces",
                       "--check-links")
    r = result(out)
    assert code == 0 and r["faces"] == 7 and r["link_isomorphism"]


def test_inj_derangement(capsys):
    code, out, _ = run(capsys, "inj-derangement", "--n", "4")
    assert code == 0 and result(out)["snf_rank"] == 9
    assert run(capsys, "inj-derangement", "--n", "8")[0] == 3


def test_trees(capsys, tmp_path):
    dot = tmp_path / "p.dot"
    code, out, _ = run(capsys, "trees", "--k", "3", "--poset", "--dot", str(dot), "--list")
    r = result(out)
    assert code == 0 and r["strata"] == 8 and r["graded"]
    assert dot.read_text().startswith("digraph")
    assert run(capsys, "trees", "--k", "9")[0] == 3


def test_tree_retract(capsys):
    code, out, _ = run(capsys, "tree-retract", "--tree", "(r 1 (v1 (v3 3 7) 4 6) (v2 2 8 9) 5)",
                       "--c", "2", "--contract", "3,7")
    r = result(out)
    assert code == 0 and r["codimension"] == 3 and r["retract_codimension"] == 1
    assert run(capsys, "tree-retract", "--tree", "(r 1 2", "--c", "1")[0] == 2


def test_sym_power(capsys):
    code, out, _ = run(capsys, "sym-power", "--sphere", "2", "--k", "2")
    assert result(out)["dims"] == {"0": 1, "2": 1, "4": 1}
    code, out, _ = run(capsys, "sym-power", "--dims", "0:1,1:2,2:1", "--k", "2")
    assert result(out)["dims"] == {"0": 1, "1": 2, "2": 2, "3": 2, "4": 1}
    assert run(capsys, "sym-power", "--dims", "0:2", "--k", "2")[0] == 2


def test_cdga_cohomology(capsys):
    code, out, _ = run(capsys, "cdga-cohomology", "--model", "sym-sphere", "--n", "2", "--c", "2",
                       "--window", "8", "--exact", "a^3")
    r = result(out)
    assert code == 0 and r["dims"] == {"0": 1, "2": 1, "4": 1} and r["exact"]
    assert run(capsys, "cdga-cohomology", "--model", "sym-sphere", "--n", "3", "--c", "2")[0] == 2
    assert run(capsys, "cdga-cohomology", "--model", "sym-sphere", "--n", "2")[0] == 2


def test_cdga_round_trip_through_file(capsys, tmp_path):
    code, out, _ = run(capsys, "cdga-model", "--model", "mapping-cp2", "--c", "1")
    model = result(out)["model"]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model))
    code, out, _ = run(capsys, "cdga-cohomology", "--input", str(path), "--window", "5")
    assert result(out)["dims"] == {"0": 1, "2": 1, "4": 1}


def test_cdga_model_loop(capsys):
    code, out, _ = run(capsys, "cdga-model", "--model", "sym-sphere", "--n", "2", "--c", "1",
                       "--loop", "2")
    r = result(out)
    assert r["loop_homotopy"] == {"1": 1} and r["stable_component_homology"] == {"0": 1, "1": 1}
    assert run(capsys, "cdga-model", "--model", "mapping-cp2", "--c", "1", "--loop", "2")[0] == 2


def test_stability_commands(capsys):
    code, out, _ = run(capsys, "stable-range", "--k", "4", "--c", "1")
    assert result(out)["open"]["iso_below"] == 2
    code, out, _ = run(capsys, "stable-range", "--k", "20", "--c", "2", "--partition-m", "1",
                       "--compare", "50")
    r = result(out)
    assert r["collection"]["charge"] == 5 and "agree" in r["comparison"]
    code, out, _ = run(capsys, "closed-range", "--k", "10", "--j", "12", "--c", "2", "--chi", "2",
                       "--n", "4")
    assert result(out)["bound"] == 2 and result(out)["admissible"]
    code, out, _ = run(capsys, "degree-solve", "--j", "7", "--k", "3", "--chi", "2", "--d", "2")
    r = result(out)
    assert r["d"] == "2" and r["degree_shift"] == "7" and r["round_trip"]
    assert run(capsys, "degree-solve", "--j", "2", "--k", "-1", "--chi", "2")[0] == 2
    assert run(capsys, "degree-solve", "--k", "1", "--chi", "x")[0] == 2
    code, out, _ = run(capsys, "vanishing-arith", "--k-max", "50", "--c-max", "2")
    assert code == 0 and result(out)["passed"]


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "homology", "--input", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "homology", "--input", str(bad))[0] == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"schema": "other/9", "maximal_faces": []}))
    assert run(capsys, "homology", "--input", str(wrong))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["homology"])
    assert exc.value.code == 2


def test_formats_and_output(capsys, tmp_path, octahedron):
    code, out, _ = run(capsys, "homology", "--input", octahedron, "--format", "csv")
    assert out.splitlines()[0] == "key,value" and "betti.2,1" in out
    code, out, _ = run(capsys, "homology", "--input", octahedron, "--format", "text")
    assert any(line.startswith("betti.2") for line in out.splitlines())
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "homology", "--input", octahedron, "--output", str(target))
    assert out == "" and result(target.read_text())["dimension"] == 2


def test_ledger_subset_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["ledger", "--only", "join-connectivity,stability-arithmetic", "--seed", "7"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = result(a.read_text())
    assert [r["claim_id"] for r in rows] == ["join-connectivity", "stability-arithmetic"]
    assert all(r["status"] == "pass" and r["timing_seconds"] is None for r in rows)


def test_ledger_reduced_budget_skips(capsys):
    code, out, _ = run(capsys, "ledger", "--only", "wcm-connectivity", "--cell-budget", "50")
    assert code == 3
    assert result(out)[0]["status"] == "skipped"


def test_ledger_unknown_id(capsys):
    assert run(capsys, "ledger", "--only", "nope")[0] == 2


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert stabkit.__version__ in capsys.readouterr().out
