"""Command-line interface: formats, exit codes and reproducible output."""

import json

import pytest

from cospectra.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_walks_csv(capsys):
    code, out, _ = run(capsys, "walks", "--family", "line", "--n", "8")
    assert code == 0
    assert out == "n,count\n8,70\n"


def test_walks_json(capsys):
    code, out, _ = run(capsys, "walks", "--family", "lattice:2", "--up-to", "4", "--format", "json")
    assert code == 0
    assert [row["count"] for row in json.loads(out)] == [1, 0, 4, 0, 36]


def test_moments_sources(capsys):
    _, out, _ = run(capsys, "moments", "--measure", "semicircle:2", "--up-to", "4")
    assert out.splitlines()[-1] == "4,8,1"
    _, out, _ = run(capsys, "moments", "--jacobi", "ja:3", "--up-to", "4")
    assert out.splitlines()[-1] == "4,12,1"
    _, out, _ = run(capsys, "moments", "--family", "ray", "--up-to", "6")
    assert out.splitlines()[-1] == "6,5,1"


def test_family_show(capsys):
    code, out, _ = run(capsys, "family", "show", "--family", "tree:3")
    assert code == 0
    data = json.loads(out)
    assert data["max_degree"] == 3
    assert data["branching"] == "3/2"


def test_ball_edges_and_center(capsys):
    _, out, _ = run(capsys, "ball", "--family", "lattice:2", "--radius", "1", "--center", "[3, 4]")
    lines = out.splitlines()
    assert lines[0] == "# vertices 5"
    assert len(lines) == 5


def test_jacobi_commands(capsys):
    _, out, _ = run(capsys, "jacobi", "eig", "--jacobi", "free", "--size", "3")
    assert out.splitlines()[0] == "index,eigenvalue,weight"
    _, out, _ = run(capsys, "jacobi", "quadrature", "--jacobi", "branch:3/2", "--size", "10")
    data = json.loads(out)
    assert data["checked_orders"] == 19
    assert data["max_relative_moment_error"] < 1e-9


def test_decompose_and_verify(capsys):
    _, out, _ = run(capsys, "decompose", "--branching", "2,3", "--levels", "3")
    assert [c["multiplicity"] for c in json.loads(out)["components"]] == [1, 1, 4]
    code, out, _ = run(capsys, "verify-decomposition", "--branching", "2,3", "--depth", "3")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_cospectral_and_classify(capsys):
    _, out, _ = run(capsys, "cospectral", "--a", "lattice:2", "--b", "rootedtree:4", "--no-evidence")
    assert json.loads(out)["verdict"] == "Cospectral"
    _, out, _ = run(capsys, "classify", "--family", "dinfinity")
    assert json.loads(out)["label"] == "IsDInfinity"


def test_norm_with_radii(capsys):
    _, out, _ = run(capsys, "norm", "--family", "ray", "--radii", "1,2")
    assert out.splitlines()[0] == "radius,lower_bound"
    assert len(out.splitlines()) == 3


def test_schreier_commands(capsys):
    _, out, _ = run(capsys, "schreier", "spectrum", "--level", "1")
    assert out.splitlines()[0] == "index,eigenvalue"
    _, out, _ = run(capsys, "schreier", "graph", "--level", "1")
    assert "# schreier" in out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "walks.csv"
    code, out, _ = run(capsys, "walks", "--family", "ray", "--n", "4", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == "n,count\n4,2\n"


def test_output_is_thread_independent(capsys):
    _, a, _ = run(capsys, "norm", "--family", "lattice:2", "--radii", "3,6", "--threads", "1", "--format", "json")
    _, b, _ = run(capsys, "norm", "--family", "lattice:2", "--radii", "3,6", "--threads", "4", "--format", "json")
    assert a == b


@pytest.mark.parametrize("argv,code", [
    (["walks", "--family", "hexagon", "--n", "2"], 2),
    (["walks", "--family", "line", "--n", "2", "--format", "edges"], 2),
    (["ball", "--family", "lattice:3", "--radius", "30", "--budget", "100"], 1),
    (["ball", "--family", "ray", "--radius", "1", "--center", "-1"], 1),
    (["classify", "--family", "lattice:2", "--budget", "2"], 1),
])
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err
