import json
import subprocess
import sys

import pytest

from conftest import torus_surface

from hypcone import serialize_surface
from hypcone.cli import main


@pytest.fixture
def torus_file(tmp_path):
    path = tmp_path / "torus.json"
    path.write_text(serialize_surface(torus_surface()))
    return str(path)


@pytest.fixture
def demo_file(tmp_path):
    path = tmp_path / "demo.json"
    path.write_text(serialize_surface(torus_surface(1.0, 1.0, 1.9)))
    return str(path)


@pytest.fixture
def wall_file(tmp_path):
    path = tmp_path / "wall.json"
    path.write_text(serialize_surface(torus_surface(1e-3)))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def as_dict(out, sep=": "):
    return dict(line.split(sep, 1) for line in out.splitlines())


def test_validate(capsys, torus_file):
    code, out, _ = run(capsys, "validate", "--input", torus_file)
    assert code == 0
    doc = as_dict(out)
    assert doc["valid"] == "true"
    assert doc["genus"] == "1"
    assert doc["hyperbolic"] == "true"
    assert float(doc["theta.0"]) == pytest.approx(5.224829489105457)


def test_structured_format(capsys, torus_file):
    code, out, _ = run(capsys, "validate", "--input", torus_file,
                       "--format", "structured")
    assert code == 0
    doc = as_dict(out, sep="=")
    assert doc["valid"] == "true"


def test_poisson_report(capsys, torus_file):
    code, out, _ = run(capsys, "poisson", "--input", torus_file)
    assert code == 0
    doc = as_dict(out)
    assert doc["rank"] == "2"
    assert doc["rank_expected"] == "2"
    assert float(doc["radical_max"]) < 1e-8
    assert float(doc["jacobi"]) < 1e-5
    assert doc["comparison.constant"] == "1/8 up to global sign"
    row = [float(x) for x in doc["P.x"].split()]
    assert row[0] == 0.0


def test_holonomy_report(capsys, torus_file):
    code, out, _ = run(capsys, "holonomy", "--input", torus_file)
    assert code == 0
    doc = as_dict(out)
    assert float(doc["max_error"]) < 1e-8
    assert float(doc["alength.x"]) == pytest.approx(1.2, abs=1e-8)
    assert "triangle.0" in doc and "vertex.0" in doc


def test_delaunay_run(capsys, demo_file):
    code, out, _ = run(capsys, "delaunay", "--input", demo_file)
    assert code == 0
    doc = as_dict(out)
    assert doc["flips"] == "1"
    assert doc["move.0"].startswith("flip z ")
    assert float(doc["psi_min"]) >= -1e-10


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    doc = as_dict(out)
    assert doc["pass"] == "true"
    assert doc["lemma.rotation-pairs.count"] == "500"
    assert float(doc["lemma.log-expansion.residual"]) < 1e-6


def test_output_is_deterministic(capsys, torus_file):
    _, first, _ = run(capsys, "poisson", "--input", torus_file)
    _, again, _ = run(capsys, "poisson", "--input", torus_file)
    _, jobs, _ = run(capsys, "poisson", "--input", torus_file, "--jobs", "4")
    assert first == again == jobs


def test_floats_roundtrip_exactly(capsys, torus_file):
    _, out, _ = run(capsys, "validate", "--input", torus_file)
    theta = as_dict(out)["theta.0"]
    assert float(repr(float(theta))) == float(theta)


def test_exit_codes(capsys, tmp_path, torus_file, wall_file):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"edges": [], "triangles": []}))
    assert run(capsys, "validate", "--input", str(bad))[0] == 1
    assert run(capsys, "validate", "--input", str(tmp_path / "nope.json"))[0] == 1
    assert run(capsys, "poisson", "--input", torus_file, "--tol", "bogus=1")[0] == 1
    assert run(capsys, "poisson", "--input", wall_file)[0] == 2
    assert run(capsys, "poisson", "--input", torus_file,
               "--tol", "jacobi=1e-30")[0] == 3


def test_tolerance_override_loosens(capsys, wall_file):
    # widening the guard turns the wall refusal into a huge-but-finite matrix
    code, out, _ = run(capsys, "poisson", "--input", wall_file,
                       "--tol", "wall=1e-9", "--tol", "jacobi=1e9",
                       "--tol", "radical=1e9")
    assert code == 0


def test_installed_entry_point(demo_file):
    proc = subprocess.run(
        [sys.executable, "-m", "hypcone.cli", "delaunay", "--input", demo_file],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "psi_min" in proc.stdout
