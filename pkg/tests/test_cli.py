import csv
import io
import math

import numpy as np
import pytest

from contactcurv.cli import run_cli, worker_count
from contactcurv.export import csv_text, fmt, obj_text, patch_mesh, revolve_profile
from contactcurv.revolution import const_curvature_profile, model_surface


def run(argv, capsys):
    code = run_cli(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_plane_row(capsys):
    code, out, _ = run(["curvature", "--group", "heis", "--surface", "t", "--point", "1,0,0", "--out", "-"], capsys)
    assert code == 0
    assert out.splitlines()[1] == "1,0,0,2,1,-2,0,-1,false"


def test_characteristic_exit(capsys):
    code, _, err = run(["curvature", "--group", "heis", "--surface", "t", "--point", "0,0,0"], capsys)
    assert code == 2
    assert "characteristic point at (0,0,0)" in err


def test_allow_characteristic(capsys):
    code, out, _ = run(["curvature", "--group", "heis", "--surface", "t", "--point", "0,0,0",
                        "--point", "1,0,0", "--allow-characteristic"], capsys)
    assert code == 0
    r = rows(out)
    assert r[0]["characteristic"] == "true" and r[0]["K_h"] == "nan"
    assert r[1]["characteristic"] == "false"


def test_profile_csv(tmp_path, capsys):
    path = tmp_path / "p.csv"
    code, _, _ = run(["profile", "--group", "aa", "--kind", "K", "--target", "-4", "--param", "branch=partial",
                      "--range", "-2,2", "--samples", "101", "--out", str(path)], capsys)
    assert code == 0
    r = rows(path.read_text())
    assert len(r) == 101
    assert max(float(x["residual"]) for x in r if x["residual"] != "nan") < 1e-10


def test_profile_validity_failure(capsys):
    code, _, err = run(["profile", "--group", "heis", "--kind", "Q", "--target", "1", "--param", "c1=0.1",
                        "--range", "0.1,1"], capsys)
    assert code == 2
    assert "validity" in err


@pytest.mark.parametrize("argv", [
    ["curvature", "--group", "heis", "--surface", "t - ", "--point", "1,0,0"],
    ["curvature", "--group", "heis", "--point", "1,0,0"],
    ["curvature", "--bogus"],
    ["curvature", "--group", "heis", "--surface", "t", "--point", "1,0"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 1


def test_parallel_output_is_ordered(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    rng = np.random.default_rng(0)
    data = rng.uniform(0.5, 1.5, size=(40, 2))
    pts.write_text("x,y,t\n" + "\n".join(f"{x},{y},{x * y}" for x, y in data))
    argv = ["curvature", "--group", "heis", "--surface", "t - x*y", "--points", str(pts)]
    one = run(argv + ["--threads", "1"], capsys)[1]
    many = run(argv + ["--threads", "4"], capsys)[1]
    assert one == many
    assert len(rows(one)) == 40


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SRC_CURV_THREADS", "3")
    assert worker_count(None) == 3
    assert worker_count(2) == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("group = heis\nsurface = t\n")
    code, out, _ = run(["curvature", "--config", str(cfg), "--point", "1,0,0"], capsys)
    assert code == 0 and out.splitlines()[1].startswith("1,0,0,2")


def test_family_curvature(capsys):
    r = 0.8
    pt = f"{r},0,{math.sqrt(1 - r ** 4)!r}"
    code, out, _ = run(["curvature", "--family", "koranyi", "--param", "R=1", "--point", pt], capsys)
    assert code == 0
    assert float(rows(out)[0]["H_h"]) == pytest.approx(3 * r)


def test_mesh_family(tmp_path, capsys):
    path = tmp_path / "k.obj"
    code, _, _ = run(["mesh", "--family", "koranyi", "--samples", "10", "--angular", "8", "--out", str(path)], capsys)
    assert code == 0
    text = path.read_text()
    assert text.count("\nv ") + text.startswith("v ") > 0 and "\nf " in text


def test_approx_table(capsys):
    code, out, _ = run(["approx", "--group", "heis", "--surface", "t", "--point", "1,0,0", "--eps", "0.1,0.01"], capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 2 and float(r[1]["K_eps_sigma"]) == pytest.approx(-2, abs=1e-3)


def test_csv_is_deterministic():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(float("nan")) == "nan" and fmt(True) == "true"
    assert csv_text(("a", "b"), [(1.0, 2.5)]) == "a,b\n1,2.5\n"


def test_revolved_mesh_orientation():
    p = const_curvature_profile("heis", "K", 0, {"C": 1, "branch": "+"}, (2.01, 4, 12))
    mesh = revolve_profile(p, 16)
    assert mesh.vertices.shape == (12 * 16, 3)
    assert np.sum(mesh.face_normals()[:, 2] > 0) > len(mesh.faces) / 2
    text = obj_text(mesh, "K = 0")
    assert text.startswith("# K = 0\nv ")
    first_face = next(line for line in text.splitlines() if line.startswith("f "))
    assert min(int(i) for i in first_face.split()[1:]) >= 1


def test_patch_mesh_grid():
    ms = model_surface("heis_cylinder", {"R": 1.0})
    mesh = patch_mesh(ms.patch, *ms.patch_domain, 5, 7)
    assert mesh.faces.shape == (2 * 4 * 6, 3)
