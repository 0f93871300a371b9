"""CSV and OBJ writers, and triangle meshes of model surfaces and profiles.

CSV numbers use 17 significant digits so identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .errors import ContactCurvError, PreconditionError

__all__ = [
    "fmt",
    "csv_text",
    "curvature_rows",
    "CURVATURE_COLUMNS",
    "PROFILE_COLUMNS",
    "profile_rows",
    "convergence_rows",
    "Mesh",
    "patch_mesh",
    "revolve_profile",
    "obj_text",
]

CURVATURE_COLUMNS = ("x1", "x2", "x3", "l", "Tu", "K_h", "H_h", "Q_h", "characteristic")
PROFILE_COLUMNS = ("s", "f", "fprime", "K", "H", "Q", "residual")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def curvature_rows(points, reports):
    """Rows for CURVATURE_COLUMNS; a None report marks a characteristic point."""
    rows = []
    for p, rep in zip(points, reports):
        if rep is None:
            rows.append((*p, 0.0, math.nan, math.nan, math.nan, math.nan, True))
        else:
            hd = rep.horizontal
            rows.append((*p, hd.l, hd.tu, rep.K_h, rep.H_h, rep.Q_h, False))
    return rows


def profile_rows(profile):
    from .revolution import profile_curvatures

    K, H, Q = profile_curvatures(profile)
    res = np.abs({"K": K, "H": H, "Q": Q}[profile.kind] - profile.target)
    return [(s, f, g, k, h, q, r) for (s, f, g), k, h, q, r in zip(profile.samples, K, H, Q, res)]


def convergence_rows(table):
    return list(table.rows)


class Mesh:
    """Vertices (n x 3) and 0-based triangles (m x 3)."""

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces, dtype=int).reshape(-1, 3)

    def face_normals(self):
        v = self.vertices
        a, b, c = v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]
        return np.cross(b - a, c - a)

    def flipped(self):
        return Mesh(self.vertices, self.faces[:, ::-1])


def _grid_faces(n_s, n_phi):
    faces = []
    for i in range(n_s - 1):
        for j in range(n_phi - 1):
            a = i * n_phi + j
            b = a + n_phi
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return faces


def _orient(mesh: Mesh, normal_at) -> Mesh:
    """Flip all faces if most of them disagree with the supplied normal field."""
    if normal_at is None:
        return mesh
    fn = mesh.face_normals()
    votes = 0.0
    for face, nrm in zip(mesh.faces, fn):
        centre = mesh.vertices[face].mean(axis=0)
        try:
            ref = normal_at(centre)
        except (ContactCurvError, ValueError, ZeroDivisionError):
            continue
        votes += np.sign(np.dot(nrm, ref))
    return mesh.flipped() if votes < 0 else mesh


def patch_mesh(patch, s_range, phi_range, n_s, n_phi, normal_at=None, inset=1e-3) -> Mesh:
    """Triangulate a parametric patch on a grid.

    The s-range is pulled in by ``inset`` of its length at both ends so patch
    boundaries (poles, removable singularities) are not evaluated.
    """
    if n_s < 2 or n_phi < 2:
        raise PreconditionError("mesh needs at least 2 nodes in each direction")
    s0, s1 = s_range
    d = inset * (s1 - s0)
    ss = np.linspace(s0 + d, s1 - d, n_s)
    ps = np.linspace(phi_range[0], phi_range[1], n_phi)
    verts = [patch(s, p) for s in ss for p in ps]
    return _orient(Mesh(verts, _grid_faces(n_s, n_phi)), normal_at)


def revolve_profile(profile, n_angular) -> Mesh:
    """Mesh of the surface of revolution traced by a profile.

    Heisenberg profiles are revolved as (r cos th, r sin th, f(r)).  In the
    affine-additive group the symmetry is the scaling (a, d l, d t), so the
    grid is (rho, l) with vertices (f(rho), l, rho l) for l in [1/2, 2].
    """
    s, f = profile.s, profile.f
    if profile.group == "heisenberg":
        th = np.linspace(0.0, 2 * math.pi, n_angular)
        verts = [(r * math.cos(t), r * math.sin(t), fr) for r, fr in zip(s, f) for t in th]
        mesh = Mesh(verts, _grid_faces(len(s), n_angular))

        def normal(p):
            # gradient of u = t - f(r) has positive t-component
            return np.array([0.0, 0.0, 1.0])
    else:
        lam = np.linspace(0.5, 2.0, n_angular)
        verts = [(fr, l, rho * l) for rho, fr in zip(s, f) for l in lam]
        mesh = Mesh(verts, _grid_faces(len(s), n_angular))

        def normal(p):
            # gradient of u = a - f(t / l) has a-component 1
            return np.array([1.0, 0.0, 0.0])
    return _orient(mesh, normal)


def obj_text(mesh: Mesh, comment=None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines += [f"v {fmt(x)} {fmt(y)} {fmt(z)}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return "\n".join(lines) + "\n"
