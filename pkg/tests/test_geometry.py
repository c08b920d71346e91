import io

import numpy as np
import pytest

from momentcurve.geometry import (
    bflat_outline,
    sheet_points,
    shell_mesh,
    simplex_grid,
    weld_vertices,
    write_obj,
    write_outline_csv,
    write_outline_svg,
)
from momentcurve.kernel import eval_f
from momentcurve.region import UPPER, RegionConfig, SheetIndex, bflat_status_many, member_many


@pytest.mark.parametrize("m", [1, 2, 5, 16])
def test_simplex_grid_counts(m):
    st, tris = simplex_grid(m)
    assert len(st) == (m + 1) * (m + 2) // 2
    assert len(tris) == m * m
    assert np.all(st[:, 0] <= st[:, 1])
    # no degenerate triangles
    a, b, c = (st[tris[:, i]] for i in range(3))
    u, v = b - a, c - a
    area = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    assert np.all(np.abs(area) > 0)


def test_mesh_small():
    mesh = shell_mesh(RegionConfig(3), 1)
    assert len(mesh.vertices) == 12 and len(mesh.triangles) == 4
    mesh = shell_mesh(RegionConfig(3), 2)
    assert len(mesh.vertices) == 24 and len(mesh.triangles) == 16


def _unshifted_residual(mesh):
    out = []
    for v, sh in zip(mesh.vertices, mesh.vertex_sheets):
        if sh.sign == UPPER:
            q = v - sh.shift * np.array([1.0, 1.0, 1.0])
            out.append(abs(eval_f(sh.index, 1, *q)))
        else:
            q = v - sh.shift * np.array([-1.0, 1.0, -1.0])
            out.append(abs(eval_f(1, sh.index, *q)))
    return np.array(out)


def test_mesh_invariants_n5():
    n = 5
    cfg = RegionConfig(n)
    mesh = shell_mesh(cfg, 16)
    assert mesh.triangles.min() >= 0 and mesh.triangles.max() < len(mesh.vertices)
    assert np.all(_unshifted_residual(mesh) <= 1e-8 * n**6)
    assert member_many(cfg, mesh.vertices).all()
    assert mesh.group_names == [f"upper_k{k}" for k in range(1, n)] + [f"lower_l{l}" for l in range(1, n)]


def test_orientation():
    mesh = shell_mesh(RegionConfig(4), 8)
    v, t = mesh.vertices, mesh.triangles
    nz = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])[:, 2]
    upper = np.array([g.sign == UPPER for g in mesh.groups])
    assert nz[upper].sum() > 0 and nz[~upper].sum() < 0


def test_corner_vertex():
    p = sheet_points(5, SheetIndex(UPPER, 1, 3), np.array(1.0), np.array(1.0))
    assert np.allclose(p, (5, 5, 5), atol=1e-12)


def test_seams_are_watertight():
    # s = t edge of upper sheet k meets the t = 1 edge of sheet k + 1
    n, s = 6, np.linspace(-1, 1, 33)
    for k in range(1, n - 1):
        a = sheet_points(n, SheetIndex(UPPER, k, n - k - 1), s, s)
        b = sheet_points(n, SheetIndex(UPPER, k + 1, n - k - 2), s, np.ones_like(s))
        assert np.allclose(a, b, atol=1e-12)


def test_weld_merges_seams():
    mesh = shell_mesh(RegionConfig(4), 4)
    welded = weld_vertices(mesh)
    assert len(welded.vertices) < len(mesh.vertices)
    assert len(welded.triangles) == len(mesh.triangles)
    assert np.allclose(welded.vertices[welded.triangles], mesh.vertices[mesh.triangles], atol=1e-9)


def test_obj_format():
    mesh = shell_mesh(RegionConfig(3), 1)
    buf = io.StringIO()
    write_obj(mesh, buf)
    lines = buf.getvalue().split("\n")
    assert lines[0].startswith("v ")
    assert sum(l.startswith("v ") for l in lines) == 12
    assert [l for l in lines if l.startswith("g ")] == ["g upper_k1", "g upper_k2", "g lower_l1", "g lower_l2"]
    faces = [list(map(int, l.split()[1:])) for l in lines if l.startswith("f ")]
    assert min(min(f) for f in faces) == 1 and max(max(f) for f in faces) == 12
    assert "\r" not in buf.getvalue()


def test_outline_examples():
    o = bflat_outline(RegionConfig(3), 2)
    assert (len(o.boundary), len(o.seams)) == (4, 1)
    lower = o.boundary[0].xy
    assert lower[0] == pytest.approx((-3, 3)) and lower[-1] == pytest.approx((3, 3))
    o = bflat_outline(RegionConfig(6), 10)
    assert (len(o.boundary), len(o.seams)) == (7, 4)


def test_outline_points_not_outside():
    for n in (3, 6, 9):
        cfg = RegionConfig(n)
        o = bflat_outline(cfg, 40)
        xy = np.vstack([a.xy for a in o.arcs])
        inside, edge = bflat_status_many(cfg, xy)
        assert np.all(inside | edge)
        assert np.all(np.vstack([bflat_status_many(cfg, a.xy)[1] for a in o.boundary]))


def test_outline_writers():
    o = bflat_outline(RegionConfig(4), 5)
    buf = io.StringIO()
    write_outline_csv(o, buf)
    rows = buf.getvalue().strip().split("\n")
    assert rows[0] == "arc,s,x,y" and len(rows) == 1 + 5 * 7
    buf = io.StringIO()
    write_outline_svg(o, buf)
    svg = buf.getvalue()
    assert 'viewBox="-4.5 -0.5 9 5"' in svg
    assert svg.count("<path") == 7


def test_shell_separation_and_bijectivity():
    from scipy.spatial import cKDTree

    from momentcurve.region import z_range_many

    cfg = RegionConfig(5)
    mesh = shell_mesh(cfg, 12)
    upper = np.array([sh.sign == UPPER for sh in mesh.vertex_sheets])
    for side in (upper, ~upper):
        v = mesh.vertices[side]
        pairs = cKDTree(v[:, :2]).query_pairs(1e-7, output_type="ndarray")
        assert np.allclose(v[pairs[:, 0]], v[pairs[:, 1]], atol=1e-9)
    xy = mesh.vertices[upper][:, :2]
    inside, edge = bflat_status_many(cfg, xy)
    zm, zp, _, _, ok = z_range_many(cfg, xy[inside & ~edge])
    assert ok.all()
    assert np.all(zp - zm > cfg.tol.eps)
