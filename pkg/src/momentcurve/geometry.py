"""Triangle meshes of the two boundary shells and the planar outline.

Each shell is meshed sheet by sheet: the parameter triangle
``{-1 <= s <= t <= 1}`` is gridded with step ``2/m`` and pushed through the
sheet's parametrisation.  Sheets are kept as separate OBJ groups
(``upper_k<k>`` / ``lower_l<l>``) unless welding is requested.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .region import LOWER, UPPER, RegionConfig, SheetIndex


@dataclass
class Mesh:
    vertices: np.ndarray  # (V, 3)
    triangles: np.ndarray  # (T, 3) zero-based
    groups: List[SheetIndex] = field(default_factory=list)  # one per triangle
    # (s, t) parameters of every vertex and the sheet it was generated on
    params: np.ndarray = None
    vertex_sheets: List[SheetIndex] = field(default_factory=list)

    @property
    def group_names(self):
        seen = []
        for g in self.groups:
            name = group_name(g)
            if not seen or seen[-1] != name:
                seen.append(name)
        return seen

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def summary(self):
        lo, hi = self.bbox()
        return {
            "vertices": int(len(self.vertices)),
            "triangles": int(len(self.triangles)),
            "groups": len(self.group_names),
            "bbox_min": lo.tolist(),
            "bbox_max": hi.tolist(),
        }


def group_name(sheet: SheetIndex):
    return f"upper_k{sheet.index}" if sheet.sign == UPPER else f"lower_l{sheet.index}"


def simplex_grid(m: int):
    """Grid points of ``-1 <= s <= t <= 1`` and a triangulation with m^2 faces."""
    if m < 1:
        raise ValueError("subdivision must be >= 1")
    ij = [(i, j) for j in range(m + 1) for i in range(j + 1)]
    index = {p: n for n, p in enumerate(ij)}
    tris = []
    for i, j in ij:
        if j == m:
            continue
        tris.append((index[i, j], index[i, j + 1], index[i + 1, j + 1]))
        if i < j:
            # full square cell below the diagonal
            tris.append((index[i, j], index[i + 1, j + 1], index[i + 1, j]))
    st = np.array([(-1 + 2 * i / m, -1 + 2 * j / m) for i, j in ij])
    return st, np.array(tris, dtype=np.int64)


def sheet_points(n, sheet: SheetIndex, s, t):
    """Lifted parametrisation of one ridge sheet."""
    j, a = sheet.index, sheet.shift
    if sheet.sign == UPPER:
        return np.stack([j * s + t + a, j * s**2 + t**2 + a, j * s**3 + t**3 + a], axis=-1)
    return np.stack([s + j * t - a, s**2 + j * t**2 + a, s**3 + j * t**3 - a], axis=-1)


def _orient(verts, tris, want_up):
    a, b, c = (verts[tris[:, i]] for i in range(3))
    nz = np.cross(b - a, c - a)[:, 2]
    if (nz.sum() > 0) != want_up:
        tris = tris[:, [0, 2, 1]]
    return tris


def shell_mesh(cfg: RegionConfig, m: int = 64, weld: bool = False) -> Mesh:
    st, tris = simplex_grid(m)
    s, t = st[:, 0], st[:, 1]
    n = cfg.n
    verts, faces, groups, params, vsheets = [], [], [], [], []
    offset = 0
    for sign in (UPPER, LOWER):
        for j in range(1, n):
            sheet = SheetIndex(sign, j, n - j - 1)
            pts = sheet_points(n, sheet, s, t)
            f = _orient(pts, tris, want_up=(sign == UPPER))
            verts.append(pts)
            faces.append(f + offset)
            groups += [sheet] * len(f)
            params.append(st)
            vsheets += [sheet] * len(pts)
            offset += len(pts)
    mesh = Mesh(np.vstack(verts), np.vstack(faces), groups, np.vstack(params), vsheets)
    return weld_vertices(mesh) if weld else mesh


def weld_vertices(mesh: Mesh, radius: float = 1e-9) -> Mesh:
    """Merge vertices closer than ``radius``; each cluster keeps its lowest index."""
    nv = len(mesh.vertices)
    pairs = cKDTree(mesh.vertices).query_pairs(radius, output_type="ndarray")
    adj = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(nv, nv))
    _, labels = connected_components(adj, directed=False)
    first = np.full(labels.max() + 1, nv)
    np.minimum.at(first, labels, np.arange(nv))
    keep = np.unique(first)
    new_index = np.searchsorted(keep, first[labels])
    return Mesh(
        mesh.vertices[keep],
        new_index[mesh.triangles],
        mesh.groups,
        mesh.params[keep],
        [mesh.vertex_sheets[i] for i in keep],
    )


def write_obj(mesh: Mesh, fh):
    for x, y, z in mesh.vertices:
        fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
    current = None
    for sheet, tri in zip(mesh.groups, mesh.triangles):
        name = group_name(sheet)
        if name != current:
            fh.write(f"g {name}\n")
            current = name
        fh.write("f {} {} {}\n".format(*(int(i) + 1 for i in tri)))


# --------------------------------------------------------------------------
# planar outline


@dataclass
class Arc:
    name: str
    s: np.ndarray
    xy: np.ndarray  # (N, 2)


@dataclass
class Outline:
    n: int
    boundary: List[Arc]
    seams: List[Arc]

    @property
    def arcs(self):
        return self.boundary + self.seams

    def summary(self):
        return {
            "arcs": len(self.boundary),
            "seams": len(self.seams),
            "points": int(sum(len(a.s) for a in self.arcs)),
        }


def bflat_outline(cfg: RegionConfig, samples_per_arc: int = 64) -> Outline:
    """Boundary arcs of the planar region plus the seams between upper sheets.

    The boundary is the parabola ``n (s, s^2)`` together with the ``n`` arcs
    ``i (-1, 1) + (t, t^2) + (n - i - 1)(1, 1)``; seam ``k`` is the image of
    ``(k + 1)(s, s^2) + (n - k - 1)(1, 1)`` where sheets k and k + 1 meet.
    """
    if samples_per_arc < 2:
        raise ValueError("samples_per_arc must be >= 2")
    n = cfg.n
    s = np.linspace(-1.0, 1.0, samples_per_arc)
    curve = np.stack([s, s * s], axis=1)
    boundary = [Arc("lower", s, n * curve)]
    for i in range(n):
        boundary.append(Arc(f"upper_i{i}", s, curve + i * np.array([-1.0, 1.0]) + (n - i - 1)))
    seams = [Arc(f"seam_k{k}", s, (k + 1) * curve + (n - k - 1)) for k in range(1, n - 1)]
    return Outline(n, boundary, seams)


def write_outline_csv(outline: Outline, fh):
    fh.write("arc,s,x,y\n")
    for arc in outline.arcs:
        for sv, (x, y) in zip(arc.s, arc.xy):
            fh.write(f"{arc.name},{sv:.17g},{x:.17g},{y:.17g}\n")


def write_outline_svg(outline: Outline, fh, size=600):
    n = outline.n
    x0, w = -n - 0.5, 2 * n + 1
    y0, h = -0.5, n + 1
    fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    fh.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
        f'height="{size * h / w:.0f}" viewBox="{x0} {y0} {w} {h}">\n'
    )
    # flip y so the parabola opens upwards
    fh.write(f'<g transform="translate(0 {2 * y0 + h}) scale(1 -1)" fill="none" stroke-width="0.02">\n')
    for arc in outline.arcs:
        d = "M " + " L ".join(f"{x:.6f} {y:.6f}" for x, y in arc.xy)
        colour = "#888888" if arc.name.startswith("seam") else "#000000"
        dash = ' stroke-dasharray="0.08 0.05"' if arc.name.startswith("seam") else ""
        fh.write(f'<path id="{arc.name}" d="{d}" stroke="{colour}"{dash}/>\n')
    fh.write("</g>\n</svg>\n")
