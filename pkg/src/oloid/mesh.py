"""Watertight triangulation of the oloid, polyhedral mass properties and
STL/OBJ export.

The surface grid is indexed by ``i`` along ``m`` and ``j`` along ``t``. Seams
are welded by bookkeeping rather than by position:

* ``m = 0`` row and the ``t = +-2pi/3`` columns lie in ``z = 0`` and are shared
  by both sheets;
* the ``m = 1`` row of each sheet covers the circle-2 arc twice
  (``t`` and ``-t`` coincide);
* the four ``(m = 1, t = +-2pi/3)`` corners are the single apex.

Mesh coordinates carry no units; they are in the length unit of
``OloidSpec.radius``.
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .core import ContractError, DomainError, MassProperties, Method, OloidSpec, TessellationError
from .surface import T_MAX, Sheet, position


@dataclass
class TriangleMesh:
    vertices: np.ndarray            # (V, 3) float
    triangles: np.ndarray           # (F, 3) int, counter-clockwise seen from outside
    provenance: list = field(default_factory=list)   # per-vertex (m, t, sheet or None)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edges(self) -> np.ndarray:
        tri = self.triangles
        return np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])

    def _edge_keys(self, directed: bool) -> np.ndarray:
        e = self.edges().astype(np.int64)
        if not directed:
            e = np.sort(e, axis=1)
        return e[:, 0] * (int(e.max(initial=0)) + 1) + e[:, 1]

    def is_watertight(self) -> bool:
        """Every edge used exactly twice, once in each direction."""
        if self.n_triangles == 0:
            return False
        _, counts = np.unique(self._edge_keys(False), return_counts=True)
        if not np.all(counts == 2):
            return False
        _, dcounts = np.unique(self._edge_keys(True), return_counts=True)
        return bool(np.all(dcounts == 1))

    def euler_characteristic(self) -> int:
        n_edges = len(np.unique(self._edge_keys(False)))
        n_used = len(np.unique(self.triangles))
        return n_used - n_edges + self.n_triangles

    def face_normals(self, unit: bool = True) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        n = np.cross(b - a, c - a)
        if unit:
            n = n / np.linalg.norm(n, axis=1, keepdims=True)
        return n

    def signed_volume(self) -> float:
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)

    def convexity_defect(self) -> float:
        """Largest height of any vertex above any face plane (0 for convex)."""
        return float(_convexity_defects(self).max())


@dataclass(frozen=True)
class MeshConfig:
    n_m: int = 64
    n_t: int = 128
    weld_tolerance: float = 1e-9

    def __post_init__(self):
        if self.n_m < 2:
            raise DomainError("n_m must be >= 2")
        if self.n_t < 4 or self.n_t % 2:
            raise DomainError("n_t must be even and >= 4")
        if not self.weld_tolerance > 0:
            raise DomainError("weld_tolerance must be > 0")


def _partner(t):
    """Ruling exchanged with ``t`` by the symmetry swapping the two circles."""
    c = np.cos(t)
    return np.arccos(np.clip(-c / (1.0 + c), -1.0, 1.0))


def half_t_grid(k_max: int) -> np.ndarray:
    """Nodes ``0 = t_0 < ... < t_K = 2pi/3`` closed under ``t -> partner(t)``.

    ``t_k`` solves ``t / (t + partner(t)) = k / K``; the left side increases
    from 0 to 1 and maps to ``1 - u`` under the partner map, so
    ``partner(t_k) = t_{K-k}``.
    """
    u = np.arange(k_max + 1) / k_max
    lo, hi = np.zeros_like(u), np.full_like(u, T_MAX)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = mid / (mid + _partner(mid)) < u
        lo, hi = np.where(below, mid, lo), np.where(below, hi, mid)
        if np.all(hi - lo <= 0):
            break
    t = 0.5 * (lo + hi)
    half = (k_max + 1) // 2
    t[k_max - np.arange(half)] = _partner(t[:half])
    t[0], t[-1] = 0.0, T_MAX
    return t


def tessellate(spec: OloidSpec | None = None, cfg: MeshConfig | None = None) -> TriangleMesh:
    spec = spec or OloidSpec()
    cfg = cfg or MeshConfig()
    n_m, n_t = cfg.n_m, cfg.n_t
    mid = n_t // 2
    half = half_t_grid(mid)
    ks = np.abs(np.arange(n_t + 1) - mid)
    t_grid = np.sign(np.arange(n_t + 1) - mid) * half[ks]
    gaps = T_MAX - half[ks]
    gaps[[0, n_t]] = 0.0
    m_grid = np.arange(n_m + 1) / n_m

    index: dict = {}
    verts: list = []
    prov: list = []
    grid_ids = np.empty((2, n_m + 1, n_t + 1), dtype=np.int64)
    # every occurrence of a canonical key must land within weld_tolerance
    worst_seam = 0.0

    for s_idx, sheet in enumerate((Sheet.UPPER, Sheet.LOWER)):
        pts = position(m_grid[:, None], t_grid[None, :], sheet, spec, gap=gaps[None, :])
        for i in range(n_m + 1):
            for j in range(n_t + 1):
                if j in (0, n_t):
                    key = ("apex",) if i == n_m else ("edge", i, j)
                elif i == 0:
                    key = ("circle1", j)
                elif i == n_m:
                    key = ("circle2", s_idx, ks[j])
                else:
                    key = ("interior", s_idx, i, j)
                p = pts[i, j]
                if key in index:
                    vid = index[key]
                    worst_seam = max(worst_seam, float(np.linalg.norm(verts[vid] - p)))
                else:
                    vid = index[key] = len(verts)
                    verts.append(p)
                    sh = None if key[0] in ("apex", "edge", "circle1") else sheet
                    prov.append((m_grid[i], t_grid[j], sh))
                grid_ids[s_idx, i, j] = vid

    if worst_seam > cfg.weld_tolerance:
        raise TessellationError(f"seam points differ by {worst_seam:.3g} > weld_tolerance")
    vertices = np.array(verts)
    close = cKDTree(vertices).query_pairs(cfg.weld_tolerance)
    if close:
        raise TessellationError(f"{len(close)} distinct vertices closer than weld_tolerance")

    tris = []
    for s_idx, sheet in enumerate((Sheet.UPPER, Sheet.LOWER)):
        g = grid_ids[s_idx]
        v00, v10 = g[:-1, :-1], g[1:, :-1]
        v01, v11 = g[:-1, 1:], g[1:, 1:]
        # split along the diagonal joining the higher |t|-index at m_i to the
        # lower one at m_{i+1}: invariant under all three symmetries, and never
        # builds a triangle from three sheet-shared seam vertices
        right = (np.arange(n_t) < mid)[None, :]
        t1 = np.where(right[..., None], np.stack([v00, v10, v11], -1), np.stack([v00, v10, v01], -1))
        t2 = np.where(right[..., None], np.stack([v00, v11, v01], -1), np.stack([v10, v11, v01], -1))
        block = np.concatenate([t1.reshape(-1, 3), t2.reshape(-1, 3)])
        if sheet is Sheet.LOWER:
            block = block[:, ::-1]
        tris.append(block)
    triangles = np.concatenate(tris)
    degenerate = ((triangles[:, 0] == triangles[:, 1]) | (triangles[:, 1] == triangles[:, 2])
                  | (triangles[:, 0] == triangles[:, 2]))
    triangles = triangles[~degenerate]
    return TriangleMesh(vertices, triangles, prov)


def _convexity_defects(mesh: TriangleMesh, chunk: int = 8192) -> np.ndarray:
    """Per face: ``max_v n.v - n.a`` with ``n`` the unit face normal.

    A linear function attains its maximum over the vertices at a vertex of
    their convex hull, so only hull vertices are scanned.
    """
    V = mesh.vertices
    n = mesh.face_normals()
    hv = V[ConvexHull(V).vertices]
    best = np.empty(len(n))
    for lo in range(0, len(n), chunk):
        best[lo:lo + chunk] = (n[lo:lo + chunk] @ hv.T).max(axis=1)
    a = V[mesh.triangles[:, 0]]
    return best - np.einsum("ij,ij->i", n, a)


def mesh_mass_properties(mesh: TriangleMesh, density: float = 1.0) -> MassProperties:
    """Exact polyhedral properties via signed tetrahedra against the origin."""
    if not mesh.is_watertight():
        raise ContractError("mesh is not watertight")
    V, T = mesh.vertices, mesh.triangles
    a, b, c = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
    det = np.einsum("ij,ij->i", a, np.cross(b, c))
    volume = det.sum() / 6.0
    if volume <= 0:
        raise ContractError("mesh is not outward oriented")
    s = a + b + c
    first = (det[:, None] * s).sum(axis=0) / 24.0
    # int x_i x_j over tet (0,a,b,c) = det/120 * (sum_k v_ki v_kj + s_i s_j)
    vv = (np.einsum("ni,nj->nij", a, a) + np.einsum("ni,nj->nij", b, b)
          + np.einsum("ni,nj->nij", c, c) + np.einsum("ni,nj->nij", s, s))
    second = (det[:, None, None] * vv).sum(axis=0) / 120.0
    inertia = density * (np.trace(second) * np.eye(3) - second)
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1).sum()
    return MassProperties(
        area=float(area),
        volume=float(volume),
        center_of_mass=first / volume,
        inertia=inertia,
        method=Method.MESH,
        density=density,
        metadata={"vertices": mesh.n_vertices, "triangles": mesh.n_triangles},
    )


_STL_RECORD = np.dtype([("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")])


def _open_dest(destination):
    if isinstance(destination, (str, os.PathLike)):
        return open(destination, "wb"), True
    return destination, False


def export_mesh(mesh: TriangleMesh, format: str, destination) -> int:
    """Write ``mesh`` as ``"stl_binary"`` (alias ``"stl"``) or ``"obj"``; returns bytes written."""
    fmt = {"stl": "stl_binary"}.get(format, format)
    if fmt == "stl_binary":
        rec = np.zeros(mesh.n_triangles, dtype=_STL_RECORD)
        rec["normal"] = mesh.face_normals()
        rec["v"] = mesh.vertices[mesh.triangles]
        header = b"oloid binary STL".ljust(80, b" ")
        payload = header + struct.pack("<I", mesh.n_triangles) + rec.tobytes()
    elif fmt == "obj":
        buf = io.StringIO()
        buf.write(f"# oloid mesh: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles\n")
        for x, y, z in mesh.vertices:
            buf.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for i, j, k in mesh.triangles + 1:
            buf.write(f"f {i} {j} {k}\n")
        payload = buf.getvalue().encode("ascii")
    else:
        raise DomainError(f"unknown mesh format {format!r}")
    fh, owned = _open_dest(destination)
    try:
        fh.write(payload)
    finally:
        if owned:
            fh.close()
    return len(payload)


def load_obj(source) -> TriangleMesh:
    text = source.read() if hasattr(source, "read") else open(source).read()
    if isinstance(text, bytes):
        text = text.decode("ascii")
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    return TriangleMesh(np.array(verts, dtype=float), np.array(faces, dtype=np.int64))


def load_stl(source) -> tuple[np.ndarray, np.ndarray]:
    """Normals and ``(F, 3, 3)`` triangle corners from a binary STL."""
    data = source.read() if hasattr(source, "read") else open(source, "rb").read()
    if len(data) < 84:
        raise ContractError("STL shorter than its header")
    (count,) = struct.unpack_from("<I", data, 80)
    if 84 + count * _STL_RECORD.itemsize != len(data):
        raise ContractError("STL size does not match its triangle count")
    rec = np.frombuffer(data, dtype=_STL_RECORD, count=count, offset=84)
    return rec["normal"].astype(float), rec["v"].astype(float)


def convergence_table(spec: OloidSpec | None = None, levels=((16, 32), (32, 64), (64, 128))):
    """Mesh volume and I_xx for a sequence of resolutions."""
    rows = []
    for n_m, n_t in levels:
        mp = mesh_mass_properties(tessellate(spec, MeshConfig(n_m, n_t)), (spec or OloidSpec()).density)
        rows.append({"n_m": n_m, "n_t": n_t, "volume": mp.volume, "Ixx": mp.inertia[0, 0]})
    return rows


__all__ = [
    "MeshConfig", "TriangleMesh", "tessellate", "mesh_mass_properties", "export_mesh",
    "load_obj", "load_stl", "half_t_grid", "convergence_table",
]
