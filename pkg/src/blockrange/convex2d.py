"""Planar convex geometry on a shared angle grid.

Regions are stored canonically: a counterclockwise vertex polygon plus the
support values ``h[j] = max Re(x * conj(d_j))`` over the grid directions
``d_j = exp(2 pi i j / K)``.  The support vector is always recomputed from
the vertices, so the two views can never drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError, cKDTree

from .errors import EmptyInput, EmptyIntersection, NotNested

DEFAULT_GRID = 360
_QHULL_CUTOVER = 4096
_CHUNK = 4096


def grid_angles(k: int) -> np.ndarray:
    """The shared angle grid theta_j = 2 pi j / k, j = 0..k-1."""
    if k < 3:
        raise ValueError(f"angle grid needs at least 3 directions, got {k}")
    return 2.0 * np.pi * np.arange(k) / k


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def _merge_coincident(pts: np.ndarray) -> np.ndarray:
    """Collapse points that agree to ~1e-14 relative (keeps originals)."""
    eps = 1e-14 * max(1.0, float(np.abs(pts).max()))
    snapped = np.round(pts.real / eps) * eps + 1j * (np.round(pts.imag / eps) * eps)
    _, idx = np.unique(snapped, return_index=True)
    return np.unique(pts[idx])


def _chain_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull of a complex point array, counterclockwise.

    Exactly collinear interior points are dropped; the pop test is strict
    (no tolerance) because for nearly collinear clouds the lexicographic
    sweep order need not match the geometric order along the line, and a
    toleranced pop can then discard a true endpoint.
    """
    pts = _merge_coincident(np.unique(np.asarray(points, dtype=np.complex128).ravel()))
    if pts.size <= 2:
        return pts

    def half(seq):
        out: list[complex] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1], dtype=np.complex128)
    return hull if hull.size else pts[:1]


def _hull_vertices(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size > _QHULL_CUTOVER:
        xy = np.column_stack([pts.real, pts.imag])
        try:
            qh = _QHull(xy)
            # Re-run the chain on qhull's candidate corners: this restores
            # the canonical ordering/dedup rules and drops collinear output.
            return _chain_hull(pts[qh.vertices])
        except QhullError:
            pass  # flat input; the chain handles it
    return _chain_hull(pts)


def _supports_of(vertices: np.ndarray, k: int) -> np.ndarray:
    dirs = np.exp(1j * grid_angles(k))
    return np.max(np.real(vertices[:, None] * dirs[None, :].conj()), axis=0)


@dataclass(frozen=True)
class PointCloud:
    """Finite sample of a planar compact set, with a resolution radius.

    Every point of the represented set is within ``resolution`` of the
    sample (and the sample lies in the set up to the same slack).
    """

    points: np.ndarray
    resolution: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128).ravel()
        if pts.size == 0:
            raise EmptyInput("a point cloud must contain at least one point")
        if not np.all(np.isfinite(pts.view(np.float64))):
            raise ValueError("cloud points must be finite")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        res = float(self.resolution)
        if res < 0 or not np.isfinite(res):
            raise ValueError(f"resolution must be a finite non-negative float, got {res}")
        object.__setattr__(self, "resolution", res)

    def __len__(self) -> int:
        return int(self.points.size)


@dataclass(frozen=True)
class ConvexWeights:
    """Finitely supported convex coefficients (non-negative, summing to one)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise EmptyInput("convex weights need at least one coefficient")
        if np.any(w < -1e-12) or not np.all(np.isfinite(w)):
            raise ValueError("convex weights must be non-negative and finite")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"convex weights sum to {total}, expected 1")
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class ConvexRegion:
    """Compact convex region: CCW vertices plus grid support values."""

    vertices: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.complex128).ravel())
        h = np.ascontiguousarray(np.asarray(self.support, dtype=np.float64).ravel())
        if v.size == 0:
            raise EmptyInput("a convex region needs at least one vertex")
        v.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "support", h)

    # -- construction ----------------------------------------------------

    @classmethod
    def _build(cls, vertices: np.ndarray, grid: int) -> "ConvexRegion":
        return cls(vertices, _supports_of(vertices, grid))

    @classmethod
    def from_points(cls, points, grid: int = DEFAULT_GRID) -> "ConvexRegion":
        """Convex hull of a point set, canonicalised onto the angle grid."""
        pts = np.asarray(points, dtype=np.complex128).ravel()
        if pts.size == 0:
            raise EmptyInput("cannot take the hull of an empty point set")
        return cls._build(_hull_vertices(pts), grid)

    @classmethod
    def from_cloud(cls, cloud: PointCloud, grid: int = DEFAULT_GRID) -> "ConvexRegion":
        return cls.from_points(cloud.points, grid)

    @classmethod
    def from_support(cls, support, grid: int | None = None) -> "ConvexRegion":
        """Region carved out by supporting lines on the full angle grid.

        ``support`` must be a genuine support function sampled on the grid
        (as produced by eigenvalue probing).  For such input the vertices of
        the intersection of all halfplanes are exactly the intersections of
        angularly consecutive supporting lines, so no general halfplane
        machinery is needed.
        """
        h = np.asarray(support, dtype=np.float64).ravel()
        k = h.size if grid is None else grid
        if h.size != k:
            raise ValueError(f"support has {h.size} entries, expected {k}")
        th = grid_angles(k)
        th_next = np.roll(th, -1)
        th_next[-1] += 2.0 * np.pi
        h_next = np.roll(h, -1)
        det = np.sin(th_next - th)
        vx = (h * np.sin(th_next) - h_next * np.sin(th)) / det
        vy = (h_next * np.cos(th) - h * np.cos(th_next)) / det
        cand = vx + 1j * vy
        return cls._build(_hull_vertices(cand), k)

    # -- basic geometry --------------------------------------------------

    @property
    def grid_size(self) -> int:
        return int(self.support.size)

    @property
    def diameter(self) -> float:
        v = self.vertices
        if v.size == 1:
            return 0.0
        d = np.abs(v[:, None] - v[None, :])
        return float(d.max())

    def centroid(self) -> complex:
        return complex(self.vertices.mean())

    def translate(self, z: complex) -> "ConvexRegion":
        return ConvexRegion._build(self.vertices + z, self.grid_size)

    def support_excess(self, points) -> np.ndarray:
        """How far each point pokes outside the supporting halfplanes.

        Non-positive (up to fp) exactly when the point lies in the region;
        for outside points this is a lower bound for the true distance.
        """
        pts = np.asarray(points, dtype=np.complex128).ravel()
        dirs = np.exp(1j * grid_angles(self.grid_size)).conj()
        out = np.empty(pts.size, dtype=np.float64)
        for lo in range(0, pts.size, _CHUNK):
            hi = min(lo + _CHUNK, pts.size)
            proj = np.real(pts[lo:hi, None] * dirs[None, :])
            out[lo:hi] = np.max(proj - self.support[None, :], axis=1)
        return out

    def contains(self, points, tol: float = 1e-9) -> np.ndarray:
        return self.support_excess(points) <= tol

    def distance(self, points) -> np.ndarray:
        """Exact Euclidean distance from each point to the region (0 inside)."""
        pts = np.asarray(points, dtype=np.complex128).ravel()
        v = self.vertices
        if v.size == 1:
            return np.abs(pts - v[0])
        a = v
        b = np.roll(v, -1)
        ab = b - a
        ab2 = np.maximum(np.abs(ab) ** 2, 1e-300)
        out = np.empty(pts.size, dtype=np.float64)
        for lo in range(0, pts.size, _CHUNK):
            hi = min(lo + _CHUNK, pts.size)
            p = pts[lo:hi]
            ap = p[:, None] - a[None, :]
            t = np.clip((ap * ab.conj()[None, :]).real / ab2[None, :], 0.0, 1.0)
            d_edge = np.abs(ap - t * ab[None, :]).min(axis=1)
            if v.size > 2:
                cross = ab.real[None, :] * ap.imag - ab.imag[None, :] * ap.real
                inside = np.all(cross >= 0.0, axis=1)
                d_edge = np.where(inside, 0.0, d_edge)
            out[lo:hi] = d_edge
        return out

    def boundary_samples(self, max_spacing: float) -> np.ndarray:
        """Vertices plus enough edge subdivisions to hit the given spacing."""
        v = self.vertices
        if v.size == 1:
            return v.copy()
        if max_spacing <= 0:
            raise ValueError("max_spacing must be positive")
        pieces = []
        nxt = np.roll(v, -1)
        for a, b in zip(v, nxt):
            n = max(1, int(np.ceil(abs(b - a) / max_spacing)))
            t = np.arange(n) / n
            pieces.append(a + t * (b - a))
        return np.concatenate(pieces)

    def area_samples(self, max_spacing: float) -> np.ndarray:
        """Boundary samples plus an interior grid at the given spacing."""
        bnd = self.boundary_samples(max_spacing)
        v = self.vertices
        if v.size <= 2:
            return bnd
        xs = np.arange(v.real.min(), v.real.max() + max_spacing, max_spacing)
        ys = np.arange(v.imag.min(), v.imag.max() + max_spacing, max_spacing)
        gx, gy = np.meshgrid(xs, ys)
        grid = (gx + 1j * gy).ravel()
        keep = grid[self.contains(grid, tol=1e-12)]
        return np.concatenate([bnd, keep])


# -- hulls and distances ------------------------------------------------


def convex_hull(points, grid: int = DEFAULT_GRID) -> ConvexRegion:
    """Convex hull of a cloud or raw complex array as a canonical region."""
    if isinstance(points, PointCloud):
        points = points.points
    return ConvexRegion.from_points(points, grid)


def _directed_region(a: ConvexRegion, b: ConvexRegion) -> float:
    return float(b.distance(a.vertices).max())


def _cloud_points(x) -> np.ndarray:
    return x.points if isinstance(x, PointCloud) else np.asarray(x, complex).ravel()


def hausdorff(a, b) -> float:
    """Hausdorff distance between regions and/or clouds.

    Region-region and cloud-cloud cases are exact (up to fp).  The mixed
    case samples the region at a spacing tied to its diameter, so it
    carries a small extra sampling error.
    """
    a_region = isinstance(a, ConvexRegion)
    b_region = isinstance(b, ConvexRegion)
    if a_region and b_region:
        return max(_directed_region(a, b), _directed_region(b, a))
    if not a_region and not b_region:
        pa = _cloud_points(a)
        pb = _cloud_points(b)
        ta = cKDTree(np.column_stack([pa.real, pa.imag]))
        tb = cKDTree(np.column_stack([pb.real, pb.imag]))
        d_ab = tb.query(np.column_stack([pa.real, pa.imag]))[0].max()
        d_ba = ta.query(np.column_stack([pb.real, pb.imag]))[0].max()
        return float(max(d_ab, d_ba))
    region, cloud = (a, b) if a_region else (b, a)
    pts = _cloud_points(cloud)
    to_region = float(region.distance(pts).max())
    spacing = max(region.diameter, np.abs(pts).max(), 1e-9) / 256.0
    samples = region.area_samples(spacing)
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    from_region = float(tree.query(np.column_stack([samples.real, samples.imag]))[0].max())
    return max(to_region, from_region)


# -- halfplane intersection --------------------------------------------


def _clip_by_halfplane(verts: np.ndarray, d: complex, h: float, tol: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a CCW polygon by Re(x conj(d)) <= h."""
    f = np.real(verts * np.conj(d)) - h
    if np.all(f <= tol):
        return verts
    if np.all(f >= -tol):
        # Entire polygon sits on or outside the line: keep its trace.
        keep = verts[f <= tol]
        return keep
    n = verts.size
    out: list[complex] = []
    for i in range(n):
        j = (i + 1) % n
        fi, fj = f[i], f[j]
        if fi <= tol:
            out.append(verts[i])
            if fj > tol and fi < fj:
                t = (h - np.real(verts[i] * np.conj(d))) / (fj - fi)
                out.append(verts[i] + t * (verts[j] - verts[i]))
        elif fj <= tol and fj < fi:
            t = (h - np.real(verts[i] * np.conj(d))) / (fj - fi)
            out.append(verts[i] + t * (verts[j] - verts[i]))
    return np.array(out, dtype=np.complex128)


def _edge_halfplanes(region: ConvexRegion) -> list[tuple[complex, float]]:
    """Exact halfplane description {x : Re(x conj(d)) <= h} of the polygon.

    A polygon with at least 3 vertices is the intersection of its edge
    halfplanes; segments and single points are pinned by two opposing pairs
    instead (the line plus its end caps, or four axis-aligned bounds).
    """
    v = region.vertices
    if v.size >= 3:
        edges = np.roll(v, -1) - v
        # outward normal of a CCW edge: the edge direction rotated by -90deg
        normals = edges / np.abs(edges) * (-1j)
        return [
            (complex(d), float(np.real(p * np.conj(d)))) for d, p in zip(normals, v)
        ]
    if v.size == 2:
        axis = (v[1] - v[0]) / abs(v[1] - v[0])
        normal = axis * 1j
        out = []
        for d in (normal, -normal, axis, -axis):
            out.append((complex(d), float(np.max(np.real(v * np.conj(d))))))
        return out
    p = complex(v[0])
    return [(1 + 0j, p.real), (-1 + 0j, -p.real), (1j, p.imag), (-1j, -p.imag)]


def intersect_regions(a: ConvexRegion, b: ConvexRegion) -> ConvexRegion:
    """Intersection of two regions sharing the same angle grid.

    The pointwise minimum of the two support vectors is generally *not* the
    support function of the intersection, and clipping against the sampled
    support grid would circumscribe ``b``; instead ``a``'s polygon is
    clipped against ``b``'s exact edge halfplanes, and the support values
    are recomputed from the surviving polygon.
    """
    k = a.grid_size
    if b.grid_size != k:
        raise ValueError(f"grid mismatch: {k} vs {b.grid_size}")
    scale = max(a.diameter, b.diameter, np.abs(a.vertices).max(), np.abs(b.vertices).max(), 1.0)
    tol = 1e-12 * scale
    verts = a.vertices
    for d, h in _edge_halfplanes(b):
        verts = _clip_by_halfplane(verts, d, h, tol)
        if verts.size == 0:
            raise EmptyIntersection("regions do not meet")
    result = _hull_vertices(verts)
    if result.size == 0:
        raise EmptyIntersection("regions do not meet")
    return ConvexRegion._build(result, k)


# -- extreme points and nesting ----------------------------------------


def extreme_points(region: ConvexRegion, collinear_tol: float | None = None) -> PointCloud:
    """Vertices that are genuine corners (not interior to an edge)."""
    v = region.vertices
    if v.size <= 2:
        return PointCloud(v.copy(), 0.0)
    if collinear_tol is None:
        collinear_tol = 1e-9 * max(region.diameter, 1e-12)
    prev = np.roll(v, 1)
    nxt = np.roll(v, -1)
    chord = nxt - prev
    # perpendicular distance of v from the prev->next chord
    num = np.abs((chord.real) * (v.imag - prev.imag) - (chord.imag) * (v.real - prev.real))
    dist = num / np.maximum(np.abs(chord), 1e-300)
    keep = v[dist > collinear_tol]
    if keep.size == 0:
        keep = v[:1]
    return PointCloud(keep, 0.0)


def nested_conv_exchange(clouds, tol: float, grid: int = DEFAULT_GRID):
    """Check conv(intersection) against intersection(conv) for a nested family.

    ``clouds`` must be decreasing: every point of cloud ``k+1`` within
    ``tol`` of cloud ``k``.  Returns (lhs, rhs, gap) where lhs is the
    intersection of the hulls, rhs the hull of the (approximate) pointwise
    intersection, and gap their Hausdorff distance.
    """
    seq = [c if isinstance(c, PointCloud) else PointCloud(np.asarray(c, complex)) for c in clouds]
    if not seq:
        raise EmptyInput("need at least one cloud")
    for k in range(len(seq) - 1):
        prev_pts = seq[k].points
        tree = cKDTree(np.column_stack([prev_pts.real, prev_pts.imag]))
        nxt = seq[k + 1].points
        d = tree.query(np.column_stack([nxt.real, nxt.imag]))[0]
        slack = tol + seq[k].resolution + seq[k + 1].resolution
        if d.max() > slack:
            raise NotNested(
                f"cloud {k + 1} escapes cloud {k} by {float(d.max()):.3e} (allowed {slack:.3e})"
            )
    lhs = ConvexRegion.from_cloud(seq[0], grid)
    for c in seq[1:]:
        lhs = intersect_regions(lhs, ConvexRegion.from_cloud(c, grid))
    last = seq[-1].points
    keep = np.ones(last.size, dtype=bool)
    for c in seq[:-1]:
        tree = cKDTree(np.column_stack([c.points.real, c.points.imag]))
        d = tree.query(np.column_stack([last.real, last.imag]))[0]
        keep &= d <= tol + c.resolution + seq[-1].resolution
    if not np.any(keep):
        raise EmptyIntersection("no common points within tolerance")
    rhs = ConvexRegion.from_points(last[keep], grid)
    return lhs, rhs, hausdorff(lhs, rhs)
