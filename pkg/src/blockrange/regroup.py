"""Regrouping consecutive blocks so no convex hull is needed.

The essential numerical range of a block diagonal operator is the hull of
the limsup of the block ranges.  After translating so that the origin lies
in the non-extreme part of the range, distinct extreme points have
distinct angles, and consecutive blocks can be merged into growing groups
whose own (automatically convex) numerical ranges converge to the
essential numerical range directly: level m splits the circle into m angle
buckets, picks one extreme point per bucket, and extends the current group
until it contains a block whose range passes close to every pick.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockop import BlockOperatorSpec
from .convex2d import DEFAULT_GRID, ConvexRegion, extreme_points
from .errors import DegenerateGeometry, ScanExhausted, ValidationError
from .essrange import EssentialRangeResult
from .linalg import DEFAULT_EIG_TOL
from .numrange import numerical_range

DEFAULT_REGROUP_EPS = 1e-2
DEFAULT_DEPTH = 64
DEFAULT_SCAN_CAP = 10**6
_SCAN_CHUNK = 4096


# -- translation choice -------------------------------------------------


@dataclass(frozen=True)
class TranslationChoice:
    """Shift ``z`` to apply to the operator, with the certified angle margin.

    After the shift the origin lies in the non-extreme part of the range
    and the extreme points all have distinct angles; ``angular_margin`` is
    the smallest circular gap between those angles.
    """

    z: complex
    reason: str
    angular_margin: float


def _angle_margin(points: np.ndarray, scale: float) -> float | None:
    """Min circular angle gap of the points, or None if one sits at 0."""
    if np.min(np.abs(points)) <= 1e-9 * scale:
        return None
    ang = np.sort(np.mod(np.angle(points), 2.0 * np.pi))
    if ang.size == 1:
        return 2.0 * np.pi
    gaps = np.diff(ang, append=ang[0] + 2.0 * np.pi)
    return float(gaps.min())


def choose_translation(region: ConvexRegion, angular_tol: float = 1e-7) -> TranslationChoice:
    """Pick a translation putting 0 inside the region, away from extremes.

    Singletons translate onto themselves (or off the origin); otherwise the
    midpoint of a diameter-realising pair of extreme points is used, nudged
    along that diameter if it lands on the origin or too close to an
    extreme point.  Raises DegenerateGeometry when no candidate certifies
    an angular margin above ``angular_tol``.
    """
    ext = extreme_points(region).points
    diam = region.diameter
    if diam <= 1e-12 * max(1.0, np.abs(ext).max()):
        a = complex(ext[0])
        if abs(a) > 1e-12:
            return TranslationChoice(0.0, "identity", 2.0 * np.pi)
        return TranslationChoice(-1.0, "origin_singleton", 2.0 * np.pi)

    d = np.abs(ext[:, None] - ext[None, :])
    i, j = np.unravel_index(np.argmax(d), d.shape)
    w1, w2 = complex(ext[i]), complex(ext[j])
    if (w2.real, w2.imag) < (w1.real, w1.imag):
        w1, w2 = w2, w1
    mid = (w1 + w2) / 2.0
    step = (w2 - w1) / 4.0
    scale = max(diam, float(np.abs(ext).max()))

    for z in (mid, mid + step, mid - step, mid + step / 2.0, mid - step / 2.0):
        if abs(z) <= 1e-12 * scale:
            continue  # a no-op translation cannot move the origin inward
        shifted = ext - z
        if np.min(np.abs(shifted)) <= 1e-9 * scale:
            continue  # origin would sit on an extreme point
        margin = _angle_margin(shifted, scale)
        if margin is not None and margin > angular_tol:
            return TranslationChoice(z, "diameter_midpoint", margin)
    raise DegenerateGeometry(
        f"no translation candidate certified an angle margin above {angular_tol}"
    )


# -- decomposition ------------------------------------------------------


@dataclass(frozen=True)
class GroupSelection:
    """One bucket pick at one level: which extreme point was targeted and
    which block index first approached it, at what distance."""

    bucket: int
    target: complex
    block_index: int
    distance: float


@dataclass(frozen=True)
class Decomposition:
    """Group boundaries M_1 < M_2 < ...: group m covers blocks
    (M_{m-1}, M_m], with the per-level scan evidence."""

    boundaries: tuple[int, ...]
    selections: tuple[tuple[GroupSelection, ...], ...] = ()
    eps: float = 0.0

    def __post_init__(self):
        bs = tuple(int(b) for b in self.boundaries)
        if not bs:
            raise ValidationError("a decomposition needs at least one group")
        if bs[0] < 1 or any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
            raise ValidationError(f"group boundaries must strictly increase, got {bs}")
        object.__setattr__(self, "boundaries", bs)
        object.__setattr__(self, "selections", tuple(self.selections))

    @property
    def group_count(self) -> int:
        return len(self.boundaries)

    def group_range(self, m: int) -> tuple[int, int]:
        """1-based inclusive block range of group ``m`` (1-based)."""
        if not 1 <= m <= len(self.boundaries):
            raise ValueError(f"group index {m} out of range")
        lo = 1 if m == 1 else self.boundaries[m - 2] + 1
        return lo, self.boundaries[m - 1]


def identity_decomposition(count: int) -> Decomposition:
    """The trivial decomposition: every block is its own group."""
    return Decomposition(tuple(range(1, count + 1)))


def _bucket_targets(ext: np.ndarray, m: int) -> list[tuple[int, complex]]:
    """One target per bucket: the max-modulus extreme point whose angle
    falls in bucket j = floor(angle * m / 2 pi); empty buckets borrow from
    the cyclically nearest non-empty one (ties to the lower index)."""
    ang = np.mod(np.angle(ext), 2.0 * np.pi)
    buckets = np.minimum((ang * m / (2.0 * np.pi)).astype(int), m - 1)
    reps: dict[int, complex] = {}
    for j in range(m):
        members = ext[buckets == j]
        if members.size == 0:
            continue
        mod = np.abs(members)
        best = mod.max()
        close = members[mod >= best - 1e-12 * max(best, 1.0)]
        reps[j] = complex(close[np.argmin(np.mod(np.angle(close), 2.0 * np.pi))])
    filled = []
    occupied = sorted(reps)
    for j in range(m):
        if j in reps:
            filled.append((j, reps[j]))
            continue
        src = min(occupied, key=lambda q: (min((j - q) % m, (q - j) % m), q))
        filled.append((j, reps[src]))
    return filled


def _scan_window(spec: BlockOperatorSpec, target: complex, threshold: float,
                 start: int, cap: int, grid: int, tol: float):
    """First block index n >= start whose range passes within ``threshold``
    of ``target``, or None after examining ``cap`` blocks.

    Uses the attained (inner) polygon of each block range, so a hit
    certifies a genuine numerical-range point near the target.
    """
    n = start
    budget = cap
    p = spec.prefix_len
    while budget > 0:
        if n > p and spec.tail_is_scalar:
            cnt = min(budget, _SCAN_CHUNK)
            vals = spec.window_values(n, cnt)
            d = np.abs(vals - target)
            hits = np.flatnonzero(d < threshold)
            if hits.size:
                h = int(hits[0])
                return n + h, float(d[h])
            n += cnt
            budget -= cnt
        else:
            inner = numerical_range(spec.block(n), grid, tol).inner
            d = float(inner.distance([target])[0])
            if d < threshold:
                return n, d
            n += 1
            budget -= 1
    return None


def regroup(
    spec: BlockOperatorSpec,
    we: EssentialRangeResult,
    eps: float = DEFAULT_REGROUP_EPS,
    depth: int = DEFAULT_DEPTH,
    scan_cap: int = DEFAULT_SCAN_CAP,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_EIG_TOL,
) -> Decomposition:
    """Build the group boundaries of the hull-free decomposition.

    ``we`` must be the essential range of ``spec`` itself (already
    translated so the origin avoids the extreme points).  Level m picks one
    extreme point per angle bucket and extends the group until every pick
    has been approached within eps / m by some block range.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    ext = extreme_points(we.region).points
    scale = max(float(np.abs(ext).max()), 1e-12)
    if float(np.min(np.abs(ext))) <= 1e-9 * scale:
        raise DegenerateGeometry(
            "an extreme point sits at the origin; translate the operator first"
        )
    boundaries: list[int] = []
    levels: list[tuple[GroupSelection, ...]] = []
    cursor = 0
    for m in range(1, depth + 1):
        threshold = eps / m
        picks: list[GroupSelection] = []
        for j, target in _bucket_targets(ext, m):
            hit = _scan_window(spec, target, threshold, cursor + 1, scan_cap, grid, tol)
            if hit is None:
                raise ScanExhausted(m, j, target, scan_cap)
            cursor, dist = hit
            picks.append(GroupSelection(j, target, cursor, dist))
        boundaries.append(cursor)
        levels.append(tuple(picks))
    return Decomposition(tuple(boundaries), tuple(levels), eps)


# -- verification -------------------------------------------------------


def group_region(
    spec: BlockOperatorSpec,
    decomp: Decomposition,
    m: int,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_EIG_TOL,
) -> ConvexRegion:
    """Numerical range of group ``m`` viewed as one finite block diagonal."""
    lo, hi = decomp.group_range(m)
    p = spec.prefix_len
    pts = []
    n = lo
    while n <= hi:
        if n > p and spec.tail_is_scalar:
            vals = spec.window_values(n, hi - n + 1)
            pts.append(vals)
            break
        pts.append(numerical_range(spec.block(n), grid, tol).inner.vertices)
        n += 1
    return ConvexRegion.from_points(np.concatenate(pts), grid)


def verify_conv_free(
    spec: BlockOperatorSpec,
    decomp: Decomposition,
    we,
    from_level: int | None = None,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_EIG_TOL,
) -> float:
    """Worst Hausdorff distance between late group ranges and the target.

    Convexity makes both directed distances exact on vertices: the group
    range and the essential range are polygons, and point-to-region
    distance is a convex function, so maxima are attained at vertices.
    ``from_level`` defaults to half the group count.
    """
    region = we.region if isinstance(we, EssentialRangeResult) else we
    g = decomp.group_count
    k0 = from_level if from_level is not None else max(1, g // 2)
    if not 1 <= k0 <= g:
        raise ValueError(f"from_level {k0} out of range 1..{g}")
    worst = 0.0
    for m in range(k0, g + 1):
        r = group_region(spec, decomp, m, grid, tol)
        outward = float(region.distance(r.vertices).max())
        inward = float(r.distance(region.vertices).max())
        worst = max(worst, outward, inward)
    return worst
