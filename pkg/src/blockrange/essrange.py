"""Essential numerical range of a block diagonal operator.

Primary route: the essential numerical range equals the convex hull of the
closed limit superior of the block ranges.  Independent route, used as a
crosscheck: it also equals the intersection over k of the convex hulls of
the whole-tail unions starting at k.  Both are computed and their Hausdorff
gap is reported; a gap beyond ten times the combined tolerance signals an
implementation bug and raises.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .blockop import (
    DEFAULT_EPS,
    DEFAULT_K_CAP,
    BlockOperatorSpec,
    VanishingTail,
    limsup_ranges,
    tail_union,
)
from .convex2d import (
    DEFAULT_GRID,
    ConvexRegion,
    PointCloud,
    hausdorff,
    intersect_regions,
)
from .errors import InconsistentResult, ValidationError
from .linalg import DEFAULT_EIG_TOL

_GAP_FACTOR = 10.0


@dataclass(frozen=True)
class EssentialRangeResult:
    """Essential numerical range with its supporting evidence.

    ``region`` is the hull of the sampled limsup cloud; ``crosscheck_gap``
    is the Hausdorff distance to the independently computed intersection of
    tail-union hulls; ``tolerance`` combines the cloud resolution, the
    stabilisation threshold and a floating-point floor.
    """

    region: ConvexRegion
    limsup: PointCloud
    crosscheck_gap: float
    certificate: tuple[tuple[int, float], ...]
    tolerance: float
    converged_at: int


def _consistency_gate(gap: float, tolerance: float, what: str) -> None:
    if gap > _GAP_FACTOR * tolerance:
        raise InconsistentResult(
            f"{what}: routes disagree by {gap:.3e}, more than {_GAP_FACTOR} x "
            f"tolerance {tolerance:.3e}"
        )


def _start_schedule(spec: BlockOperatorSpec, converged_at: int, eps: float) -> list[int]:
    """Window starts for the intersection route: doubling up to convergence,
    plus (for vanishing tails) a start deep enough that the perturbations
    have shrunk below the stabilisation threshold."""
    ks = {1, converged_at}
    k = 2
    while k < converged_at:
        ks.add(k)
        k *= 2
    t = spec.tail
    if isinstance(t, VanishingTail) and t.decay_scale > 0:
        deep = int(np.ceil((t.decay_scale / eps) ** (1.0 / t.decay_power))) + 1
        ks.add(max(deep, converged_at))
    return sorted(ks)


def essential_numerical_range(
    spec: BlockOperatorSpec,
    grid: int = DEFAULT_GRID,
    eps: float = DEFAULT_EPS,
    k_cap: int = DEFAULT_K_CAP,
    horizon: int | None = None,
    tol: float = DEFAULT_EIG_TOL,
) -> EssentialRangeResult:
    """Essential numerical range of the operator described by ``spec``."""
    lim = limsup_ranges(spec, eps, k_cap, grid, horizon, tol)
    region = ConvexRegion.from_cloud(lim.cloud, grid)

    inter: ConvexRegion | None = None
    for start in _start_schedule(spec, lim.converged_at, eps):
        window = tail_union(spec, start, horizon, grid, tol)
        hull = ConvexRegion.from_cloud(window, grid)
        inter = hull if inter is None else intersect_regions(inter, hull)
    assert inter is not None
    gap = float(hausdorff(region, inter))

    tolerance = lim.cloud.resolution + eps + 1e-9 * max(1.0, spec.norm_bound)
    _consistency_gate(gap, tolerance, "essential range")
    return EssentialRangeResult(
        region, lim.cloud, gap, lim.certificate, tolerance, lim.converged_at
    )


def _cluster_accumulation(points: np.ndarray, radius: float) -> np.ndarray:
    """Greedy radius clustering; returns cluster means, deterministically."""
    order = np.lexsort((points.imag, points.real))
    pts = points[order]
    centers: list[complex] = []
    sums: list[complex] = []
    counts: list[int] = []
    for z in pts:
        hit = -1
        best = radius
        for i, c in enumerate(centers):
            d = abs(z - c)
            if d <= best:
                best = d
                hit = i
        if hit < 0:
            centers.append(z)
            sums.append(z)
            counts.append(1)
        else:
            sums[hit] += z
            counts[hit] += 1
    return np.array([s / c for s, c in zip(sums, counts)], dtype=np.complex128)


def diagonal_essential_range(
    spec: BlockOperatorSpec,
    grid: int = DEFAULT_GRID,
    eps: float = DEFAULT_EPS,
    k_cap: int = DEFAULT_K_CAP,
    horizon: int | None = None,
    tol: float = DEFAULT_EIG_TOL,
) -> EssentialRangeResult:
    """Essential numerical range of a diagonal operator (all blocks 1x1).

    For diagonal operators the limsup cloud is just the set of accumulation
    values of the diagonal sequence, so the region is the hull of cluster
    representatives of that sequence.  The result is cross-validated
    against the general block pipeline.
    """
    if not spec.is_scalar:
        raise ValidationError("diagonal route requires every block to be 1x1")
    general = essential_numerical_range(spec, grid, eps, k_cap, horizon, tol)
    reps = _cluster_accumulation(general.limsup.points, max(eps, 1e-12))
    region = ConvexRegion.from_points(reps, grid)
    gap = float(hausdorff(region, general.region))
    tolerance = general.tolerance + eps
    _consistency_gate(gap, tolerance, "diagonal essential range")
    return EssentialRangeResult(
        region,
        general.limsup,
        max(gap, general.crosscheck_gap),
        general.certificate,
        tolerance,
        general.converged_at,
    )


def translate_spec(spec: BlockOperatorSpec, z: complex) -> BlockOperatorSpec:
    """Spec of the translated operator T - z: every block picks up -z * I."""
    return replace(spec, shift=spec.shift + complex(z))
