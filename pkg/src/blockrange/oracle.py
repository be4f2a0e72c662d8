"""Independent inner witnesses for the essential numerical range.

Values of the quadratic form along vectors supported on far-out blocks
land in the essential numerical range: a convex combination of Rayleigh
values of finitely many distinct blocks beyond any start index is realised
by a unit vector supported arbitrarily deep in the tail.  Sampling such
combinations gives an inner approximation that shares no machinery with
the support-function pipeline, which is what makes it a useful crosscheck.

Three points per combination suffice: in the plane, any point of a convex
hull is already a combination of at most three of the generating points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockop import BlockOperatorSpec, VanishingTail
from .convex2d import ConvexRegion, ConvexWeights, PointCloud
from .errors import IndexBelowK, ValidationError
from .linalg import rayleigh

DEFAULT_SAMPLES = 2000
DEFAULT_WINDOW = 256


@dataclass(frozen=True)
class EssentialSample:
    """One certified essential value with its provenance."""

    value: complex
    start: int
    weights: ConvexWeights
    block_indices: tuple[int, ...]


def sample_essential_value(
    spec: BlockOperatorSpec,
    start: int,
    weights,
    picks,
) -> EssentialSample:
    """Convex combination of Rayleigh values of distinct blocks >= ``start``.

    ``picks`` is a sequence of (block index, unit vector) pairs, one per
    weight.  Indices must be distinct and at or beyond ``start``.
    """
    w = weights if isinstance(weights, ConvexWeights) else ConvexWeights(weights)
    picks = list(picks)
    if len(picks) != len(w):
        raise ValidationError(f"{len(w)} weights but {len(picks)} picks")
    idxs = [int(n) for n, _ in picks]
    if len(set(idxs)) != len(idxs):
        raise ValidationError("block indices must be distinct")
    low = min(idxs)
    if low < start:
        raise IndexBelowK(f"block index {low} is below the tail start {start}")
    value = 0j
    for wi, (n, x) in zip(w.weights, picks):
        value += wi * rayleigh(spec.block(n), x)
    return EssentialSample(complex(value), start, w, tuple(idxs))


def inner_approximate(
    spec: BlockOperatorSpec,
    start: int | None = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    window: int = DEFAULT_WINDOW,
) -> PointCloud:
    """Cloud of sampled essential values beyond ``start``.

    Each sample combines three distinct blocks from the index window
    [start, start + window) with Dirichlet-like weights and random unit
    vectors.  For a vanishing tail the perturbations still present at the
    window contribute to the cloud's resolution; otherwise the samples are
    genuine members up to floating point.
    """
    if start is None:
        start = spec.prefix_len + 1
    if start < 1:
        raise ValueError(f"start must be >= 1, got {start}")
    if samples < 1 or window < 3:
        raise ValueError("need at least one sample and a window of >= 3 blocks")
    rng = np.random.default_rng(seed)

    if spec.tail_is_scalar and start > spec.prefix_len:
        vals = spec.window_values(start, window)
        idx = np.argpartition(rng.random((samples, window)), 3, axis=1)[:, :3]
        raw = rng.exponential(size=(samples, 3))
        wts = raw / raw.sum(axis=1, keepdims=True)
        pts = (wts * vals[idx]).sum(axis=1)
    else:
        blocks = {n: spec.block(n) for n in range(start, start + window)}
        out = np.empty(samples, dtype=np.complex128)
        for s in range(samples):
            offs = rng.choice(window, size=3, replace=False)
            raw = rng.exponential(size=3)
            wts = raw / raw.sum()
            val = 0j
            for wi, off in zip(wts, offs):
                blk = blocks[start + int(off)]
                x = rng.standard_normal(blk.dim) + 1j * rng.standard_normal(blk.dim)
                x = x / np.linalg.norm(x)
                val += wi * rayleigh(blk, x)
            out[s] = val
        pts = out

    resolution = 1e-12 * max(1.0, spec.norm_bound)
    if isinstance(spec.tail, VanishingTail):
        resolution += spec.tail.decay(max(start, spec.prefix_len + 1))
    return PointCloud(pts, resolution)


def membership(point: complex, region: ConvexRegion, tol: float = 1e-9) -> bool:
    """Whether ``point`` lies in ``region`` up to ``tol`` (support test)."""
    return bool(region.support_excess([point])[0] <= tol)
