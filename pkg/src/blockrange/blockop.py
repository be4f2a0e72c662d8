"""Block diagonal operator specifications and tail window machinery.

An operator is described by finitely many explicit prefix blocks followed
by a structured tail (periodic cycle, vanishing perturbation of limit
blocks, or a named builtin family), plus an optional uniform scalar shift:
block n of the operator is B_n - shift * I.  Windows of block ranges and
their stabilised limit superior are sampled as point clouds with explicit
resolution bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .convex2d import DEFAULT_GRID, PointCloud, hausdorff
from .errors import HorizonTooSmall, NoConvergence, ValidationError
from .linalg import DEFAULT_EIG_TOL, ComplexMatrix
from .numrange import numerical_range

DEFAULT_EPS = 1e-3
DEFAULT_K_CAP = 2**20
_VANISHING_WINDOW_CAP = 256


class _DenseAngleTable:
    """Denominator-ordered enumeration of the rationals in [0, 1].

    Position m (1-based) holds the m-th fraction p/q in the ordering
    q = 1, 2, 3, ...; within each q the coprime numerators ascend.  Every
    rational in [0, 1] appears exactly once, and the first N positions
    exhaust all denominators up to about sqrt(N / 0.3), so the angle set
    {2 pi p / q} fills the circle with gaps shrinking like 1 / sqrt(N).
    """

    def __init__(self):
        self._fracs: list[float] = [0.0, 1.0]
        self._next_q = 2

    def fractions(self, start: int, count: int) -> np.ndarray:
        """Fractions at 1-based positions start .. start + count - 1."""
        while len(self._fracs) < start + count - 1:
            q = self._next_q
            self._next_q += 1
            p = np.arange(1, q)
            p = p[np.gcd(p, q) == 1]
            self._fracs.extend((p / q).tolist())
        return np.asarray(self._fracs[start - 1 : start - 1 + count], dtype=np.float64)


_DENSE_ANGLES = _DenseAngleTable()


def _matrix_tuple(mats, what: str) -> tuple[ComplexMatrix, ...]:
    out = tuple(mats)
    for m in out:
        if not isinstance(m, ComplexMatrix):
            raise ValidationError(f"{what} must contain ComplexMatrix entries")
    return out


@dataclass(frozen=True)
class PeriodicTail:
    """Tail that repeats a finite cycle of blocks forever."""

    cycle: tuple[ComplexMatrix, ...]
    kind: ClassVar[str] = "periodic"

    def __post_init__(self):
        cyc = _matrix_tuple(self.cycle, "cycle")
        if not cyc:
            raise ValidationError("periodic tail needs a non-empty cycle")
        object.__setattr__(self, "cycle", cyc)

    def base_block(self, pos: int, n: int) -> ComplexMatrix:
        return self.cycle[pos % len(self.cycle)]

    @property
    def norm_bound(self) -> float:
        return max(m.norm_bound for m in self.cycle)

    @property
    def scalar(self) -> bool:
        return all(m.dim == 1 for m in self.cycle)


@dataclass(frozen=True)
class VanishingTail:
    """Round-robin limit blocks plus a perturbation that decays like c * n^-p.

    The perturbation of block n is a seeded Gaussian matrix of unit
    Frobenius norm scaled by the decay value, so each block is determined
    by (seed, n) alone.
    """

    limits: tuple[ComplexMatrix, ...]
    decay_scale: float = 0.0
    decay_power: float = 1.0
    seed: int = 0
    kind: ClassVar[str] = "vanishing"

    def __post_init__(self):
        lims = _matrix_tuple(self.limits, "limits")
        if not lims:
            raise ValidationError("vanishing tail needs at least one limit block")
        if self.decay_scale < 0:
            raise ValidationError("decay scale must be non-negative")
        if self.decay_power <= 0:
            raise ValidationError("decay power must be positive")
        object.__setattr__(self, "limits", lims)

    def decay(self, n: int) -> float:
        if self.decay_scale == 0.0:
            return 0.0
        return self.decay_scale * float(n) ** (-self.decay_power)

    def perturbation(self, n: int, dim: int) -> np.ndarray:
        amp = self.decay(n)
        if amp == 0.0:
            return np.zeros((dim, dim), dtype=np.complex128)
        rng = np.random.default_rng([self.seed & 0x7FFFFFFF, n])
        e = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        nrm = float(np.linalg.norm(e))
        if nrm == 0.0:
            return np.zeros((dim, dim), dtype=np.complex128)
        return (amp / nrm) * e

    def base_block(self, pos: int, n: int) -> ComplexMatrix:
        base = self.limits[pos % len(self.limits)]
        pert = self.perturbation(n, base.dim)
        return ComplexMatrix(base.entries + pert)

    @property
    def norm_bound(self) -> float:
        return max(m.norm_bound for m in self.limits) + self.decay(1)

    @property
    def scalar(self) -> bool:
        return all(m.dim == 1 for m in self.limits)


BUILTIN_TAILS = ("dense_angle_diagonal",)


@dataclass(frozen=True)
class BuiltinTail:
    """Named tail family.

    ``dense_angle_diagonal``: 1x1 blocks exp(2 pi i p/q) running through all
    rationals p/q in [0, 1] in denominator order, so every unimodular
    direction recurs infinitely often and the angles equidistribute.
    """

    name: str
    kind: ClassVar[str] = "builtin"

    def __post_init__(self):
        if self.name not in BUILTIN_TAILS:
            raise ValidationError(
                f"unknown builtin tail {self.name!r}; known: {', '.join(BUILTIN_TAILS)}"
            )

    def values(self, pos: int, count: int) -> np.ndarray:
        """Diagonal entries at 0-based tail positions pos .. pos + count - 1."""
        fr = _DENSE_ANGLES.fractions(pos + 1, count)
        return np.exp(2j * np.pi * fr)

    def base_block(self, pos: int, n: int) -> ComplexMatrix:
        return ComplexMatrix(self.values(pos, 1).reshape(1, 1))

    @property
    def norm_bound(self) -> float:
        return 1.0

    @property
    def scalar(self) -> bool:
        return True


Tail = Union[PeriodicTail, VanishingTail, BuiltinTail]


@dataclass(frozen=True)
class BlockOperatorSpec:
    """Description of a block diagonal operator diag(B_1 - shift, B_2 - shift, ...)."""

    prefix: tuple[ComplexMatrix, ...]
    tail: Tail
    shift: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "prefix", _matrix_tuple(self.prefix, "prefix"))
        object.__setattr__(self, "shift", complex(self.shift))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def norm_bound(self) -> float:
        bounds = [m.norm_bound for m in self.prefix]
        bounds.append(self.tail.norm_bound)
        return max(bounds) + abs(self.shift)

    def apply_shift(self, m: ComplexMatrix) -> ComplexMatrix:
        if self.shift == 0:
            return m
        return ComplexMatrix(m.entries - self.shift * np.eye(m.dim))

    def block(self, n: int) -> ComplexMatrix:
        """Block at 1-based index ``n`` (shift already applied)."""
        if n < 1:
            raise ValueError(f"block indices are 1-based, got {n}")
        if n <= len(self.prefix):
            base = self.prefix[n - 1]
        else:
            pos = n - len(self.prefix) - 1
            base = self.tail.base_block(pos, n)
        return self.apply_shift(base)

    @property
    def tail_is_scalar(self) -> bool:
        return self.tail.scalar

    @property
    def is_scalar(self) -> bool:
        return self.tail.scalar and all(m.dim == 1 for m in self.prefix)

    def window_values(self, start: int, count: int) -> np.ndarray:
        """Diagonal entries of blocks start .. start + count - 1.

        Requires every block in the window to be 1x1; the fast vectorised
        path behind scans and unions of scalar specs.
        """
        ns = np.arange(start, start + count)
        out = np.empty(count, dtype=np.complex128)
        p = len(self.prefix)
        pre = ns <= p
        if pre.any():
            vals = []
            for n in ns[pre]:
                m = self.prefix[n - 1]
                if m.dim != 1:
                    raise ValueError(f"block {n} is not scalar")
                vals.append(m.entries[0, 0])
            out[pre] = np.asarray(vals)
        rest = ~pre
        if rest.any():
            if not self.tail.scalar:
                raise ValueError("tail blocks are not scalar")
            pos = ns[rest] - p - 1
            t = self.tail
            if isinstance(t, BuiltinTail):
                out[rest] = t.values(int(pos[0]), int(pos.size))
            elif isinstance(t, PeriodicTail):
                cyc = np.asarray([m.entries[0, 0] for m in t.cycle])
                out[rest] = cyc[pos % len(t.cycle)]
            else:
                lims = np.asarray([m.entries[0, 0] for m in t.limits])
                base = lims[pos % len(t.limits)]
                pert = np.asarray([t.perturbation(int(n), 1)[0, 0] for n in ns[rest]])
                out[rest] = base + pert
        return out - self.shift


def _attained_vertices(spec: BlockOperatorSpec, indices, grid: int, tol: float):
    """Attained-boundary vertices and worst sandwich gap over distinct blocks."""
    pts = []
    gap = 0.0
    seen: set[bytes] = set()
    for n in indices:
        blk = spec.block(n)
        key = blk.entries.tobytes()
        if key in seen:
            continue
        seen.add(key)
        res = numerical_range(blk, grid, tol)
        pts.append(res.inner.vertices)
        gap = max(gap, res.gap)
    return pts, gap


def _circle_covering_radius(values: np.ndarray) -> float:
    """Covering radius of a set of unimodular points along the unit circle."""
    ang = np.sort(np.mod(np.angle(values), 2.0 * np.pi))
    gaps = np.diff(ang, append=ang[0] + 2.0 * np.pi)
    worst = min(float(gaps.max()), 2.0 * np.pi)
    # chord from a circle point to the nearest sample, worst case half a gap
    return float(2.0 * np.sin(worst / 4.0))


def tail_union(
    spec: BlockOperatorSpec,
    start: int = 1,
    horizon: int | None = None,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_EIG_TOL,
) -> PointCloud:
    """Sampled union of the block ranges W(B_n) for n >= ``start``.

    The window length is chosen (or validated) so the sample faithfully
    represents the infinite union: a periodic tail needs one full cycle
    past the prefix remainder, a vanishing tail is truncated once the
    perturbations are absorbed into the resolution, and the builtin dense
    tail measures its own angular coverage.
    """
    if start < 1:
        raise ValueError(f"start must be >= 1, got {start}")
    p = len(spec.prefix)
    t = spec.tail
    prefix_left = max(p - start + 1, 0)

    if isinstance(t, PeriodicTail):
        need = prefix_left + len(t.cycle)
        if horizon is None:
            horizon = need
        if horizon < need:
            raise HorizonTooSmall(
                f"window of {horizon} blocks cannot cover the prefix remainder "
                f"plus one full cycle ({need} blocks)"
            )
        pts, gap = _attained_vertices(spec, range(start, start + need), grid, tol)
        return PointCloud(np.concatenate(pts), gap)

    if isinstance(t, VanishingTail):
        need = prefix_left + len(t.limits)
        if horizon is None:
            horizon = max(need, _VANISHING_WINDOW_CAP)
        if horizon < need:
            raise HorizonTooSmall(
                f"window of {horizon} blocks cannot reach every limit block "
                f"({need} blocks needed)"
            )
        real = min(horizon, _VANISHING_WINDOW_CAP)
        pts, gap = _attained_vertices(spec, range(start, start + real), grid, tol)
        for lim in t.limits:
            res = numerical_range(spec.apply_shift(lim), grid, tol)
            pts.append(res.inner.vertices)
            gap = max(gap, res.gap)
        # Blocks beyond the evaluated window sit within decay(n) of a limit
        # block, and W is 1-Lipschitz in the operator norm.
        slack = t.decay(start + real) if horizon > real else 0.0
        return PointCloud(np.concatenate(pts), gap + slack)

    # builtin dense tail
    if horizon is None:
        horizon = max(1024, start)
    if horizon < 1:
        raise HorizonTooSmall("window must contain at least one block")
    pts = []
    gap = 0.0
    if prefix_left > 0:
        pre_pts, gap = _attained_vertices(
            spec, range(start, start + min(prefix_left, horizon)), grid, tol
        )
        pts.extend(pre_pts)
    tail_count = horizon - min(prefix_left, horizon)
    resolution = gap
    if tail_count > 0:
        first_pos = max(start, p + 1) - p - 1
        vals = t.values(first_pos, tail_count)
        pts.append(vals - spec.shift)
        resolution = gap + _circle_covering_radius(vals)
    return PointCloud(np.concatenate(pts), resolution)


@dataclass(frozen=True)
class LimsupResult:
    """Sampled closed limit superior of the block ranges with its certificate.

    ``certificate`` lists (start, distance) pairs where distance is the
    Hausdorff distance between the window clouds at ``start`` and
    ``2 * start``; the final entry sits below the convergence threshold.
    """

    cloud: PointCloud
    converged_at: int
    certificate: tuple[tuple[int, float], ...]


def limsup_ranges(
    spec: BlockOperatorSpec,
    eps: float = DEFAULT_EPS,
    k_cap: int = DEFAULT_K_CAP,
    grid: int = DEFAULT_GRID,
    horizon: int | None = None,
    tol: float = DEFAULT_EIG_TOL,
) -> LimsupResult:
    """Closed limsup of the block range sequence, as a certified cloud.

    Periodic and vanishing tails stabilise exactly once the window clears
    the prefix, so they short-circuit; other tails are driven by doubling
    the window start until consecutive unions agree within ``eps``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = len(spec.prefix)
    t = spec.tail
    k0 = p + 1

    if isinstance(t, PeriodicTail):
        cloud = tail_union(spec, k0, None, grid, tol)
        return LimsupResult(cloud, k0, ((k0, 0.0),))

    if isinstance(t, VanishingTail):
        pts = []
        gap = 0.0
        for lim in t.limits:
            res = numerical_range(spec.apply_shift(lim), grid, tol)
            pts.append(res.inner.vertices)
            gap = max(gap, res.gap)
        cloud = PointCloud(np.concatenate(pts), gap)
        return LimsupResult(cloud, k0, ((k0, 0.0),))

    start = k0
    prev = tail_union(spec, start, horizon, grid, tol)
    cert: list[tuple[int, float]] = []
    while True:
        nxt_start = 2 * start
        if nxt_start > k_cap:
            raise NoConvergence(
                f"window start would exceed the cap {k_cap} before the unions "
                f"stabilised to {eps}"
            )
        nxt = tail_union(spec, nxt_start, horizon, grid, tol)
        # The window must both agree with its successor and resolve the set
        # it samples: agreement alone can hold between two equally coarse
        # windows.
        d = max(float(hausdorff(prev, nxt)), float(nxt.resolution))
        cert.append((start, d))
        if d <= eps:
            return LimsupResult(
                PointCloud(nxt.points, nxt.resolution + eps),
                nxt_start,
                tuple(cert),
            )
        start, prev = nxt_start, nxt
