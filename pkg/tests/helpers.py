"""Shared builders and independent oracles for the test suite.

The oracles deliberately avoid the library's own algorithms: the hull
oracle is gift wrapping (the library uses a monotone chain / qhull), the
eigenvalue oracle bisects the sign of the characteristic determinant (the
library uses Jacobi rotations), and range membership is checked by direct
Monte-Carlo Rayleigh sampling.
"""

from __future__ import annotations

import numpy as np

from blockrange import BlockOperatorSpec, BuiltinTail, ComplexMatrix, PeriodicTail, VanishingTail


# -- random objects -----------------------------------------------------


def random_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> ComplexMatrix:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return ComplexMatrix(scale * g / np.sqrt(2.0))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g + g.conj().T) / 2.0


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


# -- independent oracles ------------------------------------------------


def gift_wrap_hull(points) -> np.ndarray:
    """Gift-wrapping convex hull, CCW, corners only."""
    pts = np.unique(np.asarray(points, dtype=np.complex128).ravel())
    if pts.size <= 2:
        return pts

    def cross(o, a, b):
        return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)

    start = min(pts, key=lambda z: (z.imag, z.real))
    hull = [start]
    cur = start
    while True:
        cand = pts[0] if pts[0] != cur else pts[1]
        for p in pts:
            if p == cur:
                continue
            c = cross(cur, cand, p)
            if c < 0 or (c == 0 and abs(p - cur) > abs(cand - cur)):
                cand = p
        if cand == start:
            break
        hull.append(cand)
        cur = cand
    arr = np.array(hull)
    # rotate so the lexicographically smallest vertex comes first (matches
    # the library's canonical ordering)
    k = np.lexsort((arr.imag, arr.real))[0]
    return np.roll(arr, -k)


def charpoly_lambda_max(h: np.ndarray, iters: int = 100) -> float:
    """Largest eigenvalue of a Hermitian matrix by determinant-sign bisection.

    det(H - t I) = prod(lam_i - t) has sign (-1)^n for t above the top
    eigenvalue; walk down from a Gershgorin bound until the sign differs,
    then bisect the bracket.
    """
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    d = np.diag(h).real
    radii = np.sum(np.abs(h), axis=1) - np.abs(np.diag(h))
    hi = float(np.max(d + radii)) + 1.0
    lo = float(np.min(d - radii)) - 1.0
    above = (-1.0) ** n

    def sgn(t):
        return np.sign(np.real(np.linalg.det(h - t * np.eye(n))))

    steps = 4000
    dt = (hi - lo) / steps
    a = b = hi
    for k in range(1, steps + 1):
        t = hi - k * dt
        s = sgn(t)
        if s == 0:
            return float(t)
        if s != above:
            a, b = t, hi - (k - 1) * dt
            break
    else:
        raise AssertionError("no sign change found below the Gershgorin bound")
    for _ in range(iters):
        mid = 0.5 * (a + b)
        s = sgn(mid)
        if s == 0:
            return float(mid)
        if s == above:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def rayleigh_samples(a: np.ndarray, count: int, seed: int = 0) -> np.ndarray:
    """Monte-Carlo quadratic-form values over random unit vectors."""
    rng = np.random.default_rng(seed)
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    x = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    return np.einsum("ki,ij,kj->k", x.conj(), a, x)


def assemble_block_diagonal(blocks) -> np.ndarray:
    """Explicit dense direct sum of finitely many blocks."""
    mats = [np.asarray(b.entries if isinstance(b, ComplexMatrix) else b) for b in blocks]
    total = sum(m.shape[0] for m in mats)
    out = np.zeros((total, total), dtype=np.complex128)
    at = 0
    for m in mats:
        k = m.shape[0]
        out[at : at + k, at : at + k] = m
        at += k
    return out


# -- corpus specs -------------------------------------------------------


def mat(rows) -> ComplexMatrix:
    return ComplexMatrix(np.array(rows, dtype=np.complex128))


NILPOTENT = mat([[0, 1], [0, 0]])
DIAG23 = mat(np.diag([2.0, 3.0]))


def constant_spec(a: ComplexMatrix) -> BlockOperatorSpec:
    return BlockOperatorSpec((), PeriodicTail((a,)))


def two_matrix_spec() -> BlockOperatorSpec:
    return BlockOperatorSpec((), PeriodicTail((NILPOTENT, DIAG23)))


def scalar_periodic_spec(values, prefix=()) -> BlockOperatorSpec:
    cyc = tuple(mat([[v]]) for v in values)
    pre = tuple(mat([[v]]) for v in prefix)
    return BlockOperatorSpec(pre, PeriodicTail(cyc))


def vanishing_spec(limits, c=0.0, p=1.0, seed=0, prefix=()) -> BlockOperatorSpec:
    lims = tuple(m if isinstance(m, ComplexMatrix) else mat(m) for m in limits)
    pre = tuple(m if isinstance(m, ComplexMatrix) else mat(m) for m in prefix)
    return BlockOperatorSpec(pre, VanishingTail(lims, c, p, seed))


def dense_spec(prefix=()) -> BlockOperatorSpec:
    return BlockOperatorSpec(tuple(prefix), BuiltinTail("dense_angle_diagonal"))


def certified_corpus() -> list[tuple[str, BlockOperatorSpec]]:
    """Named specs whose essential range the tests pin down independently."""
    rng = np.random.default_rng(2024)
    return [
        ("constant_nilpotent", constant_spec(NILPOTENT)),
        ("two_matrix_periodic", two_matrix_spec()),
        ("scalar_alternating", scalar_periodic_spec([-1.0, 1.0])),
        ("scalar_triangle", scalar_periodic_spec([0.0, 1.0, 1j], prefix=[5.0, -3.0 + 1j])),
        ("random_periodic", BlockOperatorSpec(
            (random_matrix(rng, 3),),
            PeriodicTail((random_matrix(rng, 2), random_matrix(rng, 4))),
        )),
        ("vanishing_pair", vanishing_spec(
            [[[0.0, 1.0], [0.0, 0.0]], [[1.5]]], c=0.5, p=1.0, seed=11,
        )),
    ]
