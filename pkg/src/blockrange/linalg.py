"""Dense complex matrices and a batched Hermitian Jacobi eigensolver.

The eigensolver operates on a whole batch of equally sized Hermitian
matrices at once (cyclic-by-row Jacobi with complex rotations), which is
what makes sweeping a few hundred rotated Hermitian parts per matrix cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, NotUnit

DEFAULT_EIG_TOL = 1e-10
HERMITIAN_TOL = 1e-12
UNIT_TOL = 1e-10


def _as_square_array(entries) -> np.ndarray:
    arr = np.array(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    return arr


@dataclass(frozen=True)
class ComplexMatrix:
    """Immutable square complex matrix with a cached operator-norm bound.

    ``norm_bound`` may be any valid upper bound for the spectral norm; when
    omitted the Frobenius norm is used.  A supplied bound is sanity-checked
    against the cheap lower bound max-column-norm.
    """

    entries: np.ndarray
    norm_bound: float = 0.0

    def __post_init__(self):
        arr = _as_square_array(self.entries)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        frob = float(np.linalg.norm(arr))
        bound = float(self.norm_bound)
        if bound == 0.0:
            bound = frob
        else:
            col_low = float(np.max(np.linalg.norm(arr, axis=0))) if arr.size else 0.0
            if bound < col_low - 1e-12 * max(1.0, col_low):
                raise ValueError(
                    f"norm_bound {bound} is below the column-norm lower bound {col_low}"
                )
        object.__setattr__(self, "norm_bound", bound)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def conj_transpose(self) -> "ComplexMatrix":
        return ComplexMatrix(self.entries.conj().T, self.norm_bound)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


def hermitian_part(a: ComplexMatrix, theta: float = 0.0) -> ComplexMatrix:
    """Hermitian part of ``a`` rotated by ``theta``: (e^{-i theta} A + adjoint)/2."""
    b = np.exp(-1j * theta) * a.entries
    h = (b + b.conj().T) / 2.0
    return ComplexMatrix(h, min(a.norm_bound, float(np.linalg.norm(h))))


def is_hermitian(entries: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    dev = float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0
    return dev <= tol * max(1.0, float(np.max(np.abs(entries))) if entries.size else 1.0)


@dataclass(frozen=True)
class HermEigResult:
    """Largest eigenvalue, a unit eigenvector, and the attained residual."""

    lambda_max: float
    vector: np.ndarray
    residual: float


def jacobi_eigh_batch(mats: np.ndarray, tol: float = DEFAULT_EIG_TOL):
    """Diagonalise a batch of Hermitian matrices by cyclic complex Jacobi sweeps.

    Parameters
    ----------
    mats : (m, n, n) complex ndarray, each slice Hermitian.
    tol : absolute residual target used to derive the off-diagonal stop.

    Returns
    -------
    vals : (m, n) real ndarray of eigenvalues (unordered).
    vecs : (m, n, n) complex ndarray, columns are eigenvectors.
    sweeps : number of full sweeps performed.

    Raises
    ------
    NonConvergence if the off-diagonal mass fails to reach the stop
    threshold within the sweep budget.
    """
    h = np.array(mats, dtype=np.complex128)
    if h.ndim != 3 or h.shape[1] != h.shape[2]:
        raise ValueError(f"expected a (m, n, n) batch, got shape {h.shape}")
    m, n = h.shape[0], h.shape[1]
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), (m, n, n)).copy()
    if n == 1:
        return h[:, :, 0].real.copy(), v, 0

    scale = np.maximum(np.abs(h).max(axis=(1, 2)), 1e-300)
    # Drive the off-diagonal mass to (near) machine level; the caller checks
    # the actual residual of the pair it extracts against ``tol``.
    stop = np.maximum(scale * 1e-14, np.minimum(tol, scale) * 1e-2)

    def offdiag(x):
        od = np.abs(x).sum(axis=(1, 2)) - np.abs(np.diagonal(x, axis1=1, axis2=2)).sum(axis=1)
        return od

    max_sweeps = 100 * n * n
    sweeps = 0
    active = offdiag(h) > stop
    rows = np.arange(m)
    while np.any(active) and sweeps < max_sweeps:
        idx = rows[active]
        hs = h[idx]
        vs = v[idx]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = hs[:, p, q]
                b = np.abs(apq)
                rot = b > stop[idx] / (n * n)
                if not np.any(rot):
                    continue
                phase = np.where(rot, apq / np.where(b == 0, 1.0, b), 1.0)
                app = hs[:, p, p].real
                aqq = hs[:, q, q].real
                with np.errstate(divide="ignore", invalid="ignore"):
                    tau = (aqq - app) / (2.0 * b)
                t = np.where(
                    b == 0,
                    0.0,
                    np.where(
                        tau == 0,
                        1.0,
                        np.sign(tau) / (np.abs(tau) + np.hypot(1.0, tau)),
                    ),
                )
                t = np.where(rot, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                u11 = phase * c
                u12 = phase * s
                u21 = -s
                u22 = c
                rp = hs[:, p, :].copy()
                rq = hs[:, q, :].copy()
                hs[:, p, :] = u11.conj()[:, None] * rp + u21[:, None] * rq
                hs[:, q, :] = u12.conj()[:, None] * rp + u22[:, None] * rq
                cp = hs[:, :, p].copy()
                cq = hs[:, :, q].copy()
                hs[:, :, p] = cp * u11[:, None] + cq * u21[:, None]
                hs[:, :, q] = cp * u12[:, None] + cq * u22[:, None]
                wp = vs[:, :, p].copy()
                wq = vs[:, :, q].copy()
                vs[:, :, p] = wp * u11[:, None] + wq * u21[:, None]
                vs[:, :, q] = wp * u12[:, None] + wq * u22[:, None]
        h[idx] = hs
        v[idx] = vs
        sweeps += 1
        active[idx] = offdiag(hs) > stop[idx]

    if np.any(active):
        raise NonConvergence(
            f"jacobi sweeps exhausted with {int(active.sum())} matrices above threshold"
        )
    vals = np.diagonal(h, axis1=1, axis2=2).real.copy()
    return vals, v, sweeps


def max_eigenpairs_batch(mats: np.ndarray, tol: float = DEFAULT_EIG_TOL):
    """Largest eigenpair of every matrix in a Hermitian batch.

    Returns (lams, vecs, residuals) with shapes (m,), (m, n), (m,).  Raises
    NonConvergence if any residual ||H x - lam x|| exceeds ``tol``.
    """
    vals, vecs, _ = jacobi_eigh_batch(mats, tol)
    top = np.argmax(vals, axis=1)
    rows = np.arange(vals.shape[0])
    lams = vals[rows, top]
    xs = vecs[rows, :, top]
    xs = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    res = np.linalg.norm(
        np.einsum("mij,mj->mi", np.asarray(mats, dtype=np.complex128), xs)
        - lams[:, None] * xs,
        axis=1,
    )
    worst = float(res.max()) if res.size else 0.0
    if worst > tol:
        raise NonConvergence(f"eigenpair residual {worst:.3e} exceeds tolerance {tol:.3e}")
    return lams, xs, res


def max_eigenpair(h: ComplexMatrix, tol: float = DEFAULT_EIG_TOL) -> HermEigResult:
    """Largest eigenvalue and eigenvector of a Hermitian matrix."""
    if not is_hermitian(h.entries):
        raise ValueError("matrix is not Hermitian within tolerance")
    lams, xs, res = max_eigenpairs_batch(h.entries[None, :, :], tol)
    return HermEigResult(float(lams[0]), xs[0], float(res[0]))


def rayleigh(a: ComplexMatrix, x: np.ndarray) -> complex:
    """Rayleigh quotient <A x, x> for a unit vector ``x``."""
    vec = np.asarray(x, dtype=np.complex128).ravel()
    if vec.shape[0] != a.dim:
        raise ValueError(f"vector length {vec.shape[0]} does not match dim {a.dim}")
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise NotUnit(f"vector norm {nrm} differs from 1 by more than {UNIT_TOL}")
    return complex(np.vdot(vec, a.entries @ vec))
