"""Hermitian matrices, LUE sampling and a batched complex Jacobi eigensolver."""

from __future__ import annotations

import numpy as np

from .rng import RngStream

__all__ = [
    "HermitianMatrix",
    "ConvergenceError",
    "sample_ginibre",
    "sample_lue",
    "sample_lue_batch",
    "eigenvalues_hermitian",
    "jacobi_eigh",
    "trace",
]

HERMITIAN_TOL = 1e-13
JACOBI_TOL = 1e-13
MAX_SWEEPS = 60


class ConvergenceError(RuntimeError):
    """Iterative solver hit its iteration cap."""


class HermitianMatrix:
    """Immutable dense complex Hermitian matrix.

    Construction rejects inputs whose Hermiticity defect exceeds
    ``1e-13 * ||H||_F`` and stores the exactly Hermitian part.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
        norm = np.linalg.norm(a)
        defect = np.linalg.norm(a - a.conj().T)
        if defect > HERMITIAN_TOL * max(norm, np.finfo(float).tiny):
            raise ValueError(f"matrix is not Hermitian (defect {defect:.3e}, norm {norm:.3e})")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        self._entries = a

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._entries if dtype is None else self._entries.astype(dtype)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self._entries + np.asarray(other))

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self._entries - np.asarray(other))

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"

    def conjugate_by(self, unitary) -> "HermitianMatrix":
        u = np.asarray(unitary, dtype=complex)
        return HermitianMatrix(u @ self._entries @ u.conj().T)

    def eigenvalues(self, tol: float = JACOBI_TOL) -> np.ndarray:
        return eigenvalues_hermitian(self, tol)


def sample_ginibre(rows: int, cols: int, variance: float, rng: RngStream) -> np.ndarray:
    """Complex Gaussian matrix with ``E|g|^2 = variance``.

    Real and imaginary parts are independent with variance ``variance/2`` each.
    A vector ``rng`` gives a leading batch axis.
    """
    if not variance > 0:
        raise ValueError("variance must be positive")
    z = rng.normal((2, rows, cols))
    scale = np.sqrt(0.5 * variance)
    return scale * (z[..., 0, :, :] + 1j * z[..., 1, :, :])


def _check_lue_params(N, a, b):
    if int(a) != a or a < 0:
        raise ValueError(f"the Gaussian-factor sampler needs integer a >= 0, got {a}")
    if not b > 0:
        raise ValueError("rate b must be positive")
    if N < 1:
        raise ValueError("dimension must be positive")


def sample_lue_batch(N: int, a: int, b: float, rng: RngStream) -> np.ndarray:
    """LUE(a, b) draws as ``G G*`` with ``G`` of shape ``N x (N+a)``, variance ``1/b``."""
    _check_lue_params(N, a, b)
    g = sample_ginibre(N, N + int(a), 1.0 / b, rng)
    x = g @ np.swapaxes(g.conj(), -1, -2)
    return 0.5 * (x + np.swapaxes(x.conj(), -1, -2))


def sample_lue(N: int, a: int, b: float, rng: RngStream) -> HermitianMatrix:
    """One LUE(a, b) matrix from a scalar stream."""
    if rng.n_streams is not None:
        raise TypeError("sample_lue takes a single stream; use sample_lue_batch")
    return HermitianMatrix(sample_lue_batch(N, a, b, rng))


def jacobi_eigh(h: np.ndarray, tol: float = JACOBI_TOL, vectors: bool = False):
    """Cyclic complex Jacobi on a stack of Hermitian matrices ``(..., n, n)``.

    Returns ascending eigenvalues (and eigenvectors as columns if requested).
    Stops when every matrix has off-diagonal Frobenius norm below
    ``tol * ||H||_F``; raises :class:`ConvergenceError` after 60 sweeps.
    """
    a = np.array(h, dtype=complex)
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape((-1, n, n))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if vectors else None
    scale = np.linalg.norm(a, axis=(1, 2))
    thresh = tol * scale

    offdiag = ~np.eye(n, dtype=bool)

    def off_norm(m):
        # summed directly: ||m||^2 - sum |m_ii|^2 cancels down to ~1e-8 relative
        return np.sqrt(np.sum(np.abs(m[:, offdiag]) ** 2, axis=1))

    for _ in range(MAX_SWEEPS + 1):
        if np.all(off_norm(a) <= thresh):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > 0
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                tau = (aqq - app) / (2.0 * safe)
                with np.errstate(over="ignore"):
                    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J restricted to the (p, q) plane: [[c, s], [-s conj(phase), c conj(phase)]]
                jpp = c
                jpq = s
                jqp = -s * phase.conj()
                jqq = c * phase.conj()
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = colp * jpp[:, None] + colq * jqp[:, None]
                a[:, :, q] = colp * jpq[:, None] + colq * jqq[:, None]
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = rowp * jpp[:, None] + rowq * jqp.conj()[:, None]
                a[:, q, :] = rowp * jpq[:, None] + rowq * jqq.conj()[:, None]
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                if vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q]
                    v[:, :, p] = vp * jpp[:, None] + vq * jqp[:, None]
                    v[:, :, q] = vp * jpq[:, None] + vq * jqq[:, None]
    else:
        raise ConvergenceError(f"Jacobi sweeps did not converge within {MAX_SWEEPS} sweeps")

    w = np.diagonal(a, axis1=1, axis2=2).real
    order = np.argsort(w, axis=1)
    w = np.take_along_axis(w, order, axis=1).reshape(batch_shape + (n,))
    if not vectors:
        return w
    v = np.take_along_axis(v, order[:, None, :], axis=2).reshape(batch_shape + (n, n))
    return w, v


def eigenvalues_hermitian(H, tol: float = JACOBI_TOL, vectors: bool = False):
    """Ascending eigenvalues of a :class:`HermitianMatrix` (or a stack of arrays)."""
    if not np.all(np.isfinite(np.asarray(H))):
        raise ValueError("matrix has non-finite entries")
    return jacobi_eigh(np.asarray(H), tol=tol, vectors=vectors)


def trace(H) -> float:
    """Real trace; rejects an imaginary residue above ``1e-13 * ||H||``."""
    a = np.asarray(H)
    tr = np.trace(a, axis1=-2, axis2=-1)
    if np.iscomplexobj(tr):
        norm = np.linalg.norm(a, axis=(-2, -1))
        if np.any(np.abs(tr.imag) > HERMITIAN_TOL * np.maximum(norm, 1.0)):
            raise ValueError("trace has a non-negligible imaginary part")
        tr = tr.real
    return float(tr) if np.ndim(tr) == 0 else tr
