"""Dense Hermitian linear algebra helpers.

Thin wrappers around numpy's eigensolvers plus the unitary-completion
routine that the machine constructions are built on: two tuples of vectors
with identical Gram matrices are related by a unitary, and
:func:`unitary_completion` produces one explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GramMismatch, NotHermitian, NotPSD, NotSquare

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-9
GRAM_TOL = 1e-8
RANK_TOL = 1e-9


def _as_complex_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return m


def _require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    dev = np.abs(m - m.conj().T).max() if m.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |M - M^dag| = {dev:.3e} exceeds {tol:.1e}")
    return m


@dataclass
class HermEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors[:, k]`` is the
    unit eigenvector for ``eigenvalues[k]``, with its first component of
    magnitude above 1e-12 rotated to be real and positive so repeated runs
    produce identical output.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def herm_eig(m) -> HermEig:
    """Eigendecomposition of a Hermitian matrix with a fixed phase gauge."""
    m = _require_hermitian(_as_complex_matrix(m))
    vals, vecs = np.linalg.eigh(m)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            lead = col[nz[0]]
            vecs[:, k] = col * (np.conj(lead) / np.abs(lead))
    return HermEig(vals, vecs)


def is_psd(m, tol: float = PSD_TOL) -> bool:
    """True when the Hermitian matrix has no eigenvalue below ``-tol``."""
    m = _require_hermitian(_as_complex_matrix(m))
    if m.size == 0:
        return True
    return float(np.linalg.eigvalsh(m).min()) >= -tol


def psd_sqrt(m, tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything below
    ``-tol`` raises :class:`NotPSD`.
    """
    dec = herm_eig(m)
    lam_min = float(dec.eigenvalues.min()) if dec.eigenvalues.size else 0.0
    if lam_min < -tol:
        raise NotPSD(f"smallest eigenvalue {lam_min:.3e} is below -{tol:.1e}")
    clipped = np.clip(dec.eigenvalues, 0.0, None)
    v = dec.eigenvectors
    return v @ np.diag(np.sqrt(clipped)) @ v.conj().T


def gram_of(vectors: np.ndarray) -> np.ndarray:
    """Gram matrix of the columns of ``vectors`` (conjugate-linear first slot)."""
    return vectors.conj().T @ vectors


def _orthonormalize_pair(xs: np.ndarray, ys: np.ndarray, tol: float):
    """Pivoted Gram-Schmidt run on ``xs`` with the pivot order replayed on ``ys``.

    Returns orthonormal bases (as column stacks) for the spans of the two
    vector families.  Residual columns with norm at or below ``tol`` are
    dropped; because the Gram matrices agree, the same columns drop on both
    sides.
    """
    dim, n = xs.shape
    a_cols: list[np.ndarray] = []
    b_cols: list[np.ndarray] = []
    rx = xs.astype(complex).copy()
    ry = ys.astype(complex).copy()
    remaining = list(range(n))
    while remaining:
        norms = [np.linalg.norm(rx[:, j]) for j in remaining]
        k = int(np.argmax(norms))
        if norms[k] <= tol:
            break
        j = remaining.pop(k)
        a = rx[:, j] / np.linalg.norm(rx[:, j])
        b = ry[:, j] / np.linalg.norm(ry[:, j])
        a_cols.append(a)
        b_cols.append(b)
        for i in remaining:
            rx[:, i] -= a * (a.conj() @ rx[:, i])
            ry[:, i] -= b * (b.conj() @ ry[:, i])
    a_basis = np.stack(a_cols, axis=1) if a_cols else np.zeros((dim, 0), complex)
    b_basis = np.stack(b_cols, axis=1) if b_cols else np.zeros((dim, 0), complex)
    return a_basis, b_basis


def _extend_to_unitary(basis: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full orthonormal basis.

    The complement comes from the left singular vectors of ``basis``, which
    stays orthonormal to machine precision even when canonical basis vectors
    lie almost inside the existing span.
    """
    dim, k = basis.shape
    if k == dim:
        return basis.copy()
    u = np.linalg.svd(basis, full_matrices=True)[0]
    return np.concatenate([basis, u[:, k:]], axis=1)


def unitary_completion(inputs, outputs, gram_tol: float = GRAM_TOL,
                       rank_tol: float = RANK_TOL) -> np.ndarray:
    """Unitary ``U`` with ``U @ inputs[i] == outputs[i]`` for every pair.

    Parameters
    ----------
    inputs, outputs : sequences of equal-length complex vectors whose Gram
        matrices agree entrywise within ``gram_tol``.  The families may be
        linearly dependent; rank is detected with pivoted Gram-Schmidt and
        residual tolerance ``rank_tol``.

    Raises
    ------
    DimensionMismatch
        Counts or vector lengths differ.
    GramMismatch
        Some pair of inner products disagrees beyond ``gram_tol``.
    """
    xs = [np.asarray(v, dtype=complex).ravel() for v in inputs]
    ys = [np.asarray(v, dtype=complex).ravel() for v in outputs]
    if len(xs) != len(ys):
        raise DimensionMismatch(f"{len(xs)} inputs vs {len(ys)} outputs")
    if not xs:
        raise DimensionMismatch("need at least one input/output pair")
    dim = xs[0].size
    for v in xs + ys:
        if v.size != dim:
            raise DimensionMismatch("all vectors must share one dimension")
    x_mat = np.stack(xs, axis=1)
    y_mat = np.stack(ys, axis=1)
    gx = gram_of(x_mat)
    gy = gram_of(y_mat)
    dev = np.abs(gx - gy)
    if dev.size and dev.max() > gram_tol:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise GramMismatch(int(i), int(j), float(dev[i, j]))
    a_basis, b_basis = _orthonormalize_pair(x_mat, y_mat, rank_tol)
    a_full = _extend_to_unitary(a_basis)
    b_full = _extend_to_unitary(b_basis)
    return b_full @ a_full.conj().T
