"""Dense complex linear algebra shared by the rest of the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Every
public function accepts anything ``numpy.asarray`` understands and returns
fresh arrays; nothing here mutates its inputs.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

TOL = 1e-9
#: Largest matrix dimension accepted anywhere in the package.
DIM_CAP = 2 ** 12


class DimensionError(ValueError):
    """Raised when operand shapes or subsystem dimensions do not agree."""


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array within the dimension cap."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if max(m.shape) > DIM_CAP:
        raise DimensionError(f"{name} has shape {m.shape}; dimension cap is {DIM_CAP}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def ket(index: int, dim: int) -> np.ndarray:
    """Computational basis column vector ``|index>`` in ``C^dim``."""
    v = np.zeros((dim, 1), dtype=np.complex128)
    v[index, 0] = 1.0
    return v


def projector(vectors) -> np.ndarray:
    """Orthogonal projector onto the column span of ``vectors`` (assumed orthonormal)."""
    v = as_matrix(vectors, "vectors")
    return v @ v.conj().T


def tensor(*ops) -> np.ndarray:
    """Kronecker product with the first factor most significant."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    mats = [as_matrix(o, "operand") for o in ops]
    rows = int(np.prod([m.shape[0] for m in mats]))
    cols = int(np.prod([m.shape[1] for m in mats]))
    if max(rows, cols) > DIM_CAP:
        raise DimensionError(f"tensor product of shape ({rows}, {cols}) exceeds dimension cap {DIM_CAP}")
    return reduce(np.kron, mats)


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor of ``m`` not listed in ``keep``.

    ``dims`` lists the factor dimensions, most significant first. Kept
    factors stay in their original order. Keeping nothing returns the
    full trace as a 1x1 matrix.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims)) if dims else 1
    if m.shape != (total, total):
        raise DimensionError(f"dims {dims} do not match matrix shape {m.shape}")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} factors")
    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def is_hermitian(h, tol: float = TOL) -> bool:
    h = np.asarray(h)
    return h.shape[0] == h.shape[1] and bool(np.max(np.abs(h - dag(h)), initial=0.0) <= tol)


def is_isometry(v, tol: float = TOL) -> bool:
    v = np.asarray(v)
    return bool(np.max(np.abs(dag(v) @ v - np.eye(v.shape[1])), initial=0.0) <= tol)


def is_unitary(u, tol: float = TOL) -> bool:
    u = np.asarray(u)
    return u.shape[0] == u.shape[1] and is_isometry(u, tol)


def is_projection(p, tol: float = TOL) -> bool:
    p = np.asarray(p)
    return is_hermitian(p, tol) and bool(np.max(np.abs(p @ p - p), initial=0.0) <= tol)


def _fix_phase(vectors: np.ndarray, floor: float = 1e-10) -> np.ndarray:
    out = vectors.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        nz = np.flatnonzero(np.abs(col) > floor)
        if nz.size:
            lead = col[nz[0]]
            out[:, c] = col * (abs(lead) / lead)
    return out


def _canonical_block(block: np.ndarray) -> np.ndarray:
    # Gram-Schmidt of P|e_0>, P|e_1>, ... in the block's coefficient space.
    m = block.shape[1]
    coeffs = block.conj()  # row c holds <e_c| projected into block coordinates, conjugated
    chosen: list[np.ndarray] = []
    for c in range(block.shape[0]):
        w = coeffs[c].copy()
        if chosen:
            q = np.array(chosen)
            w -= q.T @ (q.conj() @ w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-7:
            chosen.append(w / nrm)
            if len(chosen) == m:
                break
    return block @ np.array(chosen).T


def eig_hermitian(h, tol: float = TOL) -> SpectralDecomposition:
    """Spectral decomposition with a reproducible basis.

    Eigenvalues are sorted descending. Within a degenerate eigenspace the
    basis is the Gram-Schmidt orthonormalisation of the projected
    computational basis vectors, taken in order; each eigenvector is then
    rotated so its first nonzero entry is real and positive.
    """
    h = as_matrix(h, "h")
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"eig_hermitian needs a square matrix, got {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if not is_hermitian(h, tol * scale):
        raise ValueError("eig_hermitian: input is not Hermitian within tolerance")
    hs = 0.5 * (h + dag(h))
    w, v = np.linalg.eigh(hs)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    gap = tol * scale
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop - 1] - w[stop] <= gap:
            stop += 1
        if stop - start > 1:
            v[:, start:stop] = _canonical_block(v[:, start:stop])
        start = stop
    return SpectralDecomposition(w, _fix_phase(v))


def trace_norm(m) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b`` for Hermitian operators."""
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"trace_distance: shapes {a.shape} and {b.shape} differ")
    d = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + dag(d))))))


def lstsq_expand(target, basis: Sequence) -> tuple[np.ndarray, float]:
    """Best Frobenius-norm expansion ``target ~ sum_k c_k basis[k]``.

    Returns the coefficient vector and the norm of the remainder.
    """
    if len(basis) == 0:
        raise ValueError("lstsq_expand: empty basis")
    t = as_matrix(target, "target")
    cols = []
    for b in basis:
        b = np.asarray(b, dtype=np.complex128)
        if b.shape != t.shape:
            raise DimensionError(f"basis element shape {b.shape} != target shape {t.shape}")
        cols.append(b.reshape(-1))
    a = np.stack(cols, axis=1)
    coeffs, *_ = np.linalg.lstsq(a, t.reshape(-1), rcond=None)
    residual = float(np.linalg.norm(t.reshape(-1) - a @ coeffs))
    return coeffs, residual


def operator_basis(d: int) -> list[np.ndarray]:
    """The ``d*d`` matrix units ``|i><j|`` in row-major order."""
    if d < 1:
        raise ValueError("operator_basis: d must be at least 1")
    units = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = 1.0
            units.append(e)
    return units


def complete_to_unitary(v, tol: float = 1e-7) -> np.ndarray:
    """Extend the orthonormal columns of ``v`` to a unitary.

    New columns come from Gram-Schmidt on the computational basis in order,
    so the completion is deterministic.
    """
    v = as_matrix(v, "v")
    d, k = v.shape
    cols = [v[:, i] for i in range(k)]
    for c in range(d):
        if len(cols) == d:
            break
        w = np.zeros(d, dtype=np.complex128)
        w[c] = 1.0
        q = np.array(cols)
        w = w - q.T @ (q.conj() @ w)
        w = w - q.T @ (q.conj() @ w)
        nrm = np.linalg.norm(w)
        if nrm > tol:
            cols.append(w / nrm)
    return np.array(cols).T
