"""Dense complex linear algebra foundation.

Matrices and state vectors are plain ``numpy.ndarray`` values (complex128,
row-major); the functions here validate invariants at the boundary and keep
everything downstream pure:

- Hermitian operators are accepted within an absolute entrywise tolerance of
  ``HERMITICITY_ATOL`` and symmetrized to (A + A^dagger)/2 so that file
  round-trips stay robust.
- ``matrix_exp`` routes Hermitian inputs through the eigendecomposition
  (exact for diagonalizable inputs) and everything else through
  scaling-and-squaring (scipy's degree-13 Pade approximant).

All values are immutable by convention and every operation is a pure
function, so results are safe to share between threads.

The on-disk matrix format is a JSON object
``{"dim": n, "re": [n*n reals], "im": [n*n reals]}`` in row-major order;
vectors use the same layout with n entries.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonConvergence

HERMITICITY_ATOL = 1e-12
STATE_NORM_ATOL = 1e-12
EIGEN_RESIDUAL_RTOL = 1e-10


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    if m.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be nonempty")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def is_hermitian(a, atol: float = HERMITICITY_ATOL) -> bool:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.abs(m - m.conj().T).max()) <= atol


def hermitian(a, name: str = "operator", atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """Validate Hermiticity within `atol` (max-entry) and return (A + A†)/2."""
    m = as_square_matrix(a, name)
    dev = float(np.abs(m - m.conj().T).max())
    if dev > atol:
        raise ValueError(f"{name} is not Hermitian: max |A - A^dagger| = {dev:.3e} > {atol:.1e}")
    return (m + m.conj().T) / 2


def state_vector(v, name: str = "state") -> np.ndarray:
    """Validate unit norm within STATE_NORM_ATOL and return the renormalized vector."""
    psi = np.asarray(v, dtype=complex).reshape(-1)
    if psi.size == 0:
        raise DimensionMismatch(f"{name} must be nonempty")
    if not np.all(np.isfinite(psi.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > STATE_NORM_ATOL:
        raise ValueError(f"{name} is not normalized: ||psi|| = {nrm!r}")
    return psi / nrm


class EigenDecomposition(NamedTuple):
    """Spectral data of a Hermitian operator: A = Q diag(w) Q^dagger."""

    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors


def eigen_hermitian(a) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian operator with a reconstruction check.

    Eigenvalues come back sorted ascending. Raises NonConvergence when the
    underlying iterative solver fails, which signals an ill-conditioned input.
    """
    m = hermitian(a)
    try:
        w, q = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"eigendecomposition failed: {exc}") from exc
    scale = max(float(np.abs(m).max()), 1.0)
    residual = float(np.abs(m @ q - q * w[None, :]).max())
    if residual > EIGEN_RESIDUAL_RTOL * scale:
        raise NonConvergence(
            f"eigendecomposition residual {residual:.3e} exceeds {EIGEN_RESIDUAL_RTOL:.1e} * {scale:.3e}"
        )
    return EigenDecomposition(eigenvalues=w, eigenvectors=q)


def matrix_exp(a, k: complex = 1.0) -> np.ndarray:
    """Matrix exponential e^{kA}.

    Hermitian A goes through the eigendecomposition, so e^{-i phi A} is
    unitary to working precision for real phi; non-Hermitian A falls back to
    scaling-and-squaring.
    """
    m = as_square_matrix(a)
    k = complex(k)
    if is_hermitian(m):
        w, q = np.linalg.eigh((m + m.conj().T) / 2)
        return (q * np.exp(k * w)[None, :]) @ q.conj().T
    return scipy.linalg.expm(k * m)


def operator_norm(a) -> float:
    """Largest singular value of a square matrix."""
    m = as_square_matrix(a)
    return float(np.linalg.norm(m, 2))


def projector(decomp: EigenDecomposition, indices) -> np.ndarray:
    """Orthogonal projector onto the span of the selected eigenvectors."""
    q = decomp.eigenvectors[:, list(indices)]
    return q @ q.conj().T


def eigenspace_projectors(a, gap_tol: float = 1e-8) -> list[tuple[float, np.ndarray]]:
    """Group eigenvalues within `gap_tol` and return (eigenvalue, projector) pairs."""
    w, q = eigen_hermitian(a)
    out: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap_tol:
            cols = q[:, start:i]
            out.append((float(np.mean(w[start:i])), cols @ cols.conj().T))
            start = i
    return out


def matrix_to_json(a) -> dict:
    """Serialize a matrix (or vector) to the {"dim", "re", "im"} layout."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        flat = m
        dim = m.shape[0]
    elif m.ndim == 2 and m.shape[0] == m.shape[1]:
        flat = m.reshape(-1)
        dim = m.shape[0]
    else:
        raise DimensionMismatch(f"expected a vector or square matrix, got shape {m.shape}")
    return {"dim": int(dim), "re": [float(x) for x in flat.real], "im": [float(x) for x in flat.imag]}


def matrix_from_json(obj, name: str = "matrix") -> np.ndarray:
    """Parse the {"dim", "re", "im"} layout back to a square matrix or a vector."""
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{name}: malformed matrix object: {exc}") from exc
    if re.shape != im.shape or re.ndim != 1:
        raise ValueError(f"{name}: 're' and 'im' must be flat arrays of equal length")
    flat = re + 1j * im
    if flat.size == dim * dim:
        return flat.reshape(dim, dim)
    if flat.size == dim:
        return flat
    raise ValueError(f"{name}: entry count {flat.size} matches neither dim^2 nor dim for dim={dim}")
