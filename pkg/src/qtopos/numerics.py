"""Dense complex linear algebra for small Hilbert spaces.

Operators are square ``complex128`` arrays and vectors are one-dimensional
arrays.  Every approximate comparison is a Frobenius-norm test scaled by the
matrix dimension, driven by the single :class:`Tolerance` that the rest of
the package threads through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotProjector, ValidationError

MAX_DIM = 16


@dataclass(frozen=True)
class Tolerance:
    """One comparison tolerance; scale by the dimension before comparing."""

    eps: float = 1e-9

    def __post_init__(self):
        eps = self.eps
        ok = isinstance(eps, (int, float)) and not isinstance(eps, bool)
        if not ok or not np.isfinite(eps) or not 0.0 < eps < 1e-3:
            raise ValidationError(f"tolerance must lie in (0, 1e-3), got {eps!r}")

    def scaled(self, dim: int) -> float:
        return self.eps * dim


def as_operator(matrix) -> np.ndarray:
    """Coerce to a read-only square complex matrix, enforcing the size cap."""
    try:
        m = np.array(matrix, dtype=complex)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"not a matrix: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ValidationError(
            f"dimension {m.shape[0]} exceeds the desk-scale cap {MAX_DIM}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValidationError("matrix entries must be finite")
    m.setflags(write=False)
    return m


def as_vector(entries, dim: int | None = None) -> np.ndarray:
    """Coerce to a read-only complex vector, optionally of a fixed length."""
    try:
        v = np.array(entries, dtype=complex).reshape(-1)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"not a vector: {exc}") from exc
    if v.size == 0 or v.size > MAX_DIM:
        raise ValidationError(f"vector length {v.size} outside 1..{MAX_DIM}")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"vector length {v.size} != dimension {dim}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValidationError("vector entries must be finite")
    v.setflags(write=False)
    return v


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def hermiticity_defect(a: np.ndarray) -> float:
    return frob(a - a.conj().T)


def is_hermitian(matrix, tol: Tolerance = Tolerance()) -> bool:
    m = as_operator(matrix)
    return hermiticity_defect(m) <= tol.scaled(m.shape[0])


def require_hermitian(matrix, tol: Tolerance = Tolerance()) -> np.ndarray:
    m = as_operator(matrix)
    defect = hermiticity_defect(m)
    if defect > tol.scaled(m.shape[0]):
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds "
                           f"{tol.scaled(m.shape[0]):.3e}")
    return m


def is_projector(matrix, tol: Tolerance = Tolerance()) -> bool:
    """True iff the matrix is Hermitian and idempotent within tolerance."""
    p = as_operator(matrix)
    bound = tol.scaled(p.shape[0])
    if hermiticity_defect(p) > bound:
        return False
    return frob(p @ p - p) <= bound


def require_projector(matrix, tol: Tolerance = Tolerance(),
                      name: str = "operator") -> np.ndarray:
    p = as_operator(matrix)
    if not is_projector(p, tol):
        raise NotProjector(f"{name} is not a projector within tolerance")
    return p


def commutator_norm(a, b) -> float:
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return frob(a @ b - b @ a)


def eigensystem(matrix, tol: Tolerance = Tolerance()) -> list[tuple[float, np.ndarray]]:
    """Spectral decomposition as (eigenvalue, eigenprojector) pairs.

    Eigenvalues are strictly increasing; eigenvalues closer than
    ``eps * max(1, ||A||_F)`` are merged into a single eigenprojector.  The
    projectors are pairwise orthogonal and sum to the identity.
    """
    a = require_hermitian(matrix, tol)
    dim = a.shape[0]
    evals, vecs = np.linalg.eigh(a)
    gap = tol.eps * max(1.0, frob(a))
    pairs: list[tuple[float, np.ndarray]] = []
    start = 0
    for stop in range(1, dim + 1):
        if stop == dim or evals[stop] - evals[stop - 1] > gap:
            cols = vecs[:, start:stop]
            proj = cols @ cols.conj().T
            proj = (proj + proj.conj().T) / 2
            proj.setflags(write=False)
            pairs.append((float(np.mean(evals[start:stop])), proj))
            start = stop
    return pairs


def apply_function(matrix, h: Callable[[float], float],
                   tol: Tolerance = Tolerance()) -> np.ndarray:
    """Apply a real function to a Hermitian matrix through its spectrum."""
    pairs = eigensystem(matrix, tol)
    dim = pairs[0][1].shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for value, proj in pairs:
        out += float(h(value)) * proj
    out = (out + out.conj().T) / 2
    out.setflags(write=False)
    return out


def proj_leq(p, q, tol: Tolerance = Tolerance()) -> bool:
    """Projector order: p <= q iff q absorbs p, i.e. ||q p - p|| small."""
    p = require_projector(p, tol, "first argument")
    q = require_projector(q, tol, "second argument")
    if p.shape != q.shape:
        raise DimensionMismatch(f"shapes {p.shape} and {q.shape} differ")
    return frob(q @ p - p) <= tol.scaled(p.shape[0])
