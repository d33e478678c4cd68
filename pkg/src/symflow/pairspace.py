"""Two-particle Hilbert space built from a d-dimensional one-particle basis.

The product basis |u_i(1); u_j(2)> is laid out row-major with the particle-1
index outer, so ``product_index(i, j) = i * d + j``.  The exchange eigenbasis
lists the symmetric vectors (i <= j, lexicographic) first, followed by the
antisymmetric vectors (i < j, lexicographic).

Indices are zero-based throughout the code; docstrings that mention |u_1 u_2>
use the one-based labels of the physics notation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

TOL_HERM = 1e-10
TOL_NORM = 1e-10
TOL_POS = 1e-9
MAX_DIM = 16


class DimensionError(ValueError):
    """Raised when an operand does not live on the expected two-particle space."""


@dataclass(frozen=True)
class PairBasis:
    """Index bookkeeping for the product and exchange eigenbases of two particles."""

    d: int
    _sym: dict = field(init=False, repr=False, compare=False)
    _asym: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or isinstance(self.d, bool):
            raise TypeError(f"d must be an integer, got {self.d!r}")
        if not 2 <= self.d <= MAX_DIM:
            raise ValueError(f"d must lie in [2, {MAX_DIM}], got {self.d}")
        d = int(self.d)
        sym = {}
        for i in range(d):
            for j in range(i, d):
                sym[(i, j)] = len(sym)
        asym = {}
        for i in range(d):
            for j in range(i + 1, d):
                asym[(i, j)] = len(sym) + len(asym)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_sym", sym)
        object.__setattr__(self, "_asym", asym)

    @property
    def dim(self) -> int:
        return self.d * self.d

    @property
    def n_sym(self) -> int:
        return self.d * (self.d + 1) // 2

    @property
    def n_asym(self) -> int:
        return self.d * (self.d - 1) // 2

    def product_index(self, i: int, j: int) -> int:
        return i * self.d + j

    def sym_index(self, i: int, j: int) -> int:
        """Position of |Psi_s;ij> in the eigenbasis ordering (requires i <= j)."""
        return self._sym[(i, j)]

    def asym_index(self, i: int, j: int) -> int:
        """Position of |Psi_a;ij> in the eigenbasis ordering (requires i < j)."""
        return self._asym[(i, j)]

    def sym_pairs(self) -> list[tuple[int, int]]:
        return list(self._sym)

    def asym_pairs(self) -> list[tuple[int, int]]:
        return list(self._asym)

    @cached_property
    def permutation(self) -> np.ndarray:
        return build_permutation(self)

    @cached_property
    def symmetrizer(self) -> np.ndarray:
        return build_symmetrizer(self)

    @cached_property
    def antisymmetrizer(self) -> np.ndarray:
        return build_antisymmetrizer(self)

    @cached_property
    def eigenbasis(self) -> np.ndarray:
        """Unitary whose columns are the symmetric then antisymmetric eigenvectors."""
        return np.column_stack(sym_eigenbasis(self) + asym_eigenbasis(self))

    @cached_property
    def parities(self) -> np.ndarray:
        """Exchange eigenvalue (+1 / -1) of each eigenbasis column."""
        return np.concatenate([np.ones(self.n_sym), -np.ones(self.n_asym)])

    def check_ket(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (self.dim,):
            raise DimensionError(
                f"ket has shape {psi.shape}, basis with d={self.d} expects ({self.dim},)"
            )
        return psi

    def check_operator(self, op) -> np.ndarray:
        op = np.asarray(op, dtype=complex)
        if op.shape != (self.dim, self.dim):
            raise DimensionError(
                f"operator has shape {op.shape}, basis with d={self.d} "
                f"expects ({self.dim}, {self.dim})"
            )
        return op

    @classmethod
    def for_operator(cls, op) -> "PairBasis":
        """Infer the basis from a square operator of size d**2."""
        n = np.shape(op)[0]
        d = int(round(np.sqrt(n)))
        if d * d != n or np.shape(op) != (n, n):
            raise DimensionError(f"shape {np.shape(op)} is not (d**2, d**2)")
        return cls(d)


def build_permutation(basis: PairBasis) -> np.ndarray:
    """Exchange operator P|u_i; u_j> = |u_j; u_i> as a real 0/1 matrix."""
    d = basis.d
    perm = np.zeros((basis.dim, basis.dim))
    for i in range(d):
        for j in range(d):
            perm[basis.product_index(j, i), basis.product_index(i, j)] = 1.0
    return perm


def build_symmetrizer(basis: PairBasis) -> np.ndarray:
    return 0.5 * (np.eye(basis.dim) + build_permutation(basis))


def build_antisymmetrizer(basis: PairBasis) -> np.ndarray:
    return 0.5 * (np.eye(basis.dim) - build_permutation(basis))


def product_ket(basis: PairBasis, i: int, j: int) -> np.ndarray:
    ket = np.zeros(basis.dim, dtype=complex)
    ket[basis.product_index(i, j)] = 1.0
    return ket


def sym_ket(basis: PairBasis, i: int, j: int) -> np.ndarray:
    """|Psi_s;ij> = (|u_i u_j> + |u_j u_i>) / sqrt(2 (1 + delta_ij)), i <= j."""
    if i > j:
        raise ValueError("symmetric eigenvectors are labelled with i <= j")
    norm = 1.0 / np.sqrt(2.0 * (1 + (i == j)))
    return norm * (product_ket(basis, i, j) + product_ket(basis, j, i))


def asym_ket(basis: PairBasis, i: int, j: int) -> np.ndarray:
    """|Psi_a;ij> = (|u_i u_j> - |u_j u_i>) / sqrt(2), i < j."""
    if i >= j:
        raise ValueError("antisymmetric eigenvectors need i < j (no i = j element)")
    return (product_ket(basis, i, j) - product_ket(basis, j, i)) / np.sqrt(2.0)


def sym_eigenbasis(basis: PairBasis) -> list[np.ndarray]:
    return [sym_ket(basis, i, j) for i, j in basis.sym_pairs()]


def asym_eigenbasis(basis: PairBasis) -> list[np.ndarray]:
    return [asym_ket(basis, i, j) for i, j in basis.asym_pairs()]


def decompose_ket(psi, basis: PairBasis) -> tuple[np.ndarray, np.ndarray]:
    """Split a ket into its symmetric and antisymmetric parts.

    The parts are assembled from the coefficient formulas
    ``(c_ij + c_ji) / sqrt(2 (1 + delta_ij))`` and ``(c_ij - c_ji) / sqrt(2)``
    on the eigenvectors, not by applying S and A, so that the projector route
    stays available as an independent check.
    """
    psi = basis.check_ket(psi)
    c = psi.reshape(basis.d, basis.d)
    psi_s = np.zeros(basis.dim, dtype=complex)
    for i, j in basis.sym_pairs():
        coeff = (c[i, j] + c[j, i]) / np.sqrt(2.0 * (1 + (i == j)))
        psi_s += coeff * sym_ket(basis, i, j)
    psi_a = np.zeros(basis.dim, dtype=complex)
    for i, j in basis.asym_pairs():
        psi_a += (c[i, j] - c[j, i]) / np.sqrt(2.0) * asym_ket(basis, i, j)
    return psi_s, psi_a


def to_eigenbasis(psi, basis: PairBasis) -> np.ndarray:
    """Coordinates of a product-basis ket in the exchange eigenbasis."""
    return basis.eigenbasis.conj().T @ basis.check_ket(psi)


def from_eigenbasis(coords, basis: PairBasis) -> np.ndarray:
    return basis.eigenbasis @ np.asarray(coords, dtype=complex)


def operator_to_eigenbasis(op, basis: PairBasis) -> np.ndarray:
    v = basis.eigenbasis
    return v.conj().T @ basis.check_operator(op) @ v


def operator_from_eigenbasis(op, basis: PairBasis) -> np.ndarray:
    v = basis.eigenbasis
    return v @ np.asarray(op, dtype=complex) @ v.conj().T


# -- matrix predicates ---------------------------------------------------------

def trace_norm(m) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - m.conj().T))) <= tol


def min_eigenvalue(m) -> float:
    m = np.asarray(m)
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def is_positive(m, tol: float = TOL_POS) -> bool:
    """Hermitian with smallest eigenvalue >= -tol * ||m||_1."""
    if not is_hermitian(m):
        return False
    return min_eigenvalue(m) >= -tol * max(trace_norm(m), np.finfo(float).tiny)


def ket_norm(psi) -> float:
    return float(np.linalg.norm(psi))


def is_normalized(psi, tol: float = TOL_NORM) -> bool:
    return abs(ket_norm(psi) - 1.0) <= tol


def gram(kets: Iterable[np.ndarray]) -> np.ndarray:
    v = np.column_stack(list(kets))
    return v.conj().T @ v
