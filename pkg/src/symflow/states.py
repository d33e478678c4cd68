"""Density operators of two identical particles and their exchange symmetry.

Covers the symmetricity Tr(P rho)/Tr(rho), the state/operator symmetry
classification, the operator (anti)symmetrizers, the constructive block and
mixture decompositions, and matrix-element identities relating the
Schroedinger and Heisenberg placements of the symmetry.

Random states are drawn with ``numpy.random.default_rng(seed)`` (PCG64), real
and imaginary parts standard normal.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .pairspace import (
    TOL_HERM,
    TOL_NORM,
    TOL_POS,
    PairBasis,
    decompose_ket,
    min_eigenvalue,
    sym_ket,
    asym_ket,
    trace_norm,
)

CLASSIFY_TOL = 1e-9
PA_TOL = 1e-9
DROP_TOL = 1e-12
MAX_ENSEMBLE = 64

KINDS = ("generic", "state_symmetric", "state_antisymmetric", "perfectly_asymmetric", "paos")


class PreconditionError(ValueError):
    """An input violates a stated premise of the operation."""


class InvalidStateError(ValueError):
    """A matrix fails the Hermitian / positive / finite-trace requirements."""


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian positive operator on the two-particle space, not necessarily unit trace."""

    matrix: np.ndarray
    basis: PairBasis
    kind: str | None = None
    seed: int | None = None

    def __post_init__(self):
        m = self.basis.check_operator(self.matrix).copy()
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("density matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > TOL_HERM * scale:
            raise InvalidStateError("density matrix is not Hermitian")
        if min_eigenvalue(m) < -TOL_POS * max(trace_norm(m), 1.0):
            raise InvalidStateError(
                f"density matrix is not positive (min eigenvalue {min_eigenvalue(m):.3e})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, m, **kw) -> "DensityOperator":
        return cls(np.asarray(m, dtype=complex), PairBasis.for_operator(m), **kw)

    @classmethod
    def pure(cls, psi, basis: PairBasis, normalize: bool = True) -> "DensityOperator":
        psi = basis.check_ket(psi)
        if normalize:
            psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), basis)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def normalized(self) -> bool:
        return abs(self.trace - 1.0) <= TOL_NORM

    def symmetricity(self) -> float:
        return symmetricity(self)

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return matrix_to_json(self.matrix, self.basis.d, kind=self.kind, seed=self.seed)


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def _basis(rho) -> PairBasis:
    return rho.basis if isinstance(rho, DensityOperator) else PairBasis.for_operator(rho)


def symmetricity(rho) -> float:
    """Tr(P rho) / Tr(rho), a number in [-1, 1] for any positive rho."""
    m, basis = _matrix(rho), _basis(rho)
    tr = np.trace(m).real
    if abs(tr) <= np.finfo(float).eps * max(1.0, float(np.max(np.abs(m)))):
        raise PreconditionError("symmetricity is undefined for a zero-trace operator")
    return float(np.trace(basis.permutation @ m).real / tr)


class SymmetryClass(enum.Enum):
    STATE_SYMMETRIC = "StateSymmetric"
    STATE_ANTISYMMETRIC = "StateAntisymmetric"
    OPERATOR_SYMMETRIC_ONLY = "OperatorSymmetricOnly"
    NO_DEFINITE_SYMMETRY = "NoDefiniteSymmetry"


@dataclass(frozen=True)
class SymmetryReport:
    cls: SymmetryClass
    symmetricity: float
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "class": self.cls.value,
            "symmetricity": self.symmetricity,
            "residuals": dict(self.residuals),
        }


def classify(rho, tol: float = CLASSIFY_TOL) -> SymmetryReport:
    """Classify by relative Frobenius residuals; state symmetry shadows operator symmetry."""
    m, basis = _matrix(rho), _basis(rho)
    p = basis.permutation
    scale = np.linalg.norm(m)
    res = {
        "state_symmetric": float(np.linalg.norm(p @ m - m) / scale),
        "state_antisymmetric": float(np.linalg.norm(p @ m + m) / scale),
        "operator_symmetric": float(np.linalg.norm(p @ m @ p - m) / scale),
    }
    if res["state_symmetric"] <= tol:
        cls = SymmetryClass.STATE_SYMMETRIC
    elif res["state_antisymmetric"] <= tol:
        cls = SymmetryClass.STATE_ANTISYMMETRIC
    elif res["operator_symmetric"] <= tol:
        cls = SymmetryClass.OPERATOR_SYMMETRIC_ONLY
    else:
        cls = SymmetryClass.NO_DEFINITE_SYMMETRY
    return SymmetryReport(cls, symmetricity(rho), res)


def operator_symmetrize(op) -> np.ndarray:
    """T_S(O) = (O + POP) / 2."""
    op = np.asarray(op, dtype=complex)
    p = PairBasis.for_operator(op).permutation
    return 0.5 * (op + p @ op @ p)


def operator_antisymmetrize(op) -> np.ndarray:
    """T_A(O) = (O - POP) / 2."""
    op = np.asarray(op, dtype=complex)
    p = PairBasis.for_operator(op).permutation
    return 0.5 * (op - p @ op @ p)


def _sector_vectors(basis: PairBasis, sector: str) -> np.ndarray:
    if sector == "symmetric":
        return basis.eigenbasis[:, : basis.n_sym]
    if sector == "antisymmetric":
        return basis.eigenbasis[:, basis.n_sym :]
    raise ValueError(f"unknown sector {sector!r}")


def lemma1_block_form(rho, sector: str = "symmetric") -> np.ndarray:
    """Coefficients <Psi_s;ij|rho|Psi_s;kl> of a state-symmetric rho.

    Rows and columns follow ``basis.sym_index``.  The antisymmetric sector is
    handled the same way for state-antisymmetric input.
    """
    report = classify(rho)
    want = {
        "symmetric": SymmetryClass.STATE_SYMMETRIC,
        "antisymmetric": SymmetryClass.STATE_ANTISYMMETRIC,
    }[sector]
    if report.cls is not want:
        raise PreconditionError(
            f"block form needs a {want.value} operator (P rho = "
            f"{'+' if sector == 'symmetric' else '-'}rho); got {report.cls.value}"
        )
    v = _sector_vectors(_basis(rho), sector)
    return v.conj().T @ _matrix(rho) @ v


def block_reconstruct(coeffs, basis: PairBasis, sector: str = "symmetric") -> np.ndarray:
    v = _sector_vectors(basis, sector)
    return v @ np.asarray(coeffs) @ v.conj().T


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted pure-state ensemble sum_r p_r |Psi_r><Psi_r|."""

    weights: np.ndarray
    kets: tuple
    basis: PairBasis = field(init=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        kets = tuple(np.asarray(k, dtype=complex) for k in self.kets)
        if len(kets) != len(w) or not kets:
            raise ValueError("ensemble needs one ket per weight")
        if len(kets) > MAX_ENSEMBLE:
            raise ValueError(f"ensembles are capped at {MAX_ENSEMBLE} members")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("ensemble weights must be positive and sum to 1")
        for k in kets:
            if abs(np.linalg.norm(k) - 1.0) > TOL_NORM:
                raise ValueError("ensemble kets must be normalized")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kets", kets)
        object.__setattr__(self, "basis", PairBasis.for_operator(np.outer(kets[0], kets[0])))

    def density(self) -> DensityOperator:
        m = sum(p * np.outer(k, k.conj()) for p, k in zip(self.weights, self.kets))
        return DensityOperator(m, self.basis)


def lemma3_decompose(ens: Ensemble, tol: float = CLASSIFY_TOL):
    """Rewrite an operator-symmetric ensemble as a mixture of state-(anti)symmetric states.

    Each member splits as |Psi_r> = |Psi_S,r> + |Psi_A,r>; the symmetric part
    gets weight p_r <S|S> and the antisymmetric part p_r <A|A> (the closed
    forms p_r / (<A|A>/<S|S> + 1) and p_r / (1 + <S|S>/<A|A>)).  Parts with
    squared norm below ``DROP_TOL`` are dropped.

    Returns
    -------
    weights : ndarray
    components : list of DensityOperator
        Each one StateSymmetric or StateAntisymmetric, trace 1.
    """
    rho = ens.density()
    if classify(rho, tol).cls is SymmetryClass.NO_DEFINITE_SYMMETRY:
        raise PreconditionError("ensemble density operator is not operator-symmetric (P rho P != rho)")
    basis = ens.basis
    weights, comps = [], []
    for p, psi in zip(ens.weights, ens.kets):
        psi_s, psi_a = decompose_ket(psi, basis)
        ns = float(np.vdot(psi_s, psi_s).real)
        na = float(np.vdot(psi_a, psi_a).real)
        both = ns > DROP_TOL and na > DROP_TOL
        if ns > DROP_TOL:
            weights.append(p / (na / ns + 1.0) if both else p)
            comps.append(DensityOperator(np.outer(psi_s, psi_s.conj()) / ns, basis))
        if na > DROP_TOL:
            weights.append(p / (1.0 + ns / na) if both else p)
            comps.append(DensityOperator(np.outer(psi_a, psi_a.conj()) / na, basis))
    return np.asarray(weights), comps


def split_paos(rho) -> tuple[DensityOperator, DensityOperator]:
    """Split a perfectly asymmetric, operator-symmetric rho into (rho_A, rho_S).

    rho = rho_A / 2 + rho_S / 2 with rho_A = 2 A rho A and rho_S = 2 S rho S.
    """
    m, basis = _matrix(rho), _basis(rho)
    tr = np.trace(m).real
    r = symmetricity(rho)
    if abs(r) > PA_TOL:
        raise PreconditionError(f"rho is not perfectly asymmetric (Tr P rho / Tr rho = {r:.3e})")
    res = classify(rho).residuals["operator_symmetric"]
    if res > CLASSIFY_TOL:
        raise PreconditionError(f"rho is not operator-symmetric (||P rho P - rho|| / ||rho|| = {res:.3e})")
    a, s = basis.antisymmetrizer, basis.symmetrizer
    rho_a = 2.0 * a @ m @ a / tr
    rho_s = 2.0 * s @ m @ s / tr
    return DensityOperator(rho_a, basis), DensityOperator(rho_s, basis)


@dataclass(frozen=True)
class PictureReport:
    """Residuals of the four Schroedinger/Heisenberg matrix-element identities."""

    residuals: dict
    scale: float

    def max_relative(self) -> float:
        return max(self.residuals.values()) / self.scale if self.scale else 0.0


def picture_identity_check(op, psi, phi) -> PictureReport:
    op = np.asarray(op, dtype=complex)
    basis = PairBasis.for_operator(op)
    psi, phi = basis.check_ket(psi), basis.check_ket(phi)
    p, s, a = basis.permutation, basis.symmetrizer, basis.antisymmetrizer
    o_s = 0.5 * (op + p @ op @ p)
    o_a = 0.5 * (op - p @ op @ p)

    def elem(x, bra, ket):
        return np.vdot(bra, x @ ket)

    ps, pa, fs, fa = s @ psi, a @ psi, s @ phi, a @ phi
    anti_s = p @ o_s + o_s @ p
    comm_a = p @ o_a - o_a @ p
    pairs = {
        "SS": (elem(op, ps, fs), 0.5 * elem(o_s + 0.5 * anti_s, psi, phi)),
        "AA": (elem(op, pa, fa), 0.5 * elem(o_s - 0.5 * anti_s, psi, phi)),
        "SA": (elem(op, ps, fa), 0.5 * elem(o_a + 0.5 * comm_a, psi, phi)),
        "AS": (elem(op, pa, fs), 0.5 * elem(o_a - 0.5 * comm_a, psi, phi)),
    }
    residuals = {k: float(abs(lhs - rhs)) for k, (lhs, rhs) in pairs.items()}
    scale = float(np.linalg.norm(op, 2) * np.linalg.norm(psi) * np.linalg.norm(phi))
    return PictureReport(residuals, scale)


# -- random states -------------------------------------------------------------

def _gaussian_density(rng, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    return m / np.trace(m).real


def _project(m, proj) -> np.ndarray:
    out = proj @ m @ proj
    return out / np.trace(out).real


def random_density(seed: int, d: int, kind: str = "generic") -> DensityOperator:
    """Seeded random two-particle density operator of the requested symmetry kind."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    basis = PairBasis(d)
    rng = np.random.default_rng(seed)
    n = basis.dim
    s, a, p = basis.symmetrizer, basis.antisymmetrizer, basis.permutation

    if kind == "generic":
        m = _gaussian_density(rng, n)
    elif kind == "state_symmetric":
        m = _project(_gaussian_density(rng, n), s)
    elif kind == "state_antisymmetric":
        m = _project(_gaussian_density(rng, n), a)
    elif kind == "perfectly_asymmetric":
        rho1 = _gaussian_density(rng, n)
        rho2 = _gaussian_density(rng, n)
        r1 = np.trace(p @ rho1).real
        r2 = np.trace(p @ rho2).real
        if r1 * r2 >= 0:
            rho2 = _project(rho2, a if r1 >= 0 else s)
            r2 = -1.0 if r1 >= 0 else 1.0
        alpha = -r2 / (r1 - r2)
        m = alpha * rho1 + (1 - alpha) * rho2
    else:
        rho_s = _project(_gaussian_density(rng, n), s)
        rho_a = _project(_gaussian_density(rng, n), a)
        m = 0.5 * rho_s + 0.5 * rho_a
    m = 0.5 * (m + m.conj().T)
    return DensityOperator(m, basis, kind=kind, seed=seed)


def random_ket(seed: int, d: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = d * d
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return psi / np.linalg.norm(psi)


def example_paos_4x4() -> DensityOperator:
    """(|++><++| + singlet projector) / 2 on two qubits, in the |++>,|+->,|-+>,|--> order."""
    basis = PairBasis(2)
    plus_plus = sym_ket(basis, 0, 0)
    singlet = asym_ket(basis, 0, 1)
    m = 0.5 * (np.outer(plus_plus, plus_plus.conj()) + np.outer(singlet, singlet.conj()))
    return DensityOperator(m, basis)
