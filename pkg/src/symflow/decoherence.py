"""Semigroup decoherence in the exchange-symmetry basis.

The dissipator {P, rho, P} = 2 rho - 2 P rho P generates the channel

    exp(-tau/2 {P, ., P}) rho = (1 + e^{-2 tau})/2 rho + (1 - e^{-2 tau})/2 P rho P,

which leaves the symmetric and antisymmetric diagonal blocks alone and damps
the mixed blocks by e^{-2 tau}.  The same channel is a Gaussian average of the
unitaries e^{-iPu}; the master equation adds a P-commuting Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pairspace import PairBasis, min_eigenvalue
from .states import DensityOperator, _basis, _matrix, symmetricity

HERM_TOL = 1e-10
STEP_LIMIT = 0.1


class StepSizeError(ValueError):
    pass


class ContractViolation(RuntimeError):
    """A numerical post-condition (trace, Hermiticity, positivity) failed."""


def dissipator_bracket(a, rho, b) -> np.ndarray:
    """{A, rho, B} = B A^dag rho + rho B A^dag - 2 A^dag rho B."""
    a, rho, b = (np.asarray(x, dtype=complex) for x in (a, rho, b))
    ad = a.conj().T
    return b @ ad @ rho + rho @ b @ ad - 2.0 * ad @ rho @ b


def _mix(m, p, c_same, c_swap):
    return c_same * m + c_swap * (p @ m @ p)


def apply_semigroup_symmetrizer(rho, tau: float) -> DensityOperator:
    if tau < 0:
        raise ValueError("tau must be >= 0; use apply_inverse_semigroup for the inverse map")
    m, basis = _matrix(rho), _basis(rho)
    e = np.exp(-2.0 * tau)
    out = _mix(m, basis.permutation, 0.5 * (1 + e), 0.5 * (1 - e))
    return DensityOperator(out, basis)


def apply_inverse_semigroup(op, tau: float) -> np.ndarray:
    """exp(+tau/2 {P, ., P}); only meaningful on images of the forward channel."""
    m = np.asarray(_matrix(op), dtype=complex)
    p = PairBasis.for_operator(m).permutation
    e = np.exp(2.0 * tau)
    return _mix(m, p, 0.5 * (1 + e), 0.5 * (1 - e))


def apply_formal_antisymmetrizer(op, tau: float) -> np.ndarray:
    """e^{-2 tau} exp(+tau/2 {P, ., P}) O.

    Equals O at tau = 0 and tends to (O - POP)/2.  Not positivity preserving.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    m = np.asarray(_matrix(op), dtype=complex)
    p = PairBasis.for_operator(m).permutation
    e = np.exp(-2.0 * tau)
    return _mix(m, p, 0.5 * (e + 1), 0.5 * (e - 1))


def formal_antisymmetrizer_certificate(op, tau: float) -> dict:
    out = apply_formal_antisymmetrizer(op, tau)
    lam = min_eigenvalue(out)
    return {"tau": tau, "min_eigenvalue": lam, "positive": lam >= -1e-10}


@dataclass(frozen=True)
class QuadratureResult:
    rho: DensityOperator
    error_estimate: float
    nodes: int


def _exchange_unitaries(basis: PairBasis, u: np.ndarray) -> np.ndarray:
    # e^{-iPu} from the spectral decomposition of P
    v = basis.eigenbasis
    phases = np.exp(-1j * np.outer(u, basis.parities))
    return np.einsum("ij,uj,kj->uik", v, phases, v.conj())


def _trapezoid_average(m, basis, tau, nodes, width):
    half = width * np.sqrt(tau)
    u = np.linspace(-half, half, nodes)
    h = u[1] - u[0]
    w = np.full(nodes, h)
    w[0] = w[-1] = h / 2
    w *= np.exp(-u ** 2 / (2 * tau)) / np.sqrt(2 * np.pi * tau)
    us = _exchange_unitaries(basis, u)
    terms = us @ m @ us.conj().transpose(0, 2, 1)
    return np.tensordot(w, terms, axes=1)


def gaussian_unitary_average(rho, tau: float, nodes: int = 401, width: float = 8.0) -> QuadratureResult:
    """(2 pi tau)^{-1/2} int du e^{-u^2 / 2 tau} e^{-iPu} rho e^{iPu} on a uniform grid.

    Trapezoid rule over [-width sqrt(tau), width sqrt(tau)].  The error estimate
    is the max-entry change against the rule on every other node.
    """
    if tau <= 0:
        raise ValueError("tau must be > 0")
    if nodes < 5 or nodes % 2 == 0:
        raise ValueError("nodes must be odd and >= 5 so the grid can be halved")
    m, basis = _matrix(rho), _basis(rho)
    fine = _trapezoid_average(m, basis, tau, nodes, width)
    coarse = _trapezoid_average(m, basis, tau, (nodes + 1) // 2, width)
    err = float(np.max(np.abs(fine - coarse)))
    fine = 0.5 * (fine + fine.conj().T)
    return QuadratureResult(DensityOperator(fine, basis), err, nodes)


# -- master equation -------------------------------------------------------------

@dataclass(frozen=True)
class EvolutionParams:
    """Dimensionless master-equation settings; gamma is the dissipator rate."""

    hamiltonian: np.ndarray
    gamma: float = 0.0
    dt: float = 0.01
    t_max: float = 1.0
    sample_every: int = 1

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        p = PairBasis.for_operator(h).permutation
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")
        if np.max(np.abs(h - h.conj().T)) > HERM_TOL * max(1.0, np.max(np.abs(h))):
            raise ValueError("hamiltonian must be Hermitian")
        hn = np.linalg.norm(h)
        if np.linalg.norm(h @ p - p @ h) > HERM_TOL * max(hn, 1.0):
            raise ValueError("hamiltonian must commute with the exchange operator")
        object.__setattr__(self, "hamiltonian", h)

    @property
    def step_number(self) -> float:
        return self.dt * (np.linalg.norm(self.hamiltonian, 2) + 4.0 * self.gamma)


def master_rhs(rho, h, p, gamma):
    """d rho/dt = -i[H, rho] - gamma (2 rho - 2 P rho P)."""
    return -1j * (h @ rho - rho @ h) - gamma * (2.0 * rho - 2.0 * p @ rho @ p)


def rk4_step(rho, h, p, gamma, dt):
    k1 = master_rhs(rho, h, p, gamma)
    k2 = master_rhs(rho + 0.5 * dt * k1, h, p, gamma)
    k3 = master_rhs(rho + 0.5 * dt * k2, h, p, gamma)
    k4 = master_rhs(rho + dt * k3, h, p, gamma)
    return rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    basis: PairBasis
    diagnostics: dict = field(default_factory=dict)

    def check(self, trace_tol=1e-9, herm_tol=1e-10, pos_tol=1e-8):
        """Raise ContractViolation if any sample drifts out of the physical set."""
        d = self.diagnostics
        if d["max_trace_drift"] > trace_tol:
            raise ContractViolation(f"trace drift {d['max_trace_drift']:.3e} > {trace_tol}")
        if d["max_hermiticity"] > herm_tol:
            raise ContractViolation(f"Hermiticity residual {d['max_hermiticity']:.3e} > {herm_tol}")
        if d["min_eigenvalue"] < -pos_tol:
            raise ContractViolation(f"min eigenvalue {d['min_eigenvalue']:.3e} < -{pos_tol}")
        return self


def integrate_master_equation(rho0, params: EvolutionParams) -> Trajectory:
    """Classical fixed-step RK4 from t = 0 to round(t_max / dt) * dt."""
    if params.step_number > STEP_LIMIT:
        raise StepSizeError(
            f"dt * (||H|| + 4 gamma) = {params.step_number:.3g} exceeds {STEP_LIMIT}; "
            "use a smaller dt"
        )
    m0, basis = _matrix(rho0), _basis(rho0)
    h = params.hamiltonian
    if h.shape != m0.shape:
        raise ValueError("hamiltonian and rho0 live on different spaces")
    p = basis.permutation
    n_steps = int(round(params.t_max / params.dt))
    rho = np.array(m0, dtype=complex)
    tr0 = np.trace(rho).real
    times, states = [0.0], [rho.copy()]
    for k in range(1, n_steps + 1):
        rho = rk4_step(rho, h, p, params.gamma, params.dt)
        if k % params.sample_every == 0 or k == n_steps:
            times.append(k * params.dt)
            states.append(rho.copy())
    diag = {
        "max_trace_drift": max(abs(np.trace(s).real - tr0) for s in states),
        "max_hermiticity": max(float(np.max(np.abs(s - s.conj().T))) for s in states),
        "min_eigenvalue": min(min_eigenvalue(s) for s in states),
    }
    return Trajectory(np.asarray(times), states, basis, diag)


def trajectory_rows(traj: Trajectory, elements=(), element_basis: str = "eigen"):
    """Rows of (t, trace, symmetricity, min_eigenvalue, re/im of selected elements)."""
    basis = traj.basis
    v = basis.eigenbasis
    rows = []
    for t, m in zip(traj.times, traj.states):
        shown = v.conj().T @ m @ v if element_basis == "eigen" else m
        row = [t, np.trace(m).real, symmetricity(m), min_eigenvalue(m)]
        for i, j in elements:
            row += [shown[i, j].real, shown[i, j].imag]
        rows.append(row)
    return rows


def trajectory_header(elements=()):
    cols = ["t", "trace", "symmetricity", "min_eigenvalue"]
    for i, j in elements:
        cols += [f"re_{i}_{j}", f"im_{i}_{j}"]
    return cols
