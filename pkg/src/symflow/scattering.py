"""Elastic-collision probabilities for two identical spin-s particles.

The pair starts in a perfectly asymmetric mixture of |-p e_z, m; p e_z, m'>
over spin labels and is detected in the (-p n, p n) pair of directions.  The
standard answer uses the projector (1 + eps P)/sqrt 2 on both sides of rho0; the
environment-induced answer replaces it with the operator-sum map of a schedule
and replaces T_S with the semigroup channel at decoherence time tau(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .decoherence import ContractViolation, apply_semigroup_symmetrizer
from .pairspace import PairBasis
from .states import DensityOperator, operator_symmetrize
from .symmap import Schedule, apply_map_kraus

REALITY_TOL = 1e-12

# one-particle momentum labels used by the finite oracle
MOMENTA = ("+ez", "-ez", "+n", "-n")
_PZ, _MZ, _PN, _MN = range(4)


@dataclass(frozen=True)
class LinearTau:
    """tau(t) = rate * t."""

    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("tau rate must be >= 0")

    def __call__(self, t: float) -> float:
        return self.rate * t


def linear_tau(rate: float | None = None, g: float = 1.0, b: float = 1.0) -> LinearTau:
    """Linear decoherence time; the default rate 2 pi g / b is the QND semigroup rate."""
    return LinearTau(2 * math.pi * g / b if rate is None else rate)


@dataclass(frozen=True)
class CollisionConfig:
    spin_s: float
    epsilon: int
    F_n: complex
    F_minus_n: complex
    schedule: Schedule | None = None
    tau_of_t: Callable[[float], float] = LinearTau(2 * math.pi)

    def __post_init__(self):
        two_s = 2 * self.spin_s
        if self.spin_s < 0 or abs(two_s - round(two_s)) > 1e-12:
            raise ValueError(f"spin_s must be a nonnegative half-integer, got {self.spin_s}")
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")
        for name in ("F_n", "F_minus_n"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.tau_of_t(0.0) < 0:
            raise ValueError("tau_of_t(0) must be >= 0")

    @property
    def multiplicity(self) -> int:
        return int(round(2 * self.spin_s)) + 1

    def swapped(self) -> "CollisionConfig":
        return CollisionConfig(self.spin_s, self.epsilon, self.F_minus_n, self.F_n,
                               self.schedule, self.tau_of_t)


def standard_probability(cfg: CollisionConfig) -> float:
    """|F(n)|^2 + |F(-n)|^2 + eps/(2s+1) 2 Re[F*(n) F(-n)]."""
    fn, fm = cfg.F_n, cfg.F_minus_n
    cross = 2 * (fn.conjugate() * fm).real
    return abs(fn) ** 2 + abs(fm) ** 2 + cfg.epsilon / cfg.multiplicity * cross


def environment_probability_complex(cfg: CollisionConfig, t: float) -> complex:
    """Unsimplified sum of the four terms; the imaginary part is rounding only."""
    sched = cfg.schedule
    if sched is None:
        raise ValueError("environment_probability needs a schedule")
    problems = sched.check_at(t)
    if problems:
        raise ValueError("; ".join(problems))
    tau = cfg.tau_of_t(t)
    a, s = sched.a(t), sched.s(t)
    e = math.exp(-2 * tau)
    sa = np.sum(s * a.conj())
    as_ = np.sum(a * s.conj())
    diff = sched.s2(t) - sched.a2(t)
    k = 2 * cfg.multiplicity
    fn, fm = cfg.F_n, cfg.F_minus_n
    return complex(
        (1 + 0.5 * e * (sa + as_)) * abs(fn) ** 2
        + (1 - 0.5 * e * (sa + as_)) * abs(fm) ** 2
        + (diff + e * (as_ - sa)) / k * fn * fm.conjugate()
        + (diff + e * (sa - as_)) / k * fm * fn.conjugate()
    )


def environment_probability(cfg: CollisionConfig, t: float) -> float:
    z = environment_probability_complex(cfg, t)
    scale = max(1.0, abs(cfg.F_n) ** 2 + abs(cfg.F_minus_n) ** 2)
    if abs(z.imag) > REALITY_TOL * scale:
        raise ContractViolation(f"probability has imaginary part {z.imag:.3e}")
    return z.real


# -- finite-matrix oracle --------------------------------------------------------

def random_exchange_unitary(seed: int, n_momenta: int = len(MOMENTA)) -> np.ndarray:
    """exp(-i T_S(H)) on the two-particle momentum space for a seeded random Hermitian H."""
    basis = PairBasis(n_momenta)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((basis.dim,) * 2) + 1j * rng.standard_normal((basis.dim,) * 2)
    h = operator_symmetrize(0.5 * (g + g.conj().T))
    lam, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * lam)) @ v.conj().T


def amplitudes_from_unitary(u: np.ndarray) -> tuple[complex, complex]:
    """F(n) = <-n; n|U|-e_z; e_z> and F(-n) = <n; -n|U|-e_z; e_z>."""
    n = len(MOMENTA)
    col = _MZ * n + _PZ
    return complex(u[_MN * n + _PN, col]), complex(u[_PN * n + _MN, col])


def _with_spin(u: np.ndarray, mult: int) -> np.ndarray:
    # index order (momentum1, spin1, momentum2, spin2); spins evolve trivially
    n = len(MOMENTA)
    eye = np.eye(mult)
    u4 = u.reshape(n, n, n, n)
    dim = (n * mult) ** 2
    return np.einsum("ijkl,ab,cd->iajckbld", u4, eye, eye).reshape(dim, dim)


def _pair_projector(mom1: int, mom2: int, mult: int) -> np.ndarray:
    d = len(MOMENTA) * mult
    out = np.zeros((d * d, d * d))
    for m1 in range(mult):
        for m2 in range(mult):
            k = (mom1 * mult + m1) * d + mom2 * mult + m2
            out[k, k] = 1.0
    return out


@dataclass
class CollisionModel:
    """Explicit 4 (2s+1)-dimensional one-particle model of the collision."""

    spin_s: float
    unitary: np.ndarray

    def __post_init__(self):
        self.mult = int(round(2 * self.spin_s)) + 1
        self.basis = PairBasis(len(MOMENTA) * self.mult)
        self.u_total = _with_spin(self.unitary, self.mult)
        self.rho0 = DensityOperator(_pair_projector(_MZ, _PZ, self.mult) / self.mult ** 2, self.basis)
        self.observable = _pair_projector(_MN, _PN, self.mult)

    @property
    def amplitudes(self):
        return amplitudes_from_unitary(self.unitary)

    def config(self, epsilon=1, schedule=None, tau_of_t=LinearTau(2 * math.pi)) -> CollisionConfig:
        fn, fm = self.amplitudes
        return CollisionConfig(self.spin_s, epsilon, fn, fm, schedule, tau_of_t)

    def _expect(self, state: np.ndarray, obs: np.ndarray) -> complex:
        u = self.u_total
        return 2 * np.trace(u @ state @ u.conj().T @ obs)

    def standard(self, epsilon: int) -> float:
        p = self.basis.permutation
        one = np.eye(self.basis.dim)
        m = self.rho0.matrix
        state = 0.5 * (one + epsilon * p) @ m @ (one + epsilon * p)
        return self._expect(state, operator_symmetrize(self.observable)).real

    def environment(self, schedule: Schedule, tau: float, t: float) -> complex:
        sigma = apply_semigroup_symmetrizer(self.rho0, tau)
        state = apply_map_kraus(sigma, schedule, t)
        return self._expect(state, self.observable)


SCATTER_HEADER = ("t", "P_env", "P_standard_boson", "P_standard_fermion", "tau", "m_t")


def scatter_rows(cfg: CollisionConfig, times):
    boson = standard_probability(CollisionConfig(cfg.spin_s, 1, cfg.F_n, cfg.F_minus_n))
    fermion = standard_probability(CollisionConfig(cfg.spin_s, -1, cfg.F_n, cfg.F_minus_n))
    return [
        [t, environment_probability(cfg, t), boson, fermion, cfg.tau_of_t(t), cfg.schedule.m(t)]
        for t in times
    ]
