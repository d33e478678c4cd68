"""Operator-sum maps built from W_alpha = a_alpha A + s_alpha S.

Lambda_t(sigma) = sum_alpha W_alpha sigma W_alpha^dag.  With p = (|a|^2 + |s|^2)/2
and m = (|s|^2 - |a|^2)/2 the map sends Tr sigma -> p Tr sigma + m Tr P sigma
and Tr P sigma -> m Tr sigma + p Tr P sigma, so on perfectly asymmetric input
(Tr P sigma = 0) with p = 1 it is trace preserving and drives the
symmetricity to m(t).  ``apply_map_noncp`` is the sigma-dependent rewrite that
preserves the trace for every sigma at the price of complete positivity.

Vector products follow the physics convention ``a . s = sum conj(a) s``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .pairspace import PairBasis, min_eigenvalue
from .states import (
    DensityOperator,
    PreconditionError,
    _basis,
    _matrix,
    symmetricity,
)

PA_TOL = 1e-9
SCHEDULE_TOL = 1e-12
MAX_CHANNELS = 8
SCHEDULE_KINDS = ("to_antisymmetric", "to_symmetric", "identity", "perpendicular")


def dot(u, v) -> complex:
    return complex(np.vdot(u, v))


@dataclass(frozen=True)
class Schedule:
    """Channel coefficients a(t), s(t), each a K-vector of complex numbers."""

    a_fn: Callable[[float], Sequence[complex]]
    s_fn: Callable[[float], Sequence[complex]]
    kappa: float = 1.0
    name: str = "custom"

    def a(self, t: float) -> np.ndarray:
        return np.asarray(self.a_fn(t), dtype=complex)

    def s(self, t: float) -> np.ndarray:
        return np.asarray(self.s_fn(t), dtype=complex)

    @property
    def K(self) -> int:
        return len(self.a(0.0))

    def a2(self, t):
        return float(np.sum(np.abs(self.a(t)) ** 2))

    def s2(self, t):
        return float(np.sum(np.abs(self.s(t)) ** 2))

    def overlap(self, t) -> complex:
        """a . s = sum_alpha conj(a_alpha) s_alpha."""
        return dot(self.a(t), self.s(t))

    def p(self, t) -> float:
        return 0.5 * (self.s2(t) + self.a2(t))

    def m(self, t) -> float:
        return 0.5 * (self.s2(t) - self.a2(t))

    def kraus(self, t, basis: PairBasis) -> list[np.ndarray]:
        a, s = self.a(t), self.s(t)
        return [ai * basis.antisymmetrizer + si * basis.symmetrizer for ai, si in zip(a, s)]

    @classmethod
    def constant(cls, a, s, name="constant") -> "Schedule":
        a = tuple(complex(x) for x in a)
        s = tuple(complex(x) for x in s)
        return cls(lambda t: a, lambda t: s, name=name)

    def check_at(self, t: float, m_bound: float = 1.0) -> list[str]:
        """Norm-preservation constraints p(t) = 1 and |m(t)| <= m_bound at one time."""
        problems = []
        if abs(self.p(t) - 1) > 1e-10:
            problems.append(f"p({t:g}) = {self.p(t):.12g} != 1")
        if abs(self.m(t)) > m_bound + 1e-12:
            problems.append(f"|m({t:g})| = {abs(self.m(t)):.6g} > {m_bound:g}")
        return problems

    def check(self, t_samples=(0.0, 0.5, 1.0, 2.0, 5.0), m_bound: float = 1.0) -> list[str]:
        """List the violated schedule constraints (empty when all hold)."""
        problems = []
        a0, s0 = self.a(0.0), self.s(0.0)
        if a0.shape != s0.shape or a0.ndim != 1:
            return ["a and s must be 1-D vectors of equal length"]
        if len(a0) > MAX_CHANNELS:
            problems.append(f"K = {len(a0)} exceeds {MAX_CHANNELS} channels")
        if np.max(np.abs(a0 - s0)) > SCHEDULE_TOL:
            problems.append("a(0) != s(0): the map is not the identity at t = 0")
        if abs(self.a2(0.0) - 1) > SCHEDULE_TOL or abs(self.s2(0.0) - 1) > SCHEDULE_TOL:
            problems.append("|a(0)|^2 and |s(0)|^2 must both equal 1")
        eps = 1e-9
        if np.max(np.abs(self.a(eps) - a0)) > 1e-6 or np.max(np.abs(self.s(eps) - s0)) > 1e-6:
            problems.append("a or s is discontinuous at t = 0+")
        for t in t_samples:
            problems += self.check_at(t, m_bound)
        return problems


def builtin_schedule(kind: str, kappa: float = 1.0) -> Schedule:
    """Built-in schedules.

    ``to_antisymmetric`` realizes |a|^2 = tanh^2 + 1, |s|^2 = sech^2 with
    a = (tanh kt, 1), s = (0, sech kt); ``to_symmetric`` swaps the roles;
    ``perpendicular`` uses a = (tanh kt, 1, 0), s = (0, 0, sech kt) so that
    a . s = 0 at every t (and therefore a(0) != s(0)).
    """
    if not kappa > 0:
        raise ValueError("kappa must be > 0")
    th = lambda t: math.tanh(kappa * t)
    sech = lambda t: 1.0 / math.cosh(kappa * t)
    if kind == "to_antisymmetric":
        return Schedule(lambda t: (th(t), 1.0), lambda t: (0.0, sech(t)), kappa, kind)
    if kind == "to_symmetric":
        return Schedule(lambda t: (0.0, sech(t)), lambda t: (th(t), 1.0), kappa, kind)
    if kind == "identity":
        return Schedule(lambda t: (1.0,), lambda t: (1.0,), kappa, kind)
    if kind == "perpendicular":
        return Schedule(lambda t: (th(t), 1.0, 0.0), lambda t: (0.0, 0.0, sech(t)), kappa, kind)
    raise ValueError(f"schedule kind must be one of {SCHEDULE_KINDS}, got {kind!r}")


def four_term_coefficients(sched: Schedule, t: float):
    """Weights of sigma, P sigma P, P sigma, sigma P in the expanded map."""
    a, s = sched.a(t), sched.s(t)
    return (
        0.25 * dot(a + s, a + s).real,
        0.25 * dot(s - a, s - a).real,
        0.25 * dot(s + a, s - a),
        0.25 * dot(s - a, s + a),
    )


def _four_term(m, p, coeffs):
    c_id, c_pp, c_left, c_right = coeffs
    return c_id * m + c_pp * (p @ m @ p) + c_left * (p @ m) + c_right * (m @ p)


def apply_map_kraus(sigma, sched: Schedule, t: float) -> np.ndarray:
    """Literal sum over channels of W sigma W^dag (no domain check)."""
    m, basis = _matrix(sigma), _basis(sigma)
    return sum(w @ m @ w.conj().T for w in sched.kraus(t, basis))


def apply_map(sigma, sched: Schedule, t: float, strict: bool = True) -> DensityOperator:
    """Lambda_t on a perfectly asymmetric sigma via the four-term expansion.

    ``strict=False`` skips the domain check so the trace drift on other inputs
    can be studied.
    """
    m, basis = _matrix(sigma), _basis(sigma)
    if strict:
        r = symmetricity(sigma)
        if abs(r) > PA_TOL:
            raise PreconditionError(
                f"apply_map needs Tr P sigma = 0 (got ratio {r:.3e}); "
                "use apply_map_noncp for general input"
            )
        if abs(sched.m(t)) > 1 + 1e-12:
            raise PreconditionError(f"|m(t)| = {abs(sched.m(t)):.6g} exceeds 1")
    out = _four_term(m, basis.permutation, four_term_coefficients(sched, t))
    return DensityOperator(0.5 * (out + out.conj().T), basis)


def apply_map_noncp(sigma, sched: Schedule, t: float) -> DensityOperator:
    """Trace-preserving rewrite valid for any sigma with nonzero trace.

    sigma + |s-a|^2/4 (P sigma P - sigma) + (s+a).(s-a)/4 (P sigma - r sigma)
          + (s-a).(s+a)/4 (sigma P - r sigma),  r = Tr P sigma / Tr sigma.

    Requires |m(t)| <= 1/2.  Positivity is not structural; the output is
    validated as a density operator on every call.
    """
    m, basis = _matrix(sigma), _basis(sigma)
    r = symmetricity(sigma)
    mt = sched.m(t)
    if abs(mt) > 0.5 + 1e-12:
        raise PreconditionError(
            f"|m(t)| = {abs(mt):.6g} exceeds the uniform bound 1/2 required for arbitrary sigma"
        )
    _, c_pp, c_left, c_right = four_term_coefficients(sched, t)
    p = basis.permutation
    out = (m + c_pp * (p @ m @ p - m) + c_left * (p @ m - r * m) + c_right * (m @ p - r * m))
    return DensityOperator(0.5 * (out + out.conj().T), basis)


def predicted_trace(sigma, sched: Schedule, t: float) -> float:
    """p(t) Tr sigma + m(t) Tr P sigma."""
    m, basis = _matrix(sigma), _basis(sigma)
    return sched.p(t) * np.trace(m).real + sched.m(t) * np.trace(basis.permutation @ m).real


# -- symmetricity conservation ---------------------------------------------------

@dataclass(frozen=True)
class ConservationReport:
    kinds: tuple
    complete: bool
    initial: float
    final: float
    predicted: float | None
    conserved: bool
    note: str


def _exchange_kind(w, p, tol=1e-9) -> str:
    scale = max(1.0, np.linalg.norm(w))
    if np.linalg.norm(w @ p - p @ w) <= tol * scale:
        return "symmetric"
    if np.linalg.norm(w @ p + p @ w) <= tol * scale:
        return "antisymmetric"
    return "indefinite"


def symmetricity_conservation_check(kraus_ops, sigma, tol: float = 1e-9) -> ConservationReport:
    """Compare Tr P rho before and after a Kraus channel with the symmetry prediction."""
    m, basis = _matrix(sigma), _basis(sigma)
    p = basis.permutation
    ops = [np.asarray(w, dtype=complex) for w in kraus_ops]
    kinds = tuple(_exchange_kind(w, p) for w in ops)
    completeness = sum(w.conj().T @ w for w in ops)
    complete = bool(np.max(np.abs(completeness - np.eye(basis.dim))) <= tol)
    out = sum(w @ m @ w.conj().T for w in ops)
    initial = float(np.trace(p @ m).real)
    final = float(np.trace(p @ out).real)
    if not complete:
        predicted, note = None, "Kraus operators are not trace preserving"
    elif all(k == "symmetric" for k in kinds):
        predicted, note = initial, "all operators symmetric"
    elif all(k == "antisymmetric" for k in kinds):
        predicted, note = -initial, "all operators antisymmetric"
    else:
        predicted, note = None, "conservation not implied"
    conserved = abs(final - initial) <= tol * max(1.0, abs(initial))
    return ConservationReport(kinds, complete, initial, final, predicted, conserved, note)


# -- entropy ---------------------------------------------------------------------

def renyi_entropy(rho) -> float:
    """Collision entropy -ln Tr rho^2 (Boltzmann constant set to 1)."""
    m = _matrix(rho)
    if abs(np.trace(m).real - 1) > 1e-10:
        raise PreconditionError("renyi_entropy needs a unit-trace density operator")
    return -math.log(float(np.real(np.trace(m @ m))))


def entropy_change_tanh(kappa: float, t: float) -> float:
    """-ln[1 + ((e^{2 k t} - 1)/(e^{2 k t} + 1))^4] for the tanh/sech schedules."""
    return -math.log1p(math.tanh(kappa * t) ** 4)


def entropy_bound(sched: Schedule, t: float) -> float:
    """Lower bound -ln[2 - |a . s|^2] on S_R(t) - S_R(0)."""
    return -math.log(2.0 - abs(sched.overlap(t)) ** 2)


def balanced_paos(seed: int, d: int) -> DensityOperator:
    """Random (rho_A + rho_S)/2 whose two blocks share one spectrum, so Tr rho_A^2 = Tr rho_S^2."""
    basis = PairBasis(d)
    rng = np.random.default_rng(seed)
    k = basis.n_asym
    spectrum = rng.random(k) + 0.1
    spectrum /= spectrum.sum()

    def block(n):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, _ = np.linalg.qr(g)
        return q[:, :k]

    v = basis.eigenbasis
    vs = v[:, : basis.n_sym] @ block(basis.n_sym)
    va = v[:, basis.n_sym :] @ block(k)
    rho_s = vs @ np.diag(spectrum) @ vs.conj().T
    rho_a = va @ np.diag(spectrum) @ va.conj().T
    m = 0.5 * (rho_s + rho_a)
    return DensityOperator(0.5 * (m + m.conj().T), basis, kind="balanced_paos", seed=seed)


@dataclass
class MapReport:
    t: list = field(default_factory=list)
    m_t: list = field(default_factory=list)
    symmetricity: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    renyi: list = field(default_factory=list)
    entropy_bound: list = field(default_factory=list)
    min_eigenvalue: list = field(default_factory=list)
    purity_ratio_predicted: list = field(default_factory=list)
    balanced_hypothesis: bool = False

    HEADER = ("t", "m_t", "symmetricity_measured", "trace", "renyi_entropy",
              "entropy_bound_rhs", "min_eigenvalue")

    def rows(self):
        return [list(r) for r in zip(self.t, self.m_t, self.symmetricity, self.trace,
                                      self.renyi, self.entropy_bound, self.min_eigenvalue)]

    @property
    def max_trace_drift(self) -> float:
        return max(abs(x - self.trace[0]) for x in self.trace)


def entropy_trajectory(sigma, sched: Schedule, t_samples) -> MapReport:
    """Evolve sigma through Lambda_t at each sample time and track symmetricity and entropy.

    When sigma is operator-symmetric and perfectly asymmetric with equal block
    purities, ``purity_ratio_predicted`` holds (|a|^4 + |s|^4)/2, the predicted
    Tr rho(t)^2 / Tr rho^2; otherwise only the general lower bound applies.
    """
    m, basis = _matrix(sigma), _basis(sigma)
    p = basis.permutation
    a_proj, s_proj = basis.antisymmetrizer, basis.symmetrizer
    balanced = False
    if np.linalg.norm(p @ m @ p - m) <= 1e-9 * np.linalg.norm(m):
        pa = np.real(np.trace(a_proj @ m @ a_proj @ m))
        ps = np.real(np.trace(s_proj @ m @ s_proj @ m))
        balanced = abs(pa - ps) <= 1e-10 and abs(symmetricity(sigma)) <= PA_TOL
    report = MapReport(balanced_hypothesis=balanced)
    for t in t_samples:
        out = apply_map(sigma, sched, t)
        report.t.append(float(t))
        report.m_t.append(sched.m(t))
        report.symmetricity.append(symmetricity(out))
        report.trace.append(out.trace)
        report.renyi.append(renyi_entropy(out))
        report.entropy_bound.append(entropy_bound(sched, t))
        report.min_eigenvalue.append(min_eigenvalue(out.matrix))
        if balanced:
            report.purity_ratio_predicted.append(0.5 * (sched.a2(t) ** 2 + sched.s2(t) ** 2))
    return report
