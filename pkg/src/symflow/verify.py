"""Seeded invariant suites run by ``symflow verify``.

Each suite returns a list of checks (name, measured residual, tolerance).  The
suites are small enough to finish in a few seconds at d <= 4.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import cpcheck, decoherence, qnd, scattering, states, symmap
from .pairspace import PairBasis


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def _max_abs(x) -> float:
    return float(np.max(np.abs(x)))


def exchange_algebra(d: int, seed: int) -> list[Check]:
    basis = PairBasis(d)
    p, s, a = basis.permutation, basis.symmetrizer, basis.antisymmetrizer
    one = np.eye(basis.dim)
    v = basis.eigenbasis
    return [
        Check("P^2 = 1", _max_abs(p @ p - one), 1e-12),
        Check("S + A = 1", _max_abs(s + a - one), 1e-12),
        Check("S^2 = S", _max_abs(s @ s - s), 1e-12),
        Check("A^2 = A", _max_abs(a @ a - a), 1e-12),
        Check("SA = 0", _max_abs(s @ a), 1e-12),
        Check("eigenbasis completeness", _max_abs(v @ v.conj().T - one), 1e-12),
    ]


def symmetricity_bounds(d: int, seed: int, n_states: int = 50) -> list[Check]:
    worst = max(abs(states.random_density(seed + k, d).symmetricity()) for k in range(n_states))
    sym = states.random_density(seed, d, "state_symmetric")
    asym = states.random_density(seed, d, "state_antisymmetric")
    return [
        Check("|Tr P rho| <= 1", max(0.0, worst - 1), 1e-9),
        Check("state-symmetric gives +1", abs(sym.symmetricity() - 1), 1e-10),
        Check("state-antisymmetric gives -1", abs(asym.symmetricity() + 1), 1e-10),
        Check("classifier: symmetric",
              0.0 if states.classify(sym).cls is states.SymmetryClass.STATE_SYMMETRIC else 1.0, 0.0),
        Check("classifier: antisymmetric",
              0.0 if states.classify(asym).cls is states.SymmetryClass.STATE_ANTISYMMETRIC else 1.0, 0.0),
    ]


def semigroup(d: int, seed: int) -> list[Check]:
    rho = states.random_density(seed, d)
    basis = rho.basis
    tau = 0.7
    out = decoherence.apply_semigroup_symmetrizer(rho, tau).matrix
    v = basis.eigenbasis
    before, after = v.conj().T @ rho.matrix @ v, v.conj().T @ out @ v
    ns = basis.n_sym
    mixed = after[:ns, ns:] - math.exp(-2 * tau) * before[:ns, ns:]
    quad = decoherence.gaussian_unitary_average(rho, 1.0, nodes=201)
    exact = decoherence.apply_semigroup_symmetrizer(rho, 1.0).matrix
    back = decoherence.apply_inverse_semigroup(out, tau)
    return [
        Check("off-diagonal blocks decay by e^{-2 tau}", _max_abs(mixed), 1e-12),
        Check("diagonal blocks fixed", _max_abs(after[:ns, :ns] - before[:ns, :ns]), 1e-12),
        Check("trace preserved", abs(np.trace(out).real - 1), 1e-12),
        Check("Gaussian unitary average", _max_abs(quad.rho.matrix - exact), 1e-8),
        Check("inverse undoes forward map", _max_abs(back - rho.matrix), 1e-10),
    ]


def master_equation(d: int, seed: int) -> list[Check]:
    rho = states.random_density(seed, d)
    gamma, t_max = 0.5, 1.0
    traj = decoherence.integrate_master_equation(
        rho, decoherence.EvolutionParams(np.zeros((d * d, d * d)), gamma, 0.005, t_max, 50)
    )
    exact = decoherence.apply_semigroup_symmetrizer(rho, 2 * gamma * t_max).matrix
    diag = traj.diagnostics
    return [
        Check("RK4 matches closed-form channel", _max_abs(traj.states[-1] - exact), 1e-9),
        Check("trace drift", diag["max_trace_drift"], 1e-9),
        Check("negative eigenvalue", max(0.0, -diag["min_eigenvalue"]), 1e-8),
    ]


def qnd_bath(d: int, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for _ in range(3):
        model = qnd.SpectralModel(g=float(rng.uniform(0.2, 2)), b=float(rng.uniform(0.5, 20)))
        theta = float(rng.uniform(0.1, 20))
        iq = qnd.decoherence_exponent_quadrature(model, theta)
        ic = qnd.decoherence_exponent_closed(model, theta)
        checks.append(Check(f"quadrature vs closed form (b={model.b:.3g}, theta={theta:.3g})",
                            abs(iq - ic) / max(abs(ic), 1e-300), 1e-5))
    checks.append(Check("Weierstrass product at x=1",
                        abs(qnd.weierstrass_product(1.0) - math.sinh(1.0)), 1e-4))
    return checks


def symmetrization_map(d: int, seed: int) -> list[Check]:
    sigma = symmap.balanced_paos(seed, d)
    checks = []
    for kind, sign in (("to_antisymmetric", -1), ("to_symmetric", 1)):
        sched = symmap.builtin_schedule(kind, 1.0)
        for t in (0.3, 1.0, 3.0):
            out = symmap.apply_map(sigma, sched, t)
            literal = symmap.apply_map_kraus(sigma, sched, t)
            checks.append(Check(f"{kind} symmetricity at t={t}",
                                abs(out.symmetricity() - sign * math.tanh(t) ** 2), 1e-10))
            checks.append(Check(f"{kind} trace at t={t}", abs(out.trace - 1), 1e-10))
            checks.append(Check(f"{kind} Kraus sum at t={t}", _max_abs(literal - out.matrix), 1e-12))
    sched = symmap.builtin_schedule("to_antisymmetric", 1.0)
    report = symmap.entropy_trajectory(sigma, sched, [0.5, 1.0, 2.0])
    for t, s in zip(report.t, report.renyi):
        checks.append(Check(f"entropy formula at t={t}",
                            abs(s - report.renyi[0] - symmap.entropy_change_tanh(1.0, t)
                                + symmap.entropy_change_tanh(1.0, report.t[0])), 1e-10))
    return checks


def scattering_oracle(d: int, seed: int) -> list[Check]:
    model = scattering.CollisionModel(0.5, scattering.random_exchange_unitary(seed))
    checks = []
    for kind in ("to_symmetric", "to_antisymmetric"):
        sched = symmap.builtin_schedule(kind, 1.0)
        cfg = model.config(1, sched, scattering.LinearTau(0.8))
        for t in (0.0, 0.5, 2.0):
            closed = scattering.environment_probability(cfg, t)
            explicit = model.environment(sched, 0.8 * t, t)
            checks.append(Check(f"{kind} closed form vs matrix oracle at t={t}",
                                abs(closed - explicit), 1e-9))
    for eps in (1, -1):
        checks.append(Check(f"standard probability, epsilon={eps}",
                            abs(scattering.standard_probability(model.config(eps)) - model.standard(eps)),
                            1e-9))
    return checks


def positivity_certificate(d: int, seed: int) -> list[Check]:
    cert = cpcheck.certify(cpcheck.build_witness(0.4, -0.5))
    checks = [Check(f"formula residual {k}", v, 1e-10) for k, v in cert["formula_residuals"].items()]
    checks.append(Check("before matrix positive", max(0.0, -min(cert["before_eigs"])), 1e-10))
    checks.append(Check("after matrix has a negative eigenvalue",
                        0.0 if min(cert["after_eigs"]) < -1e-10 else 1.0, 0.0))
    return checks


SUITES = {
    "exchange_algebra": exchange_algebra,
    "symmetricity_bounds": symmetricity_bounds,
    "semigroup": semigroup,
    "master_equation": master_equation,
    "qnd": qnd_bath,
    "symmetrization_map": symmetrization_map,
    "scattering": scattering_oracle,
    "positivity_certificate": positivity_certificate,
}


def run_suites(d: int = 3, seed: int = 0) -> dict:
    report = {"d": d, "seed": seed, "suites": {}}
    for name, suite in SUITES.items():
        checks = suite(d, seed)
        report["suites"][name] = {
            "passed": all(c.passed for c in checks),
            "checks": [dict(asdict(c), passed=c.passed) for c in checks],
        }
    report["passed"] = all(s["passed"] for s in report["suites"].values())
    return report
