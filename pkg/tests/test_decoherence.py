import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from symflow.decoherence import (
    ContractViolation,
    EvolutionParams,
    StepSizeError,
    apply_formal_antisymmetrizer,
    apply_inverse_semigroup,
    apply_semigroup_symmetrizer,
    dissipator_bracket,
    formal_antisymmetrizer_certificate,
    gaussian_unitary_average,
    integrate_master_equation,
    trajectory_header,
    trajectory_rows,
)
from symflow.pairspace import PairBasis, asym_ket, sym_ket
from symflow.states import DensityOperator, operator_symmetrize, random_density

seeds = st.integers(0, 2**32 - 1)


def series_exp_swap(rho, p, tau, terms=60):
    """Independent oracle: sum_n tau^n/n! L^n rho with L(x) = P x P."""
    out = np.zeros_like(rho, dtype=complex)
    term = np.array(rho, dtype=complex)
    for n in range(terms):
        out += term
        term = tau / (n + 1) * (p @ term @ p)
    return out


def superop_channel(rho, p, tau):
    """Second oracle: expm of the vectorized generator -tau/2 {P, ., P}."""
    n = rho.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    gen = -0.5 * tau * (2 * np.kron(eye, eye) - 2 * np.kron(p, p.T))
    return (expm(gen) @ rho.reshape(-1)).reshape(n, n)


@pytest.mark.parametrize("tau", [0.1, 1.0, 5.0])
def test_exponential_of_swap_superoperator(tau):
    for seed in range(50):
        rho = random_density(seed, 2).matrix
        p = PairBasis(2).permutation
        closed = math.cosh(tau) * rho + math.sinh(tau) * (p @ rho @ p)
        scale = math.cosh(tau)
        assert np.max(np.abs(series_exp_swap(rho, p, tau) - closed)) <= 1e-12 * scale


@pytest.mark.parametrize("tau", [0.0, 0.1, 1.0, 5.0])
@pytest.mark.parametrize("d", [2, 3])
def test_semigroup_channel_matches_oracles(tau, d):
    for seed in range(10):
        rho = random_density(seed, d)
        p = rho.basis.permutation
        out = apply_semigroup_symmetrizer(rho, tau).matrix
        assert np.max(np.abs(out - math.exp(-tau) * series_exp_swap(rho.matrix, p, tau))) <= 1e-12
        assert np.max(np.abs(out - superop_channel(rho.matrix, p, tau))) <= 1e-12


def test_bracket_identity():
    p = PairBasis(3).permutation
    rho = random_density(4, 3).matrix
    np.testing.assert_allclose(dissipator_bracket(p, rho, p), 2 * rho - 2 * p @ rho @ p, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, t1=st.floats(0, 3), t2=st.floats(0, 3))
def test_semigroup_law(seed, t1, t2):
    rho = random_density(seed, 2)
    twice = apply_semigroup_symmetrizer(apply_semigroup_symmetrizer(rho, t1), t2)
    once = apply_semigroup_symmetrizer(rho, t1 + t2)
    assert np.max(np.abs(twice.matrix - once.matrix)) <= 1e-12


def test_block_damping_examples():
    b = PairBasis(2)
    rho = np.eye(4) / 4
    out = apply_semigroup_symmetrizer(DensityOperator(rho, b), 2.0).matrix
    np.testing.assert_allclose(out, rho, atol=1e-15)

    psi = (sym_ket(b, 0, 1) + asym_ket(b, 0, 1)) / math.sqrt(2)
    v = b.eigenbasis
    ks, ka = b.sym_index(0, 1), b.asym_index(0, 1)
    out = apply_semigroup_symmetrizer(DensityOperator(np.outer(psi, psi.conj()), b), math.log(2) / 2)
    coherence = (v.conj().T @ out.matrix @ v)[ks, ka]
    assert abs(coherence - 0.25) <= 1e-14


def test_long_time_limit_is_operator_symmetrizer():
    rho = random_density(8, 3)
    out = apply_semigroup_symmetrizer(rho, 20.0).matrix
    assert np.max(np.abs(out - operator_symmetrize(rho.matrix))) <= 1e-15
    with pytest.raises(ValueError):
        apply_semigroup_symmetrizer(rho, -0.1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.sampled_from([2, 3, 4]), tau=st.floats(0, 10))
def test_channel_is_physical(seed, d, tau):
    rho = random_density(seed, d)
    out = apply_semigroup_symmetrizer(rho, tau)
    assert abs(out.trace - 1) <= 1e-12
    assert abs(out.symmetricity() - rho.symmetricity()) <= 1e-12


@pytest.mark.parametrize("tau", [0.5, 2.0, 5.0])
def test_inverse_undoes_forward(tau):
    rho = random_density(2, 3)
    back = apply_inverse_semigroup(apply_semigroup_symmetrizer(rho, tau), tau)
    assert np.max(np.abs(back - rho.matrix)) <= 1e-8


def test_formal_antisymmetrizer_limits():
    b = PairBasis(2)
    o = random_density(6, 2).matrix
    p = b.permutation
    np.testing.assert_allclose(apply_formal_antisymmetrizer(o, 0.0), o, atol=1e-15)
    np.testing.assert_allclose(apply_formal_antisymmetrizer(o, 40.0), 0.5 * (o - p @ o @ p), atol=1e-15)
    cert = formal_antisymmetrizer_certificate(np.eye(4) / 4, 0.0)
    assert cert["positive"]
    # a mixed-symmetry product state loses positivity
    prod = np.zeros((4, 4))
    prod[1, 1] = 1
    cert = formal_antisymmetrizer_certificate(prod, 3.0)
    assert not cert["positive"] and cert["min_eigenvalue"] < -0.4


@pytest.mark.parametrize("seed", range(5))
def test_gaussian_unitary_average(seed):
    rho = random_density(seed, 2)
    res = gaussian_unitary_average(rho, 1.0, nodes=201)
    exact = apply_semigroup_symmetrizer(rho, 1.0).matrix
    assert np.max(np.abs(res.rho.matrix - exact)) <= 1e-8
    assert res.error_estimate <= 1e-6


def test_gaussian_unitary_average_small_tau():
    rho = random_density(3, 2)
    res = gaussian_unitary_average(rho, 1e-6)
    exact = apply_semigroup_symmetrizer(rho, 1e-6).matrix
    assert np.max(np.abs(res.rho.matrix - exact)) <= 1e-8
    with pytest.raises(ValueError):
        gaussian_unitary_average(rho, 0.0)


# -- master equation -------------------------------------------------------------

def _commuting_hamiltonian(d, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((d * d,) * 2) + 1j * rng.standard_normal((d * d,) * 2)
    return operator_symmetrize(x + x.conj().T) / 4


def test_rk4_matches_closed_form_without_hamiltonian():
    rho = random_density(1, 2)
    traj = integrate_master_equation(rho, EvolutionParams(np.zeros((4, 4)), 0.5, 0.01, 2.0, 10))
    exact = apply_semigroup_symmetrizer(rho, 2.0).matrix
    assert np.max(np.abs(traj.states[-1] - exact)) <= 1e-9
    assert len(traj.times) == 21 and traj.times[-1] == pytest.approx(2.0)
    traj.check()


def test_rk4_with_hamiltonian_matches_exact():
    d, gamma, t = 3, 0.3, 1.0
    h = _commuting_hamiltonian(d, 2)
    rho = random_density(5, d)
    traj = integrate_master_equation(rho, EvolutionParams(h, gamma, 0.005, t, 200))
    u = expm(-1j * h * t)
    # H commutes with P, so the unitary and the dissipative parts commute
    exact = apply_semigroup_symmetrizer(DensityOperator(u @ rho.matrix @ u.conj().T, rho.basis),
                                        2 * gamma * t).matrix
    assert np.max(np.abs(traj.states[-1] - exact)) <= 1e-9


def test_rk4_fourth_order():
    d, gamma, t = 2, 0.5, 1.0
    h = _commuting_hamiltonian(d, 0)
    rho = random_density(0, d)
    u = expm(-1j * h * t)
    exact = apply_semigroup_symmetrizer(DensityOperator(u @ rho.matrix @ u.conj().T, rho.basis),
                                        2 * gamma * t).matrix
    errs = []
    for dt in (0.02, 0.01, 0.005):
        traj = integrate_master_equation(rho, EvolutionParams(h, gamma, dt, t, 1000))
        errs.append(np.max(np.abs(traj.states[-1] - exact)))
    orders = [math.log2(errs[k] / errs[k + 1]) for k in range(2)]
    assert all(3.7 <= o <= 4.3 for o in orders), orders


def test_antisymmetric_state_stays_antisymmetric():
    b = PairBasis(2)
    singlet = np.outer(asym_ket(b, 0, 1), asym_ket(b, 0, 1))
    traj = integrate_master_equation(DensityOperator(singlet, b),
                                     EvolutionParams(np.zeros((4, 4)), 1.0, 0.01, 3.0, 50))
    for s in traj.states:
        assert abs(np.trace(b.permutation @ s).real + 1) <= 1e-12


def test_step_size_guard():
    rho = random_density(0, 2)
    with pytest.raises(StepSizeError):
        integrate_master_equation(rho, EvolutionParams(np.zeros((4, 4)), 1.0, 0.05, 1.0))


def test_hamiltonian_must_commute():
    h = np.zeros((4, 4))
    h[0, 1] = h[1, 0] = 1.0
    with pytest.raises(ValueError, match="commute"):
        EvolutionParams(h)


def test_contract_violation():
    rho = random_density(0, 2)
    traj = integrate_master_equation(rho, EvolutionParams(np.zeros((4, 4)), 0.5, 0.01, 0.1))
    traj.diagnostics["min_eigenvalue"] = -1.0
    with pytest.raises(ContractViolation):
        traj.check()


def test_trajectory_rows():
    rho = random_density(0, 2)
    traj = integrate_master_equation(rho, EvolutionParams(np.zeros((4, 4)), 0.5, 0.01, 0.2, 10))
    rows = trajectory_rows(traj, elements=[(0, 3)])
    assert len(rows) == 3 and len(rows[0]) == len(trajectory_header([(0, 3)])) == 6
    assert rows[0][1] == pytest.approx(1.0)
