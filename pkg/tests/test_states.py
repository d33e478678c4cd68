import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symflow.pairspace import PairBasis, asym_ket, product_ket, sym_ket
from symflow.states import (
    DensityOperator,
    Ensemble,
    InvalidStateError,
    PreconditionError,
    SymmetryClass,
    block_reconstruct,
    classify,
    example_paos_4x4,
    lemma1_block_form,
    lemma3_decompose,
    operator_antisymmetrize,
    operator_symmetrize,
    picture_identity_check,
    random_density,
    random_ket,
    split_paos,
    symmetricity,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([2, 3, 4])


def proj(v):
    return np.outer(v, v.conj())


def test_symmetricity_examples():
    b = PairBasis(2)
    assert symmetricity(DensityOperator(proj(asym_ket(b, 0, 1)), b)) == pytest.approx(-1, abs=1e-15)
    # maximally mixed state: Tr P / d^2 = 1/d
    for d in (2, 3, 4):
        basis = PairBasis(d)
        rho = DensityOperator(np.eye(d * d) / d ** 2, basis)
        assert symmetricity(rho) == pytest.approx(1 / d, abs=1e-15)
    assert abs(symmetricity(example_paos_4x4())) <= 1e-15


def test_symmetricity_rejects_zero_trace():
    with pytest.raises(PreconditionError):
        symmetricity(np.zeros((4, 4)))


@settings(max_examples=200, deadline=None)
@given(seed=seeds, d=dims)
def test_symmetricity_bounded(seed, d):
    assert abs(random_density(seed, d).symmetricity()) <= 1 + 1e-9


@settings(max_examples=50, deadline=None)
@given(seed=seeds, d=dims)
def test_constructed_sym_states_hit_the_bounds(seed, d):
    sym = random_density(seed, d, "state_symmetric")
    asym = random_density(seed, d, "state_antisymmetric")
    assert abs(sym.symmetricity() - 1) <= 1e-10
    assert abs(asym.symmetricity() + 1) <= 1e-10
    assert classify(sym).cls is SymmetryClass.STATE_SYMMETRIC
    assert classify(asym).cls is SymmetryClass.STATE_ANTISYMMETRIC
    # state symmetry implies operator symmetry
    p = sym.basis.permutation
    for rho in (sym, asym):
        assert np.max(np.abs(p @ rho.matrix @ p - rho.matrix)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=seeds, d=dims)
def test_symmetricity_one_only_for_symmetric(seed, d):
    rho = random_density(seed, d)
    cls = classify(rho).cls
    r = rho.symmetricity()
    if abs(r - 1) <= 1e-12:
        assert cls is SymmetryClass.STATE_SYMMETRIC
    if abs(r + 1) <= 1e-12:
        assert cls is SymmetryClass.STATE_ANTISYMMETRIC
    assert cls is SymmetryClass.NO_DEFINITE_SYMMETRY


def test_classify_examples():
    b = PairBasis(2)
    assert classify(proj(sym_ket(b, 0, 0))).cls is SymmetryClass.STATE_SYMMETRIC
    assert classify(example_paos_4x4()).cls is SymmetryClass.OPERATOR_SYMMETRIC_ONLY
    assert classify(proj(product_ket(b, 0, 1))).cls is SymmetryClass.NO_DEFINITE_SYMMETRY


def test_classification_json():
    doc = classify(example_paos_4x4()).to_json()
    assert set(doc) == {"class", "symmetricity", "residuals"}
    assert doc["class"] == "OperatorSymmetricOnly"
    json.dumps(doc)


def test_anticommutator_form_equivalent_to_state_symmetry():
    b = PairBasis(2)
    p = b.permutation
    for rho, expect in [(proj(sym_ket(b, 0, 1)), True), (proj(asym_ket(b, 0, 1)), False),
                        (example_paos_4x4().matrix, False)]:
        half_anti = 0.5 * (p @ rho + rho @ p)
        assert np.allclose(half_anti, rho) == expect == np.allclose(p @ rho, rho)


def test_density_operator_validation():
    with pytest.raises(InvalidStateError):
        DensityOperator(np.diag([1.0, -0.5, 0, 0]), PairBasis(2))
    with pytest.raises(InvalidStateError):
        DensityOperator(np.array([[1, 1], [0, 1], [0, 0], [0, 0]])[:, :1] @ np.ones((1, 4)), PairBasis(2))
    rho = random_density(1, 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 2


def test_density_json_has_provenance():
    doc = random_density(5, 2, "paos").to_json()
    assert doc["d"] == 2 and doc["kind"] == "paos" and doc["seed"] == 5
    assert len(doc["matrix"]) == 4 and len(doc["matrix"][0][0]) == 2


def test_random_density_kinds():
    b = PairBasis(2)
    singlet = proj(asym_ket(b, 0, 1))
    assert np.max(np.abs(random_density(3, 2, "state_antisymmetric").matrix - singlet)) <= 1e-12
    for seed in range(20):
        assert abs(random_density(seed, 3, "perfectly_asymmetric").symmetricity()) <= 1e-12
        assert abs(random_density(seed, 3, "paos").symmetricity()) <= 1e-12
    np.testing.assert_array_equal(random_density(9, 3).matrix, random_density(9, 3).matrix)
    with pytest.raises(ValueError):
        random_density(0, 2, "bogus")


# -- operator (anti)symmetrizers --------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=dims)
def test_operator_symmetrizer_identities(seed, d):
    basis = PairBasis(d)
    rng = np.random.default_rng(seed)
    o = rng.standard_normal((d * d,) * 2) + 1j * rng.standard_normal((d * d,) * 2)
    s, a = basis.symmetrizer, basis.antisymmetrizer
    ts, ta = operator_symmetrize(o), operator_antisymmetrize(o)
    assert np.max(np.abs(ts - (a @ o @ a + s @ o @ s))) <= 1e-12
    assert np.max(np.abs(ta - (a @ o @ s + s @ o @ a))) <= 1e-12
    assert np.max(np.abs(operator_antisymmetrize(ts))) <= 1e-12
    assert np.max(np.abs(operator_symmetrize(ta))) <= 1e-12
    assert abs(np.trace(ts) - np.trace(o)) <= 1e-12
    herm = o + o.conj().T
    assert abs(np.trace(operator_antisymmetrize(herm))) <= 1e-12
    hs = operator_symmetrize(herm)
    assert np.max(np.abs(hs - hs.conj().T)) <= 1e-12


def test_single_particle_energy_symmetrized():
    e = np.diag([0.3, 1.7])
    one = np.eye(2)
    ts = operator_symmetrize(np.kron(e, one))
    np.testing.assert_allclose(ts, 0.5 * (np.kron(e, one) + np.kron(one, e)), atol=1e-15)
    p = PairBasis(2).permutation
    np.testing.assert_allclose(operator_symmetrize(p), p)
    np.testing.assert_allclose(operator_antisymmetrize(p), 0 * p)


# -- constructive decompositions --------------------------------------------------

def test_block_form_single_projector():
    b = PairBasis(3)
    rho = proj(sym_ket(b, 0, 1))
    coeffs = lemma1_block_form(rho)
    k = b.sym_index(0, 1)
    expected = np.zeros_like(coeffs)
    expected[k, k] = 1
    assert np.max(np.abs(coeffs - expected)) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=dims)
def test_block_form_round_trip(seed, d):
    basis = PairBasis(d)
    rng = np.random.default_rng(seed)
    w = rng.random(basis.n_sym)
    w /= w.sum()
    rho = sum(wi * proj(v) for wi, v in zip(w, basis.eigenbasis[:, : basis.n_sym].T))
    coeffs = lemma1_block_form(rho)
    assert abs(np.trace(coeffs) - 1) <= 1e-12
    assert np.max(np.abs(coeffs - coeffs.conj().T)) <= 1e-12
    assert np.max(np.abs(block_reconstruct(coeffs, basis) - rho)) <= 1e-12
    asym = random_density(seed, d, "state_antisymmetric")
    back = block_reconstruct(lemma1_block_form(asym, "antisymmetric"), basis, "antisymmetric")
    assert np.max(np.abs(back - asym.matrix)) <= 1e-10


def test_block_form_rejects_mixed_symmetry():
    with pytest.raises(PreconditionError, match="StateSymmetric"):
        lemma1_block_form(example_paos_4x4())


def test_lemma3_examples():
    b = PairBasis(2)
    w, comps = lemma3_decompose(Ensemble([1.0], [sym_ket(b, 0, 1)]))
    assert len(comps) == 1 and w[0] == 1
    w, comps = lemma3_decompose(Ensemble([0.5, 0.5], [sym_ket(b, 0, 1), asym_ket(b, 0, 1)]))
    np.testing.assert_allclose(w, [0.5, 0.5])


def test_lemma3_splits_single_mixed_ket():
    b = PairBasis(2)
    psi = np.sqrt(0.75) * sym_ket(b, 0, 0) + 0.5 * asym_ket(b, 0, 1)
    # |psi><psi| alone is not operator-symmetric; pair it with its exchange image
    ens = Ensemble([0.5, 0.5], [psi, b.permutation @ psi])
    w, comps = lemma3_decompose(ens)
    np.testing.assert_allclose(w, [0.375, 0.125, 0.375, 0.125], atol=1e-15)
    assert abs(sum(w) - 1) <= 1e-10
    classes = [classify(c).cls for c in comps]
    assert classes == [SymmetryClass.STATE_SYMMETRIC, SymmetryClass.STATE_ANTISYMMETRIC] * 2
    total = sum(wi * c.matrix for wi, c in zip(w, comps))
    assert np.max(np.abs(total - ens.density().matrix)) <= 1e-10


def test_lemma3_weights_for_operator_symmetric_ket():
    # a ket whose projector is already operator-symmetric: it must be an eigenvector of P
    b = PairBasis(2)
    psi = np.sqrt(0.75) * sym_ket(b, 0, 1) + 0.5 * asym_ket(b, 0, 1)
    with pytest.raises(PreconditionError):
        lemma3_decompose(Ensemble([1.0], [psi]))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=dims)
def test_lemma3_reconstructs_random_ensembles(seed, d):
    basis = PairBasis(d)
    rng = np.random.default_rng(seed)
    kets, weights = [], []
    for k in range(3):
        psi = random_ket(int(rng.integers(2**32)), d)
        kets += [psi, basis.permutation @ psi]
        w = rng.random() + 0.1
        weights += [w, w]
    weights = np.array(weights) / sum(weights)
    ens = Ensemble(weights, kets)
    w, comps = lemma3_decompose(ens)
    assert np.all(w > 0) and abs(w.sum() - 1) <= 1e-10
    for c in comps:
        assert classify(c).cls in (SymmetryClass.STATE_SYMMETRIC, SymmetryClass.STATE_ANTISYMMETRIC)
    total = sum(wi * c.matrix for wi, c in zip(w, comps))
    assert np.max(np.abs(total - ens.density().matrix)) <= 1e-10


def test_ensemble_validation():
    b = PairBasis(2)
    with pytest.raises(ValueError):
        Ensemble([0.5, 0.4], [sym_ket(b, 0, 0), sym_ket(b, 1, 1)])
    with pytest.raises(ValueError):
        Ensemble([1.0], [2 * sym_ket(b, 0, 0)])
    with pytest.raises(ValueError):
        Ensemble(np.full(65, 1 / 65), [sym_ket(b, 0, 0)] * 65)


def test_split_paos_examples():
    b = PairBasis(2)
    rho_a, rho_s = split_paos(example_paos_4x4())
    assert np.max(np.abs(rho_s.matrix - proj(sym_ket(b, 0, 0)))) <= 1e-15
    assert np.max(np.abs(rho_a.matrix - proj(asym_ket(b, 0, 1)))) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=dims)
def test_split_paos_round_trip(seed, d):
    rho = random_density(seed, d, "paos")
    rho_a, rho_s = split_paos(rho)
    assert np.max(np.abs(0.5 * rho_a.matrix + 0.5 * rho_s.matrix - rho.matrix)) <= 1e-10
    assert classify(rho_a).cls is SymmetryClass.STATE_ANTISYMMETRIC
    assert classify(rho_s).cls is SymmetryClass.STATE_SYMMETRIC
    assert abs(rho_a.trace - 1) <= 1e-12 and abs(rho_s.trace - 1) <= 1e-12


def test_split_paos_preconditions():
    with pytest.raises(PreconditionError, match="perfectly asymmetric"):
        split_paos(random_density(0, 2, "state_symmetric"))
    with pytest.raises(PreconditionError, match="operator-symmetric"):
        split_paos(random_density(0, 3, "perfectly_asymmetric"))


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_picture_identities(seed):
    rng = np.random.default_rng(seed)
    o = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    report = picture_identity_check(o, random_ket(seed, 3), random_ket(seed + 1, 3))
    assert report.max_relative() <= 1e-10


def test_picture_identity_special_cases():
    b = PairBasis(2)
    psi, phi = random_ket(1, 2), random_ket(2, 2)
    assert picture_identity_check(np.eye(4), psi, phi).max_relative() <= 1e-15
    s, a = b.symmetrizer, b.antisymmetrizer
    # P has no antisymmetric part, so the mixed element vanishes
    assert abs(np.vdot(s @ psi, b.permutation @ (a @ phi))) <= 1e-15
    assert picture_identity_check(b.permutation, psi, phi).max_relative() <= 1e-15
