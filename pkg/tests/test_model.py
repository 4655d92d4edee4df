import numpy as np
import pytest

from spinent import linalg
from spinent.entanglement import evaluate_quantities
from spinent.model import (
    InteractionKind,
    ModelSpec,
    build_hamiltonian,
    build_hamiltonian_batch,
    one_body,
    sample_interaction,
    sample_interaction_batch,
)
from spinent.rmt import BankSlice, StreamBank, derive_stream

K = InteractionKind


def _ground_states(kind, sigma, n, seed, shared_factors=True):
    spec = ModelSpec(kind, sigma)
    sl = BankSlice(StreamBank(seed), range(n))
    h = build_hamiltonian_batch(spec, sl, shared_factors=shared_factors)
    _, u = np.linalg.eigh(h)
    return np.ascontiguousarray(u[:, :, 0])


def test_kind_labels_roundtrip():
    for kind in K:
        assert K.from_label(kind.label) is kind
    assert K.from_label("two-i").n_qubits == 2
    assert K.from_label("c").n_qubits == 3
    with pytest.raises(ValueError, match="unknown interaction kind"):
        K.from_label("d")


def test_one_body_diagonals():
    assert np.array_equal(np.diagonal(one_body(2)).real, [2, 0, 0, -2])
    assert np.array_equal(np.diagonal(one_body(3)).real, [3, 1, 1, -1, 1, -1, -1, -3])
    assert one_body(3).trace() == 0
    assert np.abs(one_body(3) - np.diag(np.diagonal(one_body(3)))).max() == 0


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec(K.PAIRWISE_A, -0.5)
    spec = ModelSpec(K.PAIRWISE_A, 0.0)
    with pytest.raises(ValueError, match="sigma > 0"):
        sample_interaction(spec, derive_stream(0, 0))


def test_interaction_hermitian_exactly():
    for kind in K:
        v = sample_interaction(ModelSpec(kind, 1.7), derive_stream(20, 0))
        assert np.array_equal(v, v.conj().T)
        assert v.shape == (kind.n_qubits**2, kind.n_qubits**2) or v.shape == (
            2**kind.n_qubits,
            2**kind.n_qubits,
        )


def test_scalar_equals_batch_row():
    for kind in (K.TWO_QUBIT_SEPARABLE, K.PAIRWISE_C):
        spec = ModelSpec(kind, 0.8)
        single = sample_interaction(spec, derive_stream(21, 5))
        batch = sample_interaction_batch(
            spec, BankSlice(StreamBank(21), [4, 5, 6])
        )
        assert np.array_equal(single, batch[1])


# Entry variance of the composite interaction at sigma=1.  Every GUE
# factor has unit entry variance there; for the summed forms each term
# is nonzero on half the entries and terms are uncorrelated, so the
# all-entry average is prefactor^2 * n_terms / 2.
_EXPECTED_ENTRY_VAR = {
    "two-i": 1.0,
    "two-ii": 1.0,
    "I": 1.0,
    "II": 1.0,
    "III": 1.0,
    "a": 0.25,
    "b": 0.25,
    "c": 1.0 / 6.0,
}


@pytest.mark.parametrize("label", list(_EXPECTED_ENTRY_VAR))
def test_variance_matching_at_sigma_one(label, n=200_000):
    kind = K.from_label(label)
    if kind.n_qubits == 3:
        n = 60_000
    spec = ModelSpec(kind, 1.0)
    v = sample_interaction_batch(spec, BankSlice(StreamBank(22), range(n)))
    assert np.mean(np.abs(v) ** 2) == pytest.approx(_EXPECTED_ENTRY_VAR[label], rel=0.01)


def test_interaction_scales_linearly_in_sigma():
    # Drawing at strength sigma equals drawing at strength 1 times sigma;
    # the entry variance therefore grows as sigma^2.
    for label in ("two-i", "II", "c"):
        kind = K.from_label(label)
        v1 = sample_interaction_batch(
            ModelSpec(kind, 1.0), BankSlice(StreamBank(23), range(20_000))
        )
        v2 = sample_interaction_batch(
            ModelSpec(kind, 2.0), BankSlice(StreamBank(23), range(20_000))
        )
        ratio = np.mean(np.abs(v2) ** 2) / np.mean(np.abs(v1) ** 2)
        assert ratio == pytest.approx(4.0, rel=0.02)


def test_summand_variance_before_prefactor():
    # PairwiseA summands are GUE(4) blocks of parameter sigma^2 kroned
    # with the identity: on their structurally nonzero entries the
    # variance must equal sigma^2.
    spec = ModelSpec(K.PAIRWISE_A, 1.0)
    n = 60_000
    v = sample_interaction_batch(spec, BankSlice(StreamBank(24), range(n)))
    # Entries with qubit-1 indices differing get contributions only from
    # the V12 (x) 1 summand (1 (x) V23 is block diagonal in qubit 1).
    only_v12 = np.abs(v[:, :4, 4:]) ** 2  # i1=0, j1=1 block
    # That block is (1/2) V12[0,1] * delta_{23}: nonzero on the qubit-23
    # diagonal, variance sigma^2 / 4 there.
    diag = np.einsum("nii->ni", only_v12)
    assert np.mean(diag) * 4 == pytest.approx(1.0, rel=0.015)


def test_build_hamiltonian_sigma_zero():
    for kind, dim, energy in ((K.TWO_QUBIT_JOINT, 4, -2.0), (K.PAIRWISE_B, 8, -3.0)):
        h = build_hamiltonian(ModelSpec(kind, 0.0), derive_stream(25, 0))
        assert np.array_equal(h, one_body(kind.n_qubits))
        gs = linalg.ground_state(h)
        assert gs.energy == pytest.approx(energy, abs=1e-12)
        assert abs(abs(gs.state[dim - 1]) - 1.0) < 1e-12


def test_sigma_zero_entanglement_free():
    gs2 = linalg.ground_state(build_hamiltonian(ModelSpec(K.TWO_QUBIT_SEPARABLE, 0.0), derive_stream(26, 0)))
    c = evaluate_quantities(gs2.state[None, :], ("concurrence",))["concurrence"]
    assert c[0] == pytest.approx(0.0, abs=1e-12)
    gs3 = linalg.ground_state(build_hamiltonian(ModelSpec(K.COLLECTIVE_I, 0.0), derive_stream(26, 1)))
    q = evaluate_quantities(gs3.state[None, :], ("tangle", "total_concurrence"))
    assert q["tangle"][0] == pytest.approx(0.0, abs=1e-12)
    assert q["total_concurrence"][0] == pytest.approx(0.0, abs=1e-12)


def test_hamiltonian_hermiticity_all_kinds():
    for kind in K:
        h = build_hamiltonian(ModelSpec(kind, 2.5), derive_stream(27, 0))
        assert np.abs(h - h.conj().T).max() < 1e-12


def test_pairwise_a_no_direct_13_coupling():
    # Qubits 1 and 3 never interact directly: the swapped entanglement
    # stays far below the directly coupled pairs.
    states = _ground_states(K.PAIRWISE_A, 10.0, 4000, 28)
    q = evaluate_quantities(states, ("c12", "c13", "c23"))
    assert q["c13"].mean() < 0.3 * q["c12"].mean()
    assert q["c13"].mean() < 0.3 * q["c23"].mean()


def test_pairwise_b_swapped_entanglement_small():
    # The separable pairwise form keeps <C13> tiny at every sigma (the
    # curve peaks near 0.011 around sigma=1 and decays both ways).
    for sigma in (1.0, 3.0, 10.0):
        states = _ground_states(K.PAIRWISE_B, sigma, 4000, 29)
        c13 = evaluate_quantities(states, ("c13",))["c13"]
        assert c13.mean() < 0.02


def test_pairwise_b_shared_separable_limit():
    # With the shared V2 sample the pure interaction is block diagonal in
    # the eigenbases of V1, V2 and V3, so its eigenstates are products
    # and all pair concurrences vanish identically as sigma -> infinity.
    spec = ModelSpec(K.PAIRWISE_B, 1.0)
    v = sample_interaction_batch(spec, BankSlice(StreamBank(30), range(2000)))
    _, u = np.linalg.eigh(v)
    states = np.ascontiguousarray(u[:, :, 0])
    q = evaluate_quantities(states, ("c12", "c13", "c23"))
    for name in ("c12", "c13", "c23"):
        assert q[name].max() < 1e-6


def test_pairwise_c_shared_vs_independent_structure():
    # Shared factors make the pure V_c fully separable; independent
    # resampling breaks the common eigenbases and leaves entanglement.
    spec = ModelSpec(K.PAIRWISE_C, 1.0)
    v_shared = sample_interaction_batch(spec, BankSlice(StreamBank(31), range(2000)), True)
    v_indep = sample_interaction_batch(spec, BankSlice(StreamBank(31), range(2000)), False)
    for v, expect_entangled in ((v_shared, False), (v_indep, True)):
        _, u = np.linalg.eigh(v)
        states = np.ascontiguousarray(u[:, :, 0])
        c12 = evaluate_quantities(states, ("c12",))["c12"]
        if expect_entangled:
            assert c12.mean() > 0.01
        else:
            assert c12.max() < 1e-6


def test_pairwise_c_permutation_symmetry():
    for sigma in (0.3, 1.0, 3.0):
        spec = ModelSpec(K.PAIRWISE_C, sigma)
        states = _ground_states(K.PAIRWISE_C, sigma, 10_000, 32)
        q = evaluate_quantities(states, ("c12", "c13", "c23"))
        means = {k: v.mean() for k, v in q.items()}
        errs = {k: v.std() / np.sqrt(v.size) for k, v in q.items()}
        for a in ("c12", "c13"):
            for b in ("c13", "c23"):
                tol = 3.0 * np.hypot(errs[a], errs[b])
                assert abs(means[a] - means[b]) < tol, (sigma, means)
