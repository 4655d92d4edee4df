import numpy as np
import pytest

from spinent import linalg
from spinent.entanglement import (
    CanonicalCoefficients,
    TangleConsistencyError,
    bipartition_concurrence,
    concurrence_mixed,
    concurrence_mixed_batch,
    concurrence_pure2,
    evaluate_quantities,
    evaluate_report,
    hyperdeterminant,
    pair_concurrence,
    pair_concurrence_batch,
    pair_density_batch,
    spin_flip,
    state_from_canonical,
    three_tangle,
    three_tangle_hyperdet,
    total_concurrence,
)
from spinent.rmt import derive_stream, sample_haar_batch

BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
GHZ = np.zeros(8, dtype=complex)
GHZ[0] = GHZ[7] = 1 / np.sqrt(2)
W = np.zeros(8, dtype=complex)
W[1] = W[2] = W[4] = 1 / np.sqrt(3)
KET000 = np.zeros(8, dtype=complex)
KET000[0] = 1.0


def _random_su2(rng):
    g = rng.gaussians(8)
    m = (g[:4] + 1j * g[4:]).reshape(2, 2)
    q, r = np.linalg.qr(m)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


# ---------------------------------------------------------------------------
# pure two-qubit concurrence
# ---------------------------------------------------------------------------


def test_concurrence_pure2_cases():
    assert concurrence_pure2(BELL) == pytest.approx(1.0, abs=1e-12)
    ket01 = np.zeros(4, dtype=complex)
    ket01[1] = 1.0
    assert concurrence_pure2(ket01) == 0.0


def test_concurrence_pure_vs_mixed_cross_oracle():
    rng = derive_stream(40, 0)
    states = sample_haar_batch(4, rng, 10_000)
    batch = concurrence_mixed_batch(
        np.einsum("ni,nj->nij", states, states.conj())
    )
    pure = evaluate_quantities(states, ("concurrence",))["concurrence"]
    assert np.abs(batch - pure).max() < 1e-8
    for v in states[:300]:
        rho = np.outer(v, v.conj())
        assert concurrence_mixed(rho) == pytest.approx(
            concurrence_pure2(v), abs=1e-8
        )


# ---------------------------------------------------------------------------
# mixed concurrence
# ---------------------------------------------------------------------------


def test_concurrence_mixed_cases():
    assert concurrence_mixed(np.eye(4, dtype=complex) / 4) == 0.0
    assert concurrence_mixed(np.outer(BELL, BELL.conj())) == pytest.approx(1.0, abs=1e-10)
    rho12_w = linalg.partial_trace(W, {1, 2}, 3)
    assert concurrence_mixed(rho12_w) == pytest.approx(2.0 / 3.0, abs=1e-10)


def test_concurrence_mixed_validation():
    with pytest.raises(ValueError, match="trace"):
        concurrence_mixed(np.eye(4, dtype=complex))
    with pytest.raises(ValueError):
        concurrence_mixed(np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex))


def test_spin_flip_involution():
    rng = derive_stream(41, 0)
    v = sample_haar_batch(4, rng, 1)[0]
    rho = np.outer(v, v.conj())
    assert np.abs(spin_flip(spin_flip(rho)) - rho).max() < 1e-14


def test_wootters_spectrum_route_vs_nonhermitian_eигvals():
    # Independent oracle: eigenvalues of the non-Hermitian product
    # rho rho~ match the Hermitian sqrt-product route.
    rng = derive_stream(42, 0)
    states = sample_haar_batch(8, rng, 200)
    rhos = pair_density_batch(states, (1, 2))
    for rho in rhos:
        lam = np.linalg.eigvals(rho @ spin_flip(rho))
        lam = np.sqrt(np.clip(np.sort(lam.real)[::-1], 0.0, None))
        c_direct = max(lam[0] - lam[1] - lam[2] - lam[3], 0.0)
        assert concurrence_mixed(rho) == pytest.approx(c_direct, abs=1e-7)


# ---------------------------------------------------------------------------
# bipartition concurrence and pair concurrence
# ---------------------------------------------------------------------------


def test_bipartition_cases():
    for q in (1, 2, 3):
        assert bipartition_concurrence(GHZ, q) == pytest.approx(1.0, abs=1e-12)
        assert bipartition_concurrence(W, q) == pytest.approx(
            2.0 * np.sqrt(2.0) / 3.0, abs=1e-12
        )
    bell23 = np.zeros(8, dtype=complex)
    bell23[0] = bell23[3] = 1 / np.sqrt(2)  # |0> (x) Bell
    assert bipartition_concurrence(bell23, 1) == pytest.approx(0.0, abs=1e-12)


def test_pair_concurrence_matches_mixed_route():
    rng = derive_stream(43, 0)
    states = sample_haar_batch(8, rng, 500)
    for pair in ((1, 2), (1, 3), (2, 3)):
        fast = pair_concurrence_batch(states, pair)
        slow = np.array(
            [
                concurrence_mixed(linalg.partial_trace(v, set(pair), 3))
                for v in states
            ]
        )
        assert np.abs(fast - slow).max() < 1e-8


def test_pair_density_batch_matches_partial_trace():
    rng = derive_stream(44, 0)
    states = sample_haar_batch(8, rng, 100)
    for pair in ((1, 2), (1, 3), (2, 3)):
        rhos = pair_density_batch(states, pair)
        for v, rho in zip(states, rhos):
            assert np.abs(rho - linalg.partial_trace(v, set(pair), 3)).max() < 1e-13


# ---------------------------------------------------------------------------
# three-tangle
# ---------------------------------------------------------------------------


def test_three_tangle_cases():
    assert three_tangle(GHZ) == pytest.approx(1.0, abs=1e-12)
    assert three_tangle(W) == pytest.approx(0.0, abs=1e-12)
    assert three_tangle(KET000) == 0.0


def test_three_tangle_permutation_invariance():
    rng = derive_stream(45, 0)
    states = sample_haar_batch(8, rng, 10_000)
    base = evaluate_quantities(states, ("tangle",))["tangle"]
    swap12 = states.reshape(-1, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1, 8)
    swap13 = states.reshape(-1, 2, 2, 2).transpose(0, 3, 2, 1).reshape(-1, 8)
    for other in (swap12, swap13):
        tau = evaluate_quantities(other, ("tangle",))["tangle"]
        assert np.abs(tau - base).max() < 1e-8


def test_three_tangle_local_unitary_invariance():
    rng = derive_stream(46, 0)
    states = sample_haar_batch(8, rng, 1000)
    eye2 = np.eye(2, dtype=complex)
    worst = 0.0
    for v in states:
        u = _random_su2(rng)
        pos = int(rng.uniforms(1)[0] * 3)
        factors = [u if k == pos else eye2 for k in range(3)]
        big = np.kron(np.kron(factors[0], factors[1]), factors[2])
        w_state = big @ v
        worst = max(worst, abs(three_tangle(v) - three_tangle(w_state)))
        for pair in ((1, 2), (1, 3), (2, 3)):
            worst = max(
                worst, abs(pair_concurrence(v, pair) - pair_concurrence(w_state, pair))
            )
        for q in (1, 2, 3):
            worst = max(
                worst,
                abs(bipartition_concurrence(v, q) - bipartition_concurrence(w_state, q)),
            )
    assert worst < 1e-8


def test_concurrence_pure2_local_unitary_invariance():
    rng = derive_stream(47, 0)
    states = sample_haar_batch(4, rng, 1000)
    eye2 = np.eye(2, dtype=complex)
    for v in states[:200]:
        u = _random_su2(rng)
        big = np.kron(u, eye2)
        assert concurrence_pure2(big @ v) == pytest.approx(
            concurrence_pure2(v), abs=1e-8
        )


def test_monogamy_bound_on_samples():
    rng = derive_stream(48, 0)
    states = sample_haar_batch(8, rng, 20_000)
    c1 = evaluate_quantities(states, ("c1_23", "c12", "c13"))
    slack = c1["c1_23"] ** 2 - c1["c12"] ** 2 - c1["c13"] ** 2
    assert slack.min() > -1e-9


def test_tangle_clamp_error_raised():
    with pytest.raises(TangleConsistencyError):
        from spinent import entanglement as ent

        ent._clamp_tangle(-1e-6)


def test_measure_ranges():
    rng = derive_stream(49, 0)
    states = sample_haar_batch(8, rng, 20_000)
    q = evaluate_quantities(
        states,
        ("c12", "c13", "c23", "c1_23", "c2_13", "c3_12", "tangle", "total_concurrence"),
    )
    for name in ("c12", "c13", "c23", "c1_23", "c2_13", "c3_12", "tangle"):
        assert q[name].min() >= 0.0
        assert q[name].max() <= 1.0 + 1e-12
    assert q["total_concurrence"].max() <= 4.0 / 3.0 + 1e-9


def test_total_concurrence_w_state_saturates_bound():
    # Wootters oracle gives C_ij(W) = 2/3, so the plain sum of pair
    # concurrences is 2 and cannot obey the 4/3 bound; the sum of
    # squared pair concurrences is exactly 4/3, with W the maximizer.
    assert pair_concurrence(W, (1, 2)) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert total_concurrence(W) == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert total_concurrence(GHZ) == pytest.approx(0.0, abs=1e-12)
    assert total_concurrence(KET000) == 0.0


def test_report_consistency():
    rng = derive_stream(50, 0)
    for v in sample_haar_batch(8, rng, 50):
        rep = evaluate_report(v)
        assert rep.tau == pytest.approx(
            max(rep.c1_23**2 - rep.c12**2 - rep.c13**2, 0.0), abs=1e-9
        )
        assert rep.c_total == rep.c12**2 + rep.c13**2 + rep.c23**2
        assert rep.c_total <= 4.0 / 3.0 + 1e-9


# ---------------------------------------------------------------------------
# canonical form and the polynomial route
# ---------------------------------------------------------------------------


def test_canonical_validation():
    with pytest.raises(ValueError):
        CanonicalCoefficients(0.5, 0.5, 0.5, 0.5, 0.5)  # not normalized
    with pytest.raises(ValueError):
        CanonicalCoefficients(-0.5, 0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        CanonicalCoefficients(1.0, 0, 0, 0, 0, phi=4.0)


def test_canonical_ghz_and_zero_tangle():
    c = CanonicalCoefficients(1 / np.sqrt(2), 0, 0, 0, 1 / np.sqrt(2))
    v = state_from_canonical(c)
    assert np.abs(v - GHZ).max() < 1e-12
    assert three_tangle(v) == pytest.approx(1.0, abs=1e-12)

    a = np.array([0.6, 0.5, np.sqrt(1 - 0.36 - 0.25), 0.0, 0.0])
    v = state_from_canonical(CanonicalCoefficients(*a, phi=1.0))
    assert three_tangle(v) == pytest.approx(0.0, abs=1e-9)


def test_canonical_identity_random_draws():
    rng = derive_stream(51, 0)
    worst = 0.0
    for _ in range(10_000):
        a = np.abs(rng.gaussians(5))
        a /= np.linalg.norm(a)
        phi = float(rng.uniforms(1)[0] * np.pi)
        v = state_from_canonical(CanonicalCoefficients(*a, phi=phi))
        worst = max(worst, abs(three_tangle(v) - (2 * a[0] * a[4]) ** 2))
    assert worst < 1e-8


def test_hyperdeterminant_route_matches_density_route():
    rng = derive_stream(52, 0)
    states = sample_haar_batch(8, rng, 10_000)
    tau = evaluate_quantities(states, ("tangle",))["tangle"]
    poly = 4.0 * np.abs(hyperdeterminant(states))
    assert np.abs(tau - poly).max() < 1e-8
    assert three_tangle_hyperdet(GHZ) == pytest.approx(1.0, abs=1e-12)
    assert three_tangle_hyperdet(W) == pytest.approx(0.0, abs=1e-15)


def test_evaluate_quantities_validation():
    rng = derive_stream(53, 0)
    st4 = sample_haar_batch(4, rng, 3)
    with pytest.raises(ValueError, match="undefined for two qubits"):
        evaluate_quantities(st4, ("tangle",))
    st8 = sample_haar_batch(8, rng, 3)
    with pytest.raises(ValueError, match="unknown quantity"):
        evaluate_quantities(st8, ("concurrence",))
