"""Fast invariant suite behind the ``selftest`` CLI subcommand.

Each check is small enough to run in seconds and deterministic (fixed
seeds), so a fresh build either passes all of them or names the broken
check.  Checks call package functions through their modules, which also
lets the test suite fault-inject corrupted implementations.
"""

from __future__ import annotations

import sys

import numpy as np

from . import entanglement, linalg, model, montecarlo, rmt

HAAR_SAMPLES = 10_000


def _random_su2(rng: rmt.RngStream) -> np.ndarray:
    g = rng.gaussians(8)
    m = (g[:4] + 1j * g[4:]).reshape(2, 2)
    q, r = np.linalg.qr(m)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _check_kron_structure():
    eye2 = linalg.identity(2)
    ok = np.array_equal(linalg.kron(eye2, eye2), linalg.identity(4))
    ok &= np.array_equal(
        np.diagonal(linalg.kron(linalg.PAULI_Z, eye2)), [1, 1, -1, -1]
    )
    ok &= np.array_equal(
        np.diagonal(linalg.kron(linalg.PAULI_Z, linalg.PAULI_Z)), [1, -1, -1, 1]
    )
    return ok, "identity and sigma_z expansions exact"


def _check_eig_reconstruction():
    rng = rmt.derive_stream(101, 0)
    hams = rmt.sample_gue_batch(rmt.GueSpec(8, 1.0), rng, 200)
    worst = 0.0
    for h in hams:
        w, u = linalg.hermitian_eig(h)
        worst = max(worst, np.abs(h - (u * w) @ u.conj().T).max())
        worst = max(worst, np.abs(u.conj().T @ u - np.eye(8)).max())
    return worst < 1e-10, f"max reconstruction/orthonormality deviation {worst:.2e}"


def _check_partial_trace():
    rng = rmt.derive_stream(102, 0)
    states = rmt.sample_haar_batch(8, rng, 500)
    worst = 0.0
    for v in states:
        for keep in ({1}, {2}, {1, 3}):
            rho = linalg.partial_trace(v, keep, 3)
            worst = max(worst, abs(rho.trace().real - 1.0), abs(rho.trace().imag))
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    worst = max(
        worst, np.abs(linalg.partial_trace(bell, {1}, 2) - np.eye(2) / 2).max()
    )
    return worst < 1e-12, f"max trace/marginal deviation {worst:.2e}"


def _check_concurrence_cross_oracle():
    rng = rmt.derive_stream(103, 0)
    states = rmt.sample_haar_batch(4, rng, 2000)
    worst = 0.0
    for v in states[:200]:
        rho = np.outer(v, v.conj())
        worst = max(
            worst,
            abs(
                entanglement.concurrence_pure2(v) - entanglement.concurrence_mixed(rho)
            ),
        )
    return worst < 1e-8, f"max pure-vs-mixed deviation {worst:.2e}"


def _check_tangle_permutation():
    rng = rmt.derive_stream(104, 0)
    states = rmt.sample_haar_batch(8, rng, 2000)
    worst = 0.0
    swap12 = states.reshape(-1, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1, 8)
    swap13 = states.reshape(-1, 2, 2, 2).transpose(0, 3, 2, 1).reshape(-1, 8)
    t0 = entanglement.evaluate_quantities(states, ("tangle",))["tangle"]
    t1 = entanglement.evaluate_quantities(swap12, ("tangle",))["tangle"]
    t2 = entanglement.evaluate_quantities(swap13, ("tangle",))["tangle"]
    worst = max(np.abs(t0 - t1).max(), np.abs(t0 - t2).max())
    return worst < 1e-8, f"max permutation deviation {worst:.2e}"


def _check_canonical_identity():
    rng = rmt.derive_stream(105, 0)
    worst = 0.0
    for _ in range(2000):
        a = np.abs(rng.gaussians(5))
        a /= np.linalg.norm(a)
        phi = float(rng.uniforms(1)[0] * np.pi)
        coeffs = entanglement.CanonicalCoefficients(*a, phi=phi)
        v = entanglement.state_from_canonical(coeffs)
        worst = max(worst, abs(entanglement.three_tangle(v) - (2 * a[0] * a[4]) ** 2))
    return worst < 1e-8, f"max |tau - (2 a0 a4)^2| = {worst:.2e}"


def _check_hyperdeterminant_route():
    rng = rmt.derive_stream(106, 0)
    states = rmt.sample_haar_batch(8, rng, 2000)
    eq = entanglement.evaluate_quantities(states, ("tangle",))["tangle"]
    poly = 4.0 * np.abs(entanglement.hyperdeterminant(states))
    worst = np.abs(eq - poly).max()
    return worst < 1e-8, f"max density-matrix vs polynomial deviation {worst:.2e}"


def _check_local_unitary_invariance():
    rng = rmt.derive_stream(107, 0)
    states = rmt.sample_haar_batch(8, rng, 200)
    worst = 0.0
    for v in states:
        u = _random_su2(rng)
        for q in range(3):
            factors = [u if k == q else np.eye(2, dtype=complex) for k in range(3)]
            big = np.kron(np.kron(factors[0], factors[1]), factors[2])
            w = big @ v
            worst = max(worst, abs(entanglement.three_tangle(v) - entanglement.three_tangle(w)))
            worst = max(
                worst,
                abs(
                    entanglement.bipartition_concurrence(v, 1)
                    - entanglement.bipartition_concurrence(w, 1)
                ),
            )
    return worst < 1e-8, f"max local-unitary deviation {worst:.2e}"


def _check_tangle_clamp():
    # Biseparable states have tau = 0 exactly; the clamp must absorb the
    # tiny negative residue of the difference formula.
    rng = rmt.derive_stream(108, 0)
    pair = rmt.sample_haar_batch(4, rng, 500)
    single = rmt.sample_haar_batch(4, rng, 500)[:, :2]
    single /= np.linalg.norm(single, axis=1, keepdims=True)
    states = np.einsum("ni,nj->nij", single, pair).reshape(-1, 8)
    taus = np.array([entanglement.three_tangle(v) for v in states])
    worst = taus.max()
    return bool(np.all(taus >= 0.0) and worst < 1e-9), f"max biseparable tau {worst:.2e}"


def _check_gue_variance():
    rng = rmt.derive_stream(109, 0)
    ok = True
    detail = []
    for dim, sigma in ((2, 1.0), (4, 2.0)):
        hams = rmt.sample_gue_batch(rmt.GueSpec(dim, sigma), rng, 200_000 // dim)
        off = np.abs(hams[:, 0, 1]) ** 2
        diag = hams[:, 0, 0].real ** 2
        ok &= abs(off.mean() / sigma - 1.0) < 0.02
        ok &= abs(diag.mean() / sigma - 1.0) < 0.02
        detail.append(f"dim {dim}: off {off.mean():.4f} diag {diag.mean():.4f} (target {sigma})")
    return ok, "; ".join(detail)


def _check_haar_two_qubit():
    result = montecarlo.haar_reference(2, HAAR_SAMPLES, 110)
    row = result.rows[0]
    target_mean, target_std = 3 * np.pi / 16, np.sqrt(2 / 5 - (3 * np.pi / 16) ** 2)
    ok = abs(row.mean - target_mean) < 0.01 and abs(row.std - target_std) < 0.01
    return ok, f"<C> = {row.mean:.4f} (0.589), delta = {row.std:.4f} (0.230)"


def _check_haar_three_qubit():
    result = montecarlo.haar_reference(3, HAAR_SAMPLES, 111)
    tangle = result.select(quantity="tangle")[0]
    rng = rmt.derive_stream(111, 1)
    states = rmt.sample_haar_batch(8, rng, HAAR_SAMPLES)
    ct = entanglement.evaluate_quantities(states, ("total_concurrence",))[
        "total_concurrence"
    ]
    ok = abs(tangle.mean - 1 / 3) < 0.012 and ct.max() <= 4 / 3 + 1e-9
    return ok, f"<tau> = {tangle.mean:.4f} (1/3), max C_t = {ct.max():.4f} (<= 4/3)"


def _check_sigma_zero_ground_states():
    for kind in (model.InteractionKind.TWO_QUBIT_JOINT, model.InteractionKind.PAIRWISE_C):
        spec = model.ModelSpec(kind, 0.0)
        h = model.build_hamiltonian(spec, rmt.derive_stream(112, 0))
        gs = linalg.ground_state(h)
        dim = spec.dim
        expected = np.zeros(dim)
        expected[dim - 1] = 1.0
        if abs(gs.energy - (-spec.n_qubits)) > 1e-12:
            return False, f"sigma=0 energy {gs.energy} for kind {kind.label}"
        if np.abs(np.abs(gs.state) - expected).max() > 1e-12:
            return False, f"sigma=0 ground state wrong for kind {kind.label}"
    return True, "sigma=0 gives |1...1> at energy -n"


CHECKS = [
    ("kron structure", _check_kron_structure),
    ("eigendecomposition reconstruction", _check_eig_reconstruction),
    ("partial trace preservation", _check_partial_trace),
    ("concurrence pure-vs-mixed oracle", _check_concurrence_cross_oracle),
    ("tangle permutation invariance", _check_tangle_permutation),
    ("canonical identity tau=(2a0a4)^2", _check_canonical_identity),
    ("tangle polynomial cross-route", _check_hyperdeterminant_route),
    ("local-unitary invariance", _check_local_unitary_invariance),
    ("tangle clamp on biseparable states", _check_tangle_clamp),
    ("GUE variance calibration", _check_gue_variance),
    ("Haar two-qubit baseline", _check_haar_two_qubit),
    ("Haar three-qubit baseline", _check_haar_three_qubit),
    ("sigma=0 deterministic ground states", _check_sigma_zero_ground_states),
]


def run_selftest(out=None) -> bool:
    out = out or sys.stdout
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        print(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}", file=out)
    return all_ok
