import numpy as np
import pytest

from spinent.entanglement import (
    CanonicalCoefficients,
    state_from_canonical,
    three_tangle,
)
from spinent.nearest_w import (
    OptimizerConfig,
    nearest_zero_tangle,
    nearest_zero_tangle_batch,
)
from spinent.rmt import derive_stream, sample_haar_batch

W = np.zeros(8, dtype=complex)
W[1] = W[2] = W[4] = 1 / np.sqrt(3)
KET000 = np.zeros(8, dtype=complex)
KET000[0] = 1.0

FAST = OptimizerConfig(random_starts=2, max_iter_per_stage=250, random_start_max_iter=80)


def test_zero_tangle_inputs_are_fixed_points():
    for state in (W, KET000):
        r = nearest_zero_tangle(state)
        assert r.converged
        assert r.overlap == pytest.approx(1.0, abs=1e-12)
        assert r.tau_residual < 1e-6
        assert r.optimizer_evals == 1
        assert np.abs(r.phi_n - state).max() < 1e-12


def test_canonical_states_overlap_bound():
    # Zeroing a0 gives a tau=0 state with overlap 1 - a0^2; the optimizer
    # must do at least that well.
    for a0 in (0.1, 0.2):
        rest = np.array([0.55, 0.5, 0.45])
        a4 = np.sqrt(1.0 - a0**2 - np.sum(rest**2))
        c = CanonicalCoefficients(a0, *rest, a4, phi=0.7)
        psi = state_from_canonical(c)
        assert three_tangle(psi) > 1e-3
        r = nearest_zero_tangle(psi, config=FAST)
        assert r.converged
        assert r.tau_residual < 1e-6
        assert r.overlap >= 1.0 - a0**2 - 1e-6
        assert abs(three_tangle(r.phi_n) - r.tau_residual) < 1e-12


def test_batch_matches_scalar():
    rng = derive_stream(60, 0)
    states = sample_haar_batch(8, rng, 3)
    streams = [derive_stream(61, i) for i in range(3)]
    phi, p, tau, ev, conv = nearest_zero_tangle_batch(states, streams, FAST)
    for i in range(3):
        r = nearest_zero_tangle(states[i], config=FAST, rng=derive_stream(61, i))
        assert r.overlap == p[i]
        assert r.tau_residual == tau[i]
        assert r.optimizer_evals == ev[i]
        assert np.array_equal(r.phi_n, phi[i])
        assert r.converged == conv[i]


def test_batch_row_independence():
    # Results per state are identical regardless of batch composition.
    rng = derive_stream(62, 0)
    states = sample_haar_batch(8, rng, 4)
    streams = lambda idx: [derive_stream(63, i) for i in idx]  # noqa: E731
    full = nearest_zero_tangle_batch(states, streams(range(4)), FAST)
    part = nearest_zero_tangle_batch(states[1:3], streams([1, 2]), FAST)
    assert np.array_equal(part[0], full[0][1:3])
    assert np.array_equal(part[1], full[1][1:3])


def test_haar_states_converge_and_respect_budget():
    # Haar states (tau ~ 1/3, far from the zero-tangle variety) are the
    # hard inputs; they need longer penalty stages than the ground-state
    # default.
    cfg = OptimizerConfig(max_iter_per_stage=400, random_start_max_iter=120)
    rng = derive_stream(64, 0)
    states = sample_haar_batch(8, rng, 8)
    streams = [derive_stream(65, i) for i in range(8)]
    phi, p, tau, ev, conv = nearest_zero_tangle_batch(states, streams, cfg)
    assert conv.all()
    assert np.all(tau < 1e-6)
    assert np.all((p > 0.0) & (p <= 1.0))
    assert np.all(ev <= cfg.budget + 18 * len(cfg.mu_schedule))
    # Haar states have <tau> = 1/3; the nearest zero-tangle state is
    # typically well separated but still has sizable overlap.
    assert p.mean() > 0.6


def test_tiny_budget_reports_nonconvergence():
    rng = derive_stream(66, 0)
    states = sample_haar_batch(8, rng, 4)
    # With a handful of evaluations the penalty stages cannot finish.
    cfg = OptimizerConfig(budget=40, random_starts=0, max_iter_per_stage=1)
    phi, p, tau, ev, conv = nearest_zero_tangle_batch(states, None, cfg)
    # high-tangle Haar states cannot be feasible after ~1 iteration
    assert not conv.all()
    assert np.all(ev >= 1)


def test_stream_mismatch_rejected():
    rng = derive_stream(67, 0)
    states = sample_haar_batch(8, rng, 3)
    with pytest.raises(ValueError, match="one stream per state"):
        nearest_zero_tangle_batch(states, [derive_stream(0, 0)], FAST)
