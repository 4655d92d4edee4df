"""Entanglement quantifiers for two- and three-qubit pure states.

Scalar operations are written for clarity against the defining formulas;
``evaluate_quantities`` provides vectorized batch versions of the same
measures for the sweep engine.  Where two algorithmically distinct
routes exist (pure-state pair concurrence vs the general Wootters
route, density-matrix tangle vs the polynomial identity) they are
cross-checked against each other in the tests.

Conventions
-----------
* Pair concurrences ``c12, c13, c23`` are Wootters concurrences of the
  two-qubit reduced states.
* Bipartition concurrences ``c{i}_{jk}`` are ``2*sqrt(det rho_i)``.
* The three-tangle uses qubit 1 as the reference:
  ``tau = c1_23**2 - c12**2 - c13**2`` (a permutation invariant).
* ``c_total`` is the total pairwise two-tangle
  ``c12**2 + c13**2 + c23**2``, bounded by 4/3 with equality exactly for
  a maximally entangled W state.  (The plain sum of pair concurrences
  reaches 2 on the W state, so only the squared sum obeys the 4/3 bound;
  see tests/test_entanglement.py for the brute-force reconciliation.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import PAULI_Y, check_state

_YY = np.kron(PAULI_Y, PAULI_Y)

# Floating-point window for the three-tangle: Eq-style differences of
# nearly equal quantities may dip slightly below zero.
TANGLE_CLAMP = -1e-9

# Relative floor for the Wootters spectrum: eigenvalues this far below
# the top one are numerically indistinguishable from exact rank
# deficiency, and sqrt(eps)-sized residues would otherwise bias every
# concurrence by ~1e-8.
_SPECTRUM_REL_FLOOR = 1e-13


def _clean_spectrum(lam: np.ndarray) -> np.ndarray:
    lam = np.clip(lam, 0.0, None)
    top = lam.max(axis=-1, keepdims=True)
    return np.where(lam < _SPECTRUM_REL_FLOOR * top, 0.0, lam)


class TangleConsistencyError(RuntimeError):
    """Three-tangle fell below the roundoff clamp window: a measure bug."""


# ---------------------------------------------------------------------------
# scalar measures
# ---------------------------------------------------------------------------


def concurrence_pure2(state: np.ndarray) -> float:
    """Concurrence 2|ad - bc| of a two-qubit pure state (a,b,c,d)."""
    v = check_state(state)
    if v.shape[0] != 4:
        raise ValueError("concurrence_pure2 requires a two-qubit state")
    c = 2.0 * abs(v[0] * v[3] - v[1] * v[2])
    return float(min(c, 1.0))


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """The doubly spin-flipped conjugate (sy (x) sy) rho* (sy (x) sy)."""
    return _YY @ rho.conj() @ _YY


def concurrence_mixed(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    The spectrum {lambda_i} is taken from the Hermitian product
    sqrt(rho) rho~ sqrt(rho), which shares its eigenvalues with rho rho~
    but keeps the computation inside Hermitian solvers.
    """
    rho = linalg.check_hermitian(rho, atol=1e-9)
    if rho.shape[0] != 4:
        raise ValueError("concurrence_mixed requires a 4x4 density matrix")
    tr = float(rho.trace().real)
    if abs(tr - 1.0) > 1e-9:
        raise ValueError(f"density matrix trace {tr} is not 1")
    sq = linalg.matrix_sqrt_psd(rho)  # rejects non-PSD inputs
    m = sq @ spin_flip(rho) @ sq
    m = 0.5 * (m + m.conj().T)
    lam = linalg.hermitian_eig(m).eigenvalues
    lam = np.sqrt(_clean_spectrum(lam))[::-1]
    return float(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0))


def bipartition_concurrence(state: np.ndarray, lone_qubit: int) -> float:
    """Concurrence 2*sqrt(det rho_q) of qubit q against the other pair."""
    v = check_state(state)
    if v.shape[0] != 8:
        raise ValueError("bipartition_concurrence requires a three-qubit state")
    if lone_qubit not in (1, 2, 3):
        raise ValueError(f"lone_qubit must be 1, 2 or 3, got {lone_qubit}")
    rho = linalg.partial_trace(v, {lone_qubit}, 3)
    return 2.0 * np.sqrt(max(linalg.det2(rho), 0.0))


def pair_concurrence(state: np.ndarray, pair: tuple[int, int]) -> float:
    """Concurrence of a reduced pair of a pure three-qubit state.

    Equal to ``concurrence_mixed(partial_trace(state, pair, 3))`` but
    computed through the rank-2 structure of the marginal: tracing qubit
    q gives rho = sum_k |e_k><e_k|, and the square roots of the Wootters
    spectrum are the singular values s1 >= s2 of the 2x2 symmetric matrix
    W_kl = e_k^T (sy (x) sy) e_l, so C = s1 - s2 = sqrt(|W|_F^2 - 2|det W|)
    with no rank-deficiency roundoff.  Used wherever the input is known
    pure; cross-checked against the general mixed route in the tests.
    """
    v = check_state(state)
    if v.shape[0] != 8:
        raise ValueError("pair_concurrence requires a three-qubit state")
    return float(pair_concurrence_batch(v[None, :], pair)[0])


def _clamp_tangle(tau: float) -> float:
    if tau < TANGLE_CLAMP:
        raise TangleConsistencyError(
            f"three-tangle {tau:.3e} below clamp window {TANGLE_CLAMP}"
        )
    return float(min(max(tau, 0.0), 1.0))


def three_tangle(state: np.ndarray) -> float:
    """Residual tangle tau = C_{1|23}^2 - C_12^2 - C_13^2, clamped at 0."""
    v = check_state(state)
    if v.shape[0] != 8:
        raise ValueError("three_tangle requires a three-qubit state")
    c1_23 = bipartition_concurrence(v, 1)
    c12 = pair_concurrence(v, (1, 2))
    c13 = pair_concurrence(v, (1, 3))
    return _clamp_tangle(c1_23**2 - c12**2 - c13**2)


def total_concurrence(state: np.ndarray) -> float:
    """Total pairwise two-tangle C_12^2 + C_13^2 + C_23^2 (max 4/3 at W)."""
    v = check_state(state)
    if v.shape[0] != 8:
        raise ValueError("total_concurrence requires a three-qubit state")
    c12 = pair_concurrence(v, (1, 2))
    c13 = pair_concurrence(v, (1, 3))
    c23 = pair_concurrence(v, (2, 3))
    return c12**2 + c13**2 + c23**2


@dataclass(frozen=True)
class EntanglementReport:
    """All measures of one three-qubit ground state."""

    c12: float
    c13: float
    c23: float
    c1_23: float
    c2_13: float
    c3_12: float
    tau: float
    c_total: float


def evaluate_report(state: np.ndarray) -> EntanglementReport:
    v = check_state(state)
    c12 = pair_concurrence(v, (1, 2))
    c13 = pair_concurrence(v, (1, 3))
    c23 = pair_concurrence(v, (2, 3))
    c1_23 = bipartition_concurrence(v, 1)
    c2_13 = bipartition_concurrence(v, 2)
    c3_12 = bipartition_concurrence(v, 3)
    tau = _clamp_tangle(c1_23**2 - c12**2 - c13**2)
    return EntanglementReport(
        c12=c12,
        c13=c13,
        c23=c23,
        c1_23=c1_23,
        c2_13=c2_13,
        c3_12=c3_12,
        tau=tau,
        c_total=c12**2 + c13**2 + c23**2,
    )


# ---------------------------------------------------------------------------
# canonical five-amplitude form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalCoefficients:
    """Coefficients of the five-amplitude canonical form.

    The state is a0|000> + a1 e^{i phi}|100> + a2|101> + a3|110> + a4|111>
    with non-negative a_j and phi in [0, pi].  Its three-tangle is exactly
    (2 a0 a4)^2.
    """

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    phi: float = 0.0

    def __post_init__(self):
        a = np.array([self.a0, self.a1, self.a2, self.a3, self.a4])
        if np.any(a < 0.0):
            raise ValueError("canonical coefficients must be non-negative")
        if not 0.0 <= self.phi <= np.pi:
            raise ValueError(f"phi must lie in [0, pi], got {self.phi}")
        if abs(np.sum(a**2) - 1.0) > 1e-12:
            raise ValueError("canonical coefficients must satisfy sum a_j^2 = 1")


def state_from_canonical(c: CanonicalCoefficients) -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[0] = c.a0
    v[4] = c.a1 * np.exp(1j * c.phi)
    v[5] = c.a2
    v[6] = c.a3
    v[7] = c.a4
    return v


# ---------------------------------------------------------------------------
# polynomial (hyperdeterminant) route to the tangle
# ---------------------------------------------------------------------------


# Quartic monomials of the 2x2x2 hyperdeterminant, as amplitude-index
# quadruples (basis index = 4*q1 + 2*q2 + q3).  First block: the four
# squared antipodal products (d1, coefficient +1); second block: their
# six cross products (d2, coefficient -2); last block: the two odd-cycle
# products (d3, coefficient +4).
_HYPERDET_TERMS = np.array(
    [
        (0, 0, 7, 7), (1, 1, 6, 6), (2, 2, 5, 5), (3, 3, 4, 4),
        (0, 7, 3, 4), (0, 7, 5, 2), (0, 7, 6, 1),
        (3, 4, 5, 2), (3, 4, 6, 1), (5, 2, 6, 1),
        (0, 6, 5, 3), (7, 1, 2, 4),
    ]
)
_HYPERDET_COEF = np.array([1.0] * 4 + [-2.0] * 6 + [4.0] * 2)


def hyperdeterminant(psi: np.ndarray) -> np.ndarray:
    """Cayley 2x2x2 hyperdeterminant of amplitude vectors (..., 8).

    Degree-4 homogeneous polynomial; for a normalized pure state the
    three-tangle equals 4*|hyperdeterminant|.
    """
    p = np.asarray(psi, dtype=complex)
    monomials = p[..., _HYPERDET_TERMS].prod(axis=-1)
    return monomials @ _HYPERDET_COEF


def three_tangle_hyperdet(state: np.ndarray) -> float:
    """Tangle via the polynomial identity; independent of the Eq-route."""
    v = check_state(state)
    if v.shape[0] != 8:
        raise ValueError("three_tangle_hyperdet requires a three-qubit state")
    return float(min(4.0 * abs(hyperdeterminant(v)), 1.0))


# ---------------------------------------------------------------------------
# batch measures for the sweep engine
# ---------------------------------------------------------------------------

PAIR_QUANTITIES = ("c12", "c13", "c23")
BIPARTITION_QUANTITIES = ("c1_23", "c2_13", "c3_12")
THREE_QUBIT_QUANTITIES = PAIR_QUANTITIES + BIPARTITION_QUANTITIES + (
    "tangle",
    "total_concurrence",
)


def pair_density_batch(states: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Reduced two-qubit density matrices of (n, 8) states, shape (n, 4, 4)."""
    n = states.shape[0]
    t = states.reshape(n, 2, 2, 2)
    if pair == (1, 2):
        a = t.reshape(n, 4, 2)
        return np.einsum("nik,njk->nij", a, a.conj())
    if pair == (1, 3):
        rho = np.einsum("niaj,nkal->nijkl", t, t.conj())
        return rho.reshape(n, 4, 4)
    if pair == (2, 3):
        a = t.reshape(n, 2, 4)
        return np.einsum("nai,naj->nij", a, a.conj())
    raise ValueError(f"pair must be (1,2), (1,3) or (2,3), got {pair}")


def concurrence_mixed_batch(rhos: np.ndarray) -> np.ndarray:
    """Wootters concurrence of (n, 4, 4) density matrices, shape (n,)."""
    w, u = np.linalg.eigh(rhos)
    w = _clean_spectrum(w)
    sq = np.einsum("nik,nk,njk->nij", u, np.sqrt(w), u.conj())
    rho_t = _YY[None] @ rhos.conj() @ _YY[None]
    m = sq @ rho_t @ sq
    m = 0.5 * (m + np.conj(np.swapaxes(m, 1, 2)))
    lam = np.linalg.eigvalsh(m)  # ascending
    s = np.sqrt(_clean_spectrum(lam))
    c = s[:, 3] - s[:, 2] - s[:, 1] - s[:, 0]
    return np.clip(c, 0.0, None)


def _pair_vectors_batch(states: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Subnormalized pair vectors e_k from tracing the remaining qubit.

    Shape (n, 2, 4): index k is the basis state of the traced qubit, the
    last axis runs over the kept pair (ascending order) row-major.
    """
    n = states.shape[0]
    t = states.reshape(n, 2, 2, 2)
    if pair == (1, 2):
        return t.transpose(0, 3, 1, 2).reshape(n, 2, 4)
    if pair == (1, 3):
        return t.transpose(0, 2, 1, 3).reshape(n, 2, 4)
    if pair == (2, 3):
        return t.reshape(n, 2, 4)
    raise ValueError(f"pair must be (1,2), (1,3) or (2,3), got {pair}")


def pair_concurrence_batch(states: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Reduced-pair concurrence of (n, 8) pure states; see pair_concurrence."""
    e = _pair_vectors_batch(np.asarray(states, dtype=complex), pair)
    w = np.einsum("nka,ab,nlb->nkl", e, _YY, e)
    frob2 = np.sum(np.abs(w) ** 2, axis=(1, 2))
    det = np.abs(w[:, 0, 0] * w[:, 1, 1] - w[:, 0, 1] * w[:, 1, 0])
    return np.sqrt(np.clip(frob2 - 2.0 * det, 0.0, None))


def _lone_density_batch(states: np.ndarray, lone: int) -> np.ndarray:
    n = states.shape[0]
    t = states.reshape(n, 2, 2, 2)
    if lone == 1:
        a = t.reshape(n, 2, 4)
        return np.einsum("nia,nja->nij", a, a.conj())
    if lone == 2:
        return np.einsum("naib,najb->nij", t, t.conj())
    if lone == 3:
        a = t.reshape(n, 4, 2)
        return np.einsum("nai,naj->nij", a, a.conj())
    raise ValueError(f"lone qubit must be 1, 2 or 3, got {lone}")


def bipartition_concurrence_batch(states: np.ndarray, lone: int) -> np.ndarray:
    rho = _lone_density_batch(states, lone)
    det = (rho[:, 0, 0] * rho[:, 1, 1] - rho[:, 0, 1] * rho[:, 1, 0]).real
    return 2.0 * np.sqrt(np.clip(det, 0.0, None))


_PAIR_OF = {"c12": (1, 2), "c13": (1, 3), "c23": (2, 3)}
_LONE_OF = {"c1_23": 1, "c2_13": 2, "c3_12": 3}


def evaluate_quantities(states: np.ndarray, quantities) -> dict[str, np.ndarray]:
    """Vectorized measures over a batch of states.

    ``states`` has shape (n, 4) for two qubits (only "concurrence") or
    (n, 8) for three qubits.  Returns one float array per quantity.
    """
    states = np.asarray(states, dtype=complex)
    out: dict[str, np.ndarray] = {}
    if states.shape[1] == 4:
        for q in quantities:
            if q != "concurrence":
                raise ValueError(f"quantity {q!r} undefined for two qubits")
            c = 2.0 * np.abs(states[:, 0] * states[:, 3] - states[:, 1] * states[:, 2])
            out[q] = np.minimum(c, 1.0)
        return out
    if states.shape[1] != 8:
        raise ValueError(f"states must have dimension 4 or 8, got {states.shape[1]}")

    cache: dict[str, np.ndarray] = {}

    def pair_c(name: str) -> np.ndarray:
        if name not in cache:
            cache[name] = pair_concurrence_batch(states, _PAIR_OF[name])
        return cache[name]

    def lone_c(name: str) -> np.ndarray:
        if name not in cache:
            cache[name] = bipartition_concurrence_batch(states, _LONE_OF[name])
        return cache[name]

    for q in quantities:
        if q in _PAIR_OF:
            out[q] = pair_c(q)
        elif q in _LONE_OF:
            out[q] = lone_c(q)
        elif q == "tangle":
            tau = lone_c("c1_23") ** 2 - pair_c("c12") ** 2 - pair_c("c13") ** 2
            low = float(tau.min()) if tau.size else 0.0
            if low < TANGLE_CLAMP:
                raise TangleConsistencyError(
                    f"three-tangle {low:.3e} below clamp window {TANGLE_CLAMP}"
                )
            out[q] = np.clip(tau, 0.0, 1.0)
        elif q == "total_concurrence":
            out[q] = pair_c("c12") ** 2 + pair_c("c13") ** 2 + pair_c("c23") ** 2
        else:
            raise ValueError(f"unknown quantity {q!r} for three qubits")
    return out
