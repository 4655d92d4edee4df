"""Hamiltonians: deterministic one-body terms plus random interactions.

Eight interaction topologies are supported, two on two qubits and six on
three qubits.  The global strength parameter ``sigma`` is the *linear
scale* of the interaction: every topology produces entries of standard
deviation proportional to sigma (drawing V at strength sigma is the same
as drawing at strength 1 and multiplying by sigma), which is what makes
the small-sigma laws <C> ~ sigma and <tau> ~ sigma^3 come out linear on
a log-log axis.  Since the GUE sampler in :mod:`spinent.rmt` is
parametrized by the entry second moment, a factor with declared scale
sigma**e draws from GUE with parameter sigma**(2e).

==============  ====================================================
two-i           V1 (x) V2, each GUE(2) factor of scale sqrt(sigma)
two-ii          V12 of scale sigma
I               V1 (x) V2 (x) V3, factor scale sigma^(1/3)
II              V12 (x) V3, scales sigma^(2/3) and sigma^(1/3)
III             V123 of scale sigma
a               (1/2)(1 (x) V23 + V12 (x) 1), both of scale sigma
b               (1/2)(1 (x) V2 (x) V3 + V1 (x) V2 (x) 1), factor scale
                sqrt(sigma)
c               (1/3)(1 (x) V2 (x) V3 + V1 (x) 1 (x) V3 + V1 (x) V2 (x) 1),
                factor scale sqrt(sigma)
==============  ====================================================

The factor scales multiply out so that all kinds share the same entry
variance sigma^2 at every sigma (for the summed forms, per summand
before the prefactor).

For the summed forms ``b`` and ``c`` a factor that appears in several
terms (e.g. V2) is sampled once per realization and reused; pass
``shared_factors=False`` to resample it independently per term instead.
Each sample consumes a single ``gaussians`` call on its own stream;
factors take consecutive slices of that block in subscript order (for
the independent reading, term by term).  Single-sample and batch
construction therefore agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import PAULI_Z, identity, kron
from .rmt import RngStream, draw_gaussian_rows
from .rmt import _gue_from_gaussians as _gue_assemble


class InteractionKind(Enum):
    TWO_QUBIT_SEPARABLE = "two-i"
    TWO_QUBIT_JOINT = "two-ii"
    COLLECTIVE_I = "I"
    COLLECTIVE_II = "II"
    COLLECTIVE_III = "III"
    PAIRWISE_A = "a"
    PAIRWISE_B = "b"
    PAIRWISE_C = "c"

    @property
    def label(self) -> str:
        return self.value

    @property
    def n_qubits(self) -> int:
        if self in (InteractionKind.TWO_QUBIT_SEPARABLE, InteractionKind.TWO_QUBIT_JOINT):
            return 2
        return 3

    @classmethod
    def from_label(cls, label: str) -> "InteractionKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(
            f"unknown interaction kind {label!r}; "
            f"expected one of {[k.value for k in cls]}"
        )


KIND_LABELS = tuple(kind.value for kind in InteractionKind)


@dataclass(frozen=True)
class ModelSpec:
    """Interaction topology plus global strength sigma (sigma=0 means V=0)."""

    kind: InteractionKind
    sigma: float

    def __post_init__(self):
        if not (self.sigma >= 0.0 and np.isfinite(self.sigma)):
            raise ValueError(f"sigma must be >= 0 and finite, got {self.sigma}")

    @property
    def n_qubits(self) -> int:
        return self.kind.n_qubits

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def one_body(n_qubits: int) -> np.ndarray:
    """Sum of sigma_z terms, one per qubit: diag entries n_zeros - n_ones."""
    if n_qubits not in (2, 3):
        raise ValueError(f"n_qubits must be 2 or 3, got {n_qubits}")
    eye2 = identity(2)
    total = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for pos in range(n_qubits):
        factors = [PAULI_Z if q == pos else eye2 for q in range(n_qubits)]
        term = factors[0]
        for f in factors[1:]:
            term = kron(term, f)
        total += term
    return total


def _bkron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product over a leading batch axis."""
    n, da, db = a.shape[0], a.shape[1], b.shape[1]
    out = np.einsum("nab,ncd->nacbd", a, b)
    return out.reshape(n, da * db, da * db)


def _eye_batch(n: int, d: int) -> np.ndarray:
    return np.broadcast_to(np.eye(d, dtype=complex), (n, d, d))


def _factor_plan(kind: InteractionKind, shared_factors: bool):
    """(dim, scale exponent) of each GUE factor, in draw order."""
    half = (2, 0.5)
    third = (2, 1.0 / 3.0)
    if kind is InteractionKind.TWO_QUBIT_SEPARABLE:
        return [half, half]  # V1, V2
    if kind is InteractionKind.TWO_QUBIT_JOINT:
        return [(4, 1.0)]
    if kind is InteractionKind.COLLECTIVE_I:
        return [third, third, third]  # V1, V2, V3
    if kind is InteractionKind.COLLECTIVE_II:
        return [(4, 2.0 / 3.0), third]  # V12, V3
    if kind is InteractionKind.COLLECTIVE_III:
        return [(8, 1.0)]
    if kind is InteractionKind.PAIRWISE_A:
        return [(4, 1.0), (4, 1.0)]  # V12, V23
    if kind is InteractionKind.PAIRWISE_B:
        # shared: V1, V2, V3; independent: per-term V2, V3 then V1, V2
        return [half] * 3 if shared_factors else [half] * 4
    if kind is InteractionKind.PAIRWISE_C:
        # shared: V1, V2, V3; independent: (V2, V3), (V1, V3), (V1, V2)
        return [half] * 3 if shared_factors else [half] * 6
    raise AssertionError(f"unhandled kind {kind}")


def sample_interaction_batch(
    spec: ModelSpec, streams, shared_factors: bool = True
) -> np.ndarray:
    """One interaction matrix per stream, shape (n, dim, dim).

    ``streams`` is a sequence of RngStream (or a BankSlice), one logical
    stream per sample; each sample's randomness comes only from its own
    stream, as a single block of normals.
    """
    if not (spec.sigma > 0.0):
        raise ValueError("sample_interaction requires sigma > 0 (sigma=0 means V=0)")
    n = len(streams)
    s = spec.sigma
    kind = spec.kind

    plan = _factor_plan(kind, shared_factors)
    g = draw_gaussian_rows(streams, sum(d * d for d, _ in plan))
    mats = []
    off = 0
    for d, expo in plan:
        # GUE parameter = (linear scale)^2; see the module docstring.
        mats.append(_gue_assemble(g[:, off : off + d * d], d, (s**expo) ** 2))
        off += d * d

    if kind is InteractionKind.TWO_QUBIT_SEPARABLE:
        return _bkron(mats[0], mats[1])
    if kind in (InteractionKind.TWO_QUBIT_JOINT, InteractionKind.COLLECTIVE_III):
        return mats[0]
    if kind is InteractionKind.COLLECTIVE_I:
        return _bkron(_bkron(mats[0], mats[1]), mats[2])
    if kind is InteractionKind.COLLECTIVE_II:
        return _bkron(mats[0], mats[1])
    eye = _eye_batch(n, 2)
    if kind is InteractionKind.PAIRWISE_A:
        v12, v23 = mats
        return 0.5 * (_bkron(eye, v23) + _bkron(v12, eye))
    if kind is InteractionKind.PAIRWISE_B:
        if shared_factors:
            v1, v2, v3 = mats
            return 0.5 * (_bkron(_bkron(eye, v2), v3) + _bkron(_bkron(v1, v2), eye))
        v2a, v3a, v1b, v2b = mats
        return 0.5 * (_bkron(_bkron(eye, v2a), v3a) + _bkron(_bkron(v1b, v2b), eye))
    if kind is InteractionKind.PAIRWISE_C:
        if shared_factors:
            v1, v2, v3 = mats
            return (
                _bkron(_bkron(eye, v2), v3)
                + _bkron(_bkron(v1, eye), v3)
                + _bkron(_bkron(v1, v2), eye)
            ) / 3.0
        v2a, v3a, v1b, v3b, v1c, v2c = mats
        return (
            _bkron(_bkron(eye, v2a), v3a)
            + _bkron(_bkron(v1b, eye), v3b)
            + _bkron(_bkron(v1c, v2c), eye)
        ) / 3.0
    raise AssertionError(f"unhandled kind {kind}")


def sample_interaction(
    spec: ModelSpec, rng: RngStream, shared_factors: bool = True
) -> np.ndarray:
    """Single interaction draw; identical to a batch of one."""
    return sample_interaction_batch(spec, [rng], shared_factors)[0]


def build_hamiltonian_batch(
    spec: ModelSpec, streams, shared_factors: bool = True
) -> np.ndarray:
    """One-body terms plus interaction, one Hamiltonian per stream."""
    h0 = one_body(spec.n_qubits)
    if spec.sigma == 0.0:
        return np.broadcast_to(h0, (len(streams),) + h0.shape).copy()
    v = sample_interaction_batch(spec, streams, shared_factors)
    return h0[None, :, :] + v


def build_hamiltonian(
    spec: ModelSpec, rng: RngStream, shared_factors: bool = True
) -> np.ndarray:
    return build_hamiltonian_batch(spec, [rng], shared_factors)[0]
