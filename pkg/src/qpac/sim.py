"""Dense statevector simulation over an index / label / ancilla register.

Basis states are enumerated index-major, then label, then ancillas, so
the flat position of ``|x, b, a>`` is ``(x * 2**label_qubits + b) *
2**ancilla_qubits + a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from qpac.concepts import Classifier, Distribution

EXACT_TOL = 1e-9
DRIFT_TOL = 1e-6
MAX_INDEX_DIM = 4096


@dataclass(frozen=True)
class RegisterLayout:
    index_dim: int
    label_qubits: int = 1
    ancilla_qubits: int = 0

    def __post_init__(self):
        if self.index_dim < 1 or self.label_qubits < 1 or self.ancilla_qubits < 0:
            raise ValueError(f"invalid register layout {self}")
        if self.index_dim > MAX_INDEX_DIM:
            raise ValueError(f"index_dim {self.index_dim} exceeds {MAX_INDEX_DIM}")

    @property
    def label_dim(self) -> int:
        return 2**self.label_qubits

    @property
    def ancilla_dim(self) -> int:
        return 2**self.ancilla_qubits

    @property
    def dim(self) -> int:
        return self.index_dim * self.label_dim * self.ancilla_dim

    def position(self, x: int, label: int = 0, ancilla: int = 0) -> int:
        if not (0 <= x < self.index_dim and 0 <= label < self.label_dim
                and 0 <= ancilla < self.ancilla_dim):
            raise IndexError(f"basis state ({x}, {label}, {ancilla}) outside {self}")
        return (x * self.label_dim + label) * self.ancilla_dim + ancilla

    def decode(self, k: int) -> Outcome:
        rest, ancilla = divmod(int(k), self.ancilla_dim)
        x, label = divmod(rest, self.label_dim)
        return Outcome(x, label, ancilla)

    def index_of(self) -> np.ndarray:
        """Index-register value of every basis position."""
        return np.arange(self.dim) // (self.label_dim * self.ancilla_dim)

    def label_of(self) -> np.ndarray:
        return (np.arange(self.dim) // self.ancilla_dim) % self.label_dim


class Outcome(NamedTuple):
    index: int
    label: int
    ancilla: int


class StateVector:
    """Normalized complex amplitudes over a :class:`RegisterLayout`."""

    def __init__(self, amplitudes, layout: RegisterLayout, *, check: bool = True):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (layout.dim,):
            raise ValueError(f"expected {layout.dim} amplitudes, got shape {amplitudes.shape}")
        if check and abs(np.linalg.norm(amplitudes) - 1.0) > EXACT_TOL:
            raise ValueError(f"state norm {np.linalg.norm(amplitudes)!r} is not 1")
        self.amplitudes = amplitudes
        self.layout = layout

    @classmethod
    def basis(cls, layout: RegisterLayout, x: int, label: int = 0, ancilla: int = 0) -> StateVector:
        amps = np.zeros(layout.dim, dtype=np.complex128)
        amps[layout.position(x, label, ancilla)] = 1.0
        return cls(amps, layout)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: StateVector) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: StateVector) -> float:
        return abs(self.overlap(other)) ** 2

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy(), self.layout, check=False)

    def __repr__(self):
        return f"StateVector(dim={self.layout.dim}, norm={self.norm:.12f})"


def sample_state(concept: Classifier, distribution: Distribution,
                 layout: RegisterLayout) -> np.ndarray:
    """Amplitudes of sum_x sqrt(D(x)) |x c(x)> with ancillas in |0>."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    for x in range(layout.index_dim):
        amps[layout.position(x, concept[x])] = np.sqrt(distribution.probs[x])
    return amps


class SampleOracle:
    """State-preparation unitary with separate forward and inverse call counters.

    The oracle is stored either as a reflection axis ``a`` (unitary
    ``2|a><a| - 1``) or as a dense matrix. ``target`` is the image of the
    input state, i.e. the quantum sample.
    """

    def __init__(self, layout: RegisterLayout, in_index: int, target: np.ndarray, *,
                 axis: np.ndarray | None = None, matrix: np.ndarray | None = None,
                 concept: Classifier | None = None, distribution: Distribution | None = None):
        if (axis is None) == (matrix is None):
            raise ValueError("exactly one of axis or matrix must be given")
        self.layout = layout
        self.in_index = int(in_index)
        self.target = np.ascontiguousarray(target, dtype=np.complex128)
        self.axis = None if axis is None else np.ascontiguousarray(axis, dtype=np.complex128)
        self._matrix = None if matrix is None else np.ascontiguousarray(matrix, dtype=np.complex128)
        self.concept = concept
        self.distribution = distribution
        self.forward_calls = 0
        self.inverse_calls = 0

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            a = self.axis
            self._matrix = 2 * np.outer(a, a.conj()) - np.eye(self.layout.dim)
        return self._matrix

    @property
    def in_state(self) -> StateVector:
        amps = np.zeros(self.layout.dim, dtype=np.complex128)
        amps[self.in_index] = 1.0
        return StateVector(amps, self.layout)

    def charge(self, forward: int = 0, inverse: int = 0) -> None:
        if forward < 0 or inverse < 0:
            raise ValueError("call counters cannot decrease")
        self.forward_calls += forward
        self.inverse_calls += inverse

    def act(self, amplitudes: np.ndarray, inverse: bool = False) -> np.ndarray:
        """Apply O (or O^H) to a raw amplitude vector, charging one call."""
        if amplitudes.shape != (self.layout.dim,):
            raise ValueError(f"dimension mismatch: {amplitudes.shape} vs {self.layout.dim}")
        if self.axis is not None:
            a = self.axis
            out = 2 * a * np.vdot(a, amplitudes) - amplitudes
        else:
            out = (self.matrix.conj().T if inverse else self.matrix) @ amplitudes
        self.charge(forward=0 if inverse else 1, inverse=1 if inverse else 0)
        return out

    def reset_counters(self) -> None:
        self.forward_calls = 0
        self.inverse_calls = 0

    def __repr__(self):
        kind = "reflection" if self.axis is not None else "dense"
        return (f"SampleOracle({kind}, dim={self.layout.dim}, "
                f"calls=({self.forward_calls}, {self.inverse_calls}))")


def build_sample_oracle(concept: Classifier, distribution: Distribution,
                        layout: RegisterLayout | None = None) -> SampleOracle:
    """Oracle mapping ``|0 0>`` to the quantum sample of ``concept`` under ``distribution``.

    Built as the reflection through the bisector of ``|IN>`` and the sample
    state, so it is its own inverse.
    """
    n = len(distribution)
    if len(concept) != n:
        raise ValueError(f"concept defined on {len(concept)} points, distribution on {n}")
    if layout is None:
        layout = RegisterLayout(n)
    if layout.index_dim != n:
        raise ValueError(f"layout index_dim {layout.index_dim} != domain size {n}")
    target = sample_state(concept, distribution, layout)
    in_index = layout.position(0, 0, 0)
    axis = target.copy()
    axis[in_index] += 1.0
    # <IN|target> >= 0, so the bisector norm is at least sqrt(2)
    axis /= np.linalg.norm(axis)
    return SampleOracle(layout, in_index, target, axis=axis,
                        concept=concept, distribution=distribution)


def apply(op, state: StateVector, inverse: bool = False) -> StateVector:
    """Return ``op @ state`` (or the adjoint); sample oracles are charged one call."""
    if isinstance(op, SampleOracle):
        if op.layout != state.layout:
            raise ValueError("oracle and state layouts differ")
        return StateVector(op.act(state.amplitudes, inverse), state.layout, check=False)
    op = np.asarray(op)
    if op.shape != (state.layout.dim, state.layout.dim):
        raise ValueError(f"unitary of shape {op.shape} cannot act on dimension {state.layout.dim}")
    mat = op.conj().T if inverse else op
    return StateVector(mat @ state.amplitudes, state.layout, check=False)


def measure(state: StateVector, rng: np.random.Generator) -> Outcome:
    """Computational-basis measurement drawing one uniform variate from ``rng``."""
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > DRIFT_TOL:
        raise ValueError(f"cannot measure unnormalized state (norm^2 = {total!r})")
    cdf = np.cumsum(probs)
    k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return state.layout.decode(min(k, len(cdf) - 1))


class CallReport(NamedTuple):
    forward: int
    inverse: int
    total: int


def call_report(oracle: SampleOracle) -> CallReport:
    return CallReport(oracle.forward_calls, oracle.inverse_calls,
                      oracle.forward_calls + oracle.inverse_calls)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the stream for a given seed is platform independent."""
    return np.random.Generator(np.random.PCG64(seed))


def trial_seed(master_seed: int, trial: int) -> int:
    """Deterministic 63-bit seed for trial ``trial`` under ``master_seed``."""
    ss = np.random.SeedSequence([int(master_seed), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def is_unitary(mat: np.ndarray, tol: float = EXACT_TOL) -> bool:
    mat = np.asarray(mat)
    return bool(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))) <= tol)
