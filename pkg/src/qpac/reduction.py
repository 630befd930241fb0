"""Sample oracle synthesized from a weak phase-kickback oracle.

Concepts are restricted to a shattered set ``Z = {x0} + Y`` with
``c(x0) = 0`` and identified with bit strings ``u`` over ``Y``. The index
register holds ``Z`` with ``x0`` at position 0 and ``Y[j]`` at ``j + 1``;
the label qubit (A) and a flag qubit (B) complete the layout.

The circuit uses one controlled ``O_u`` call and one controlled ``O_u^H``
call and outputs ``(O_u |IN>) |+>`` on the flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qpac.concepts import Classifier, Distribution, perturbed_delta
from qpac.sim import RegisterLayout, SampleOracle, StateVector

X0 = 0
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_SDG = np.diag([1, -1j]).astype(np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


def _proj(bit: int) -> np.ndarray:
    p = np.zeros((2, 2), dtype=np.complex128)
    p[bit, bit] = 1
    return p


class BitString:
    __slots__ = ("bits",)

    def __init__(self, bits):
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits]
        bits = tuple(int(b) for b in bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError("bit string must be a non-empty sequence of 0/1")
        self.bits = bits

    @property
    def d(self) -> int:
        return len(self.bits)

    def hat(self) -> np.ndarray:
        """``(-1)^u`` per coordinate."""
        return 1 - 2 * np.asarray(self.bits, dtype=np.float64)

    def extended(self) -> np.ndarray:
        """Bits over the index register: 0 at ``x0``, then ``u``."""
        return np.concatenate(([0], np.asarray(self.bits, dtype=np.float64)))

    def concept(self) -> Classifier:
        return Classifier(self.extended().astype(np.uint8))

    def __str__(self):
        return "".join(map(str, self.bits))

    def __repr__(self):
        return f"BitString({str(self)!r})"


@dataclass(frozen=True)
class PhaseParams:
    epsilon: float

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.25:
            raise ValueError(f"epsilon must lie in (0, 1/4], got {self.epsilon}")

    @property
    def eta(self) -> float:
        """Angle in ``[0, pi/2]`` with ``sin(eta) = sqrt(4 epsilon)``."""
        return math.asin(math.sqrt(4 * self.epsilon))


def reduction_layout(d: int) -> RegisterLayout:
    return RegisterLayout(index_dim=d + 1, label_qubits=1, ancilla_qubits=1)


class PhaseOracle:
    """``O_u |x> = exp(2 i eta u_x) |x>`` on the index register, with call counters.

    ``x0`` carries ``u = 0``. Controlled applications act on one
    ``(A, B)`` branch of the two ancilla qubits and cost one call.
    """

    def __init__(self, u: BitString, eta: float):
        self.u = u
        self.eta = float(eta)
        self.forward_calls = 0
        self.inverse_calls = 0

    def diagonal(self, inverse: bool = False) -> np.ndarray:
        sign = -1 if inverse else 1
        return np.exp(sign * 2j * self.eta * self.u.extended())

    def matrix(self, inverse: bool = False) -> np.ndarray:
        return np.diag(self.diagonal(inverse))

    def controlled(self, branch: tuple[int, int], *, shifted: bool = False,
                   adjoint: bool = False) -> np.ndarray:
        """Full-layout matrix of the branch-controlled (shifted) oracle; charges one call.

        ``shifted`` selects ``P_eta O_u^H`` (or its adjoint), so the shifted
        form charges the inverse counter and its adjoint the forward one.
        """
        uses_inverse = shifted != adjoint
        diag = self.diagonal(inverse=uses_inverse)
        if shifted:
            diag = diag * np.exp((-1j if adjoint else 1j) * self.eta)
        if uses_inverse:
            self.inverse_calls += 1
        else:
            self.forward_calls += 1
        return _controlled_diag(diag, branch)


def phase_oracle(u: BitString, eta: float) -> PhaseOracle:
    return PhaseOracle(u, eta)


def shifted_oracle(u: BitString, eta: float) -> np.ndarray:
    """``P_eta O_u^H`` on the index register: ``exp(i eta (-1)^u_x)``."""
    return np.exp(1j * eta) * PhaseOracle(u, eta).matrix(inverse=True)


def global_phase(alpha: float, dim: int) -> np.ndarray:
    return np.exp(1j * alpha) * np.eye(dim, dtype=np.complex128)


def _controlled_diag(diag: np.ndarray, branch: tuple[int, int]) -> np.ndarray:
    a, b = branch
    sel = np.kron(np.ones(diag.size), np.kron(np.diag(_proj(a)), np.diag(_proj(b)))).real
    full = np.kron(diag, np.ones(4))
    return np.diag(np.where(sel > 0, full, 1.0)).astype(np.complex128)


def uniform_to_x0(d: int) -> np.ndarray:
    """Reflection swapping ``|x0>`` and the uniform superposition over ``Y``."""
    v = np.zeros(d + 1, dtype=np.complex128)
    v[X0] = 1.0
    v[1:] -= 1.0 / math.sqrt(d)
    v /= np.linalg.norm(v)
    return np.eye(d + 1, dtype=np.complex128) - 2 * np.outer(v, v.conj())


def fixed_gates(d: int, eta: float) -> dict[str, np.ndarray]:
    """Every oracle-free gate of the circuit as a full-layout matrix."""
    n = d + 1
    idx = np.eye(n, dtype=np.complex128)
    w = uniform_to_x0(d)
    not_x0 = idx.copy()
    not_x0[X0, X0] = 0
    at_x0 = idx - not_x0
    return {
        "prep_index": np.kron(w, np.kron(_I2, _I2)),
        "H_A": np.kron(idx, np.kron(_H, _I2)),
        "H_B": np.kron(idx, np.kron(_I2, _H)),
        "Sdg_B": np.kron(idx, np.kron(_I2, _SDG)),
        "cP_eta_00": _controlled_diag(np.full(n, np.exp(1j * eta)), (0, 0)),
        "cP_-eta_01": _controlled_diag(np.full(n, np.exp(-1j * eta)), (0, 1)),
        "cW_B0": np.kron(w, np.kron(_I2, _proj(0))) + np.kron(idx, np.kron(_I2, _proj(1))),
        "cX_B_not_x0": np.kron(at_x0, np.kron(_I2, _I2)) + np.kron(not_x0, np.kron(_I2, _X)),
    }


@dataclass
class ReductionRun:
    state: StateVector
    checkpoints: dict[str, np.ndarray] = field(default_factory=dict)
    controlled_forward_calls: int = 0
    controlled_inverse_calls: int = 0
    eta: float = 0.0


def _circuit(u: BitString, eta: float, oracle: PhaseOracle):
    """Yield ``(checkpoint name or None, matrix)`` in application order."""
    g = fixed_gates(u.d, eta)
    yield None, g["prep_index"]
    yield None, g["H_A"]
    yield "superposition", g["H_B"]
    yield None, g["cP_eta_00"]
    yield None, g["cP_-eta_01"]
    yield None, oracle.controlled((1, 0), shifted=True)
    yield "phases", oracle.controlled((1, 1), shifted=True, adjoint=True)
    yield "hadamard_flag", g["H_B"]
    yield "s_dagger", g["Sdg_B"]
    yield "hadamard_label", g["H_A"]
    yield "uncompute_uniform", g["cW_B0"]
    yield None, g["cX_B_not_x0"]
    yield "final", g["H_B"]


def build_pac_state(u: BitString, epsilon: float) -> ReductionRun:
    """Run the circuit from ``|x0 0 0>`` and record the state at each checkpoint."""
    eta = PhaseParams(epsilon).eta
    layout = reduction_layout(u.d)
    oracle = PhaseOracle(u, eta)
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[layout.position(X0, 0, 0)] = 1.0
    checkpoints = {}
    for name, mat in _circuit(u, eta, oracle):
        amps = mat @ amps
        if name:
            checkpoints[name] = amps.copy()
    return ReductionRun(
        state=StateVector(amps, layout),
        checkpoints=checkpoints,
        controlled_forward_calls=oracle.forward_calls,
        controlled_inverse_calls=oracle.inverse_calls,
        eta=eta,
    )


def target_state(u: BitString, epsilon: float) -> StateVector:
    """``(sqrt(1-4eps)|x0 0> + sqrt(4eps/d) sum_y |y u_y>) |+>``."""
    layout = reduction_layout(u.d)
    amps = np.zeros(layout.dim, dtype=np.complex128)
    plus = 1 / math.sqrt(2)
    for b in (0, 1):
        amps[layout.position(X0, 0, b)] = math.sqrt(1 - 4 * epsilon) * plus
        for j, bit in enumerate(u.bits):
            amps[layout.position(j + 1, bit, b)] = math.sqrt(4 * epsilon / u.d) * plus
    return StateVector(amps, layout)


def reduction_unitary(u: BitString, epsilon: float) -> np.ndarray:
    """Dense unitary of the whole circuit (phase-oracle counters discarded)."""
    eta = PhaseParams(epsilon).eta
    layout = reduction_layout(u.d)
    total = np.eye(layout.dim, dtype=np.complex128)
    for _, mat in _circuit(u, eta, PhaseOracle(u, eta)):
        total = mat @ total
    return total


class ReductionOracle(SampleOracle):
    """Sample oracle realized by the phase-oracle circuit.

    Every application of the circuit or its inverse costs one controlled
    ``O_u`` and one controlled ``O_u^H`` call.
    """

    def __init__(self, u: BitString, epsilon: float):
        layout = reduction_layout(u.d)
        self.u = u
        self.epsilon = epsilon
        super().__init__(
            layout,
            layout.position(X0, 0, 0),
            target_state(u, epsilon).amplitudes,
            matrix=reduction_unitary(u, epsilon),
            concept=u.concept(),
            distribution=perturbed_delta(range(u.d + 1), X0, epsilon),
        )

    @property
    def phase_oracle_calls(self) -> tuple[int, int]:
        n = self.forward_calls + self.inverse_calls
        return n, n


def bit_agreement(h: Classifier, u: BitString, points=None) -> float:
    """Fraction of ``y`` in ``points`` (default: the reduction's Y) with ``h(y) = u_y``."""
    if points is None:
        points = range(1, u.d + 1)
    points = list(points)
    if len(points) != u.d:
        raise ValueError("need one point per bit of u")
    return sum(h[y] == b for y, b in zip(points, u.bits)) / u.d


def reduction_check(u: BitString, epsilon: float) -> dict:
    run = build_pac_state(u, epsilon)
    return {
        "d": u.d,
        "epsilon": epsilon,
        "u_bits": str(u),
        "fidelity": run.state.fidelity(target_state(u, epsilon)),
        "controlled_forward_calls": run.controlled_forward_calls,
        "controlled_inverse_calls": run.controlled_inverse_calls,
    }
