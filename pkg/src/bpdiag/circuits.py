"""Circuit types, experiment-family builders, light cones and cost evaluation.

A circuit is an immutable gate list plus a weighted-Pauli observable and the
index of the probed parameter.  Gate kinds:

- ``rot1q``      exp(-i * theta/2 * P), P in {X, Y, Z}; shift constant u = 1/2
- ``rxx``        exp(-i * theta * X X) on two qubits;    shift constant u = 1
- ``pauli_exp``  exp(-i * theta * G) for a Pauli string G; shift constant u = 1
- ``dense``      a fixed unitary block, either carried literally (``matrix``)
                 or named by a ``tag`` that is resolved to a Haar draw at
                 evaluation time (``adjoint=True`` applies the conjugate
                 transpose of the same draw).

Angles bind either to a parameter slot (``param``) or to a literal
(``angle``).  Evaluation starts from |0...0> and returns
``sum_g c_g <g>`` over the observable terms.

Experiment families
-------------------
``build_tree_circuit``  A hierarchical n-qubit circuit of L = n-1 layers.
Layer k applies single-qubit rotations about per-gate random axes on qubits
k..n (1-based), then XX couplers on neighbouring pairs (k, k+1)..(n-1, n); a
final single rotation acts on qubit n, which also carries the observable Z.
Each layer drops the lowest qubit, so the circuit funnels into qubit n and
has (L+1)^2 = n^2 parameters.  The probed gate is the rotation at layer
m = ceil(L/2) on qubit n+1-m: the gate sitting on the funnel diagonal,
whose qubit is dropped two layers later.  For n = 3 this is the rotation on
the measured qubit itself, so the shifted costs decorrelate strongly; as n
grows the probe moves ~n/2 couplers away from the survivor and the two
shifted costs collapse onto each other.

``build_example1``  Three registers of n1/n2/n3 qubits: a Haar block on
registers 1+2, a probed Pauli-generator gate inside register 2, then a Haar
block on registers 2+3.  Register 1 acts as an environment that the second
block never touches.

``build_example2``  A Haar block on the whole register, a probed
Pauli-generator gate, then the adjoint of the *same* Haar draw, so at
theta = 0 the circuit is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .pauli import PauliString
from .rng import sample_haar, sample_single_qubit_clifford, sample_uniform_angles
from .statevector import (
    StateVector,
    apply_dense,
    apply_pauli_exp,
    apply_rotation_1q,
    apply_rxx,
    expect_pauli,
    init_basis_state,
)

MAX_QUBITS = 14

_AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class GateSpec:
    """One gate; see the module docstring for the kind conventions."""

    kind: str
    qubits: tuple[int, ...]
    axis: str | None = None
    generator: PauliString | None = None
    param: int | None = None
    angle: float | None = None
    tag: str | None = None
    adjoint: bool = False
    matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("rot1q", "rxx", "pauli_exp", "dense"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("duplicate qubits in gate")
        if self.kind == "rot1q":
            if len(self.qubits) != 1 or self.axis not in _AXES:
                raise ValueError("rot1q needs one qubit and an X/Y/Z axis")
        if self.kind == "rxx" and len(self.qubits) != 2:
            raise ValueError("rxx needs two qubits")
        if self.kind == "pauli_exp":
            if self.generator is None or self.generator.is_identity():
                raise ValueError("pauli_exp needs a non-identity generator")
            if tuple(sorted(self.qubits)) != self.generator.support():
                raise ValueError("pauli_exp qubits must equal the generator support")
        if self.kind == "dense":
            if (self.tag is None) == (self.matrix is None):
                raise ValueError("dense gate needs exactly one of tag or matrix")
            if self.param is not None or self.angle is not None:
                raise ValueError("dense gates carry no angle")
        else:
            if (self.param is None) == (self.angle is None):
                raise ValueError("angle gates need exactly one of param or angle")

    @property
    def shift_u(self) -> float | None:
        """Parameter-shift constant: derivative = u * (C(+pi/4u) - C(-pi/4u))."""
        if self.kind == "rot1q":
            return 0.5
        if self.kind in ("rxx", "pauli_exp"):
            return 1.0
        return None

    def generator_string(self, n_qubits: int) -> PauliString:
        """Pauli generator P of the gate exp(-i * u * theta * P)."""
        if self.kind == "rot1q":
            return PauliString.single(n_qubits, self.qubits[0], self.axis)
        if self.kind == "rxx":
            lo = PauliString.single(n_qubits, self.qubits[0], "X")
            hi = PauliString.single(n_qubits, self.qubits[1], "X")
            return PauliString(n_qubits, lo.x_mask | hi.x_mask, 0)
        if self.kind == "pauli_exp":
            return self.generator
        raise ValueError("dense gates have no Pauli generator")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateSpec, ...]
    param_count: int
    observable: tuple[tuple[float, PauliString], ...]
    probe_index: int | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}")
        seen_params = []
        for gate in self.gates:
            if any(not 0 <= q < self.n_qubits for q in gate.qubits):
                raise ValueError("gate qubit outside register")
            if gate.param is not None:
                if not 0 <= gate.param < self.param_count:
                    raise ValueError("gate parameter index out of range")
                seen_params.append(gate.param)
        if sorted(seen_params) != list(range(self.param_count)):
            raise ValueError("every parameter slot must bind to exactly one gate")
        if not self.observable:
            raise ValueError("observable must have at least one term")
        for coeff, term in self.observable:
            if term.n_qubits != self.n_qubits:
                raise ValueError("observable term register size mismatch")
            if isinstance(coeff, complex):
                raise ValueError("observable coefficients must be real")
        if self.probe_index is not None:
            gate = self.probe_gate()
            if gate.shift_u is None:
                raise ValueError("probe must target a gate with a Pauli generator")

    def probe_gate_position(self) -> int:
        """Gate-list index of the gate bound to the probed parameter."""
        if self.probe_index is None:
            raise ValueError("circuit has no probe")
        for i, gate in enumerate(self.gates):
            if gate.param == self.probe_index:
                return i
        raise ValueError("probe parameter is unbound")

    def probe_gate(self) -> GateSpec:
        return self.gates[self.probe_gate_position()]

    def observable_support(self) -> tuple[int, ...]:
        qubits: set[int] = set()
        for _, term in self.observable:
            qubits.update(term.support())
        return tuple(sorted(qubits))

    def observable_l2_norm_sq(self) -> float:
        """Squared Frobenius norm, 2**n * sum_g c_g^2 for distinct Pauli terms."""
        return float(2**self.n_qubits) * sum(c * c for c, _ in self.observable)

    def with_observable(self, observable) -> "Circuit":
        return replace(self, observable=tuple(observable))


# ---------------------------------------------------------------------------
# Evaluation


def resolve_haar_tags(circuit: Circuit, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Draw one Haar unitary per distinct dense tag, in gate order."""
    tags: dict[str, np.ndarray] = {}
    for gate in circuit.gates:
        if gate.kind == "dense" and gate.tag is not None and gate.tag not in tags:
            tags[gate.tag] = sample_haar(1 << len(gate.qubits), rng)
    return tags


def _apply_gate(state: StateVector, gate: GateSpec, params: np.ndarray, tags) -> None:
    if gate.kind == "dense":
        matrix = gate.matrix if gate.matrix is not None else tags[gate.tag]
        if gate.adjoint:
            matrix = matrix.conj().T
        apply_dense(state, matrix, gate.qubits, check_unitary=False)
        return
    angle = gate.angle if gate.param is None else float(params[gate.param])
    if gate.kind == "rot1q":
        apply_rotation_1q(state, gate.axis, gate.qubits[0], angle)
    elif gate.kind == "rxx":
        apply_rxx(state, gate.qubits[0], gate.qubits[1], angle)
    else:
        apply_pauli_exp(state, gate.generator, angle)


def run_statevector(
    circuit: Circuit,
    params: np.ndarray,
    tags: dict[str, np.ndarray] | None = None,
    *,
    upto: int | None = None,
    start: StateVector | None = None,
    from_gate: int = 0,
) -> StateVector:
    """State after gates ``from_gate:upto`` applied to ``start`` (or |0..0>)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.param_count,):
        raise ValueError(f"expected {circuit.param_count} parameters")
    state = init_basis_state(circuit.n_qubits) if start is None else start
    gates = circuit.gates[from_gate:upto]
    if tags is None and any(g.kind == "dense" and g.tag is not None for g in gates):
        raise ValueError("circuit has unresolved Haar tags; pass tags or an rng")
    for gate in gates:
        _apply_gate(state, gate, params, tags)
    return state


def evaluate_cost(
    circuit: Circuit,
    params: np.ndarray,
    rng: np.random.Generator | None = None,
    tags: dict[str, np.ndarray] | None = None,
) -> float:
    """sum_g c_g <g> on the output state; Haar tags drawn from ``rng`` if
    not supplied."""
    if tags is None and rng is not None:
        tags = resolve_haar_tags(circuit, rng)
    state = run_statevector(circuit, params, tags)
    return cost_of_state(circuit, state)


def cost_of_state(circuit: Circuit, state: StateVector) -> float:
    return sum(c * expect_pauli(state, term) for c, term in circuit.observable)


# ---------------------------------------------------------------------------
# Light cones


def light_cone(
    circuit: Circuit, observable_support: tuple[int, ...] | list[int], cut: int
) -> frozenset[int]:
    """Back-propagate the observable support through gates ``cut:`` and
    return the touched qubit set (a conservative superset of the true
    support at the cut)."""
    if not 0 <= cut <= len(circuit.gates):
        raise ValueError("cut outside the gate list")
    cone = set(observable_support)
    for gate in reversed(circuit.gates[cut:]):
        if cone.intersection(gate.qubits):
            cone.update(gate.qubits)
    return frozenset(cone)


# ---------------------------------------------------------------------------
# Builders


def build_tree_circuit(n_qubits: int, rng: np.random.Generator) -> Circuit:
    """Funnel circuit described in the module docstring; axes drawn from rng."""
    if not 3 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"tree circuit needs 3..{MAX_QUBITS} qubits")
    layers = n_qubits - 1
    mid = (layers + 1) // 2
    probe_qubit = n_qubits + 1 - mid  # funnel-diagonal gate, 1-based
    gates: list[GateSpec] = []
    probe_index = None
    param = 0
    for layer in range(1, layers + 1):
        for q in range(layer, n_qubits + 1):  # 1-based qubit labels
            axis = _AXES[int(rng.integers(0, 3))]
            gates.append(GateSpec("rot1q", (q - 1,), axis=axis, param=param))
            if layer == mid and q == probe_qubit:
                probe_index = param
            param += 1
        for q in range(layer, n_qubits):
            gates.append(GateSpec("rxx", (q - 1, q), param=param))
            param += 1
    axis = _AXES[int(rng.integers(0, 3))]
    gates.append(GateSpec("rot1q", (n_qubits - 1,), axis=axis, param=param))
    param += 1
    assert param == n_qubits**2
    assert probe_index is not None
    observable = ((1.0, PauliString.single(n_qubits, n_qubits - 1, "Z")),)
    return Circuit(n_qubits, tuple(gates), param, observable, probe_index)


def build_example1(
    n1: int,
    n2: int,
    n3: int,
    generator: PauliString | None = None,
    observable=None,
) -> Circuit:
    """Environment / probe / readout three-register circuit.

    ``observable`` may be a single Pauli string or a tuple of
    (coefficient, string) terms, all supported on registers 2+3.
    """
    if min(n1, n2, n3) < 1:
        raise ValueError("all three registers need at least one qubit")
    n = n1 + n2 + n3
    if n > MAX_QUBITS:
        raise ValueError(f"total register limited to {MAX_QUBITS} qubits")
    block_12 = tuple(range(n1 + n2))
    block_23 = tuple(range(n1, n))
    if generator is None:
        generator = PauliString.single(n, n1, "Z")
    if observable is None:
        zz = PauliString.single(n, n1, "Z")
        z3 = PauliString.single(n, n1 + n2, "Z")
        observable = PauliString(n, zz.x_mask | z3.x_mask, zz.z_mask | z3.z_mask)
    if isinstance(observable, PauliString):
        observable = ((1.0, observable),)
    if not set(generator.support()) <= set(range(n1, n1 + n2)):
        raise ValueError("generator must live in the middle register")
    for _, term in observable:
        if not set(term.support()) <= set(range(n1, n)):
            raise ValueError("observable must live in registers 2+3")
    gates = (
        GateSpec("dense", block_12, tag="V"),
        GateSpec("pauli_exp", generator.support(), generator=generator, param=0),
        GateSpec("dense", block_23, tag="U"),
    )
    return Circuit(n, gates, 1, tuple(observable), probe_index=0)


OBSERVABLE_TILT = np.pi / 6


def tilted_observable(n_qubits: int, qubit: int = 0, tilt: float = OBSERVABLE_TILT):
    """cos(tilt) Z + sin(tilt) X on one qubit.

    The scramble/unscramble correlation needs an observable whose
    expectation on the input state is strictly between the extremes: a Z
    string fixes |0..0> exactly (the two shifted evaluations then coincide
    for every scrambler and the gradient is identically zero), while a
    zero-expectation observable removes the common signal component that
    drives the correlation toward one.
    """
    return (
        (float(np.cos(tilt)), PauliString.single(n_qubits, qubit, "Z")),
        (float(np.sin(tilt)), PauliString.single(n_qubits, qubit, "X")),
    )


def build_example2(
    n_qubits: int,
    generator: PauliString | None = None,
    observable=None,
) -> Circuit:
    """Scramble / probe / unscramble circuit: U, exp(-i theta G), U^dagger.

    ``observable`` may be a single traceless Pauli string or a tuple of
    (coefficient, string) terms; the default is the tilted single-qubit
    observable.
    """
    if not 1 <= n_qubits <= 7:
        raise ValueError("this family is limited to 7 qubits (exact cross-checks)")
    everything = tuple(range(n_qubits))
    if generator is None:
        generator = PauliString.single(n_qubits, 0, "Z")
    if observable is None:
        observable = tilted_observable(n_qubits)
    elif isinstance(observable, PauliString):
        observable = ((1.0, observable),)
    for _, term in observable:
        if term.is_identity():
            raise ValueError("observable terms must be traceless")
    gates = (
        GateSpec("dense", everything, tag="U"),
        GateSpec("pauli_exp", generator.support(), generator=generator, param=0),
        GateSpec("dense", everything, tag="U", adjoint=True),
    )
    return Circuit(n_qubits, gates, 1, tuple(observable), probe_index=0)


def insert_clifford_layer(
    circuit: Circuit, position: int, rng: np.random.Generator
) -> Circuit:
    """New circuit with one fresh uniform Clifford on every qubit at
    ``position`` (gate-list index); draws consumed in qubit order."""
    if not 0 <= position <= len(circuit.gates):
        raise ValueError("position outside the gate list")
    layer = tuple(
        GateSpec("dense", (q,), matrix=sample_single_qubit_clifford(rng))
        for q in range(circuit.n_qubits)
    )
    gates = circuit.gates[:position] + layer + circuit.gates[position:]
    return replace(circuit, gates=gates)


# ---------------------------------------------------------------------------
# Monte-Carlo families: a family rebuilds its circuit per sample so that the
# random architecture choices (rotation axes, Clifford layers) are part of
# the sampled ensemble.


class TreeFamily:
    """Funnel circuits of fixed size with per-sample random axes."""

    pool_center = True

    def __init__(self, n_qubits: int, observable=None):
        self.n_qubits = n_qubits
        self.observable = observable
        self.name = "tree"

    def build(self, rng: np.random.Generator) -> Circuit:
        circuit = build_tree_circuit(self.n_qubits, rng)
        if self.observable is not None:
            circuit = circuit.with_observable(self.observable)
        return circuit

    def sample_params(self, circuit: Circuit, rng: np.random.Generator) -> np.ndarray:
        return sample_uniform_angles(circuit.param_count, rng)


class Example1Family:
    """Fixed-architecture three-register circuits; only theta is sampled."""

    pool_center = True

    def __init__(self, n1: int, n2: int, n3: int, generator=None, observable=None):
        self.dims = (1 << n1, 1 << n2, 1 << n3)
        self._circuit = build_example1(n1, n2, n3, generator, observable)
        self.n_qubits = self._circuit.n_qubits
        self.name = "example1"

    def build(self, rng: np.random.Generator) -> Circuit:
        return self._circuit

    def sample_params(self, circuit: Circuit, rng: np.random.Generator) -> np.ndarray:
        return sample_uniform_angles(circuit.param_count, rng)


class Example2Family:
    """Scramble/unscramble circuits probed at theta = 0."""

    pool_center = False

    def __init__(self, n_qubits: int, generator=None, observable=None):
        self._circuit = build_example2(n_qubits, generator, observable)
        self.n_qubits = n_qubits
        self.name = "example2"

    def build(self, rng: np.random.Generator) -> Circuit:
        return self._circuit

    def sample_params(self, circuit: Circuit, rng: np.random.Generator) -> np.ndarray:
        return np.zeros(circuit.param_count)
