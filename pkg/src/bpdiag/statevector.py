"""Dense statevector simulation with reduced-state deviation measures.

Conventions
-----------
Amplitudes are a flat complex128 array of length ``2**n``; qubit 0 is the
least significant bit of the index, so basis label characters (first = qubit
0) and ``pauli.dense_matrix`` agree with this layout.  Gate application is
in place and never materializes a ``2**n x 2**n`` operator; reduced density
blocks are built directly from amplitudes as M @ M^dagger where M groups the
kept qubits into the row index.

``hs_deviation_sq`` is the squared Hilbert-Schmidt distance of a reduced
block from the maximally mixed state, ``Tr(rho^2) - 2**-|A|``.  The
*effective* variant keeps only the Pauli components of the block that
anticommute with a given generator; by Pauli orthogonality that sum equals
``|| (rho - G rho G)/2 ||_F^2``, which is how it is computed here (unit
tests pin it to the literal Pauli-sum definition).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, dense_matrix, restrict

DEFAULT_ATOL = 1e-10

_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(dim: int) -> np.ndarray:
    idx = _INDEX_CACHE.get(dim)
    if idx is None:
        idx = np.arange(dim, dtype=np.uint64)
        idx.setflags(write=False)
        _INDEX_CACHE[dim] = idx
    return idx


@dataclass
class StateVector:
    """A pure state on ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        dim = 1 << self.n_qubits
        if self.amplitudes.shape != (dim,):
            raise ValueError(f"expected {dim} amplitudes, got {self.amplitudes.shape}")
        if self.amplitudes.dtype != np.complex128:
            self.amplitudes = self.amplitudes.astype(np.complex128)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def init_basis_state(n_qubits: int, bits: str | None = None) -> StateVector:
    """Computational basis state; ``bits[q]`` is the value of qubit q.

    Defaults to the all-zeros state.
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if bits is None:
        bits = "0" * n_qubits
    if len(bits) != n_qubits or any(c not in "01" for c in bits):
        raise ValueError(f"bits must be {n_qubits} characters of 0/1, got {bits!r}")
    index = sum(int(c) << q for q, c in enumerate(bits))
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


# ---------------------------------------------------------------------------
# Pauli action and expectation


def _pauli_image(amps: np.ndarray, p: PauliString) -> np.ndarray:
    """Return P |psi> as a new array.

    (P psi)[k] = i**ny * (-1)**popcount((k ^ x) & z) * psi[k ^ x].
    """
    idx = _indices(amps.shape[0])
    src = idx ^ np.uint64(p.x_mask)
    out = amps[src]
    if p.z_mask:
        parity = np.bitwise_count(src & np.uint64(p.z_mask)) & np.uint64(1)
        out = out * (1.0 - 2.0 * parity.astype(np.float64))
    ny = p.y_count() % 4
    if ny:
        out *= 1j**ny
    return out


def expect_pauli(state: StateVector, p: PauliString) -> float:
    """<psi| P |psi>; real for Hermitian P (imaginary part asserted tiny)."""
    if p.n_qubits != state.n_qubits:
        raise ValueError("Pauli string and state size mismatch")
    value = np.vdot(state.amplitudes, _pauli_image(state.amplitudes, p))
    assert abs(value.imag) < 1e-9
    return float(value.real)


# ---------------------------------------------------------------------------
# Gates


def apply_rotation_1q(state: StateVector, axis: str, qubit: int, angle: float) -> StateVector:
    """Apply exp(-i * angle * P / 2) for P in {X, Y, Z} in place."""
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} outside register")
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    view = state.amplitudes.reshape(1 << (n - 1 - qubit), 2, 1 << qubit)
    a = view[:, 0, :]
    b = view[:, 1, :]
    if axis == "X":
        a_new = c * a - 1j * s * b
        b_new = c * b - 1j * s * a
        view[:, 0, :] = a_new
        view[:, 1, :] = b_new
    elif axis == "Y":
        a_new = c * a - s * b
        b_new = c * b + s * a
        view[:, 0, :] = a_new
        view[:, 1, :] = b_new
    elif axis == "Z":
        view[:, 0, :] = (c - 1j * s) * a
        view[:, 1, :] = (c + 1j * s) * b
    else:
        raise ValueError(f"axis must be X, Y or Z, got {axis!r}")
    return state


def apply_rxx(state: StateVector, qubit_a: int, qubit_b: int, angle: float) -> StateVector:
    """Apply exp(-i * angle * X_a X_b) in place (full-angle convention)."""
    n = state.n_qubits
    if qubit_a == qubit_b:
        raise ValueError("rxx needs two distinct qubits")
    lo, hi = sorted((qubit_a, qubit_b))
    if not (0 <= lo and hi < n):
        raise ValueError("qubit outside register")
    c = np.cos(angle)
    s = np.sin(angle)
    view = state.amplitudes.reshape(
        1 << (n - 1 - hi), 2, 1 << (hi - lo - 1), 2, 1 << lo
    )
    flipped = view[:, ::-1, :, ::-1, :]
    state.amplitudes = (c * view - 1j * s * flipped).reshape(-1)
    return state


def apply_pauli_exp(state: StateVector, generator: PauliString, angle: float) -> StateVector:
    """Apply exp(-i * angle * G) for a Pauli generator G (G^2 = 1)."""
    if generator.n_qubits != state.n_qubits:
        raise ValueError("generator and state size mismatch")
    if generator.is_identity():
        state.amplitudes *= np.exp(-1j * angle)
        return state
    image = _pauli_image(state.amplitudes, generator)
    state.amplitudes = np.cos(angle) * state.amplitudes - 1j * np.sin(angle) * image
    return state


def apply_dense(
    state: StateVector,
    matrix: np.ndarray,
    qubits: tuple[int, ...] | list[int],
    *,
    check_unitary: bool = True,
    atol: float = DEFAULT_ATOL,
) -> StateVector:
    """Apply a dense unitary on the ordered qubit tuple, in place.

    ``qubits[0]`` is the least significant bit of the matrix row index,
    matching ``pauli.dense_matrix`` when ``qubits == (0, 1, ..., k-1)``.
    """
    qubits = tuple(qubits)
    k = len(qubits)
    n = state.n_qubits
    if len(set(qubits)) != k:
        raise ValueError("duplicate qubits")
    if any(not 0 <= q < n for q in qubits):
        raise ValueError("qubit outside register")
    if matrix.shape != (1 << k, 1 << k):
        raise ValueError(f"matrix shape {matrix.shape} does not act on {k} qubits")
    if check_unitary:
        err = np.abs(matrix @ matrix.conj().T - np.eye(1 << k)).max()
        if err > max(atol, 1e-12) * 100:
            raise ValueError(f"matrix is not unitary (deviation {err:.2e})")
    tensor = state.amplitudes.reshape([2] * n)
    # tensor axis for qubit q is n-1-q; most significant matrix bit first
    axes = [n - 1 - q for q in reversed(qubits)]
    tensor = np.moveaxis(tensor, axes, range(k))
    shape = tensor.shape
    flat = tensor.reshape(1 << k, -1)
    flat = matrix @ flat
    tensor = np.moveaxis(flat.reshape(shape), range(k), axes)
    state.amplitudes = np.ascontiguousarray(tensor).reshape(-1)
    return state


# ---------------------------------------------------------------------------
# Reduced blocks and deviation measures


@dataclass
class DensityBlock:
    """Reduced density matrix on an ordered subset of qubits."""

    qubits: tuple[int, ...]
    matrix: np.ndarray

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)

    def validate(self, atol: float = 1e-8) -> None:
        m = self.matrix
        if np.abs(m - m.conj().T).max() > atol:
            raise ValueError("block is not Hermitian")
        if abs(np.trace(m).real - 1.0) > atol:
            raise ValueError("block trace differs from 1")
        if np.linalg.eigvalsh(m).min() < -atol:
            raise ValueError("block has a negative eigenvalue")


def partial_trace(state: StateVector, qubits: tuple[int, ...] | list[int]) -> DensityBlock:
    """Reduced state on ``qubits`` (ordered; qubits[0] = least significant).

    Built as M @ M^dagger from the amplitude tensor, so the cost is
    O(2**n * 2**|A|) and no full density matrix is formed.
    """
    qubits = tuple(qubits)
    n = state.n_qubits
    a = len(qubits)
    if a == 0:
        raise ValueError("empty subset")
    if a > 12:
        raise ValueError("subset too large")
    if len(set(qubits)) != a:
        raise ValueError("duplicate qubits")
    if any(not 0 <= q < n for q in qubits):
        raise ValueError("qubit outside register")
    tensor = state.amplitudes.reshape([2] * n)
    axes = [n - 1 - q for q in reversed(qubits)]
    tensor = np.moveaxis(tensor, axes, range(a))
    m = tensor.reshape(1 << a, -1)
    return DensityBlock(qubits, m @ m.conj().T)


def hs_deviation_sq(block: DensityBlock) -> float:
    """Tr(rho^2) - 2**-|A|, clamped at zero against rounding."""
    value = block.purity() - 2.0 ** (-len(block.qubits))
    assert value > -1e-10
    return max(value, 0.0)


def effective_hs_deviation_sq(
    state: StateVector, gamma: tuple[int, ...] | list[int], generator: PauliString
) -> float:
    """Deviation carried by Pauli components on ``gamma`` that anticommute
    with ``generator``:  2**-|Gamma| * sum_{g in S(Gamma,G), g != 1} <g>^2.

    Computed as || (rho - G rho G) / 2 ||_F^2 on the reduced block, which
    equals the Pauli sum by orthogonality.  ``generator`` must be supported
    inside ``gamma``.
    """
    gamma = tuple(sorted(gamma))
    if len(gamma) > 10:
        raise ValueError("gamma larger than 10 qubits")
    if not set(generator.support()) <= set(gamma):
        raise ValueError("generator support extends outside gamma")
    block = partial_trace(state, gamma)
    g_block = dense_matrix(restrict(generator, gamma))
    delta = 0.5 * (block.matrix - g_block @ block.matrix @ g_block)
    return float(np.vdot(delta, delta).real)
