"""Hermitian n-qubit Pauli strings in symplectic bit-mask form.

Encoding
--------
A Pauli string is a pair of integer bit masks ``(x_mask, z_mask)``; bit
``1 << q`` refers to qubit ``q``.  The single-qubit factor on qubit ``q`` is

    (x, z) = (0, 0) -> I      (1, 0) -> X
             (0, 1) -> Z      (1, 1) -> Y  (= i X Z, Hermitian)

so every representable string is Hermitian and squares to the identity;
global phases are never tracked.  Qubit 0 is the least significant bit of a
computational-basis index and the *first* character of a text label, i.e.
``parse_pauli("IZ")`` puts Z on qubit 1.

Two strings commute iff the symplectic form

    popcount(a.x & b.z) + popcount(a.z & b.x)

is even.  ``dense_matrix`` realizes a string as the Kronecker product
``factor(n-1) (x) ... (x) factor(0)`` so that qubit 0 is the fastest index,
consistent with the statevector module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DENSE_QUBIT_LIMIT = 12

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_CHAR = {bits: char for char, bits in _CHAR_TO_BITS.items()}
_FACTORS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A Hermitian Pauli operator on ``n_qubits`` qubits."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("PauliString needs at least one qubit")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask bits outside the qubit register")
        if self.x_mask < 0 or self.z_mask < 0:
            raise ValueError("masks must be non-negative")

    # -- structure ---------------------------------------------------------

    def support(self) -> tuple[int, ...]:
        """Qubits on which the factor is not the identity, ascending."""
        mask = self.x_mask | self.z_mask
        return tuple(q for q in range(self.n_qubits) if (mask >> q) & 1)

    def weight(self) -> int:
        return len(self.support())

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def factor(self, qubit: int) -> str:
        return _BITS_TO_CHAR[((self.x_mask >> qubit) & 1, (self.z_mask >> qubit) & 1)]

    def label(self) -> str:
        """Text form, qubit 0 first; inverse of ``parse_pauli``."""
        return "".join(self.factor(q) for q in range(self.n_qubits))

    def y_count(self) -> int:
        return int(self.x_mask & self.z_mask).bit_count()

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> "PauliString":
        """One non-identity factor ``kind`` in {X, Y, Z} on ``qubit``."""
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"qubit {qubit} outside register of {n_qubits}")
        if kind not in ("X", "Y", "Z"):
            raise ValueError(f"kind must be X, Y or Z, got {kind!r}")
        x, z = _CHAR_TO_BITS[kind]
        return cls(n_qubits, x << qubit, z << qubit)


def parse_pauli(label: str) -> PauliString:
    """Parse a string of I/X/Y/Z characters; character i acts on qubit i."""
    if not label:
        raise ValueError("empty Pauli label")
    x_mask = 0
    z_mask = 0
    for q, char in enumerate(label):
        if char not in _CHAR_TO_BITS:
            raise ValueError(f"invalid Pauli character {char!r} at position {q}")
        x, z = _CHAR_TO_BITS[char]
        x_mask |= x << q
        z_mask |= z << q
    return PauliString(len(label), x_mask, z_mask)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the two strings commute (symplectic-form parity is even)."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("Pauli strings act on registers of different size")
    parity = int(a.x_mask & b.z_mask).bit_count() + int(a.z_mask & b.x_mask).bit_count()
    return parity % 2 == 0


def restrict(p: PauliString, qubits: tuple[int, ...] | list[int]) -> PauliString:
    """Re-index ``p`` onto the sub-register ``qubits`` (block qubit j = qubits[j]).

    Raises if the support of ``p`` is not contained in ``qubits``.
    """
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError("duplicate qubits in restriction")
    if not set(p.support()) <= set(qubits):
        raise ValueError("support extends outside the restriction qubits")
    x_mask = 0
    z_mask = 0
    for j, q in enumerate(qubits):
        x_mask |= ((p.x_mask >> q) & 1) << j
        z_mask |= ((p.z_mask >> q) & 1) << j
    return PauliString(len(qubits), x_mask, z_mask)


def enumerate_effective_set(gamma: tuple[int, ...] | list[int], g: PauliString) -> list[PauliString]:
    """All Pauli strings supported inside ``gamma`` that anticommute with ``g``.

    The identity never anticommutes, so it is naturally excluded.  For a
    single-qubit ``g`` whose support lies in ``gamma`` the count is
    ``2 * 4**(len(gamma) - 1)``.  Deterministic order: lexicographic in the
    per-qubit codes (I, X, Y, Z) over ``gamma``.
    """
    gamma = tuple(sorted(gamma))
    if len(set(gamma)) != len(gamma):
        raise ValueError("duplicate qubits in gamma")
    if len(gamma) > 10:
        raise ValueError("gamma too large to enumerate")
    n = g.n_qubits
    if any(not 0 <= q < n for q in gamma):
        raise ValueError("gamma outside the register")
    out = []
    codes = [(0, 0), (1, 0), (1, 1), (0, 1)]  # I, X, Y, Z
    a = len(gamma)
    for idx in range(4**a):
        x_mask = 0
        z_mask = 0
        rem = idx
        for q in gamma:
            x, z = codes[rem % 4]
            rem //= 4
            x_mask |= x << q
            z_mask |= z << q
        cand = PauliString(n, x_mask, z_mask)
        if not commutes(cand, g):
            out.append(cand)
    return out


def dense_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix oracle, ``2**n x 2**n``; refuse beyond DENSE_QUBIT_LIMIT."""
    if p.n_qubits > DENSE_QUBIT_LIMIT:
        raise ValueError(f"dense matrix limited to {DENSE_QUBIT_LIMIT} qubits")
    out = np.array([[1.0 + 0.0j]])
    for q in range(p.n_qubits):  # qubit 0 is the fastest index
        out = np.kron(_FACTORS[p.factor(q)], out)
    return out
