"""Seed-stream derivation and the random primitives used by the estimators.

All randomness flows through ``numpy.random.Generator`` objects derived from
an integer entropy path, so a fixed master seed yields bit-identical results
regardless of evaluation order: sample ``i`` of a run always draws from the
stream ``(master_seed, i)`` and never observes how many other streams exist.

Haar-distributed unitaries are sampled by QR-decomposing a complex Ginibre
matrix and absorbing the phases of the R diagonal, which makes the factor
unique and the distribution exactly left/right invariant.  Single-qubit
Cliffords come from an explicit 24-element table (the rotation group of the
cube realized in SU(2)), giving exact uniformity over the group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Stream ids below this value are reserved for per-sample streams; internal
# consumers (bootstrap resampling, ...) start here.
RESERVED_STREAM_BASE = 1 << 48


def stream_generator(*path: int) -> np.random.Generator:
    """Generator for an integer entropy path; pure function of the path."""
    if not path:
        raise ValueError("empty entropy path")
    if any(p < 0 for p in path):
        raise ValueError("entropy path entries must be non-negative")
    return np.random.default_rng(np.random.SeedSequence(list(path)))


@dataclass(frozen=True)
class SeedSpec:
    """A master seed plus a stream index, resolvable to a Generator."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("seeds and stream ids must be non-negative")

    def generator(self) -> np.random.Generator:
        return stream_generator(self.master_seed, self.stream_id)


def sample_uniform_angles(count: int, rng: np.random.Generator) -> np.ndarray:
    """Angles drawn independently and uniformly from [0, 2*pi)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return rng.uniform(0.0, TWO_PI, size=count)


def sample_haar(dim: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary of the given dimension."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def sample_haar_batch(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` independent Haar unitaries, shape (count, dim, dim)."""
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, np.newaxis, :]


def _su2(axis: np.ndarray, angle: float) -> np.ndarray:
    """exp(-i * angle/2 * axis . sigma) for a unit Bloch axis."""
    x, y, z = axis
    sigma = np.array(
        [[z, x - 1j * y], [x + 1j * y, -z]], dtype=complex
    )
    return np.cos(angle / 2.0) * np.eye(2) - 1j * np.sin(angle / 2.0) * sigma


def _build_clifford_table() -> tuple[np.ndarray, ...]:
    entries = [np.eye(2, dtype=complex)]
    axes_face = [np.array(v, dtype=float) for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    for axis in axes_face:
        for angle in (np.pi / 2, np.pi, 3 * np.pi / 2):
            entries.append(_su2(axis, angle))
    axes_edge = [
        (1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1),
    ]
    for axis in axes_edge:
        entries.append(_su2(np.array(axis, dtype=float) / np.sqrt(2.0), np.pi))
    axes_body = [(1, 1, 1), (1, 1, -1), ( 1, -1, 1), (1, -1, -1)]
    for axis in axes_body:
        unit = np.array(axis, dtype=float) / np.sqrt(3.0)
        entries.append(_su2(unit, 2 * np.pi / 3))
        entries.append(_su2(unit, 4 * np.pi / 3))
    for m in entries:
        m.setflags(write=False)
    return tuple(entries)


#: The 24 single-qubit Cliffords as SU(2) matrices (one per cube rotation).
CLIFFORD_TABLE: tuple[np.ndarray, ...] = _build_clifford_table()


def sample_single_qubit_clifford(rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the 24-element single-qubit Clifford table."""
    return CLIFFORD_TABLE[int(rng.integers(0, len(CLIFFORD_TABLE)))]


def bloch_rotation(u: np.ndarray) -> np.ndarray:
    """SO(3) action of a single-qubit unitary on the Bloch vector."""
    paulis = [
        np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
        np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    ]
    out = np.empty((3, 3))
    for i, si in enumerate(paulis):
        for j, sj in enumerate(paulis):
            out[i, j] = 0.5 * np.trace(si @ u @ sj @ u.conj().T).real
    return out
