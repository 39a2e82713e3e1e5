"""Exact Haar-moment calculus over the symmetric group S_k (k <= 4).

Permutation operators
---------------------
``D_sigma`` acts on (C^d)^{tensor k} by sending input slot sigma(s) to
output slot s:  D_sigma (x_1 (x) ... (x) x_k) = x_{sigma(1)} (x) ... (x)
x_{sigma(k)} (slots 0-based in code).  With this convention

    Tr(D_sigma (A_1 (x) ... (x) A_k)) = prod_{cycles (c1 c2 ... cm)} Tr(A_c1 A_c2 ... A_cm)

which is what ``trace_against_permutation`` computes, and
``Tr(D_sigma^dagger D_pi) = d**cycles(sigma^-1 pi)`` is the Gram matrix of
the operators.  The k-th moment of the Haar ensemble projects any operator
onto ``span{D_pi}``; expanding a factorized operator X = A_1 (x) ... (x) A_k,

    E[U^k X U^-k] = sum_pi a_pi D_pi,   Gram a = t,  t_sigma = Tr(D_sigma^dagger X),

which ``twirl_factor_coefficients`` solves exactly (least squares when the
Gram is singular, i.e. d < k; the trace vector always lies in its column
space so the projected channel is still exact).  The Weingarten table is
the identity row of the inverse Gram, a class function of the cycle type.

Closed forms
------------
``example1_closed_form`` evaluates the exact 2-design coefficients of the
three-register experiment and combines them into the second and cross
moments for pure product inputs, returning both the exact ratio
``one_minus_r_exact`` and the compact large-d1 approximation ``one_minus_r``.

``example2_exact_r`` computes the exact shifted-evaluation correlation of
the scramble/unscramble experiment by a fourth-moment twirl.  Writing
S = exp(-i pi G / 4) for the probe generator G and W for the Haar
scrambler, the shifted costs are

    T+ = <psi| St^dag g St |psi>,  T- = <psi| St g St^dag |psi>,
    St = W S W^dag,

so E[T+ T-] = Tr(E[X] K) with X the slot-ordered factor product
St^dag (x) St (x) St (x) St^dag (and St^dag (x) St (x) St^dag (x) St for
E[T+^2]); the Haar average turns X into a combination of permutation
operators and K is a fixed rank-one network of g and psi legs, so each
moment reduces to 24 cheap delta contractions ``_contract_environment``
evaluates without materializing any d^4 operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as _iter_permutations

import numpy as np

from .pauli import PauliString, dense_matrix


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0, ..., k-1} stored as its image tuple."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation of 0..{len(self.images) - 1}: {self.images}")

    @property
    def k(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Permutation":
        inv = [0] * self.k
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(i) = self(other(i))."""
        if self.k != other.k:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.k)))

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles in traversal order, smallest element first."""
        seen = [False] * self.k
        out = []
        for start in range(self.k):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            nxt = self.images[start]
            while nxt != start:
                cycle.append(nxt)
                seen[nxt] = True
                nxt = self.images[nxt]
            out.append(tuple(cycle))
        return out

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(k)))


def all_permutations(k: int) -> list[Permutation]:
    """All k! permutations in lexicographic image order (stable table order)."""
    if not 1 <= k <= 4:
        raise ValueError("supported up to k = 4")
    return [Permutation(images) for images in _iter_permutations(range(k))]


def cycle_type(sigma: Permutation) -> tuple[int, ...]:
    """Cycle lengths, descending; e.g. the identity on 4 slots -> (1,1,1,1)."""
    return tuple(sorted((len(c) for c in sigma.cycles()), reverse=True))


def gram_entry(sigma: Permutation, pi: Permutation, d: int) -> int:
    """Tr(D_sigma^dagger D_pi) = d ** cycles(sigma^-1 pi)."""
    return d ** len(sigma.inverse().compose(pi).cycles())


def dense_permutation_operator(sigma: Permutation, d: int) -> np.ndarray:
    """Dense D_sigma on (C^d)^{tensor k}; slot 0 is the most significant
    index (matching reshape([d]*k) order).  Oracle use only."""
    k = sigma.k
    dim = d**k
    out = np.zeros((dim, dim))
    for col in range(dim):
        digits = []
        rem = col
        for _ in range(k):
            digits.append(rem % d)
            rem //= d
        digits.reverse()  # digits[s] is the slot-s index
        row_digits = [digits[sigma(s)] for s in range(k)]
        row = 0
        for v in row_digits:
            row = row * d + v
        out[row, col] = 1.0
    return out


def permute_tensor_slots(vec: np.ndarray, sigma: Permutation, d: int) -> np.ndarray:
    """D_sigma applied to a vector of length d**k."""
    k = sigma.k
    tensor = vec.reshape([d] * k)
    return np.transpose(tensor, axes=sigma.images).reshape(-1)


def trace_against_permutation(sigma: Permutation, factors: list[np.ndarray]) -> complex:
    """prod over cycles (c1 ... cm) of Tr(factors[c1] @ ... @ factors[cm])."""
    if len(factors) != sigma.k:
        raise ValueError("need one factor per slot")
    total = 1.0 + 0.0j
    for cycle in sigma.cycles():
        prod = factors[cycle[0]]
        for s in cycle[1:]:
            prod = prod @ factors[s]
        total *= np.trace(prod)
    return complex(total)


# ---------------------------------------------------------------------------
# Weingarten table


@dataclass(frozen=True)
class WeingartenTable:
    k: int
    d: int
    values: dict  # cycle type -> float

    def __call__(self, sigma: Permutation) -> float:
        return self.values[cycle_type(sigma)]


def weingarten_table(k: int, d: int) -> WeingartenTable:
    """Identity row of the inverse Gram matrix, collapsed by cycle type.

    Requires d >= k (the Gram matrix is singular below that).
    """
    if d < k:
        raise ValueError(f"Gram matrix singular for d={d} < k={k}")
    perms = all_permutations(k)
    gram = np.array([[gram_entry(s, p, d) for p in perms] for s in perms], dtype=float)
    rhs = np.zeros(len(perms))
    rhs[perms.index(Permutation.identity(k))] = 1.0
    solution = np.linalg.solve(gram, rhs)
    values: dict[tuple[int, ...], float] = {}
    for perm, value in zip(perms, solution):
        ctype = cycle_type(perm)
        if ctype in values:
            if abs(values[ctype] - value) > 1e-9 * max(1.0, abs(value)):
                raise AssertionError("Weingarten solution is not a class function")
        else:
            values[ctype] = float(value)
    return WeingartenTable(k, d, values)


def twirl_factor_coefficients(k: int, d: int, factors: list[np.ndarray]) -> np.ndarray:
    """Coefficients a with E[U^k (A_1 (x) ... (x) A_k) U^-k] = sum a_pi D_pi,
    ordered as ``all_permutations(k)``.  Falls back to least squares when
    d < k."""
    perms = all_permutations(k)
    gram = np.array([[gram_entry(s, p, d) for p in perms] for s in perms], dtype=float)
    t = np.array([trace_against_permutation(s.inverse(), factors) for s in perms])
    if d >= k:
        return np.linalg.solve(gram, t)
    solution, *_ = np.linalg.lstsq(gram.astype(complex), t, rcond=None)
    return solution


def leading_order_report(k: int = 4, dims: tuple[int, ...] = (16, 32, 64)) -> dict:
    """Rescaled Weingarten values Wg * (-1)^|type| * d^(k + |type|) per cycle
    type, where |type| is the minimal transposition count (k minus the
    number of cycles).  Purely informational: reports the numerically
    fitted leading constants without asserting any reference value."""
    out: dict[str, dict] = {}
    for d in dims:
        table = weingarten_table(k, d)
        for ctype, value in table.values.items():
            length = k - len(ctype)
            scaled = value * (-1.0) ** length * float(d) ** (k + length)
            out.setdefault(str(ctype), {})[str(d)] = scaled
    return out


# ---------------------------------------------------------------------------
# Three-register closed form


def example1_closed_form(d1: int, d2: int, d3: int) -> dict:
    """Exact 2-design coefficients and moments of the three-register
    experiment for pure product inputs.

    Returns the twirl coefficients, the second and cross moments,
    ``one_minus_r_exact`` (the exact ratio implied by the two moments) and
    ``one_minus_r`` (the compact large-d1 approximation, whose validity
    needs d2 well below d1 and d3).
    """
    if min(d1, d2, d3) < 2:
        raise ValueError("all register dimensions must be at least 2")
    d12 = d1 * d2
    d23 = d2 * d3
    b_u = -1.0 / (d23**2 - 1)
    c_u = d23 / (d23**2 - 1)
    b_v = (d1**2 * d2 - d2) / (d12**2 - 1)
    c_v = (d1 * d2**2 - d1) / (d12**2 - 1)
    b_v_shift = d1**2 * d2 / (d12**2 - 1)
    c_v_shift = -d1 / (d12**2 - 1)
    second_moment = b_u + c_u * (b_v + c_v)
    cross_moment = b_u + c_u * (b_v_shift + c_v_shift)
    one_minus_r_exact = (second_moment - cross_moment) / second_moment
    approx_num = d2**3 * d3 * d1
    approx_den = d1 * d2**3 * d3 - d1**2 * d2**2 + d1**2 * d2 * d3
    return {
        "d1": d1,
        "d2": d2,
        "d3": d3,
        "b_u": b_u,
        "c_u": c_u,
        "b_v": b_v,
        "c_v": c_v,
        "b_v_shift": b_v_shift,
        "c_v_shift": c_v_shift,
        "second_moment": second_moment,
        "cross_moment": cross_moment,
        "one_minus_r_exact": one_minus_r_exact,
        "one_minus_r": approx_num / approx_den,
        "dim_constraint_ok": 2 * d2 <= d3,
    }


# ---------------------------------------------------------------------------
# Scramble/unscramble exact correlation


def shift_unitary(generator: PauliString) -> np.ndarray:
    """exp(-i pi G / 4) = (1 - i G) / sqrt(2) for a Pauli generator."""
    g = dense_matrix(generator)
    return (np.eye(g.shape[0]) - 1j * g) / np.sqrt(2.0)


def _contract_environment(
    pi: Permutation, g_first: np.ndarray, g_second: np.ndarray, psi: np.ndarray
) -> complex:
    """Tr(D_pi K) for the fixed observable/state network K.

    Expanding T+ T- (or T+^2) in matrix elements gives, per tensor slot s,
    a row leg R_s and a column leg C_s of the twirled factor, tied to the
    environment  conj(psi)_{R1} g_{C1 R2} psi_{C2} conj(psi)_{R3}
    g'_{C3 R4} psi_{C4} (one observable insertion per trace copy).
    Replacing the factor by D_pi identifies R_s = C_{pi(s)}; merging legs
    accordingly turns the whole expression into one einsum over at most
    four free labels.
    """
    if pi.k != 4:
        raise ValueError("contraction defined for k = 4")
    # Leg numbering: 0..3 = R1..R4 (rows), 4..7 = C1..C4 (columns).
    parent = list(range(8))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in range(4):
        root_a, root_b = find(s), find(4 + pi(s))
        if root_a != root_b:
            parent[root_a] = root_b
    letters = {}
    for leg in range(8):
        root = find(leg)
        if root not in letters:
            letters[root] = chr(ord("a") + len(letters))
    label = [letters[find(leg)] for leg in range(8)]
    subscripts = ",".join(
        [
            label[0],  # conj(psi)_{R1}
            label[4] + label[1],  # g_{C1 R2}
            label[5],  # psi_{C2}
            label[2],  # conj(psi)_{R3}
            label[6] + label[3],  # g'_{C3 R4}
            label[7],  # psi_{C4}
        ]
    )
    return complex(
        np.einsum(
            subscripts + "->",
            psi.conj(),
            g_first,
            psi,
            psi.conj(),
            g_second,
            psi,
            optimize=True,
        )
    )


def observable_terms(observable) -> list[tuple[float, PauliString]]:
    """Normalize an observable given as a Pauli string or a weighted sum of
    Pauli strings into a list of (coefficient, string) pairs."""
    if isinstance(observable, PauliString):
        terms = [(1.0, observable)]
    else:
        terms = [(float(c), p) for c, p in observable]
    if not terms:
        raise ValueError("observable needs at least one term")
    for _, term in terms:
        if term.is_identity():
            raise ValueError("observable terms must be traceless")
    return terms


def example2_exact_r(
    d: int,
    generator: PauliString,
    observable,
    psi: np.ndarray | None = None,
) -> dict:
    """Exact correlation r = E[T+ T-] / E[T+^2] of the scramble/unscramble
    experiment probed at theta = 0.

    ``observable`` is a traceless Pauli string or a weighted sum of them
    (the moments are bilinear in the terms).  ``d`` must equal 2**n for the
    register of the Pauli strings and is limited to 64.  Returns the exact
    numerator, denominator and r, plus a flag when the d < 4 least-squares
    path was taken.
    """
    if d > 64:
        raise ValueError("exact evaluation limited to d <= 64")
    terms = observable_terms(observable)
    if 2**generator.n_qubits != d or any(2**p.n_qubits != d for _, p in terms):
        raise ValueError("Pauli strings must act on log2(d) qubits")
    if generator.is_identity():
        raise ValueError("generator must be a non-identity Pauli")
    if psi is None:
        psi = np.zeros(d, dtype=complex)
        psi[0] = 1.0
    if psi.shape != (d,):
        raise ValueError("psi has the wrong dimension")
    s = shift_unitary(generator)
    s_dag = s.conj().T
    perms = all_permutations(4)
    numerator_coeffs = twirl_factor_coefficients(4, d, [s_dag, s, s, s_dag])
    denominator_coeffs = twirl_factor_coefficients(4, d, [s_dag, s, s_dag, s])
    numerator = 0j
    denominator = 0j
    for c_first, p_first in terms:
        g_first = dense_matrix(p_first)
        for c_second, p_second in terms:
            weight = c_first * c_second
            contractions = np.array(
                [
                    _contract_environment(pi, g_first, dense_matrix(p_second), psi)
                    for pi in perms
                ]
            )
            numerator += weight * np.dot(numerator_coeffs, contractions)
            denominator += weight * np.dot(denominator_coeffs, contractions)
    assert abs(numerator.imag) < 1e-9 and abs(denominator.imag) < 1e-9
    r = numerator.real / denominator.real
    return {
        "d": d,
        "numerator": numerator.real,
        "denominator": denominator.real,
        "r": r,
        "one_minus_r": 1.0 - r,
        "pinv_used": d < 4,
    }
