"""n-qubit Pauli operators in symplectic form with exact phase tracking.

A Pauli is stored as X and Z bitmasks (bit ``q`` is qubit ``q``) plus a phase
``p`` so that ``matrix(P) = i**p * letter_0 (x) letter_1 (x) ...``, where the
letter at a qubit is I, X, Z or Y for (x, z) = (0,0), (1,0), (0,1), (1,1).
Qubit 0 is the leftmost tensor factor and the leftmost character of the text
form.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

LETTERS = "IXYZ"
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_TOKENS = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PHASE_TEXT = {0: "", 1: "+i", 2: "-", 3: "-i"}
_TEXT_RE = re.compile(r"^\s*([+-]?i?)\s*([IXYZ]+)\s*$")

SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionError(ValueError):
    pass


class CapacityError(ValueError):
    pass


class UnsupportedSymmetryError(ValueError):
    pass


def dense_limit() -> int:
    """Largest qubit count for which dense 2^n x 2^n objects are built."""
    return int(os.environ.get("QECSYM_DENSE_LIMIT", "10"))


def check_dense(n: int, what: str = "dense operation") -> None:
    limit = dense_limit()
    if n > limit:
        raise CapacityError(
            f"{what} needs {n} qubits but the dense limit is {limit} "
            "(set QECSYM_DENSE_LIMIT to raise it)"
        )


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("a Pauli operator needs at least one qubit")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise DimensionError(f"bit masks exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n, 0, 0)

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        m = _TEXT_RE.match(text)
        if not m:
            raise ValueError(f"not a Pauli string: {text!r}")
        token, letters = m.groups()
        if token not in _PHASE_TOKENS:
            raise ValueError(f"bad phase token {token!r} in {text!r}")
        return cls.from_letters(letters, _PHASE_TOKENS[token])

    @classmethod
    def from_letters(cls, letters: str, phase: int = 0) -> PauliOperator:
        x = z = 0
        for q, ch in enumerate(letters):
            bx, bz = _LETTER_BITS[ch]
            x |= bx << q
            z |= bz << q
        return cls(len(letters), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        bx, bz = _LETTER_BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_sparse(cls, n: int, terms: dict[int, str], phase: int = 0) -> PauliOperator:
        x = z = 0
        for q, letter in terms.items():
            bx, bz = _LETTER_BITS[letter]
            x |= bx << q
            z |= bz << q
        return cls(n, x, z, phase)

    @classmethod
    def from_symplectic(cls, n: int, vec: int, phase: int = 0) -> PauliOperator:
        full = (1 << n) - 1
        return cls(n, vec & full, vec >> n, phase)

    # views ----------------------------------------------------------------

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple(self.x >> q & 1 for q in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple(self.z >> q & 1 for q in range(self.n))

    @property
    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def letter(self, q: int) -> str:
        return _BITS_LETTER[(self.x >> q & 1, self.z >> q & 1)]

    @property
    def symplectic(self) -> int:
        """X bits in the low n bits, Z bits in the high n bits."""
        return self.x | self.z << self.n

    @property
    def support(self) -> tuple[int, ...]:
        s = self.x | self.z
        return tuple(q for q in range(self.n) if s >> q & 1)

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def unsigned(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, 0)

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, phase)

    def sort_key(self) -> tuple:
        """Total order used to pick canonical representatives.

        Weight first, then the sparse (qubit, letter) list in increasing qubit
        order with I < X < Y < Z, then phase.
        """
        terms = tuple((q, LETTERS.index(self.letter(q))) for q in self.support)
        return (self.weight(), terms, self.phase)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    # algebra ----------------------------------------------------------------

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def weight(self) -> int:
        return weight(self)

    def commutes(self, other: PauliOperator) -> bool:
        return commutes(self, other)

    def matrix(self) -> np.ndarray:
        return matrix(self)


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _check_same_size(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise DimensionError(f"qubit counts differ: {p.n} vs {q.n}")


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product ``p @ q`` including phase."""
    _check_same_size(p, q)
    # move to X^x Z^z form, where Y = i X Z contributes one factor of i
    ph = p.phase + q.phase + _popcount(p.x & p.z) + _popcount(q.x & q.z)
    ph += 2 * _popcount(p.z & q.x)
    x, z = p.x ^ q.x, p.z ^ q.z
    ph -= _popcount(x & z)
    return PauliOperator(p.n, x, z, ph)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    _check_same_size(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def weight(p: PauliOperator) -> int:
    return _popcount(p.x | p.z)


def matrix(p: PauliOperator) -> np.ndarray:
    check_dense(p.n, "Pauli matrix")
    out = np.ones((1, 1), dtype=complex)
    for q in range(p.n):
        out = np.kron(out, SINGLE_QUBIT[p.letter(q)])
    return (1j**p.phase) * out


def all_paulis(n: int, max_weight: int | None = None, min_weight: int = 0):
    """Phase-free Paulis with weight in [min_weight, max_weight], by weight."""
    top = n if max_weight is None else min(max_weight, n)
    for w in range(min_weight, top + 1):
        for qubits in combinations(range(n), w):
            for letters in product("XYZ", repeat=w):
                yield PauliOperator.from_sparse(n, dict(zip(qubits, letters)))


# dense action -------------------------------------------------------------


def _index_mask(mask: int, n: int) -> int:
    # qubit q is bit (n - 1 - q) of a computational-basis index
    out = 0
    for q in range(n):
        if mask >> q & 1:
            out |= 1 << (n - 1 - q)
    return out


@lru_cache(maxsize=64)
def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _xz_factor(p: PauliOperator) -> complex:
    return 1j ** ((p.phase + _popcount(p.x & p.z)) % 4)


def apply_left(p: PauliOperator, m: np.ndarray) -> np.ndarray:
    """Return ``matrix(p) @ m`` without building ``matrix(p)``."""
    n = p.n
    if m.shape[0] != 1 << n:
        raise DimensionError("operand has the wrong leading dimension")
    idx = _indices(n)
    xm, zm = _index_mask(p.x, n), _index_mask(p.z, n)
    src = idx ^ xm
    signs = 1 - 2 * (np.bitwise_count(src & zm) & 1).astype(np.int8)
    out = m[src] * (signs if m.ndim == 1 else signs[:, None])
    return _xz_factor(p) * out


def apply_right(m: np.ndarray, p: PauliOperator) -> np.ndarray:
    """Return ``m @ matrix(p)`` without building ``matrix(p)``."""
    n = p.n
    if m.shape[-1] != 1 << n:
        raise DimensionError("operand has the wrong trailing dimension")
    idx = _indices(n)
    xm, zm = _index_mask(p.x, n), _index_mask(p.z, n)
    signs = 1 - 2 * (np.bitwise_count(idx & zm) & 1).astype(np.int8)
    return _xz_factor(p) * (m[..., idx ^ xm] * signs)


# single-qubit Cliffords -----------------------------------------------------

_SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_S = np.diag([1, 1j])
_Q = _S @ _SQRT_X

GATES = {
    "I": SINGLE_QUBIT["I"],
    "X": SINGLE_QUBIT["X"],
    "Y": SINGLE_QUBIT["Y"],
    "Z": SINGLE_QUBIT["Z"],
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": _S,
    "Sdg": _S.conj().T,
    "SX": _SQRT_X,
    "Q": _Q,
    "Q2": _Q @ _Q,
}


def gate_matrix(gate) -> np.ndarray:
    if isinstance(gate, str):
        try:
            return GATES[gate]
        except KeyError:
            raise UnsupportedSymmetryError(f"unknown single-qubit gate {gate!r}") from None
    u = np.asarray(gate, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10):
        raise UnsupportedSymmetryError("transversal entries must be 2x2 unitaries")
    return u


def _decompose_single(m: np.ndarray) -> tuple[int, str] | None:
    for letter in "XYZ":
        c = np.trace(SINGLE_QUBIT[letter] @ m) / 2
        for ph in range(4):
            if abs(c - 1j**ph) < 1e-9 and np.allclose(m, 1j**ph * SINGLE_QUBIT[letter], atol=1e-9):
                return ph, letter
    return None


@lru_cache(maxsize=None)
def _clifford_table_cached(key) -> dict[str, tuple[int, str]]:
    u = np.array(key, dtype=complex).reshape(2, 2)
    table = {"I": (0, "I")}
    for letter in "XYZ":
        image = _decompose_single(u @ SINGLE_QUBIT[letter] @ u.conj().T)
        if image is None:
            raise UnsupportedSymmetryError("transversal gate is not Clifford")
        table[letter] = image
    return table


def clifford_table(gate) -> dict[str, tuple[int, str]]:
    """Map each letter L to (phase, L') with u L u^dag = i**phase L'."""
    u = gate_matrix(gate)
    key = tuple(np.round(u.ravel(), 12).tolist())
    return _clifford_table_cached(key)


def conjugate(p: PauliOperator, permutation, transversal=None) -> PauliOperator:
    """A p A^dag for A = Perm o (u_0 (x) ... (x) u_{n-1}).

    The transversal layer acts first; the permutation then moves the letter
    on qubit q to qubit ``permutation[q]``.
    """
    n = p.n
    if len(permutation) != n:
        raise DimensionError("permutation size differs from the Pauli")
    terms = {}
    phase = p.phase
    for q in p.support:
        letter = p.letter(q)
        if transversal is not None:
            ph, letter = clifford_table(transversal[q])[letter]
            phase += ph
        terms[permutation[q]] = letter
    return PauliOperator.from_sparse(n, terms, phase)


def conjugate_by_symmetry(p: PauliOperator, op) -> PauliOperator:
    """Conjugate by a symmetry op exposing ``permutation`` and ``transversal``."""
    return conjugate(p, op.permutation, op.transversal)
