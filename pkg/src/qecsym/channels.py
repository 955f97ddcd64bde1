"""Quantum channels, structured noise models and logical channels.

Channels are stored in Kraus form. Superoperators use row-major
vectorization, so ``vec(A rho B) = (A kron B.T) vec(rho)``. Pauli transfer
matrices (PTMs) are taken in the normalized Pauli basis,
``M[a, b] = tr(sigma_a L(sigma_b)) / d``, with basis elements ordered as
letter strings over I, X, Y, Z with qubit 0 most significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.stats import unitary_group

from .codes import RecoverySet, StabilizerCode, encoding_isometry
from .pauli import (
    LETTERS,
    SINGLE_QUBIT,
    DimensionError,
    PauliOperator,
    apply_left,
    check_dense,
    gate_matrix,
)

TP_TOL = 1e-10
CHANNEL_EQ_TOL = 1e-12


class NoiseModelError(ValueError):
    pass


# Pauli bases --------------------------------------------------------------


@lru_cache(maxsize=16)
def pauli_labels(k: int) -> tuple[str, ...]:
    return tuple("".join(t) for t in product(LETTERS, repeat=k))


@lru_cache(maxsize=16)
def _pauli_basis_cached(k: int) -> np.ndarray:
    mats = []
    for label in pauli_labels(k):
        m = np.ones((1, 1), dtype=complex)
        for ch in label:
            m = np.kron(m, SINGLE_QUBIT[ch])
        mats.append(m)
    out = np.array(mats)
    out.setflags(write=False)
    return out


def pauli_basis(k: int) -> np.ndarray:
    """Array of shape (4**k, 2**k, 2**k) holding the unnormalized Paulis."""
    return _pauli_basis_cached(k)


def superop_to_ptm(superop: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(superop.shape[0])))
    k = d.bit_length() - 1
    basis = pauli_basis(k)
    vecs = basis.reshape(len(basis), -1)
    images = vecs @ superop.T  # row b is vec(L(sigma_b))
    # tr(sigma_a X) = sum_ij sigma_a[j, i] X[i, j]
    gram = np.einsum("aji,bij->ab", basis, images.reshape(basis.shape))
    return (gram.real / d)


def ptm_to_superop(ptm: np.ndarray) -> np.ndarray:
    k = (ptm.shape[0].bit_length() - 1) // 2
    d = 1 << k
    basis = pauli_basis(k)
    vecs = basis.reshape(len(basis), -1)
    # L(rho) = sum_ab ptm[a, b] tr(sigma_b rho) sigma_a / d
    dual = basis.transpose(0, 2, 1).reshape(len(basis), -1)  # vec of sigma_b^T
    return (vecs.T @ ptm.astype(complex) @ dual) / d


def ptm_from_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    k = d.bit_length() - 1
    basis = pauli_basis(k)
    images = u @ basis @ u.conj().T
    return np.einsum("aji,bij->ab", basis, images).real / d


# channels -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A completely positive map in Kraus form on ``num_qubits`` qubits."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise NoiseModelError("a channel needs at least one Kraus operator")
        d = ks[0].shape[0]
        if d & (d - 1) or any(k.shape != (d, d) for k in ks):
            raise DimensionError("Kraus operators must be square with power-of-two size")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        total = sum(k.conj().T @ k for k in self.kraus)
        return bool(np.allclose(total, np.eye(self.dim), atol=tol))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def superoperator(self) -> np.ndarray:
        return sum(np.kron(k, k.conj()) for k in self.kraus)

    def ptm(self) -> np.ndarray:
        return superop_to_ptm(self.superoperator())

    def conjugated(self, u: np.ndarray) -> QuantumChannel:
        """The channel rho -> u L(u^dag rho u) u^dag."""
        u = np.asarray(u, dtype=complex)
        return QuantumChannel(tuple(u @ k @ u.conj().T for k in self.kraus))

    def equals(self, other: QuantumChannel, tol: float = CHANNEL_EQ_TOL) -> bool:
        if self.dim != other.dim:
            return False
        return bool(np.allclose(self.superoperator(), other.superoperator(), atol=tol, rtol=0))

    @classmethod
    def identity(cls, num_qubits: int = 1) -> QuantumChannel:
        return cls((np.eye(1 << num_qubits),))

    @classmethod
    def unitary(cls, u: np.ndarray) -> QuantumChannel:
        return cls((np.asarray(u, dtype=complex),))

    @classmethod
    def from_superoperator(cls, superop: np.ndarray, tol: float = 1e-10) -> QuantumChannel:
        """Kraus decomposition through the Choi matrix.

        Raises ``NoiseModelError`` when the map is not completely positive.
        """
        superop = np.asarray(superop, dtype=complex)
        d = int(round(np.sqrt(superop.shape[0])))
        # S[(i,j),(k,l)] = sum K[i,k] conj(K[j,l]); choi[(i,k),(j,l)] has the same entries
        choi = superop.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
        choi = (choi + choi.conj().T) / 2
        vals, vecs = np.linalg.eigh(choi)
        scale = max(1.0, float(np.abs(vals).max()))
        if vals.min() < -tol * scale:
            raise NoiseModelError("map is not completely positive")
        kraus = [
            np.sqrt(v) * vecs[:, i].reshape(d, d)
            for i, v in enumerate(vals)
            if v > tol * scale * 1e-3
        ]
        if not kraus:
            kraus = [np.zeros((d, d))]
        return cls(tuple(kraus))

    @classmethod
    def from_ptm(cls, ptm: np.ndarray, tol: float = 1e-10) -> QuantumChannel:
        return cls.from_superoperator(ptm_to_superop(np.asarray(ptm, dtype=float)), tol)

    def to_dict(self) -> dict:
        return {"kraus": [[[[z.real, z.imag] for z in row] for row in k] for k in self.kraus]}

    @classmethod
    def from_dict(cls, data: dict) -> QuantumChannel:
        return cls(tuple(_parse_matrix(k) for k in data["kraus"]))


def _parse_matrix(rows) -> np.ndarray:
    out = []
    for row in rows:
        out.append([complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z) for z in row])
    return np.array(out, dtype=complex)


def depolarizing_channel(p: float) -> QuantumChannel:
    """rho -> p rho + (1 - p) I/2, whose PTM is diag(1, p, p, p)."""
    if not 0.0 <= p <= 1.0:
        raise NoiseModelError(f"depolarizing parameter {p} outside [0, 1]")
    w = (1 - p) / 4
    ks = [np.sqrt(p + w) * SINGLE_QUBIT["I"]]
    ks += [np.sqrt(w) * SINGLE_QUBIT[c] for c in "XYZ"]
    return QuantumChannel(tuple(ks))


def bit_flip_channel(q: float) -> QuantumChannel:
    if not 0.0 <= q <= 1.0:
        raise NoiseModelError(f"flip probability {q} outside [0, 1]")
    return QuantumChannel((np.sqrt(1 - q) * SINGLE_QUBIT["I"], np.sqrt(q) * SINGLE_QUBIT["X"]))


def pauli_channel(probs: dict[str, float]) -> QuantumChannel:
    return QuantumChannel(tuple(np.sqrt(w) * SINGLE_QUBIT[c] for c, w in probs.items()))


def random_channel(rng: np.random.Generator, num_qubits: int = 1, rank: int = 2) -> QuantumChannel:
    """Kraus operators cut from a Haar unitary on system (x) environment."""
    d = 1 << num_qubits
    v = unitary_group.rvs(d * rank, random_state=rng)
    # rows index (system, env); environment starts in |0>
    block = v.reshape(d, rank, d, rank)[:, :, :, 0]
    return QuantumChannel(tuple(block[:, e, :] for e in range(rank)))


def unitary_channel(gate) -> QuantumChannel:
    return QuantumChannel.unitary(gate_matrix(gate))


# noise models ---------------------------------------------------------------


def _apply_factor(tensor: np.ndarray, superop: np.ndarray, q: int, n: int, lead: int) -> np.ndarray:
    s = superop.reshape(2, 2, 2, 2)
    out = np.tensordot(s, tensor, axes=([2, 3], [lead + q, lead + n + q]))
    return np.moveaxis(out, [0, 1], [lead + q, lead + n + q])


def _apply_factors(superops, ops: np.ndarray) -> np.ndarray:
    n = len(superops)
    shape = ops.shape
    lead = ops.ndim - 2
    t = ops.reshape(shape[:lead] + (2,) * (2 * n))
    for q, s in enumerate(superops):
        if s is not None:
            t = _apply_factor(t, s, q, n, lead)
    return t.reshape(shape)


class NoiseModel:
    """Common interface of the structured noise descriptions."""

    n: int

    @property
    def is_family(self) -> bool:
        return False

    def single_qubit_factors(self) -> list[QuantumChannel] | None:
        """Per-qubit channels when the model is a product, else None."""
        return None

    def apply(self, ops: np.ndarray) -> np.ndarray:
        """Apply to one operator or a stack of operators (leading axes)."""
        self._require_concrete()
        ops = np.asarray(ops, dtype=complex)
        if ops.shape[-1] != 1 << self.n or ops.shape[-2] != 1 << self.n:
            raise DimensionError(f"operator size does not match {self.n} qubits")
        factors = self.single_qubit_factors()
        if factors is not None:
            return _apply_factors([f.superoperator() for f in factors], ops)
        ks = self.kraus_operators()
        return sum(k @ ops @ k.conj().T for k in ks)

    def kraus_operators(self) -> list[np.ndarray]:
        raise NotImplementedError

    def _require_concrete(self):
        if self.is_family:
            raise NoiseModelError(f"{type(self).__name__} describes a family, not a channel")

    def sample(self, rng: np.random.Generator) -> NoiseModel:
        """A concrete member of this model's family."""
        return self

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class IIDNoise(NoiseModel):
    """The same single-qubit channel on every qubit; ``single=None`` is the family."""

    single: QuantumChannel | None
    n: int

    def __post_init__(self):
        if self.single is not None and self.single.num_qubits != 1:
            raise NoiseModelError("IID noise needs a single-qubit channel")

    @property
    def is_family(self) -> bool:
        return self.single is None

    def single_qubit_factors(self):
        self._require_concrete()
        return [self.single] * self.n

    def apply(self, ops):
        self._require_concrete()
        s = self.single.superoperator()
        ops = np.asarray(ops, dtype=complex)
        if ops.shape[-1] != 1 << self.n:
            raise DimensionError(f"operator size does not match {self.n} qubits")
        return _apply_factors([s] * self.n, ops)

    def sample(self, rng):
        return IIDNoise(random_channel(rng), self.n)

    def to_dict(self):
        out = {"type": "iid", "n": self.n}
        if self.single is not None:
            out["channel"] = self.single.to_dict()
        return out


@dataclass(frozen=True, eq=False)
class TensorNoise(NoiseModel):
    """A product of (possibly different) single-qubit channels."""

    factors: tuple[QuantumChannel, ...]
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if any(f.num_qubits != 1 for f in self.factors):
            raise NoiseModelError("tensor factors must be single-qubit channels")
        object.__setattr__(self, "n", len(self.factors))

    def single_qubit_factors(self):
        return list(self.factors)

    def to_dict(self):
        return {"type": "tensor", "factors": [f.to_dict() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class DepolarizingNoise(NoiseModel):
    """IID depolarizing noise; ``p=None`` is the family over all p."""

    p: float | None
    n: int

    def __post_init__(self):
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise NoiseModelError(f"depolarizing parameter {self.p} outside [0, 1]")

    @property
    def is_family(self) -> bool:
        return self.p is None

    def single_qubit_factors(self):
        self._require_concrete()
        return [depolarizing_channel(self.p)] * self.n

    def sample(self, rng):
        return DepolarizingNoise(float(rng.uniform(0.5, 1.0)), self.n)

    def to_dict(self):
        out = {"type": "depolarizing", "n": self.n}
        if self.p is not None:
            out["p"] = self.p
        return out


@dataclass(frozen=True, eq=False)
class KrausNoise(NoiseModel):
    """An arbitrary channel on all n qubits given by global Kraus operators."""

    kraus: tuple[np.ndarray, ...]
    n: int = field(init=False)

    def __post_init__(self):
        ch = QuantumChannel(tuple(self.kraus))
        object.__setattr__(self, "kraus", ch.kraus)
        object.__setattr__(self, "n", ch.num_qubits)

    def kraus_operators(self):
        return list(self.kraus)

    @property
    def channel(self) -> QuantumChannel:
        return QuantumChannel(self.kraus)

    def to_dict(self):
        return {"type": "kraus", "kraus": QuantumChannel(self.kraus).to_dict()["kraus"]}


def identity_noise(n: int) -> NoiseModel:
    return IIDNoise(QuantumChannel.identity(1), n)


def conjugation_noise(p: PauliOperator) -> KrausNoise:
    """The single-branch map rho -> P rho P^dag used to separate recoveries."""
    return KrausNoise((p.matrix(),))


def apply_noise(noise: NoiseModel, op: np.ndarray) -> np.ndarray:
    return noise.apply(op)


def noise_trace_preserving(noise: NoiseModel, tol: float = TP_TOL) -> bool:
    factors = noise.single_qubit_factors()
    if factors is not None:
        return all(f.is_trace_preserving(tol) for f in factors)
    return QuantumChannel(tuple(noise.kraus_operators())).is_trace_preserving(tol)


def mixture(weights, models) -> KrausNoise:
    """Convex combination of concrete noise models as a global Kraus model."""
    ks = []
    for w, m in zip(weights, models):
        for k in _global_kraus(m):
            ks.append(np.sqrt(w) * k)
    return KrausNoise(tuple(ks))


def _global_kraus(model: NoiseModel) -> list[np.ndarray]:
    factors = model.single_qubit_factors()
    if factors is None:
        return model.kraus_operators()
    out = [np.ones((1, 1), dtype=complex)]
    for f in factors:
        out = [np.kron(a, b) for a in out for b in f.kraus]
    return out


# logical channels -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LogicalChannel:
    """Real PTM of a (not necessarily trace-preserving) map on k qubits."""

    ptm: np.ndarray

    def __post_init__(self):
        m = np.array(self.ptm, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise DimensionError("a PTM must be square with power-of-four size")
        m.setflags(write=False)
        object.__setattr__(self, "ptm", m)

    @property
    def k(self) -> int:
        return (self.ptm.shape[0].bit_length() - 1) // 2

    @property
    def labels(self) -> tuple[str, ...]:
        return pauli_labels(self.k)

    def __matmul__(self, other: LogicalChannel) -> LogicalChannel:
        return LogicalChannel(self.ptm @ other.ptm)

    def __add__(self, other: LogicalChannel) -> LogicalChannel:
        return LogicalChannel(self.ptm + other.ptm)

    def scaled(self, c: float) -> LogicalChannel:
        return LogicalChannel(c * self.ptm)

    @property
    def probability(self) -> float:
        """tr of the output for a maximally mixed input, i.e. ptm[0, 0]."""
        return float(self.ptm[0, 0])

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        row = np.zeros(self.ptm.shape[0])
        row[0] = 1.0
        return bool(np.allclose(self.ptm[0], row, atol=tol))

    def is_unital(self, tol: float = TP_TOL) -> bool:
        col = np.zeros(self.ptm.shape[0])
        col[0] = self.ptm[0, 0]
        return bool(np.allclose(self.ptm[:, 0], col, atol=tol))

    @classmethod
    def identity(cls, k: int = 1) -> LogicalChannel:
        return cls(np.eye(4**k))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> LogicalChannel:
        return cls(ptm_from_unitary(u))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "ptm": self.ptm.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> LogicalChannel:
        return cls(np.array(data["ptm"], dtype=float))


def relative_distance(a, b) -> float:
    """Frobenius distance relative to the larger operand (0 for two zeros)."""
    a = getattr(a, "ptm", a)
    b = getattr(b, "ptm", b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    diff = np.linalg.norm(np.asarray(a) - np.asarray(b))
    return float(diff / scale) if scale > 0 else float(diff)


def proportionality(a, b) -> tuple[float, float]:
    """Best scalar c with a ~ c b and the relative residual |a - c b| / |a|."""
    a = np.asarray(getattr(a, "ptm", a))
    b = np.asarray(getattr(b, "ptm", b))
    nb = float(np.vdot(b, b).real)
    na = float(np.linalg.norm(a))
    if nb == 0.0 or na == 0.0:
        # a vanishing map is only proportional to another vanishing map
        return 0.0, (0.0 if na == nb == 0.0 else 1.0)
    c = float(np.vdot(b, a).real / nb)
    return c, float(np.linalg.norm(a - c * b) / na)


class ConditionalChannels:
    """Conditional logical channels of one code under one concrete noise.

    The noisy images ``N(U sigma_b U^dag)`` are computed once and reused for
    every recovery map.
    """

    def __init__(self, code: StabilizerCode, noise: NoiseModel):
        if noise.n != code.n:
            raise DimensionError(f"noise acts on {noise.n} qubits, code has {code.n}")
        check_dense(code.n, "conditional logical channel")
        noise._require_concrete()
        self.code = code
        self.noise = noise
        self._u = encoding_isometry(code).matrix
        basis = pauli_basis(code.k)
        encoded = self._u @ basis @ self._u.conj().T
        self._images = noise.apply(encoded)
        self._basis = basis

    def channel(self, recovery: PauliOperator) -> LogicalChannel:
        if recovery.n != self.code.n:
            raise DimensionError("recovery size does not match the code")
        ru = apply_left(recovery, self._u)
        reduced = ru.conj().T @ self._images @ ru  # (4^k, 2^k, 2^k) stack over b
        ptm = np.einsum("aji,bij->ab", self._basis, reduced).real / (1 << self.code.k)
        return LogicalChannel(ptm)


def conditional_logical_channel(
    code: StabilizerCode, recovery: PauliOperator, noise: NoiseModel
) -> LogicalChannel:
    return ConditionalChannels(code, noise).channel(recovery)


def average_logical_channel(
    code: StabilizerCode, recovery: RecoverySet, noise: NoiseModel
) -> LogicalChannel:
    engine = ConditionalChannels(code, noise)
    total = np.zeros((4**code.k, 4**code.k))
    for r in recovery.maps:
        total += engine.channel(r).ptm
    return LogicalChannel(total)
