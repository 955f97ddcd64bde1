"""Noisy syndrome readout through per-bit confusion matrices.

A confusion matrix holds ``C[m][j] = P(observe m | actual j)``, so each
column sums to one. The readout of the full syndrome is the tensor product of
the per-bit matrices, and the noisy projector for an observed syndrome ``m``
is the probabilistic mixture ``sum_j Cbar[j][m] Pi_j`` of ideal cospace
projectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .channels import (
    LogicalChannel,
    NoiseModel,
    QuantumChannel,
    pauli_basis,
)
from .codes import StabilizerCode, bits_to_index, encoding_isometry, index_to_bits
from .pauli import DimensionError, PauliOperator, apply_left, check_dense

STOCHASTIC_TOL = 1e-12


class ReadoutError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ConfusionMatrix2:
    """Single-bit readout statistics, ``entries[m][j] = P(m | j)``."""

    entries: np.ndarray

    def __post_init__(self):
        c = np.array(self.entries, dtype=float)
        if c.shape != (2, 2):
            raise ReadoutError("a bit confusion matrix is 2x2")
        if (c < -STOCHASTIC_TOL).any() or (c > 1 + STOCHASTIC_TOL).any():
            raise ReadoutError("confusion entries must lie in [0, 1]")
        if not np.allclose(c.sum(axis=0), 1.0, atol=1e-10):
            raise ReadoutError("confusion matrix columns must sum to 1")
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @classmethod
    def from_ab(cls, a: float, b: float) -> ConfusionMatrix2:
        """``a`` = P(read 0 | 0) and ``b`` = P(read 1 | 1)."""
        return cls(np.array([[a, 1 - b], [1 - a, b]]))

    @classmethod
    def ideal(cls) -> ConfusionMatrix2:
        return cls(np.eye(2))

    def __getitem__(self, mj) -> float:
        m, j = mj
        return float(self.entries[m, j])

    def to_dict(self) -> dict:
        return {"matrix": self.entries.tolist()}


@dataclass(frozen=True, eq=False)
class ReadoutNoise:
    per_generator: tuple[ConfusionMatrix2, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_generator", tuple(self.per_generator))

    @classmethod
    def ideal(cls, num_bits: int) -> ReadoutNoise:
        return cls((ConfusionMatrix2.ideal(),) * num_bits)

    @classmethod
    def uniform(cls, num_bits: int, a: float, b: float) -> ReadoutNoise:
        return cls((ConfusionMatrix2.from_ab(a, b),) * num_bits)

    def __len__(self) -> int:
        return len(self.per_generator)

    def to_dict(self) -> dict:
        return {"per_generator": [c.to_dict() for c in self.per_generator]}


@dataclass(frozen=True, eq=False)
class LogicalConfusion:
    """Readout statistics of the whole syndrome.

    ``matrix[m, j] = P(observe m | actual j)`` with syndromes indexed by
    ``bits_to_index`` (generator 0 most significant). ``entry(j, m)`` reads
    the same number with the actual syndrome first.
    """

    matrix: np.ndarray

    def entry(self, j, m) -> float:
        j = j if isinstance(j, int) else bits_to_index(j)
        m = m if isinstance(m, int) else bits_to_index(m)
        return float(self.matrix[m, j])

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def is_stochastic(self, tol: float = 1e-10) -> bool:
        return bool(np.allclose(self.matrix.sum(axis=0), 1.0, atol=tol))


def logical_confusion(readout: ReadoutNoise) -> LogicalConfusion:
    mats = [c.entries for c in readout.per_generator]
    if not mats:
        return LogicalConfusion(np.ones((1, 1)))
    return LogicalConfusion(reduce(np.kron, mats))


def _check_readout(code: StabilizerCode, readout: ReadoutNoise) -> None:
    if len(readout) != len(code.generators):
        raise DimensionError(
            f"readout has {len(readout)} bits but the code has {len(code.generators)} generators"
        )


def readout_kraus(g: PauliOperator, m: int, j: int, c: ConfusionMatrix2) -> np.ndarray:
    """sqrt(C[m][j]) (I + (-1)**j G) / 2."""
    gm = g.matrix()
    proj = (np.eye(gm.shape[0]) + (-1) ** j * gm) / 2
    return np.sqrt(c[m, j]) * proj


def cospace_projector(code: StabilizerCode, syndrome) -> np.ndarray:
    """Pi_j = prod_i (I + (-1)**j_i G_i) / 2."""
    check_dense(code.n, "cospace projector")
    bits = index_to_bits(syndrome, len(code.generators)) if isinstance(syndrome, int) else syndrome
    proj = np.eye(1 << code.n, dtype=complex)
    for g, b in zip(code.generators, bits):
        proj = proj @ ((np.eye(1 << code.n) + (-1) ** b * g.matrix()) / 2)
    return proj


def bit_measurement(code: StabilizerCode, i: int, m: int, c: ConfusionMatrix2) -> QuantumChannel:
    """Noisy readout of generator ``i`` returning bit ``m``."""
    g = code.generators[i]
    return QuantumChannel(tuple(readout_kraus(g, m, j, c) for j in (0, 1)))


def compose(first: QuantumChannel, second: QuantumChannel) -> QuantumChannel:
    """The channel ``second o first``."""
    return QuantumChannel(tuple(b @ a for a in first.kraus for b in second.kraus))


def noisy_projector(code: StabilizerCode, m, readout: ReadoutNoise) -> QuantumChannel:
    """Kraus form {sqrt(Cbar[j][m]) Pi_j} of the noisy outcome-m projector."""
    _check_readout(code, readout)
    r = len(code.generators)
    m = m if isinstance(m, int) else bits_to_index(m)
    conf = logical_confusion(readout)
    kraus = []
    for j in range(1 << r):
        w = conf.entry(j, m)
        if w > 0:
            kraus.append(np.sqrt(w) * cospace_projector(code, j))
    if not kraus:
        kraus = [np.zeros((1 << code.n, 1 << code.n))]
    return QuantumChannel(tuple(kraus))


def noisy_conditional_logical_channel(
    code: StabilizerCode,
    recovery: PauliOperator,
    noise: NoiseModel,
    readout: ReadoutNoise,
) -> LogicalChannel:
    """U^dag R^dag Pi~_{s(R)}(N(U sigma U^dag)) R U, evaluated densely."""
    _check_readout(code, readout)
    if recovery.n != code.n:
        raise DimensionError("recovery size does not match the code")
    check_dense(code.n, "noisy conditional channel")
    u = encoding_isometry(code).matrix
    basis = pauli_basis(code.k)
    images = noise.apply(u @ basis @ u.conj().T)
    measured = noisy_projector(code, code.syndrome_index(recovery), readout).apply(images)
    ru = apply_left(recovery, u)
    reduced = ru.conj().T @ measured @ ru
    ptm = np.einsum("aji,bij->ab", basis, reduced).real / (1 << code.k)
    return LogicalChannel(ptm)


def renormalization_factor(code: StabilizerCode, recovery: PauliOperator, readout: ReadoutNoise) -> float:
    """Cbar[s][s] for s the syndrome of ``recovery``."""
    _check_readout(code, readout)
    s = code.syndrome_index(recovery)
    return logical_confusion(readout).entry(s, s)
