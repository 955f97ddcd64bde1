"""Echelon bases over GF(2) for vectors packed into Python ints."""

from __future__ import annotations


class EchelonBasis:
    """Incrementally built echelon basis.

    Every stored vector has a distinct pivot (its highest set bit) and no other
    stored vector has that bit set, so ``reduce`` returns a canonical coset
    representative. Each vector also carries a mask recording which inserted
    vectors it is the XOR of.
    """

    def __init__(self, vectors=()):
        self._rows: dict[int, tuple[int, int]] = {}
        self._count = 0
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def inserted(self) -> int:
        return self._count

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(remainder, combination_mask)`` with remainder canonical."""
        combo = 0
        for pivot in sorted(self._rows, reverse=True):
            if v >> pivot & 1:
                row, mask = self._rows[pivot]
                v ^= row
                combo ^= mask
        return v, combo

    def add(self, v: int) -> bool:
        """Insert ``v``; return False (and record nothing new) if dependent."""
        index = self._count
        self._count += 1
        r, combo = self.reduce(v)
        if r == 0:
            return False
        combo ^= 1 << index
        pivot = r.bit_length() - 1
        for p, (row, mask) in list(self._rows.items()):
            if row >> pivot & 1:
                self._rows[p] = (row ^ r, mask ^ combo)
        self._rows[pivot] = (r, combo)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def decompose(self, v: int) -> int | None:
        """Mask of inserted vectors XOR-ing to ``v``, or None if not in the span."""
        r, combo = self.reduce(v)
        return combo if r == 0 else None


def rank(vectors) -> int:
    return len(EchelonBasis(vectors))


def solve_affine(rows: list[int], rhs: list[int], nbits: int) -> int | None:
    """Find b with popcount(row & b) % 2 == rhs for every row, or None."""
    basis: dict[int, tuple[int, int]] = {}
    for row, bit in zip(rows, rhs):
        for pivot in sorted(basis, reverse=True):
            if row >> pivot & 1:
                prow, pbit = basis[pivot]
                row ^= prow
                bit ^= pbit
        if row == 0:
            if bit:
                return None
            continue
        pivot = row.bit_length() - 1
        for p, (prow, pbit) in list(basis.items()):
            if prow >> pivot & 1:
                basis[p] = (prow ^ row, pbit ^ bit)
        basis[pivot] = (row, bit)
    # free variables set to zero; each pivot row then fixes its pivot bit
    b = 0
    for pivot, (row, bit) in basis.items():
        if bit:
            b |= 1 << pivot
    assert b < (1 << nbits) or nbits == 0
    return b
