"""Stabilizer codes: built-ins, toric family, encodings, syndromes, recovery sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product

import numpy as np

from ._gf2 import EchelonBasis, solve_affine
from .pauli import (
    DimensionError,
    CapacityError,
    PauliOperator,
    apply_left,
    check_dense,
    commutes,
    multiply,
)


class InvalidCodeError(ValueError):
    pass


class InvalidRecoverySetError(ValueError):
    pass


def _paulis(strings) -> tuple[PauliOperator, ...]:
    return tuple(PauliOperator.from_string(s) for s in strings)


@dataclass(frozen=True)
class StabilizerCode:
    name: str
    generators: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    lattice: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "logical_x", tuple(self.logical_x))
        object.__setattr__(self, "logical_z", tuple(self.logical_z))
        self._validate()

    @property
    def n(self) -> int:
        return self.logical_x[0].n if self.logical_x else self.generators[0].n

    @property
    def k(self) -> int:
        return len(self.logical_x)

    @property
    def num_syndromes(self) -> int:
        return 1 << len(self.generators)

    def _validate(self):
        gens, lx, lz = self.generators, self.logical_x, self.logical_z
        ops = gens + lx + lz
        if not lx or len(lx) != len(lz):
            raise InvalidCodeError("need matching non-empty logical X and Z lists")
        n = ops[0].n
        if any(p.n != n for p in ops):
            raise InvalidCodeError("all operators must act on the same number of qubits")
        if len(gens) + len(lx) > n:
            raise InvalidCodeError("too many generators for the qubit count")
        for g in gens:
            if not g.is_hermitian:
                raise InvalidCodeError(f"generator {g} is not Hermitian")
        for a, b in combinations(gens, 2):
            if a.unsigned() == b.unsigned():
                raise InvalidCodeError(f"generators {a} and {b} differ only by a phase")
            if not commutes(a, b):
                raise InvalidCodeError(f"generators {a} and {b} anticommute")
        if len(EchelonBasis(g.symplectic for g in gens)) != len(gens):
            raise InvalidCodeError("generators are not independent")
        for lo in lx + lz:
            for g in gens:
                if not commutes(lo, g):
                    raise InvalidCodeError(f"logical {lo} anticommutes with generator {g}")
        for j, xj in enumerate(lx):
            for l, zl in enumerate(lz):
                if commutes(xj, zl) != (j != l):
                    raise InvalidCodeError(f"logical X{j} / Z{l} commutation is wrong")
            for l, xl in enumerate(lx):
                if not commutes(xj, xl):
                    raise InvalidCodeError("logical X operators must commute")
        for a, b in combinations(lz, 2):
            if not commutes(a, b):
                raise InvalidCodeError("logical Z operators must commute")
        full = EchelonBasis(p.symplectic for p in ops)
        if len(full) != len(ops):
            raise InvalidCodeError("logical operators are not independent of the stabilizers")

    # syndromes ----------------------------------------------------------------

    def syndrome(self, p: PauliOperator) -> tuple[int, ...]:
        if p.n != self.n:
            raise DimensionError(f"Pauli on {p.n} qubits, code has {self.n}")
        return tuple(0 if commutes(p, g) else 1 for g in self.generators)

    def syndrome_index(self, p: PauliOperator) -> int:
        return bits_to_index(self.syndrome(p))

    # group structure ----------------------------------------------------------

    @cached_property
    def stabilizer_basis(self) -> EchelonBasis:
        return EchelonBasis(g.symplectic for g in self.generators)

    @cached_property
    def logical_basis(self) -> EchelonBasis:
        """Span of generators, then X-bar_j, then Z-bar_j (insertion order)."""
        return EchelonBasis(
            p.symplectic for p in self.generators + self.logical_x + self.logical_z
        )

    def stabilizer_product(self, mask: int) -> PauliOperator:
        out = PauliOperator.identity(self.n)
        for i, g in enumerate(self.generators):
            if mask >> i & 1:
                out = multiply(out, g)
        return out

    def stabilizer_group(self) -> list[PauliOperator]:
        if len(self.generators) > 20:
            raise CapacityError("stabilizer group too large to enumerate")
        return [self.stabilizer_product(m) for m in range(self.num_syndromes)]

    def logical_pauli(self, letters: str) -> PauliOperator:
        """Physical representative of a k-qubit logical Pauli, e.g. 'XZ'.

        Built from the code's logical operators with Y-bar = i X-bar Z-bar, so
        that it acts on the encoded basis exactly as the bare Pauli does.
        """
        if len(letters) != self.k:
            raise DimensionError("logical Pauli has the wrong number of letters")
        out = PauliOperator.identity(self.n)
        for j, ch in enumerate(letters):
            if ch in "XY":
                out = multiply(out, self.logical_x[j])
            if ch in "ZY":
                out = multiply(out, self.logical_z[j])
            if ch == "Y":
                out = out.with_phase(out.phase + 1)
        return out

    def decompose(self, p: PauliOperator):
        """Split p into logical letters, stabilizer mask and phase.

        Returns ``(letters, stabilizer_mask, phase)`` with
        ``p == i**phase * logical_pauli(letters) * stabilizer_product(mask)``, or
        None when p is not in the normalizer.
        """
        mask = self.logical_basis.decompose(p.symplectic)
        if mask is None:
            return None
        r = len(self.generators)
        stab_mask = mask & ((1 << r) - 1)
        letters = ""
        for j in range(self.k):
            bx = mask >> (r + j) & 1
            bz = mask >> (r + self.k + j) & 1
            letters += {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(bx, bz)]
        rebuilt = multiply(self.logical_pauli(letters), self.stabilizer_product(stab_mask))
        assert rebuilt.unsigned() == p.unsigned()
        return letters, stab_mask, (p.phase - rebuilt.phase) % 4

    def in_stabilizer_group(self, p: PauliOperator) -> bool:
        """Exact membership in S_p, phase included."""
        mask = self.stabilizer_basis.decompose(p.symplectic)
        if mask is None:
            return False
        return self.stabilizer_product(mask) == p

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "generators": [str(g) for g in self.generators],
            "logical_x": [str(p) for p in self.logical_x],
            "logical_z": [str(p) for p in self.logical_z],
        }

    def __str__(self) -> str:
        return f"{self.name} [[{self.n},{self.k}]]"


def bits_to_index(bits) -> int:
    """Syndrome bits to an integer, bit 0 most significant."""
    out = 0
    for b in bits:
        out = out << 1 | int(b)
    return out


def index_to_bits(index: int, length: int) -> tuple[int, ...]:
    return tuple(index >> (length - 1 - i) & 1 for i in range(length))


# built-in codes -----------------------------------------------------------

_BUILTINS = {
    "three_qubit": (["ZZI", "IZZ"], ["XXX"], ["ZZZ"]),
    "five_qubit": (["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"], ["XXXXX"], ["ZZZZZ"]),
    "steane": (
        ["ZZZZIII", "ZZIIZZI", "ZIZIZIZ", "XXXXIII", "XXIIXXI", "XIXIXIX"],
        ["XXXXXXX"],
        ["ZZZZZZZ"],
    ),
    # repetition code with encoding U H; inner block of the nine-qubit Shor code
    "three_qubit_h": (["ZZI", "IZZ"], ["ZZZ"], ["XXX"]),
}

BUILTIN_NAMES = ("three_qubit", "five_qubit", "steane")


def builtin(name: str) -> StabilizerCode:
    if name not in _BUILTINS:
        if name == "shor":
            from .concat import shor_code

            return shor_code()
        raise KeyError(f"unknown built-in code {name!r}")
    gens, lx, lz = _BUILTINS[name]
    return StabilizerCode(name, _paulis(gens), _paulis(lx), _paulis(lz))


def toric_qubits(r: int, c: int) -> list[tuple[int, int]]:
    """Grid sites holding qubits (i + j odd), in row-major order."""
    return [(i, j) for i in range(r) for j in range(c) if (i + j) % 2 == 1]


def toric(r: int, c: int) -> StabilizerCode:
    if r % 2 or c % 2:
        raise InvalidCodeError("toric dimensions must be even")
    if r < 4 or c < 4:
        raise InvalidCodeError("toric code needs at least 4 rows and 4 columns")
    sites = toric_qubits(r, c)
    index = {s: q for q, s in enumerate(sites)}
    n = len(sites)

    def plaquette(i, j, letter):
        qs = [((i - 1) % r, j), ((i + 1) % r, j), (i, (j - 1) % c), (i, (j + 1) % c)]
        return PauliOperator.from_sparse(n, {index[s]: letter for s in qs})

    xs = [plaquette(i, j, "X") for i in range(0, r, 2) for j in range(0, c, 2)]
    zs = [plaquette(i, j, "Z") for i in range(1, r, 2) for j in range(1, c, 2)]
    gens = xs[:-1] + zs[:-1]

    def line(sites_, letter):
        return PauliOperator.from_sparse(n, {index[s]: letter for s in sites_})

    z1 = line([(0, j) for j in range(1, c, 2)], "Z")
    z2 = line([(i, 0) for i in range(1, r, 2)], "Z")
    x1 = line([(i, 1) for i in range(0, r, 2)], "X")
    x2 = line([(1, j) for j in range(0, c, 2)], "X")
    return StabilizerCode(f"toric_{r}x{c}", gens, (x1, x2), (z1, z2), lattice=(r, c))


# encoding -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EncodingIsometry:
    matrix: np.ndarray
    code: StabilizerCode


def _support_state(code: StabilizerCode) -> int:
    """A computational basis index with nonzero overlap on logical |0...0>."""
    n = code.n
    ops = list(code.generators) + list(code.logical_z)
    # products with vanishing X part are diagonal; a basis state lies in the
    # support iff every such product has eigenvalue +1 on it
    xbasis = EchelonBasis()
    rows, rhs = [], []
    for i, p in enumerate(ops):
        r, combo = xbasis.reduce(p.x)
        xbasis.add(p.x)
        if r:
            continue
        prod = PauliOperator.identity(n)
        for j, o in enumerate(ops):
            if (combo | 1 << i) >> j & 1:
                prod = multiply(prod, o)
        # eigenvalue on |b> is i**phase * (-1)**(z.b)
        rows.append(prod.z)
        rhs.append(prod.phase // 2 % 2)
    b = solve_affine(rows, rhs, n)
    if b is None:
        raise InvalidCodeError("stabilizer group contains -I")
    out = 0
    for q in range(n):
        if b >> q & 1:
            out |= 1 << (n - 1 - q)
    return out


@lru_cache(maxsize=32)
def encoding_isometry(code: StabilizerCode) -> EncodingIsometry:
    check_dense(code.n, "encoding isometry")
    n, k = code.n, code.k
    dim = 1 << n
    vec = np.zeros(dim, dtype=complex)
    vec[_support_state(code)] = 1.0
    for g in code.generators:
        vec = 0.5 * (vec + apply_left(g, vec))
    for zbar in code.logical_z:
        vec = 0.5 * (vec + apply_left(zbar, vec))
    vec /= np.linalg.norm(vec)
    first = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
    vec *= abs(first) / first
    cols = np.zeros((dim, 1 << k), dtype=complex)
    for zi, zbits in enumerate(product((0, 1), repeat=k)):
        col = vec
        for j, bit in enumerate(zbits):
            if bit:
                col = apply_left(code.logical_x[j], col)
        cols[:, zi] = col
    cols.setflags(write=False)
    return EncodingIsometry(cols, code)


# recovery sets ------------------------------------------------------------------


@dataclass(frozen=True)
class RecoverySet:
    code: StabilizerCode
    maps: tuple[PauliOperator, ...]

    def __post_init__(self):
        for s, r in enumerate(self.maps):
            if self.code.syndrome_index(r) != s:
                raise InvalidRecoverySetError(f"map {r} is not at its syndrome index")

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def for_syndrome(self, bits) -> PauliOperator:
        return self.maps[bits_to_index(bits)]


def default_recovery_set(code: StabilizerCode) -> RecoverySet:
    r = len(code.generators)
    if r > 26:
        raise CapacityError(f"2^{r} syndromes exceed the enumeration guard (2^26)")
    n = code.n
    # syndrome of a Pauli is the XOR of its single-qubit contributions
    single = {}
    for q in range(n):
        for letter in "XYZ":
            single[q, letter] = code.syndrome_index(PauliOperator.single(n, q, letter))
    best: dict[int, PauliOperator] = {0: PauliOperator.identity(n)}
    total = 1 << r
    for w in range(1, n + 1):
        found: dict[int, tuple] = {}
        for qubits in combinations(range(n), w):
            for letters in product("XYZ", repeat=w):
                s = 0
                for q, l in zip(qubits, letters):
                    s ^= single[q, l]
                if s in best:
                    continue
                key = tuple(zip(qubits, ("IXYZ".index(l) for l in letters)))
                if s not in found or key < found[s][0]:
                    found[s] = (key, qubits, letters)
        for s, (_, qubits, letters) in found.items():
            best[s] = PauliOperator.from_sparse(n, dict(zip(qubits, letters)))
        if len(best) == total:
            break
    return RecoverySet(code, tuple(best[s] for s in range(total)))


def custom_recovery_set(code: StabilizerCode, maps) -> RecoverySet:
    maps = [m if isinstance(m, PauliOperator) else PauliOperator.from_string(m) for m in maps]
    total = code.num_syndromes
    if len(maps) != total:
        raise InvalidRecoverySetError(f"expected {total} maps, got {len(maps)}")
    slots: dict[int, list[PauliOperator]] = {}
    for m in maps:
        slots.setdefault(code.syndrome_index(m), []).append(m)
    collisions = {s: ms for s, ms in slots.items() if len(ms) > 1}
    if collisions:
        desc = "; ".join(
            f"{''.join(map(str, index_to_bits(s, len(code.generators))))}: "
            + ", ".join(str(m) for m in ms)
            for s, ms in sorted(collisions.items())
        )
        raise InvalidRecoverySetError(f"syndrome collisions: {desc}")
    return RecoverySet(code, tuple(slots[s][0] for s in range(total)))
