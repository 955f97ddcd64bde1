"""Two-level concatenated codes and their effective logical channels.

The outer code U acts on n blocks, each encoded by the inner code V on m
qubits, so the full encoding is ``W = V^{(x) n} U`` on ``n m`` qubits with
qubit ``(block, position)`` at flat index ``block * m + position``. Recovery
maps are pairs ``(F_0..F_{n-1}, G)``: the physical operator is
``(F_0 (x) ... (x) F_{n-1}) lift(G)`` where ``lift`` replaces each outer
letter by the inner logical operator.

For product noise the conditional channel factorizes: the outer code sees the
product of inner conditional channels as its physical noise. Inner channels
are cached, which is what keeps level-two computations cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .channels import (
    ConditionalChannels,
    DepolarizingNoise,
    IIDNoise,
    LogicalChannel,
    NoiseModel,
    QuantumChannel,
    TensorNoise,
    proportionality,
)
from .codes import StabilizerCode, builtin, default_recovery_set, encoding_isometry
from .degeneracy import DegeneracyPartition, partition
from .pauli import CapacityError, DimensionError, PauliOperator, all_paulis, multiply
from .symmetry import SymmetryOp, builtin_symmetries, permutation_group


class ConcatError(ValueError):
    pass


def lift_pauli(outer_pauli: PauliOperator, inner: StabilizerCode) -> PauliOperator:
    """Replace each outer letter by the matching inner logical operator."""
    if inner.k != 1:
        raise ConcatError("inner codes must encode one qubit")
    m = inner.n
    n_total = outer_pauli.n * m
    out = PauliOperator.identity(n_total).with_phase(outer_pauli.phase)
    for b in range(outer_pauli.n):
        letter = outer_pauli.letter(b)
        if letter == "I":
            continue
        out = multiply(out, place(inner.logical_pauli(letter), b, m, outer_pauli.n))
    return out


def place(p: PauliOperator, block: int, m: int, n_blocks: int) -> PauliOperator:
    """Embed a Pauli on m qubits into block ``block`` of n_blocks blocks."""
    if p.n != m:
        raise DimensionError("block operator has the wrong size")
    shift = block * m
    return PauliOperator(n_blocks * m, p.x << shift, p.z << shift, p.phase)


def block_product(paulis) -> PauliOperator:
    paulis = list(paulis)
    m = paulis[0].n
    out = PauliOperator.identity(m * len(paulis))
    for b, p in enumerate(paulis):
        out = multiply(out, place(p, b, m, len(paulis)))
    return out


@dataclass(frozen=True, eq=False)
class ConcatCode:
    outer: StabilizerCode
    inner: StabilizerCode
    name: str = ""

    def __post_init__(self):
        if self.inner.k != 1:
            raise ConcatError("inner codes must encode one qubit")
        if not self.name:
            object.__setattr__(self, "name", f"{self.outer.name}*{self.inner.name}")

    @property
    def n_blocks(self) -> int:
        return self.outer.n

    @property
    def m(self) -> int:
        return self.inner.n

    @property
    def n(self) -> int:
        return self.outer.n * self.inner.n

    @property
    def k(self) -> int:
        return self.outer.k

    def qubit(self, block: int, position: int) -> int:
        return block * self.m + position

    @property
    def code(self) -> StabilizerCode:
        return _flatten(self)

    def isometry(self) -> np.ndarray:
        """W = V^{(x) n} U, built densely."""
        from .pauli import check_dense

        check_dense(self.n, "concatenated isometry")
        v = encoding_isometry(self.inner).matrix
        big = np.ones((1, 1), dtype=complex)
        for _ in range(self.n_blocks):
            big = np.kron(big, v)
        return big @ encoding_isometry(self.outer).matrix


@lru_cache(maxsize=32)
def _flatten_cached(outer: StabilizerCode, inner: StabilizerCode, name: str) -> StabilizerCode:
    nb = outer.n
    gens = [place(g, b, inner.n, nb) for b in range(nb) for g in inner.generators]
    gens += [lift_pauli(g, inner) for g in outer.generators]
    lx = tuple(lift_pauli(p, inner) for p in outer.logical_x)
    lz = tuple(lift_pauli(p, inner) for p in outer.logical_z)
    return StabilizerCode(name, tuple(gens), lx, lz)


def _flatten(cc: ConcatCode) -> StabilizerCode:
    return _flatten_cached(cc.outer, cc.inner, cc.name)


def concatenate(outer: StabilizerCode, inner: StabilizerCode, name: str = "") -> ConcatCode:
    return ConcatCode(outer, inner, name)


def shor_concat() -> ConcatCode:
    return ConcatCode(builtin("three_qubit"), builtin("three_qubit_h"), "shor")


def shor_code() -> StabilizerCode:
    return shor_concat().code


@dataclass(frozen=True, eq=False)
class ConcatRecovery:
    inner_maps: tuple[PauliOperator, ...]
    outer_map: PauliOperator

    def __post_init__(self):
        object.__setattr__(self, "inner_maps", tuple(self.inner_maps))

    def validate(self, cc: ConcatCode) -> None:
        if len(self.inner_maps) != cc.n_blocks or any(f.n != cc.m for f in self.inner_maps):
            raise ConcatError("one inner recovery per block is required")
        if self.outer_map.n != cc.n_blocks:
            raise ConcatError("outer recovery has the wrong size")

    def to_pauli(self, cc: ConcatCode) -> PauliOperator:
        self.validate(cc)
        return multiply(block_product(self.inner_maps), lift_pauli(self.outer_map, cc.inner))

    def __str__(self) -> str:
        return "(" + ",".join(str(f) for f in self.inner_maps) + "; " + str(self.outer_map) + ")"


# effective channels ----------------------------------------------------------


def _block_noises(cc: ConcatCode, physical) -> list[NoiseModel]:
    m, nb = cc.m, cc.n_blocks
    if isinstance(physical, QuantumChannel):
        return [IIDNoise(physical, m)] * nb
    if isinstance(physical, IIDNoise):
        if physical.single is None:
            raise ConcatError("a concrete channel is needed, not the IID family")
        return [IIDNoise(physical.single, m)] * nb
    if isinstance(physical, DepolarizingNoise):
        if physical.p is None:
            raise ConcatError("a concrete depolarizing parameter is needed")
        return [DepolarizingNoise(physical.p, m)] * nb
    if isinstance(physical, TensorNoise):
        if physical.n != cc.n:
            raise DimensionError(f"noise has {physical.n} factors, code has {cc.n} qubits")
        return [TensorNoise(physical.factors[b * m:(b + 1) * m]) for b in range(nb)]
    if isinstance(physical, (list, tuple)) and len(physical) == nb:
        return list(physical)
    raise ConcatError(
        "recursion needs product noise across blocks; use a dense computation for general Kraus noise"
    )


class EffectiveChannelEngine:
    """Recursive conditional channels of a concatenated code.

    Inner conditional channels are cached per (block noise, F); the outer
    computation sees their tensor product as its physical noise.
    """

    def __init__(self, cc: ConcatCode, physical):
        self.cc = cc
        self.block_noises = _block_noises(cc, physical)
        self._inner_engines: dict[int, ConditionalChannels] = {}
        self._inner_cache: dict[tuple[int, PauliOperator], LogicalChannel] = {}
        self._channel_cache: dict[tuple[int, PauliOperator], QuantumChannel] = {}
        self.inner_evaluations = 0

    def _engine_for(self, block: int) -> tuple[int, ConditionalChannels]:
        noise = self.block_noises[block]
        key = id(noise)
        for b in range(block):
            if self.block_noises[b] is noise:
                key = id(self.block_noises[b])
                break
        if key not in self._inner_engines:
            self._inner_engines[key] = ConditionalChannels(self.cc.inner, noise)
        return key, self._inner_engines[key]

    def inner_channel(self, block: int, f: PauliOperator) -> LogicalChannel:
        key, engine = self._engine_for(block)
        ck = (key, f)
        if ck not in self._inner_cache:
            self._inner_cache[ck] = engine.channel(f)
            self.inner_evaluations += 1
        return self._inner_cache[ck]

    def _inner_as_channel(self, block: int, f: PauliOperator) -> QuantumChannel:
        key, _ = self._engine_for(block)
        ck = (key, f)
        if ck not in self._channel_cache:
            self._channel_cache[ck] = QuantumChannel.from_ptm(self.inner_channel(block, f).ptm)
        return self._channel_cache[ck]

    def effective_outer_noise(self, inner_maps) -> TensorNoise:
        return TensorNoise(tuple(self._inner_as_channel(b, f) for b, f in enumerate(inner_maps)))

    def channel(self, rec: ConcatRecovery) -> LogicalChannel:
        rec.validate(self.cc)
        noise = self.effective_outer_noise(rec.inner_maps)
        return ConditionalChannels(self.cc.outer, noise).channel(rec.outer_map)


def effective_logical_channel(cc: ConcatCode, rec: ConcatRecovery, physical) -> LogicalChannel:
    return EffectiveChannelEngine(cc, physical).channel(rec)


def level2_class_count(inner_classes: int, n: int, outer_recovery_count: int) -> int:
    """Upper bound |R_{V,M}|^n x |R_U| on level-two logical degeneracy classes."""
    if inner_classes < 1 or n < 1 or outer_recovery_count < 1:
        raise ValueError("arguments must be positive")
    return inner_classes**n * outer_recovery_count


# symmetry lifts --------------------------------------------------------------------


def lift_inner_symmetry(op: SymmetryOp, block: int, n_blocks: int) -> SymmetryOp:
    m = op.n
    perm = list(range(n_blocks * m))
    gates = ["I"] * (n_blocks * m)
    for q in range(m):
        perm[block * m + q] = block * m + op.permutation[q]
        gates[block * m + q] = op.gates()[q]
    return SymmetryOp(tuple(perm), tuple(gates), f"{op.name}@block{block}")


def lift_outer_permutation(op: SymmetryOp, m: int) -> SymmetryOp:
    if not op.is_permutation:
        raise ConcatError("only outer permutations lift to block permutations")
    n_blocks = op.n
    perm = [0] * (n_blocks * m)
    for b in range(n_blocks):
        for q in range(m):
            perm[b * m + q] = op.permutation[b] * m + q
    return SymmetryOp(tuple(perm), None, f"blocks {op.name}")


def shor_symmetries() -> list[SymmetryOp]:
    """Block-0 cycle and swap, plus outer block cycle and swap (the full wreath product)."""
    cc = shor_concat()
    inner_ops = [SymmetryOp.from_cycles("(0 1 2)", 3), SymmetryOp.from_cycles("(0 1)", 3)]
    outer_ops = [SymmetryOp.from_cycles("(0 1 2)", 3), SymmetryOp.from_cycles("(0 1)", 3)]
    out = [lift_inner_symmetry(op, 0, cc.n_blocks) for op in inner_ops]
    out += [lift_outer_permutation(op, cc.m) for op in outer_ops]
    return out


def shor_weight2_classes(noise_family: NoiseModel | None = None) -> DegeneracyPartition:
    """Strict classes of all weight <= 2 Paulis on the nine-qubit Shor code."""
    code = shor_code()
    family = noise_family if noise_family is not None else IIDNoise(None, code.n)
    return partition(code, list(all_paulis(code.n, 2)), shor_symmetries(), family, "strict")


# level-two reduction ----------------------------------------------------------------


@dataclass(frozen=True)
class NoiseRecoveryPair:
    """Inner class labels (one per block) and the outer recovery G."""

    effective_noise_labels: tuple[str, ...]
    outer_map: PauliOperator

    def __str__(self) -> str:
        return "(" + ",".join(self.effective_noise_labels) + "; " + str(self.outer_map) + ")"

    def hatted(self, identity_label: str) -> str:
        """Compact text: blocks carrying a non-identity label, then G."""
        hats = [f"{lab}@{b}" for b, lab in enumerate(self.effective_noise_labels) if lab != identity_label]
        return "(" + ("*".join(hats) or "I") + ", " + str(self.outer_map) + ")"


@dataclass
class PairClass:
    representative: NoiseRecoveryPair
    members: set = field(default_factory=set)  # {(labels, str(G))}

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class ReducedPairs:
    inner_labels: list[str]
    label_representatives: list[tuple[str, ...]]
    classes: list[PairClass]
    reflection_only_count: int
    rejected: list = field(default_factory=list)

    @property
    def num_classes(self) -> int:
        return len(self.classes)


def _inner_classes(cc: ConcatCode, noise_family: NoiseModel):
    inner = cc.inner
    fam = _with_n(noise_family, inner.n)
    part = partition(inner, default_recovery_set(inner), None, fam, "logical")
    return part


def _with_n(noise: NoiseModel, n: int) -> NoiseModel:
    if isinstance(noise, DepolarizingNoise):
        return DepolarizingNoise(noise.p, n)
    if isinstance(noise, IIDNoise):
        return IIDNoise(noise.single, n)
    raise ConcatError("level-two reduction needs IID or depolarizing physical noise")


def _reflection(group, n: int):
    """An involution with at most one fixed point, preferring one that fixes block n // 2."""
    found = [
        g for g in sorted(group)
        if g != tuple(range(n))
        and all(g[g[q]] == q for q in range(n))
        and sum(g[q] == q for q in range(n)) == (n % 2)
    ]
    centred = [g for g in found if g[n // 2] == n // 2]
    return (centred or found or [None])[0]


def symmetry_reduced_pairs(cc: ConcatCode, noise_family: NoiseModel, seed: int = 0) -> ReducedPairs:
    """Classes of (effective noise, outer recovery) pairs under outer symmetries.

    Label vectors (inner degeneracy class per block) are reduced by the outer
    permutation group, choosing representatives fixed by a reflection when one
    exists. For each representative vector, the outer recoveries are then
    partitioned using the permutations that fix the vector together with any
    outer transversal symmetries, kept only if they commute with the concrete
    effective outer noise.
    """
    inner_part = _inner_classes(cc, noise_family)
    labels = [str(c.representative) for c in inner_part.classes]
    reps_by_label = {str(c.representative): c.representative for c in inner_part.classes}
    nb = cc.n_blocks
    outer_syms = builtin_symmetries(cc.outer)
    perms = [op for op in outer_syms if op.is_permutation]
    transversals = [op for op in outer_syms if not op.is_permutation]
    group = sorted(permutation_group(perms)) if perms else [tuple(range(nb))]
    refl = _reflection(group, nb)

    concrete = noise_family
    if getattr(noise_family, "is_family", False):
        concrete = noise_family.sample(np.random.default_rng(seed))
    engine = EffectiveChannelEngine(cc, _with_n(concrete, cc.n) if not isinstance(concrete, TensorNoise) else concrete)

    def act(g, vec):
        out = [None] * nb
        for b in range(nb):
            out[g[b]] = vec[b]
        return tuple(out)

    seen, label_reps = set(), []
    for vec in product(labels, repeat=nb):
        if vec in seen:
            continue
        orbit = {act(g, vec) for g in group}
        seen |= orbit
        fixed = sorted(v for v in orbit if refl is not None and act(refl, v) == v)
        label_reps.append(fixed[0] if fixed else min(orbit))

    outer_rec = default_recovery_set(cc.outer)
    classes, rejected = [], []
    reflection_only = 0
    for vec in label_reps:
        stab = [g for g in group if act(g, vec) == vec]
        noise = engine.effective_outer_noise([reps_by_label[lab] for lab in vec])
        ops = [SymmetryOp(g) for g in stab if g != tuple(range(nb))] + transversals
        part = partition(cc.outer, outer_rec, ops, noise, "logical")
        rejected.extend(part.rejected)
        small = [SymmetryOp(g) for g in stab if refl is not None and g == refl] + transversals
        reflection_only += partition(cc.outer, outer_rec, small, noise, "logical").num_classes
        for c in part.classes:
            members = set()
            for g in group:
                moved = act(g, vec)
                for m in c.members:
                    gm = SymmetryOp(g).conjugate(m)
                    members.add((moved, str(gm.unsigned())))
            classes.append(PairClass(NoiseRecoveryPair(vec, c.representative), members))
    return ReducedPairs(labels, label_reps, classes, reflection_only, rejected)


def _union_find(n):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    return find, union


@dataclass
class MergeResult:
    groups: list[list[int]]
    relations: list[tuple[int, int, float, float]]  # (i, j, scale, residual)
    channels: list[np.ndarray]

    @property
    def num_classes(self) -> int:
        return len(self.groups)


def numerical_class_merge(
    cc: ConcatCode,
    reduced: ReducedPairs,
    physical,
    tolerance: float = 1e-9,
) -> MergeResult:
    """Merge pair classes whose representative channels are proportional."""
    inner_part = _inner_classes(cc, _family_of(physical))
    reps_by_label = {str(c.representative): c.representative for c in inner_part.classes}
    engine = EffectiveChannelEngine(cc, physical)
    chans = []
    for c in reduced.classes:
        pair = c.representative
        rec = ConcatRecovery(tuple(reps_by_label[lab] for lab in pair.effective_noise_labels), pair.outer_map)
        chans.append(engine.channel(rec).ptm)
    find, union = _union_find(len(chans))
    relations = []
    for i in range(len(chans)):
        for j in range(i + 1, len(chans)):
            scale, res = proportionality(chans[j], chans[i])
            if res <= tolerance:
                relations.append((i, j, scale, res))
                union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(len(chans)):
        groups.setdefault(find(i), []).append(i)
    return MergeResult(sorted(groups.values()), relations, chans)


def _family_of(physical) -> NoiseModel:
    if isinstance(physical, DepolarizingNoise):
        return DepolarizingNoise(None, physical.n)
    if isinstance(physical, IIDNoise):
        return IIDNoise(None, physical.n)
    raise ConcatError("level-two reduction needs IID or depolarizing physical noise")


def concat_analysis(cc: ConcatCode, physical: NoiseModel, tolerance: float = 1e-9) -> dict:
    """Stage counts of the level-two reduction and the merged relations."""
    if cc.outer.n > 10:
        raise CapacityError("outer code too large for dense outer channels")
    reduced = symmetry_reduced_pairs(cc, _with_n(physical, cc.n))
    merged = numerical_class_merge(cc, reduced, _with_n(physical, cc.n), tolerance)
    n_inner = len(reduced.inner_labels)
    outer_count = cc.outer.num_syndromes
    identity_label = "I" * cc.m
    sizes: dict[int, int] = {}
    for vec in reduced.label_representatives:
        e = sum(lab != identity_label for lab in vec)
        sizes[e] = sizes.get(e, 0) + 1
    text = [c.representative.hatted(identity_label) for c in reduced.classes]
    return {
        "outer": cc.outer.name,
        "inner": cc.inner.name,
        "raw": cc.inner.num_syndromes ** cc.n_blocks * outer_count,
        "inner_classes": n_inner,
        "cached_bound": level2_class_count(n_inner, cc.n_blocks, outer_count),
        "effective_noise_representatives": len(reduced.label_representatives),
        "effective_noise_sizes": [sizes.get(e, 0) for e in range(cc.n_blocks + 1)],
        "reflection_reduced": reduced.reflection_only_count,
        "symmetry_reduced": reduced.num_classes,
        "numerically_merged": merged.num_classes,
        "classes": text,
        "merged_relations": [[text[i], text[j]] for i, j, _, _ in merged.relations],
        "covered_pairs": sum(len(c) for c in reduced.classes),
    }
