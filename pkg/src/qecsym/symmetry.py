"""Code symmetries built from qubit permutations and transversal gates.

A ``SymmetryOp`` is ``A = Perm o (u_0 (x) ... (x) u_{n-1})``: the single-qubit
gates act first and the permutation then carries qubit ``q`` to
``permutation[q]``. Membership in the stabilizer or logical symmetry group of
a code is decided on Pauli operators when every gate is Clifford and on dense
matrices otherwise (or on request).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .channels import (
    CHANNEL_EQ_TOL,
    DepolarizingNoise,
    IIDNoise,
    KrausNoise,
    LogicalChannel,
    NoiseModel,
    TensorNoise,
    pauli_labels,
)
from .codes import StabilizerCode, encoding_isometry
from .pauli import (
    GATES,
    CapacityError,
    DimensionError,
    PauliOperator,
    UnsupportedSymmetryError,
    check_dense,
    clifford_table,
    conjugate,
    dense_limit,
    gate_matrix,
)

MEMBERSHIP_TOL = 1e-10


def _match_gate(u: np.ndarray):
    """Return a gate label equal to u up to global phase, else u itself."""
    for label, g in GATES.items():
        ov = np.trace(g.conj().T @ u) / 2
        if abs(abs(ov) - 1) < 1e-10 and np.allclose(u, ov * g, atol=1e-10):
            return label
    return u


def _gate_key(g):
    if isinstance(g, str):
        return g
    return tuple(np.round(np.asarray(g), 10).ravel().tolist())


def parse_cycles(cycles, n: int) -> tuple[int, ...]:
    """Cycle notation such as ``[[0, 3, 1], [2, 4, 5]]`` or ``"(0 3 1)(2 4 5)"``."""
    if isinstance(cycles, str):
        body = cycles.replace(")", "").split("(")
        cycles = [[int(t) for t in part.replace(",", " ").split()] for part in body if part.strip()]
    perm = list(range(n))
    seen = set()
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            if a in seen or not 0 <= a < n:
                raise ValueError(f"bad cycle notation {cycles!r}")
            seen.add(a)
            perm[a] = b
    return tuple(perm)


def cycle_string(perm) -> str:
    seen, parts = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, q = [], start
        while q not in seen:
            seen.add(q)
            cyc.append(q)
            q = perm[q]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


@dataclass(frozen=True, eq=False)
class SymmetryOp:
    permutation: tuple[int, ...]
    transversal: tuple | None = None
    name: str = ""

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation")
        object.__setattr__(self, "permutation", perm)
        if self.transversal is not None:
            gates = []
            for g in self.transversal:
                if isinstance(g, str):
                    gate_matrix(g)
                    gates.append(g)
                else:
                    gates.append(_match_gate(gate_matrix(g)))
            if len(gates) != len(perm):
                raise DimensionError("one transversal gate per qubit is required")
            if all(isinstance(g, str) and g == "I" for g in gates):
                gates = None
            object.__setattr__(self, "transversal", None if gates is None else tuple(gates))
        if not self.name:
            object.__setattr__(self, "name", self._default_name())

    def _default_name(self) -> str:
        parts = []
        if self.transversal is not None:
            labels = {g if isinstance(g, str) else "U" for g in self.transversal}
            parts.append(f"{labels.pop()}^n" if len(labels) == 1 else "transversal")
        if not self.is_identity_permutation:
            parts.append(cycle_string(self.permutation))
        return " ".join(parts) or "identity"

    # construction -------------------------------------------------------

    @classmethod
    def from_cycles(cls, cycles, n: int, transversal=None, name: str = "") -> SymmetryOp:
        return cls(parse_cycles(cycles, n), transversal, name)

    @classmethod
    def transversal_gate(cls, gate: str, n: int, name: str = "") -> SymmetryOp:
        return cls(tuple(range(n)), (gate,) * n, name)

    @classmethod
    def identity(cls, n: int) -> SymmetryOp:
        return cls(tuple(range(n)), None, "identity")

    # views ----------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.permutation)

    @property
    def is_identity_permutation(self) -> bool:
        return all(p == q for q, p in enumerate(self.permutation))

    @property
    def is_permutation(self) -> bool:
        return self.transversal is None

    def gates(self) -> list:
        return ["I"] * self.n if self.transversal is None else list(self.transversal)

    @property
    def is_clifford(self) -> bool:
        try:
            for g in self.gates():
                clifford_table(g)
        except UnsupportedSymmetryError:
            return False
        return True

    def key(self) -> tuple:
        return (self.permutation, tuple(_gate_key(g) for g in self.gates()))

    # algebra ----------------------------------------------------------------

    def compose(self, other: SymmetryOp) -> SymmetryOp:
        """The operation ``self o other`` (other acts first)."""
        if other.n != self.n:
            raise DimensionError("symmetries act on different qubit counts")
        a, b = self.gates(), other.gates()
        gates = [gate_matrix(a[other.permutation[q]]) @ gate_matrix(b[q]) for q in range(self.n)]
        perm = tuple(self.permutation[other.permutation[q]] for q in range(self.n))
        return SymmetryOp(perm, gates, f"{self.name} * {other.name}")

    def inverse(self) -> SymmetryOp:
        inv = [0] * self.n
        for q, p in enumerate(self.permutation):
            inv[p] = q
        gates = self.gates()
        new = [gate_matrix(gates[inv[r]]).conj().T for r in range(self.n)]
        return SymmetryOp(tuple(inv), new, f"({self.name})^-1")

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """A p A^dag (requires Clifford gates)."""
        return conjugate(p, self.permutation, self.transversal)

    def apply_to(self, states: np.ndarray) -> np.ndarray:
        """Apply A to state vectors stored as the columns of ``states``."""
        n = self.n
        states = np.asarray(states, dtype=complex)
        cols = states.shape[1] if states.ndim == 2 else None
        t = states.reshape((2,) * n + ((cols,) if cols is not None else ()))
        if self.transversal is not None:
            for q, g in enumerate(self.transversal):
                if isinstance(g, str) and g == "I":
                    continue
                t = np.moveaxis(np.tensordot(gate_matrix(g), t, axes=([1], [q])), 0, q)
        order = [0] * n
        for q, p in enumerate(self.permutation):
            order[p] = q
        if cols is not None:
            order.append(n)
        return t.transpose(order).reshape(states.shape)

    def unitary(self) -> np.ndarray:
        check_dense(self.n, "symmetry unitary")
        return self.apply_to(np.eye(1 << self.n))

    def to_dict(self) -> dict:
        out = {"name": self.name, "permutation": list(self.permutation)}
        if self.transversal is not None:
            out["transversal"] = [
                g if isinstance(g, str) else [[[z.real, z.imag] for z in row] for row in np.asarray(g)]
                for g in self.transversal
            ]
        return out

    @classmethod
    def from_dict(cls, data: dict, n: int | None = None) -> SymmetryOp:
        if "cycles" in data:
            if n is None:
                raise ValueError("cycle notation needs the qubit count")
            perm = parse_cycles(data["cycles"], n)
        else:
            perm = tuple(data["permutation"])
        trans = data.get("transversal")
        if isinstance(trans, str):
            trans = [trans] * len(perm)
        if trans is not None:
            trans = [
                g if isinstance(g, str) else np.array([[complex(*z) for z in row] for row in g])
                for g in trans
            ]
        return cls(perm, trans, data.get("name", ""))

    def __str__(self) -> str:
        return self.name


# membership -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MembershipVerdict:
    kind: str  # "stabilizer" | "logical" | "neither"
    logical_action: LogicalChannel | None
    method: str
    detail: str = ""
    logical_map: dict | None = field(default=None, repr=False)

    @property
    def is_member(self) -> bool:
        return self.kind != "neither"


def _pauli_membership(code: StabilizerCode, op: SymmetryOp) -> MembershipVerdict:
    for i, g in enumerate(code.generators):
        image = op.conjugate(g)
        if not code.in_stabilizer_group(image):
            return MembershipVerdict("neither", None, "pauli", f"generator {i} maps to {image}")
    labels = pauli_labels(code.k)
    ptm = np.zeros((len(labels), len(labels)))
    lmap = {}
    for b, label in enumerate(labels):
        image = op.conjugate(code.logical_pauli(label))
        dec = code.decompose(image)
        if dec is None:
            return MembershipVerdict("neither", None, "pauli", f"logical {label} leaves the normalizer")
        letters, _, phase = dec
        if phase % 2:
            return MembershipVerdict("neither", None, "pauli", f"logical {label} maps to a non-Hermitian image")
        ptm[labels.index(letters), b] = 1 - phase
        lmap[label] = (phase, letters)
    trivial = all(v == (0, k) for k, v in lmap.items())
    kind = "stabilizer" if trivial else "logical"
    return MembershipVerdict(kind, LogicalChannel(ptm), "pauli", "", lmap)


def _dense_membership(code: StabilizerCode, op: SymmetryOp) -> MembershipVerdict:
    check_dense(code.n, "dense membership check")
    u = encoding_isometry(code).matrix
    au = op.apply_to(u)
    abar = u.conj().T @ au
    if not np.allclose(au, u @ abar, atol=MEMBERSHIP_TOL):
        return MembershipVerdict("neither", None, "dense", "A U differs from U (U^dag A U)")
    d = abar.shape[0]
    if not np.allclose(abar.conj().T @ abar, np.eye(d), atol=MEMBERSHIP_TOL):
        return MembershipVerdict("neither", None, "dense", "induced logical map is not unitary")
    action = LogicalChannel.from_unitary(abar)
    ov = np.trace(abar) / d
    kind = "stabilizer" if abs(abs(ov) - 1) < MEMBERSHIP_TOL else "logical"
    return MembershipVerdict(kind, action, "dense")


def check_membership(code: StabilizerCode, op: SymmetryOp, method: str = "auto") -> MembershipVerdict:
    """Classify op as a stabilizer symmetry, a logical symmetry, or neither.

    ``method`` is "pauli", "dense" or "auto" (Pauli-level when every gate is
    Clifford, dense otherwise).
    """
    if op.n != code.n:
        raise DimensionError(f"symmetry acts on {op.n} qubits, code has {code.n}")
    if method == "auto":
        method = "pauli" if op.is_clifford else "dense"
    if method == "pauli":
        if not op.is_clifford:
            raise UnsupportedSymmetryError("Pauli-level check needs Clifford gates")
        return _pauli_membership(code, op)
    if method == "dense":
        if code.n > dense_limit():
            raise CapacityError(
                f"non-Clifford symmetry on {code.n} qubits cannot be decided above the dense limit {dense_limit()}"
            )
        return _dense_membership(code, op)
    raise ValueError(f"unknown membership method {method!r}")


def induced_logical_action(code: StabilizerCode, op: SymmetryOp) -> LogicalChannel:
    verdict = check_membership(code, op)
    if not verdict.is_member:
        raise UnsupportedSymmetryError(f"{op.name} is not a symmetry of {code.name}: {verdict.detail}")
    return verdict.logical_action


# noise commutation ------------------------------------------------------------


def _gate_commutes_with_channel(gate, channel) -> bool:
    u = gate_matrix(gate)
    return channel.conjugated(u).equals(channel, CHANNEL_EQ_TOL)


def _is_trivial_gate(gate) -> bool:
    return _match_gate(gate_matrix(gate)) == "I"


def commutes_with_noise(op: SymmetryOp, noise: NoiseModel, rng_seed: int = 0) -> bool:
    """Decide whether A N A^dag == N for a structured noise model.

    Families (IID with no channel, depolarizing with no parameter) are
    handled symbolically: only pure permutations commute with every IID
    channel, while every transversal unitary commutes with depolarizing noise.
    """
    if op.n != noise.n:
        raise DimensionError(f"symmetry acts on {op.n} qubits, noise on {noise.n}")
    gates = op.gates()
    if isinstance(noise, DepolarizingNoise):
        return True
    if isinstance(noise, IIDNoise):
        if noise.single is None:
            return all(_is_trivial_gate(g) for g in gates)
        unique = {_gate_key(g): g for g in gates}
        return all(_gate_commutes_with_channel(g, noise.single) for g in unique.values())
    if isinstance(noise, TensorNoise):
        for q, g in enumerate(gates):
            moved = noise.factors[q].conjugated(gate_matrix(g))
            if not moved.equals(noise.factors[op.permutation[q]], CHANNEL_EQ_TOL):
                return False
        return True
    if isinstance(noise, KrausNoise):
        return _dense_commutes(op, noise, rng_seed)
    raise UnsupportedSymmetryError(f"cannot decide commutation with {type(noise).__name__}")


def _dense_commutes(op: SymmetryOp, noise: KrausNoise, rng_seed: int) -> bool:
    if noise.n > dense_limit():
        raise CapacityError(f"general Kraus noise on {noise.n} qubits exceeds the dense limit {dense_limit()}")
    a = op.unitary()
    conj = KrausNoise(tuple(a @ k @ a.conj().T for k in noise.kraus))
    d = 1 << noise.n
    if noise.n <= 5:
        probes = np.eye(d * d).reshape(d * d, d, d)
    else:
        rng = np.random.default_rng(rng_seed)
        probes = rng.normal(size=(6, d, d)) + 1j * rng.normal(size=(6, d, d))
    return bool(np.allclose(conj.apply(probes), noise.apply(probes), atol=CHANNEL_EQ_TOL * d))


# builtin symmetries -------------------------------------------------------------


def toric_site_permutation(r: int, c: int, fn) -> tuple[int, ...]:
    from .codes import toric_qubits

    sites = toric_qubits(r, c)
    index = {s: q for q, s in enumerate(sites)}
    perm = []
    for i, j in sites:
        a, b = fn(i, j)
        perm.append(index[(a % r, b % c)])
    return tuple(perm)


def toric_symmetries(r: int, c: int, include_j: bool = True) -> list[SymmetryOp]:
    n = r * c // 2
    ops = [
        SymmetryOp(toric_site_permutation(r, c, lambda i, j: (i + 2, j)), None, "twist"),
        SymmetryOp(toric_site_permutation(r, c, lambda i, j: (i, j + 2)), None, "rotation"),
        SymmetryOp(toric_site_permutation(r, c, lambda i, j: (-i, j)), None, "vertical reflection"),
        SymmetryOp(toric_site_permutation(r, c, lambda i, j: (i, -j)), None, "horizontal reflection"),
    ]
    if include_j:
        ops.append(SymmetryOp(toric_site_permutation(r, c, lambda i, j: (i + 1, j + 1)), ("H",) * n, "J"))
    if r == c:
        ops.append(SymmetryOp(toric_site_permutation(r, c, lambda i, j: (j, i)), None, "diagonal reflection"))
    return ops


# The commonly quoted Steane permutations (3 4)(5 6) and (0 3 1)(2 4 5)
# preserve a Hamming code whose labeling differs from the generators used
# here by exchanging qubits 2 and 6; the builtin list holds their images
# under that relabeling.
STEANE_RELABELING = (0, 1, 6, 3, 4, 5, 2)


def relabel(op: SymmetryOp, relabeling) -> SymmetryOp:
    """Conjugate a pure permutation by a qubit relabeling."""
    inv = [0] * len(relabeling)
    for i, v in enumerate(relabeling):
        inv[v] = i
    perm = tuple(relabeling[op.permutation[inv[q]]] for q in range(op.n))
    return SymmetryOp(perm, None)


def builtin_symmetries(code: StabilizerCode) -> list[SymmetryOp]:
    name, n = code.name, code.n
    if name in ("three_qubit", "three_qubit_h"):
        return [SymmetryOp.from_cycles("(0 1 2)", n)]
    if name == "five_qubit":
        return [
            SymmetryOp.from_cycles("(0 1 2 3 4)", n),
            SymmetryOp.from_cycles("(0 4)(1 3)", n),
            SymmetryOp.transversal_gate("Q", n, "Q^5"),
        ]
    if name == "steane":
        return [
            SymmetryOp.from_cycles("(2 5)(3 4)", n),
            SymmetryOp.from_cycles("(0 3 1)(4 5 6)", n),
            SymmetryOp.transversal_gate("Q", n, "Q^7"),
            SymmetryOp.transversal_gate("H", n, "H^7"),
        ]
    if code.lattice is not None:
        return toric_symmetries(*code.lattice)
    if name == "shor":
        from .concat import shor_symmetries

        return shor_symmetries()
    raise KeyError(f"no built-in symmetries for {name!r}")


# permutation groups -------------------------------------------------------------


def permutation_group(generators, limit: int = 200000) -> set[tuple[int, ...]]:
    """All products of the given permutations (breadth-first closure)."""
    gens = [tuple(g.permutation if isinstance(g, SymmetryOp) else g) for g in generators]
    if not gens:
        return set()
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = tuple(g[p[i]] for i in range(n))
            if q not in seen:
                seen.add(q)
                if len(seen) > limit:
                    raise CapacityError("permutation group closure exceeded its size limit")
                queue.append(q)
    return seen


def tuple_orbits(generators, n: int, k: int) -> list[set[tuple[int, ...]]]:
    """Orbits of the group generated by ``generators`` on ordered k-tuples of distinct points."""
    gens = [tuple(g.permutation if isinstance(g, SymmetryOp) else g) for g in generators]
    remaining = set(permutations(range(n), k))
    orbits = []
    while remaining:
        start = min(remaining)
        orbit = {start}
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for g in gens:
                image = tuple(g[x] for x in t)
                if image not in orbit:
                    orbit.add(image)
                    queue.append(image)
        remaining -= orbit
        orbits.append(orbit)
    return orbits


def is_k_transitive(generators, n: int, k: int) -> bool:
    return len(tuple_orbits(generators, n, k)) == 1


def transitivity_degree(generators, n: int) -> int:
    k = 0
    while k < n and is_k_transitive(generators, n, k + 1):
        k += 1
    return k


def search_symmetries(code: StabilizerCode, gates=("I", "H", "Q"), uniform: bool = True) -> list[SymmetryOp]:
    """Brute-force search over permutations and transversal gates (n <= 5 only).

    With ``uniform`` the same gate is used on every qubit; otherwise every
    assignment of ``gates`` to qubits is tried.
    """
    n = code.n
    if n > 5:
        raise CapacityError("brute-force symmetry search is limited to five qubits")
    layers = [(g,) * n for g in gates] if uniform else list(product(gates, repeat=n))
    found = []
    for perm in permutations(range(n)):
        for layer in layers:
            op = SymmetryOp(perm, layer)
            if check_membership(code, op, "pauli").is_member:
                found.append(op)
    return found
