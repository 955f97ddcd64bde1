"""Degeneracy classes of Pauli recovery maps.

Two recovery maps are placed in the same class when one is obtained from the
other by a chain of

* conjugation ``R -> A R A^dag`` by a symmetry that commutes with the noise,
* right multiplication ``R -> R S`` by a stabilizer,
* left multiplication ``R -> L R`` by a logical Pauli (logical mode only),

up to a phase. Each step changes the conditional channel in a known way:
conjugation by A gives ``M -> P_A M P_A^T`` where ``P_A`` is the PTM of the
induced logical unitary, ``R S`` leaves it unchanged and ``L R`` gives
``M -> P_L M``. The witness for a member records the chain together with the
accumulated ``left`` and ``right`` matrices, so that
``M(member) = left @ M(representative) @ right``.

Orbits are computed on cosets: in strict mode two Paulis are identified when
they differ by an element of the stabilizer group, in logical mode when they
differ by an element of the logical group. Phases are ignored throughout.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .channels import (
    ConditionalChannels,
    DepolarizingNoise,
    IIDNoise,
    NoiseModel,
    pauli_labels,
    proportionality,
    relative_distance,
)
from .codes import RecoverySet, StabilizerCode
from .pauli import PauliOperator, all_paulis, commutes, multiply
from .symmetry import (
    SymmetryOp,
    builtin_symmetries,
    check_membership,
    commutes_with_noise,
)

MODES = ("strict", "logical")


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class WitnessStep:
    kind: str  # "symmetry" | "stabilizer" | "logical"
    element: object  # symmetry index, or the Pauli multiplied in

    def to_dict(self, symmetries=None) -> dict:
        if self.kind == "symmetry":
            out = {"kind": "symmetry", "element": self.element}
            if symmetries is not None:
                out["name"] = symmetries[self.element].name
            return out
        return {"kind": self.kind, "element": str(self.element)}

    @classmethod
    def from_dict(cls, data: dict) -> WitnessStep:
        if data["kind"] == "symmetry":
            return cls("symmetry", int(data["element"]))
        return cls(data["kind"], PauliOperator.from_string(data["element"]))


@dataclass(frozen=True, eq=False)
class Witness:
    """How a member is reached from its class representative."""

    member: PauliOperator
    steps: tuple[WitnessStep, ...]
    phase: int  # member = i**phase * (result of replaying the steps)
    left: np.ndarray
    right: np.ndarray

    @property
    def is_trivial_action(self) -> bool:
        eye = np.eye(self.left.shape[0])
        return bool(np.array_equal(self.left, eye) and np.array_equal(self.right, eye))


@dataclass(frozen=True, eq=False)
class DegeneracyClass:
    representative: PauliOperator
    members: tuple[PauliOperator, ...]
    witnesses: tuple[Witness, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, p: PauliOperator) -> bool:
        return any(m.unsigned() == p.unsigned() for m in self.members)


@dataclass(frozen=True, eq=False)
class DegeneracyPartition:
    code: StabilizerCode
    mode: str
    noise_family: dict
    symmetries: tuple[SymmetryOp, ...]
    classes: tuple[DegeneracyClass, ...]
    rejected: tuple[tuple[str, str], ...] = ()
    actions: tuple[np.ndarray, ...] = field(default=(), repr=False)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def representatives(self) -> list[PauliOperator]:
        return [c.representative for c in self.classes]

    def class_of(self, p: PauliOperator) -> DegeneracyClass:
        for c in self.classes:
            if p in c:
                return c
        raise KeyError(f"{p} is not in the partition")

    def count_by_weight(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.classes:
            w = c.representative.weight()
            out[w] = out.get(w, 0) + 1
        return out

    def to_dict(self) -> dict:
        code = self.code.to_dict()
        if self.code.lattice is not None:
            code["toric"] = {"rows": self.code.lattice[0], "cols": self.code.lattice[1]}
        return {
            "code": code,
            "mode": self.mode,
            "noise_family": self.noise_family,
            "symmetries": [s.to_dict() for s in self.symmetries],
            "rejected": [{"name": n, "reason": r} for n, r in self.rejected],
            "num_classes": self.num_classes,
            "classes": [
                {
                    "representative": str(c.representative),
                    "members": [str(m) for m in c.members],
                    "witnesses": [
                        {
                            "member": str(w.member),
                            "steps": [s.to_dict(self.symmetries) for s in w.steps],
                            "phase": w.phase,
                            "left": w.left.tolist(),
                            "right": w.right.tolist(),
                        }
                        for w in c.witnesses
                    ],
                }
                for c in self.classes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DegeneracyPartition:
        from .io import code_from_spec

        code = code_from_spec(data["code"])
        symmetries = tuple(SymmetryOp.from_dict(s) for s in data["symmetries"])
        classes = []
        for c in data["classes"]:
            witnesses = tuple(
                Witness(
                    PauliOperator.from_string(w["member"]),
                    tuple(WitnessStep.from_dict(s) for s in w["steps"]),
                    int(w["phase"]),
                    np.array(w["left"], dtype=float),
                    np.array(w["right"], dtype=float),
                )
                for w in c["witnesses"]
            )
            classes.append(
                DegeneracyClass(
                    PauliOperator.from_string(c["representative"]),
                    tuple(PauliOperator.from_string(m) for m in c["members"]),
                    witnesses,
                )
            )
        rejected = tuple((r["name"], r["reason"]) for r in data.get("rejected", []))
        actions = tuple(check_membership(code, s).logical_action.ptm for s in symmetries)
        return cls(code, data["mode"], data["noise_family"], symmetries, tuple(classes), rejected, actions)


# helpers ------------------------------------------------------------------------


def _inverse(p: PauliOperator) -> PauliOperator:
    return p.with_phase(-p.phase)


def _logical_pauli_ptm(code: StabilizerCode, letters: str) -> np.ndarray:
    """PTM of conjugation by a logical Pauli: diagonal, -1 on anticommuting labels."""
    labels = pauli_labels(code.k)
    p = PauliOperator.from_letters(letters)
    diag = [1.0 if commutes(p, PauliOperator.from_letters(lab)) else -1.0 for lab in labels]
    return np.diag(diag)


def admissible_symmetries(code, symmetries, noise_family, mode):
    """Filter symmetries, returning (accepted, actions, rejected-with-reasons)."""
    accepted, actions, rejected = [], [], []
    for op in symmetries:
        if op.n != code.n:
            rejected.append((op.name, f"acts on {op.n} qubits, code has {code.n}"))
            continue
        if not op.is_clifford:
            rejected.append((op.name, "non-Clifford gates cannot act on Pauli recovery maps"))
            continue
        verdict = check_membership(code, op)
        if not verdict.is_member:
            rejected.append((op.name, f"not a symmetry of the code: {verdict.detail}"))
            continue
        if noise_family is not None and not commutes_with_noise(op, noise_family):
            rejected.append((op.name, "does not commute with the noise family"))
            continue
        if mode == "strict" and verdict.kind != "stabilizer":
            rejected.append((op.name, "has a nontrivial logical action (strict mode)"))
            continue
        accepted.append(op)
        actions.append(verdict.logical_action.ptm)
    return accepted, actions, rejected


def _family_descriptor(noise_family) -> dict:
    if noise_family is None:
        return {"type": "any"}
    return noise_family.to_dict()


# partition ---------------------------------------------------------------------------


def partition(
    code: StabilizerCode,
    targets,
    symmetries=None,
    noise_family: NoiseModel | None = None,
    mode: str = "logical",
) -> DegeneracyPartition:
    """Split ``targets`` (a RecoverySet or a list of Paulis) into degeneracy classes.

    ``symmetries`` defaults to the code's builtin list; each one is kept only
    if it is a code symmetry, commutes with ``noise_family`` and, in strict
    mode, acts trivially on the logical space. Rejections are recorded on the
    returned partition rather than raised.
    """
    if mode not in MODES:
        raise PartitionError(f"mode must be one of {MODES}")
    if isinstance(targets, RecoverySet):
        targets = list(targets.maps)
    targets = list(targets)
    if any(t.n != code.n for t in targets):
        raise PartitionError("targets must act on the code's qubits")
    if noise_family is None:
        noise_family = IIDNoise(None, code.n)
    if symmetries is None:
        symmetries = builtin_symmetries(code)
    ops, actions, rejected = admissible_symmetries(code, symmetries, noise_family, mode)

    basis = code.stabilizer_basis if mode == "strict" else code.logical_basis

    def key(p: PauliOperator) -> int:
        return basis.reduce(p.symplectic)[0]

    by_key: dict[int, list[PauliOperator]] = {}
    for t in targets:
        by_key.setdefault(key(t), []).append(t)

    assigned: set[int] = set()
    classes = []
    for t in sorted(targets, key=lambda p: p.sort_key()):
        k0 = key(t)
        if k0 in assigned:
            continue
        # orbit of the coset of t, with a concrete Pauli and parent link per coset
        reached = {k0: (t, None, None)}
        queue = deque([k0])
        while queue:
            k = queue.popleft()
            p = reached[k][0]
            for i, op in enumerate(ops):
                image = op.conjugate(p)
                ki = key(image)
                if ki not in reached:
                    reached[ki] = (image, k, i)
                    queue.append(ki)
        members = sorted(
            (m for k in reached if k in by_key for m in by_key[k]),
            key=lambda p: p.sort_key(),
        )
        assigned.update(k for k in reached if k in by_key)
        rep = members[0]  # t is the smallest unassigned target, so rep == t
        witnesses = tuple(_witness(code, rep, m, reached, key, ops, actions) for m in members)
        classes.append(DegeneracyClass(rep, tuple(members), witnesses))

    return DegeneracyPartition(
        code,
        mode,
        _family_descriptor(noise_family),
        tuple(ops),
        tuple(classes),
        tuple(rejected),
        tuple(actions),
    )


def _witness(code, rep, member, reached, key, ops, actions) -> Witness:
    dim = 4**code.k
    # path of symmetry indices from the representative's coset to the member's
    path = []
    k = key(member)
    while reached[k][1] is not None:
        _, parent, i = reached[k]
        path.append(i)
        k = parent
    path.reverse()
    steps, left, right = [], np.eye(dim), np.eye(dim)
    current = rep
    for i in path:
        current = ops[i].conjugate(current)
        steps.append(WitnessStep("symmetry", i))
        left = actions[i] @ left
        right = right @ actions[i].T
    diff = multiply(member, _inverse(current))
    letters, mask, _ = code.decompose(diff)
    stab = code.stabilizer_product(mask)
    if mask:
        current = multiply(current, stab)
        steps.append(WitnessStep("stabilizer", stab))
    if letters != "I" * code.k:
        lp = code.logical_pauli(letters)
        current = multiply(lp, current)
        steps.append(WitnessStep("logical", lp))
        left = _logical_pauli_ptm(code, letters) @ left
    assert current.unsigned() == member.unsigned()
    phase = (member.phase - current.phase) % 4
    return Witness(member, tuple(steps), phase, left, right)


# replay and verification ------------------------------------------------------------


def replay_witness(partition: DegeneracyPartition, representative: PauliOperator, witness: Witness) -> PauliOperator:
    """Apply a witness chain to the representative using Pauli algebra only."""
    code = partition.code
    current = representative
    for step in witness.steps:
        if step.kind == "symmetry":
            current = partition.symmetries[step.element].conjugate(current)
        elif step.kind == "stabilizer":
            if not code.in_stabilizer_group(step.element):
                raise PartitionError(f"{step.element} is not a stabilizer")
            current = multiply(current, step.element)
        elif step.kind == "logical":
            if partition.mode == "strict":
                raise PartitionError("logical steps are not allowed in strict mode")
            if code.decompose(step.element) is None:
                raise PartitionError(f"{step.element} is not a logical operator")
            current = multiply(step.element, current)
        else:
            raise PartitionError(f"unknown witness step {step.kind!r}")
    return current.with_phase(current.phase + witness.phase)


def replay_all(partition: DegeneracyPartition) -> bool:
    return all(
        replay_witness(partition, c.representative, w) == w.member
        for c in partition.classes
        for w in c.witnesses
    )


@dataclass
class VerificationReport:
    passed: bool
    checks: int
    max_residual: float
    failures: list = field(default_factory=list)
    distinct_pairs: int = 0
    proportional_pairs: list = field(default_factory=list)
    tolerance: float = 1e-9

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": self.checks,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "failures": self.failures,
            "negative_control": {
                "distinct_pairs": self.distinct_pairs,
                "proportional_pairs": self.proportional_pairs,
            },
        }


def verify_partition(
    code: StabilizerCode,
    partition: DegeneracyPartition,
    noise: NoiseModel,
    tolerance: float = 1e-9,
) -> VerificationReport:
    """Check every witness numerically under a concrete noise instance.

    Each member must satisfy ``M(member) == left @ M(rep) @ right`` to a
    relative Frobenius tolerance. As a negative control, the representatives
    of distinct classes are compared pairwise; proportional pairs are only
    reported.
    """
    for op in partition.symmetries:
        if not commutes_with_noise(op, noise):
            raise PartitionError(f"symmetry {op.name} does not commute with the supplied noise")
    engine = ConditionalChannels(code, noise)
    failures, worst, checks = [], 0.0, 0
    rep_channels = []
    for c in partition.classes:
        m_rep = engine.channel(c.representative).ptm
        rep_channels.append(m_rep)
        for w in c.witnesses:
            predicted = w.left @ m_rep @ w.right
            actual = engine.channel(w.member).ptm
            res = relative_distance(actual, predicted)
            checks += 1
            worst = max(worst, res)
            if res > tolerance:
                failures.append({"representative": str(c.representative), "member": str(w.member), "residual": res})
    distinct, proportional = 0, []
    for i in range(len(rep_channels)):
        for j in range(i + 1, len(rep_channels)):
            _, res = proportionality(rep_channels[i], rep_channels[j])
            if res > tolerance:
                distinct += 1
            else:
                proportional.append([str(partition.classes[i].representative), str(partition.classes[j].representative)])
    return VerificationReport(not failures, checks, worst, failures, distinct, proportional, tolerance)


# bounds and the toric family -------------------------------------------------------------


def transitive_bound(basis_size: int, k: int) -> int:
    """At most C(|E| + k - 2, k) classes of weight-k errors under a k-transitive group."""
    if basis_size < 2 or k < 1:
        raise ValueError("need basis_size >= 2 and k >= 1")
    return comb(basis_size + k - 2, k)


def toric_weight2_bound(r: int, c: int) -> int:
    n = r * c // 2
    return 9 * ((n + c + r) // 2 - 2)


def toric_weight_classes(
    r: int,
    c: int,
    max_weight: int = 1,
    symmetries=None,
    noise_family: NoiseModel | None = None,
    include_j: bool = False,
) -> DegeneracyPartition:
    """Partition all toric Paulis of weight <= max_weight.

    The default symmetries are the two translations by two sites and the two
    reflections. With ``include_j`` the Hadamard-translation J is added and the
    noise family becomes IID depolarizing; the partition then runs in logical
    mode because J acts as a logical gate.
    """
    from .codes import toric
    from .symmetry import toric_symmetries

    if max_weight not in (1, 2):
        raise ValueError("max_weight must be 1 or 2")
    code = toric(r, c)
    if symmetries is None:
        named = {op.name: op for op in toric_symmetries(r, c)}
        wanted = ["twist", "rotation", "vertical reflection", "horizontal reflection"]
        if include_j:
            wanted.append("J")
        symmetries = [named[w] for w in wanted]
    has_logical = any(check_membership(code, op).kind == "logical" for op in symmetries)
    if noise_family is None:
        noise_family = DepolarizingNoise(None, code.n) if include_j else IIDNoise(None, code.n)
    mode = "logical" if has_logical else "strict"
    targets = list(all_paulis(code.n, max_weight))
    return partition(code, targets, symmetries, noise_family, mode)
