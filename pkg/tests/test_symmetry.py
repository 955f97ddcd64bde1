import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qecsym.channels import DepolarizingNoise, IIDNoise, TensorNoise, depolarizing_channel, random_channel
from qecsym.codes import builtin, toric
from qecsym.pauli import PauliOperator
from qecsym.symmetry import (
    STEANE_RELABELING,
    SymmetryOp,
    builtin_symmetries,
    check_membership,
    commutes_with_noise,
    cycle_string,
    is_k_transitive,
    parse_cycles,
    permutation_group,
    relabel,
    search_symmetries,
    toric_symmetries,
    transitivity_degree,
)


def same_up_to_phase(a, b):
    d = a.shape[0]
    return abs(abs(np.trace(a.conj().T @ b)) - d) < 1e-9


def test_cycle_notation_round_trip():
    perm = parse_cycles("(0 3 1)(4 5 6)", 7)
    assert perm == (3, 0, 2, 1, 5, 6, 4)
    assert cycle_string(perm) == "(0 3 1)(4 5 6)"
    with pytest.raises(ValueError):
        parse_cycles("(0 0)", 3)


def test_five_qubit_symmetries():
    code = builtin("five_qubit")
    cyc, refl, q = builtin_symmetries(code)
    assert check_membership(code, cyc).kind == "stabilizer"
    assert check_membership(code, refl).kind == "stabilizer"
    verdict = check_membership(code, q)
    assert verdict.kind == "logical"
    # logical Q cycles X -> Y -> Z
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[2, 1] = expected[3, 2] = expected[1, 3] = 1
    assert np.allclose(verdict.logical_action.ptm, expected)
    assert check_membership(code, SymmetryOp.from_cycles("(0 1)", 5)).kind == "neither"


def test_steane_symmetries_and_relabeling():
    code = builtin("steane")
    kinds = [check_membership(code, op).kind for op in builtin_symmetries(code)]
    assert kinds == ["stabilizer", "stabilizer", "logical", "logical"]
    perms = [op for op in builtin_symmetries(code) if op.is_permutation]
    relabeled = [cycle_string(relabel(op, STEANE_RELABELING).permutation) for op in perms]
    assert relabeled == ["(3 4)(5 6)", "(0 3 1)(2 4 5)"]


@pytest.mark.parametrize("name", ["three_qubit", "five_qubit", "steane"])
def test_pauli_and_dense_membership_agree(name):
    code = builtin(name)
    for op in builtin_symmetries(code):
        a = check_membership(code, op, "pauli")
        b = check_membership(code, op, "dense")
        assert a.kind == b.kind
        assert np.allclose(a.logical_action.ptm, b.logical_action.ptm, atol=1e-9)


def test_non_clifford_transversal_uses_dense_check():
    code = builtin("three_qubit")
    t = np.diag([1, np.exp(1j * np.pi / 4)])
    op = SymmetryOp(tuple(range(3)), (t, t, t))
    verdict = check_membership(code, op)
    assert verdict.method == "dense"
    assert verdict.kind == "logical"


ops3 = st.builds(
    lambda perm, gates: SymmetryOp(tuple(perm), tuple(gates)),
    st.permutations(range(3)),
    st.lists(st.sampled_from(["I", "H", "S", "Q", "X"]), min_size=3, max_size=3),
)
paulis3 = st.builds(lambda s: PauliOperator.from_letters(s), st.text(alphabet="IXYZ", min_size=3, max_size=3))


@given(ops3, ops3)
def test_composition_matches_unitaries(a, b):
    assert same_up_to_phase(a.compose(b).unitary(), a.unitary() @ b.unitary())


@given(ops3)
def test_inverse(a):
    assert same_up_to_phase(a.compose(a.inverse()).unitary(), np.eye(8))


@given(ops3, ops3, paulis3)
def test_conjugation_is_a_group_action(a, b, p):
    assert a.compose(b).conjugate(p) == a.conjugate(b.conjugate(p))


def test_closure_of_symmetries_with_composed_action(rng):
    code = builtin("five_qubit")
    gens = builtin_symmetries(code)
    for _ in range(20):
        i, j = rng.integers(len(gens), size=2)
        a, b = gens[i], gens[j]
        if rng.random() < 0.5:
            a = a.compose(gens[rng.integers(len(gens))])
        ab = a.compose(b)
        verdict = check_membership(code, ab)
        assert verdict.is_member
        composed = check_membership(code, a).logical_action.ptm @ check_membership(code, b).logical_action.ptm
        assert np.allclose(verdict.logical_action.ptm, composed)


def test_noise_commutation_rules(rng):
    code = builtin("five_qubit")
    cyc, refl, q = builtin_symmetries(code)
    assert commutes_with_noise(cyc, IIDNoise(None, 5))
    assert commutes_with_noise(q, DepolarizingNoise(None, 5))
    assert not commutes_with_noise(q, IIDNoise(None, 5))
    assert commutes_with_noise(q, IIDNoise(depolarizing_channel(0.8), 5))
    assert not commutes_with_noise(q, IIDNoise(random_channel(rng), 5))
    n0, n1 = random_channel(rng), random_channel(rng)
    tensor = TensorNoise((n0, n1, n0, n1, n0))
    assert commutes_with_noise(SymmetryOp.from_cycles("(0 4)(1 3)", 5), tensor)
    assert not commutes_with_noise(cyc, tensor)


def test_steane_permutation_group():
    perms = [op for op in builtin_symmetries(builtin("steane")) if op.is_permutation]
    group = permutation_group(perms)
    assert len(group) == 168  # automorphisms of the Fano plane
    assert is_k_transitive(perms, 7, 2)
    assert transitivity_degree(perms, 7) == 2


def test_five_qubit_dihedral_group():
    perms = [op for op in builtin_symmetries(builtin("five_qubit")) if op.is_permutation]
    assert len(permutation_group(perms)) == 10


def test_search_finds_all_three_qubit_permutations():
    found = search_symmetries(builtin("three_qubit"), gates=("I",))
    assert len(found) == 6


@pytest.mark.parametrize("r,c", [(4, 4), (4, 6)])
def test_toric_symmetries(r, c):
    code = toric(r, c)
    kinds = {op.name: check_membership(code, op).kind for op in toric_symmetries(r, c)}
    assert kinds["twist"] == kinds["rotation"] == "stabilizer"
    assert kinds["vertical reflection"] == kinds["horizontal reflection"] == "stabilizer"
    assert kinds["J"] == "logical"


def test_serialization_round_trip():
    op = SymmetryOp.from_cycles("(0 1 2)", 3, ("H", "I", "Q"), name="mixed")
    back = SymmetryOp.from_dict(op.to_dict())
    assert back.key() == op.key()
    assert SymmetryOp.from_dict({"cycles": "(0 1)"}, 3).permutation == (1, 0, 2)
