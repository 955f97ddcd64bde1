import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dense_pauli
from qecsym.pauli import (
    CapacityError,
    DimensionError,
    PauliOperator,
    all_paulis,
    apply_left,
    apply_right,
    check_dense,
    clifford_table,
    commutes,
    conjugate,
    gate_matrix,
    multiply,
)


@st.composite
def paulis(draw, n=None):
    n = n if n is not None else draw(st.integers(1, 4))
    letters = draw(st.text(alphabet="IXYZ", min_size=n, max_size=n))
    return PauliOperator.from_letters(letters, draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 4))
    return draw(paulis(n)), draw(paulis(n))


def dense(p):
    return dense_pauli(p.letters, p.phase)


@given(pauli_pairs())
def test_multiplication_is_a_homomorphism_into_dense_matrices(pair):
    p, q = pair
    assert np.allclose(dense(multiply(p, q)), dense(p) @ dense(q))


@given(pauli_pairs())
def test_commutation_matches_dense_commutator(pair):
    p, q = pair
    a, b = dense(p), dense(q)
    assert commutes(p, q) == np.allclose(a @ b, b @ a)


@given(paulis())
def test_matrix_uses_qubit_zero_as_most_significant(p):
    assert np.allclose(p.matrix(), dense(p))


@given(paulis())
def test_string_round_trip(p):
    assert PauliOperator.from_string(str(p)) == p


def test_letter_products():
    x, y, z = (PauliOperator.from_letters(c) for c in "XYZ")
    assert multiply(x, z) == PauliOperator.from_string("-iY")
    assert multiply(x, y) == PauliOperator.from_string("iZ")
    assert multiply(y, y) == PauliOperator.identity(1)


def test_weight_and_support():
    p = PauliOperator.from_string("XIZY")
    assert p.weight() == 3
    assert p.support == (0, 2, 3)


def test_order_is_weight_then_sparse_terms():
    ordered = sorted(all_paulis(2, 1), key=lambda p: p.sort_key())
    assert [str(p) for p in ordered] == ["II", "XI", "YI", "ZI", "IX", "IY", "IZ"]


def test_all_paulis_counts():
    assert len(list(all_paulis(3))) == 64
    assert len(list(all_paulis(4, 2))) == 1 + 4 * 3 + 6 * 9


@given(paulis(3), st.integers(0, 2**31 - 1))
def test_apply_left_and_right_match_dense(p, seed):
    m = np.random.default_rng(seed).normal(size=(8, 3)) + 0j
    assert np.allclose(apply_left(p, m), dense(p) @ m)
    mt = m.T.copy()
    assert np.allclose(apply_right(mt, p), mt @ dense(p))


def test_size_mismatch_is_rejected():
    with pytest.raises(DimensionError):
        multiply(PauliOperator.identity(2), PauliOperator.identity(3))


def test_dense_limit_is_enforced(monkeypatch):
    monkeypatch.setenv("QECSYM_DENSE_LIMIT", "4")
    with pytest.raises(CapacityError, match="4"):
        check_dense(5)
    check_dense(4)


def test_hadamard_table():
    table = clifford_table("H")
    assert table["X"] == (0, "Z")
    assert table["Z"] == (0, "X")
    assert table["Y"] == (2, "Y")


def test_q_cycles_x_y_z():
    table = clifford_table("Q")
    assert [table[c][1] for c in "XYZ"] == ["Y", "Z", "X"]
    assert all(table[c][0] == 0 for c in "XYZ")


@given(
    paulis(3),
    st.permutations(range(3)),
    st.lists(st.sampled_from(["I", "H", "S", "Q", "SX"]), min_size=3, max_size=3),
)
def test_conjugation_matches_dense_unitary(p, perm, gates):
    from qecsym.symmetry import SymmetryOp

    op = SymmetryOp(tuple(perm), tuple(gates))
    a = op.unitary()
    assert np.allclose(dense(conjugate(p, perm, gates)), a @ dense(p) @ a.conj().T)


def test_non_unitary_gate_is_rejected():
    from qecsym.pauli import UnsupportedSymmetryError

    with pytest.raises(UnsupportedSymmetryError):
        gate_matrix(np.array([[1, 1], [0, 1]]))
