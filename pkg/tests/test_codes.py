import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dense_pauli
from qecsym.codes import (
    InvalidCodeError,
    InvalidRecoverySetError,
    StabilizerCode,
    builtin,
    custom_recovery_set,
    default_recovery_set,
    encoding_isometry,
    toric,
)
from qecsym.pauli import PauliOperator, multiply

SMALL = ["three_qubit", "five_qubit", "steane", "three_qubit_h"]


def test_table_of_generators():
    assert [str(g) for g in builtin("three_qubit").generators] == ["ZZI", "IZZ"]
    assert [str(g) for g in builtin("five_qubit").generators] == ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    steane = builtin("steane")
    assert (steane.n, steane.k, len(steane.generators)) == (7, 1, 6)
    assert str(builtin("three_qubit").logical_x[0]) == "XXX"


def test_three_qubit_isometry_is_the_repetition_encoding():
    u = encoding_isometry(builtin("three_qubit")).matrix
    expected = np.zeros((8, 2))
    expected[0, 0] = expected[7, 1] = 1
    assert np.allclose(u, expected)


@pytest.mark.parametrize("name", SMALL)
def test_isometry_is_stabilized_and_carries_the_logicals(name):
    code = builtin(name)
    u = encoding_isometry(code).matrix
    assert np.allclose(u.conj().T @ u, np.eye(2))
    for g in code.generators:
        assert np.allclose(g.matrix() @ u, u)
    assert np.allclose(code.logical_x[0].matrix() @ u, u @ dense_pauli("X"))
    assert np.allclose(code.logical_z[0].matrix() @ u, u @ dense_pauli("Z"))
    assert np.allclose(code.logical_pauli("Y").matrix() @ u, u @ dense_pauli("Y"))


def test_steane_zero_state_has_eight_equal_amplitudes():
    u = encoding_isometry(builtin("steane")).matrix
    amps = np.abs(u[:, 0])
    nonzero = amps[amps > 1e-12]
    assert len(nonzero) == 8
    assert np.allclose(nonzero, nonzero[0])


def test_syndrome_bits_follow_generator_order():
    code = builtin("three_qubit")
    assert code.syndrome(PauliOperator.from_string("XII")) == (1, 0)
    assert code.syndrome(PauliOperator.from_string("IIX")) == (0, 1)
    assert code.syndrome(PauliOperator.from_string("ZZZ")) == (0, 0)


@pytest.mark.parametrize("name,size", [("three_qubit", 4), ("five_qubit", 16), ("steane", 64)])
def test_default_recovery_set_sizes(name, size):
    assert len(default_recovery_set(builtin(name))) == size


def test_default_recovery_set_contents():
    assert [str(r) for r in default_recovery_set(builtin("three_qubit"))] == ["III", "IIX", "XII", "IXI"]
    five = default_recovery_set(builtin("five_qubit"))
    assert sorted(r.weight() for r in five) == [0] + [1] * 15
    weights = [r.weight() for r in default_recovery_set(builtin("steane"))]
    assert (weights.count(0), weights.count(1), weights.count(2)) == (1, 21, 42)


@pytest.mark.parametrize("name", ["three_qubit", "five_qubit"])
def test_recovery_orthogonality_and_completeness(name):
    code = builtin(name)
    u = encoding_isometry(code).matrix
    maps = [r.matrix() for r in default_recovery_set(code)]
    for i, q in enumerate(maps):
        for j, r in enumerate(maps):
            block = u.conj().T @ q.conj().T @ r @ u
            assert np.allclose(block, np.eye(2) * (i == j))
    total = sum(r @ u @ u.conj().T @ r.conj().T for r in maps)
    assert np.allclose(total, np.eye(1 << code.n))


def test_custom_recovery_sets():
    code = builtin("three_qubit")
    r1 = custom_recovery_set(code, ["III", "XII", "IYI", "IIY"])
    assert len(r1) == 4
    with pytest.raises(InvalidRecoverySetError, match="collision"):
        custom_recovery_set(code, ["III", "XII", "IXI", "XII"])
    with pytest.raises(InvalidRecoverySetError):
        custom_recovery_set(code, ["III", "XII"])


def test_dependent_or_anticommuting_generators_are_rejected():
    with pytest.raises(InvalidCodeError):
        StabilizerCode("bad", (PauliOperator.from_string("XI"), PauliOperator.from_string("ZI")),
                       (PauliOperator.from_string("IX"),), (PauliOperator.from_string("IZ"),))


@st.composite
def normalizer_elements(draw):
    code = builtin("five_qubit")
    mask = draw(st.integers(0, 15))
    letters = draw(st.sampled_from("IXYZ"))
    phase = draw(st.integers(0, 3))
    p = multiply(code.logical_pauli(letters), code.stabilizer_product(mask)).with_phase(0)
    return code, p.with_phase(phase), letters, mask


@given(normalizer_elements())
def test_decompose_recovers_the_factors(sample):
    code, p, letters, mask = sample
    got_letters, got_mask, phase = code.decompose(p)
    assert (got_letters, got_mask) == (letters, mask)
    rebuilt = multiply(code.logical_pauli(got_letters), code.stabilizer_product(got_mask))
    assert rebuilt.with_phase(rebuilt.phase + phase) == p


def test_stabilizer_group_membership_tracks_signs():
    code = builtin("three_qubit")
    assert code.in_stabilizer_group(PauliOperator.from_string("ZIZ"))
    assert not code.in_stabilizer_group(PauliOperator.from_string("-ZIZ"))
    assert not code.in_stabilizer_group(PauliOperator.from_string("ZII"))


@pytest.mark.parametrize("r,c", [(4, 4), (4, 6), (6, 4)])
def test_toric_structure(r, c):
    code = toric(r, c)
    assert code.n == r * c // 2
    assert code.k == 2
    assert len(code.generators) == code.n - 2
    x_type = sum(1 for g in code.generators if g.z == 0)
    z_type = sum(1 for g in code.generators if g.x == 0)
    assert x_type == z_type == r * c // 4 - 1  # one of each dropped for independence
    for lx in code.logical_x + code.logical_z:
        assert all(lx.commutes(g) for g in code.generators)
    for i, lx in enumerate(code.logical_x):
        for j, lz in enumerate(code.logical_z):
            assert lx.commutes(lz) == (i != j)


def test_toric_rejects_bad_sizes():
    with pytest.raises(InvalidCodeError):
        toric(2, 2)
    with pytest.raises(InvalidCodeError):
        toric(3, 4)


def test_shor_code_is_available_as_builtin():
    shor = builtin("shor")
    assert (shor.n, shor.k, shor.num_syndromes) == (9, 1, 256)


def test_unknown_code_name():
    with pytest.raises(KeyError):
        builtin("golay")
