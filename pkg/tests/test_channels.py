import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_conditional_ptm, dense_pauli, global_kraus
from qecsym.channels import (
    ConditionalChannels,
    DepolarizingNoise,
    IIDNoise,
    KrausNoise,
    LogicalChannel,
    NoiseModelError,
    QuantumChannel,
    TensorNoise,
    average_logical_channel,
    bit_flip_channel,
    conditional_logical_channel,
    conjugation_noise,
    depolarizing_channel,
    identity_noise,
    mixture,
    noise_trace_preserving,
    proportionality,
    random_channel,
)
from qecsym.codes import builtin, default_recovery_set, encoding_isometry
from qecsym.pauli import DimensionError, PauliOperator

seeds = st.integers(0, 2**32 - 1)


def test_depolarizing_ptm():
    assert np.allclose(depolarizing_channel(0.7).ptm(), np.diag([1, 0.7, 0.7, 0.7]))
    out = depolarizing_channel(0.0).apply(np.array([[1, 0], [0, 0]]))
    assert np.allclose(out, np.eye(2) / 2)
    with pytest.raises(NoiseModelError):
        depolarizing_channel(1.5)


@given(seeds)
def test_random_channels_are_trace_preserving(seed):
    ch = random_channel(np.random.default_rng(seed))
    assert len(ch.kraus) == 2
    assert ch.is_trace_preserving()


@given(seeds)
def test_ptm_round_trip_through_choi(seed):
    ch = random_channel(np.random.default_rng(seed))
    back = QuantumChannel.from_ptm(ch.ptm())
    assert back.equals(ch, 1e-10)


def test_non_cp_ptm_is_rejected():
    with pytest.raises(NoiseModelError):
        QuantumChannel.from_ptm(np.diag([1.0, 1.0, 1.0, -1.0]))  # transpose


def test_identity_noise_gives_identity_then_nothing():
    code = builtin("five_qubit")
    engine = ConditionalChannels(code, identity_noise(code.n))
    maps = list(default_recovery_set(code))
    assert np.allclose(engine.channel(maps[0]).ptm, np.eye(4))
    for r in maps[1:]:
        assert np.allclose(engine.channel(r).ptm, 0)


@pytest.mark.parametrize("name", ["three_qubit", "five_qubit"])
def test_conditional_channel_matches_brute_force(name, rng):
    code = builtin(name)
    single = random_channel(rng)
    u = encoding_isometry(code).matrix
    kraus = global_kraus(single.kraus, code.n)
    engine = ConditionalChannels(code, IIDNoise(single, code.n))
    for r in list(default_recovery_set(code))[:6]:
        expected = brute_conditional_ptm(u, r.matrix(), kraus)
        assert np.allclose(engine.channel(r).ptm, expected, atol=1e-12)


@pytest.mark.parametrize("q", [0.05, 0.1, 0.2])
def test_repetition_code_flip_probability(q):
    code = builtin("three_qubit")
    avg = average_logical_channel(code, default_recovery_set(code), IIDNoise(bit_flip_channel(q), 3))
    f = 3 * q**2 - 2 * q**3
    assert np.allclose(avg.ptm, np.diag([1, 1, 1 - 2 * f, 1 - 2 * f]), atol=1e-12)


@pytest.mark.parametrize("name", ["three_qubit", "five_qubit", "steane"])
def test_average_channel_is_trace_preserving(name, rng):
    code = builtin(name)
    noise = IIDNoise(random_channel(rng), code.n)
    assert average_logical_channel(code, default_recovery_set(code), noise).is_trace_preserving()


def test_five_qubit_depolarizing_average_is_unital():
    code = builtin("five_qubit")
    avg = average_logical_channel(code, default_recovery_set(code), DepolarizingNoise(0.95, 5))
    assert avg.is_trace_preserving()
    assert avg.is_unital()


@pytest.mark.parametrize("name", ["three_qubit", "five_qubit"])
def test_conjugation_noise_singles_out_its_recovery(name):
    code = builtin(name)
    maps = list(default_recovery_set(code))
    for q in maps:
        engine = ConditionalChannels(code, conjugation_noise(q))
        for r in maps:
            expected = np.eye(4) if r == q else np.zeros((4, 4))
            assert np.array_equal(np.round(engine.channel(r).ptm, 12), expected)


@given(seeds, st.floats(0.0, 1.0))
def test_conditional_channel_is_linear_in_the_noise(seed, w):
    code = builtin("three_qubit")
    rng = np.random.default_rng(seed)
    a, b = IIDNoise(random_channel(rng), 3), IIDNoise(random_channel(rng), 3)
    mixed = mixture([w, 1 - w], [a, b])
    r = PauliOperator.from_string("XII")
    lhs = conditional_logical_channel(code, r, mixed).ptm
    rhs = w * conditional_logical_channel(code, r, a).ptm + (1 - w) * conditional_logical_channel(code, r, b).ptm
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_tensor_noise_matches_global_kraus(rng):
    factors = tuple(random_channel(rng) for _ in range(3))
    tensor = TensorNoise(factors)
    kraus = [np.kron(np.kron(a, b), c) for a in factors[0].kraus for b in factors[1].kraus for c in factors[2].kraus]
    rho = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    assert np.allclose(tensor.apply(rho), sum(k @ rho @ k.conj().T for k in kraus))
    assert noise_trace_preserving(tensor)


def test_kraus_noise_on_all_qubits(rng):
    code = builtin("three_qubit")
    ch = random_channel(rng, num_qubits=3, rank=2)
    u = encoding_isometry(code).matrix
    r = PauliOperator.from_string("IXI")
    got = conditional_logical_channel(code, r, KrausNoise(ch.kraus)).ptm
    assert np.allclose(got, brute_conditional_ptm(u, r.matrix(), ch.kraus), atol=1e-12)


def test_families_are_not_channels():
    code = builtin("three_qubit")
    with pytest.raises(NoiseModelError):
        ConditionalChannels(code, IIDNoise(None, 3))


def test_noise_size_must_match_code():
    with pytest.raises(DimensionError):
        ConditionalChannels(builtin("three_qubit"), DepolarizingNoise(0.9, 5))


def test_proportionality():
    m = np.diag([1.0, 0.5, 0.5, 0.2])
    c, res = proportionality(3 * m, m)
    assert c == pytest.approx(3.0) and res < 1e-15
    _, res = proportionality(m, np.eye(4))
    assert res > 0.1


def test_logical_channel_algebra():
    x = LogicalChannel.from_unitary(dense_pauli("X"))
    assert np.allclose((x @ x).ptm, np.eye(4))
    assert np.allclose(x.ptm, np.diag([1, 1, -1, -1]))
    assert LogicalChannel.from_dict(x.to_dict()).ptm.tolist() == x.ptm.tolist()
    with pytest.raises(DimensionError):
        LogicalChannel(np.eye(3))
