import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qecsym.channels import ConditionalChannels, DepolarizingNoise, IIDNoise, random_channel
from qecsym.codes import builtin, custom_recovery_set, default_recovery_set, toric, toric_qubits
from qecsym.degeneracy import (
    DegeneracyPartition,
    partition,
    replay_all,
    replay_witness,
    toric_weight2_bound,
    toric_weight_classes,
    transitive_bound,
    verify_partition,
)
from qecsym.pauli import PauliOperator, all_paulis
from qecsym.symmetry import SymmetryOp, builtin_symmetries

R1 = ["III", "XII", "IYI", "IIY"]
R2 = ["III", "XII", "IXI", "IIX"]


def reps(part):
    return [str(r) for r in part.representatives]


@pytest.mark.parametrize(
    "name,count,expected",
    [
        ("three_qubit", 2, ["III", "XII"]),
        ("five_qubit", 4, ["IIIII", "XIIII", "YIIII", "ZIIII"]),
        ("steane", 5, None),
    ],
)
def test_logical_classes_under_iid_noise(name, count, expected):
    code = builtin(name)
    part = partition(code, default_recovery_set(code), mode="logical")
    assert part.num_classes == count
    if expected is not None:
        assert reps(part) == expected
    assert sum(len(c.members) for c in part.classes) == code.num_syndromes


def test_steane_iid_representatives():
    code = builtin("steane")
    part = partition(code, default_recovery_set(code), mode="logical")
    assert reps(part)[:4] == ["IIIIIII", "XIIIIII", "YIIIIII", "ZIIIIII"]
    assert part.count_by_weight() == {0: 1, 1: 3, 2: 1}


@pytest.mark.parametrize("name,count", [("five_qubit", 2), ("steane", 3)])
def test_depolarizing_classes(name, count):
    code = builtin(name)
    part = partition(code, default_recovery_set(code), noise_family=DepolarizingNoise(None, code.n))
    assert part.num_classes == count
    assert reps(part)[:2] == ["I" * code.n, "X" + "I" * (code.n - 1)]


def test_recovery_choice_changes_strict_but_not_logical_counts():
    code = builtin("three_qubit")
    for maps, strict in ((R1, 3), (R2, 2)):
        rec = custom_recovery_set(code, maps)
        assert partition(code, rec, mode="strict").num_classes == strict
        assert partition(code, rec, mode="logical").num_classes == 2


def test_inadmissible_symmetries_are_recorded():
    code = builtin("five_qubit")
    part = partition(code, default_recovery_set(code), mode="strict")
    rejected = dict(part.rejected)
    assert "Q^5" in rejected
    bogus = SymmetryOp.from_cycles("(0 1)", 5, name="swap")
    part = partition(code, default_recovery_set(code), [bogus])
    assert dict(part.rejected)["swap"]


@given(st.randoms(use_true_random=False))
def test_partition_is_independent_of_target_order(random):
    code = builtin("five_qubit")
    maps = list(default_recovery_set(code))
    random.shuffle(maps)
    assert reps(partition(code, maps)) == reps(partition(code, default_recovery_set(code)))


@pytest.mark.parametrize("name", ["three_qubit", "five_qubit", "steane"])
def test_witnesses_replay_to_their_members(name):
    code = builtin(name)
    part = partition(code, default_recovery_set(code), noise_family=DepolarizingNoise(None, code.n))
    assert replay_all(part)
    for c in part.classes:
        for w in c.witnesses:
            assert replay_witness(part, c.representative, w) == w.member


@pytest.mark.parametrize("mode", ["strict", "logical"])
def test_witnesses_hold_numerically(mode, rng):
    code = builtin("five_qubit")
    part = partition(code, default_recovery_set(code), mode=mode)
    for _ in range(3):
        report = verify_partition(code, part, IIDNoise(random_channel(rng), 5))
        assert report.passed, report.failures
        assert report.max_residual < 1e-12


def test_negative_control_finds_distinct_classes(rng):
    code = builtin("five_qubit")
    part = partition(code, default_recovery_set(code))
    report = verify_partition(code, part, IIDNoise(random_channel(rng), 5))
    assert report.distinct_pairs == 6
    assert report.proportional_pairs == []


def test_serialized_partition_still_verifies(rng):
    code = builtin("steane")
    part = partition(code, default_recovery_set(code), noise_family=DepolarizingNoise(None, 7))
    back = DegeneracyPartition.from_dict(json.loads(json.dumps(part.to_dict())))
    assert reps(back) == reps(part)
    assert replay_all(back)
    assert verify_partition(code, back, DepolarizingNoise(0.8, 7)).passed


def test_non_commuting_noise_is_refused():
    from qecsym.degeneracy import PartitionError

    code = builtin("five_qubit")
    part = partition(code, default_recovery_set(code), noise_family=DepolarizingNoise(None, 5))
    with pytest.raises(PartitionError):
        verify_partition(code, part, IIDNoise(random_channel(np.random.default_rng(0)), 5))


def test_transitive_bound_for_steane_weight_two():
    code = builtin("steane")
    perms = [op for op in builtin_symmetries(code) if op.is_permutation]
    targets = list(all_paulis(7, 2, min_weight=2))
    part = partition(code, targets, perms, mode="strict")
    assert transitive_bound(4, 2) == 6
    assert part.num_classes <= 6
    # without stabilizer multiplication the bound is met with equality
    letters = {tuple(sorted(p.letter(q) for q in p.support)) for p in part.representatives}
    assert len(letters) == part.num_classes


def test_toric_weight_one_classes():
    for r, c in ((4, 4), (4, 6)):
        part = toric_weight_classes(r, c, 1)
        assert part.count_by_weight() == {0: 1, 1: 6}


def test_toric_j_merges_the_two_y_orientations(rng):
    part = toric_weight_classes(4, 4, 1, include_j=True)
    code = toric(4, 4)
    sites = toric_qubits(4, 4)
    y01 = PauliOperator.single(code.n, sites.index((0, 1)), "Y")
    y10 = PauliOperator.single(code.n, sites.index((1, 0)), "Y")
    assert part.class_of(y01) is part.class_of(y10)
    report = verify_partition(code, part, DepolarizingNoise(float(rng.uniform(0.5, 1)), code.n))
    assert report.passed
    assert part.count_by_weight()[1] == 3


@pytest.mark.parametrize("r,c", [(4, 4), (4, 6)])
def test_toric_weight_two_bound(r, c):
    part = toric_weight_classes(r, c, 2)
    assert part.count_by_weight()[2] <= toric_weight2_bound(r, c)


def test_toric_weight_classes_verify(rng):
    code = toric(4, 4)
    part = toric_weight_classes(4, 4, 1)
    assert verify_partition(code, part, IIDNoise(random_channel(rng), code.n)).passed


def test_members_share_syndrome_class_structure():
    code = builtin("five_qubit")
    part = partition(code, default_recovery_set(code), noise_family=DepolarizingNoise(None, 5))
    engine = ConditionalChannels(code, DepolarizingNoise(0.7, 5))
    probs = {c.representative: engine.channel(c.representative).probability for c in part.classes}
    for c in part.classes:
        for m in c.members:
            assert engine.channel(m).probability == pytest.approx(probs[c.representative], abs=1e-14)
