"""Exact logical noise of stabilizer codes with noisy readout and degeneracy reduction."""

from .channels import (
    ConditionalChannels,
    DepolarizingNoise,
    IIDNoise,
    KrausNoise,
    LogicalChannel,
    NoiseModel,
    QuantumChannel,
    TensorNoise,
    average_logical_channel,
    conditional_logical_channel,
    depolarizing_channel,
    random_channel,
)
from .codes import (
    RecoverySet,
    StabilizerCode,
    builtin,
    custom_recovery_set,
    default_recovery_set,
    encoding_isometry,
    toric,
)
from .concat import (
    ConcatCode,
    ConcatRecovery,
    concat_analysis,
    concatenate,
    effective_logical_channel,
    level2_class_count,
    numerical_class_merge,
    shor_code,
    symmetry_reduced_pairs,
)
from .degeneracy import DegeneracyPartition, partition, replay_all, verify_partition
from .measurement import (
    ConfusionMatrix2,
    ReadoutNoise,
    logical_confusion,
    noisy_conditional_logical_channel,
    renormalization_factor,
)
from .pauli import CapacityError, DimensionError, PauliOperator
from .symmetry import SymmetryOp, builtin_symmetries, check_membership, toric_symmetries

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
