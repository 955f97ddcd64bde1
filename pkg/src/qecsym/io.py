"""JSON specifications for codes, noise, readout and symmetries."""

from __future__ import annotations

import json

import numpy as np

from .channels import (
    DepolarizingNoise,
    IIDNoise,
    KrausNoise,
    NoiseModel,
    QuantumChannel,
    TensorNoise,
    _parse_matrix,
    depolarizing_channel,
    random_channel,
)
from .codes import StabilizerCode, builtin, toric
from .measurement import ConfusionMatrix2, ReadoutNoise
from .symmetry import SymmetryOp


class SpecError(ValueError):
    """A specification could not be parsed; the message names the field."""


def load_json(text_or_path: str):
    """Parse inline JSON, or read it from a file when the text is a path."""
    text = text_or_path.strip()
    if not text.startswith(("{", "[", '"')):
        try:
            with open(text_or_path) as fh:
                text = fh.read()
        except OSError:
            return text_or_path  # a bare name such as "steane"
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def code_from_spec(spec) -> StabilizerCode:
    if isinstance(spec, str):
        try:
            return builtin(spec)
        except KeyError as exc:
            raise SpecError(str(exc)) from None
    if not isinstance(spec, dict):
        raise SpecError("code spec must be a name or an object")
    if "toric" in spec:
        t = spec["toric"]
        try:
            return toric(int(t["rows"]), int(t["cols"]))
        except KeyError as exc:
            raise SpecError(f"toric spec is missing field {exc}") from None
    for key in ("generators", "logical_x", "logical_z"):
        if key not in spec:
            if "name" in spec and len(spec) == 1:
                return code_from_spec(spec["name"])
            raise SpecError(f"code spec is missing field {key!r}")
    from .pauli import PauliOperator

    def paulis(field_name):
        out = []
        for i, s in enumerate(spec[field_name]):
            try:
                out.append(PauliOperator.from_string(s))
            except ValueError as exc:
                raise SpecError(f"{field_name}[{i}]: {exc}") from None
        return tuple(out)

    return StabilizerCode(
        spec.get("name", "custom"), paulis("generators"), paulis("logical_x"), paulis("logical_z")
    )


def channel_from_spec(spec) -> QuantumChannel:
    if "kraus" in spec:
        return QuantumChannel(tuple(_parse_matrix(k) for k in spec["kraus"]))
    if "p" in spec:
        return depolarizing_channel(float(spec["p"]))
    raise SpecError("channel spec needs 'kraus' or 'p'")


def noise_from_spec(spec, n: int, rng: np.random.Generator | None = None) -> NoiseModel:
    """Build a noise model for n qubits.

    ``{"type": "iid"}`` without a channel is the generic IID family; with
    ``"random": true`` a seeded random rank-2 channel is drawn.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError("noise spec must be an object with a 'type' field")
    kind = spec["type"]
    if kind == "iid":
        if "channel" in spec:
            return IIDNoise(channel_from_spec(spec["channel"]), n)
        if "kraus" in spec:
            return IIDNoise(channel_from_spec({"kraus": spec["kraus"]}), n)
        if "p" in spec:
            return IIDNoise(depolarizing_channel(float(spec["p"])), n)
        if spec.get("random"):
            rng = rng if rng is not None else np.random.default_rng(0)
            return IIDNoise(random_channel(rng), n)
        return IIDNoise(None, n)
    if kind == "depolarizing":
        return DepolarizingNoise(float(spec["p"]) if "p" in spec else None, n)
    if kind == "tensor":
        factors = spec.get("factors")
        if not factors or len(factors) != n:
            raise SpecError(f"tensor noise needs {n} factors")
        return TensorNoise(tuple(channel_from_spec(f) for f in factors))
    if kind == "kraus":
        return KrausNoise(tuple(_parse_matrix(k) for k in spec["kraus"]))
    raise SpecError(f"unknown noise type {kind!r}")


def readout_from_spec(spec, num_bits: int) -> ReadoutNoise:
    items = spec.get("per_generator") if isinstance(spec, dict) else None
    if items is None:
        raise SpecError("readout spec needs 'per_generator'")
    if len(items) == 1 and num_bits > 1:
        items = items * num_bits
    if len(items) != num_bits:
        raise SpecError(f"readout lists {len(items)} bits but the code has {num_bits} generators")
    out = []
    for i, item in enumerate(items):
        try:
            if "matrix" in item:
                out.append(ConfusionMatrix2(np.array(item["matrix"], dtype=float)))
            else:
                out.append(ConfusionMatrix2.from_ab(float(item["a"]), float(item["b"])))
        except (KeyError, ValueError) as exc:
            raise SpecError(f"per_generator[{i}]: {exc}") from None
    return ReadoutNoise(tuple(out))


def symmetries_from_spec(spec, n: int) -> list[SymmetryOp]:
    if isinstance(spec, dict):
        spec = [spec]
    out = []
    for i, item in enumerate(spec):
        try:
            out.append(SymmetryOp.from_dict(item, n))
        except (KeyError, ValueError) as exc:
            raise SpecError(f"symmetries[{i}]: {exc}") from None
    return out
