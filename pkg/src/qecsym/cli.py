"""Command-line front end.

Every report is a JSON object with sorted keys carrying the command, the
library version and a hash of the run configuration, so identical inputs give
byte-identical output. Exit status is 0 on success, 2 when a verification
fails and 1 for input or capacity errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .channels import ConditionalChannels, NoiseModel, NoiseModelError
from .codes import (
    InvalidCodeError,
    InvalidRecoverySetError,
    custom_recovery_set,
    default_recovery_set,
    index_to_bits,
)
from .concat import ConcatError, concat_analysis, concatenate
from .degeneracy import (
    DegeneracyPartition,
    PartitionError,
    partition,
    replay_all,
    toric_weight2_bound,
    toric_weight_classes,
    verify_partition,
)
from .io import (
    SpecError,
    code_from_spec,
    load_json,
    noise_from_spec,
    readout_from_spec,
    symmetries_from_spec,
)
from .measurement import ReadoutError, noisy_conditional_logical_channel, renormalization_factor
from .pauli import CapacityError, DimensionError, PauliOperator, all_paulis
from .symmetry import toric_symmetries

COMMANDS = ("channel", "classes", "verify", "toric", "concat")
INPUT_ERRORS = (
    SpecError,
    DimensionError,
    CapacityError,
    InvalidCodeError,
    InvalidRecoverySetError,
    NoiseModelError,
    ReadoutError,
    PartitionError,
    ConcatError,
    OSError,
    KeyError,
    ValueError,
)


@dataclass
class RunConfig:
    command: str
    code: str | None = None
    recovery: str | None = None
    noise: str | None = None
    readout: str | None = None
    symmetries: str | None = None
    mode: str = "logical"
    weight_max: int | None = None
    tolerance: float = 1e-9
    seed: int = 0
    output: str | None = None
    format: str = "json"
    partition: str | None = None
    trials: int = 3
    outer: str | None = None
    inner: str | None = None
    rows: int = 4
    cols: int = 4
    include_j: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        if not self.tolerance > 0:
            raise SpecError("--tol must be positive")
        if self.format not in ("json", "csv"):
            raise SpecError("--format must be json or csv")

    def hash(self) -> str:
        data = {k: v for k, v in asdict(self).items() if k not in ("output", "format")}
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# helpers ---------------------------------------------------------------------------------


def _code(cfg: RunConfig):
    if cfg.code is None:
        raise SpecError("--code is required")
    return code_from_spec(load_json(cfg.code))


def _recovery(cfg: RunConfig, code):
    if cfg.recovery is None:
        return default_recovery_set(code)
    data = load_json(cfg.recovery)
    items = data.get("maps") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise SpecError("recovery spec must be a list of Pauli strings or {'maps': [...]}")
    return custom_recovery_set(code, [PauliOperator.from_string(s) for s in items])


def _noise(cfg: RunConfig, n: int, default=None) -> NoiseModel:
    if cfg.noise is None:
        if default is None:
            raise SpecError("--noise is required")
        return noise_from_spec(default, n)
    return noise_from_spec(load_json(cfg.noise), n, np.random.default_rng(cfg.seed))


def _concrete(noise: NoiseModel, rng: np.random.Generator) -> NoiseModel:
    return noise.sample(rng) if noise.is_family else noise


def _bits(index: int, r: int) -> str:
    return "".join(str(b) for b in index_to_bits(index, r))


# commands --------------------------------------------------------------------------------


def cmd_channel(cfg: RunConfig) -> tuple[dict, int]:
    code = _code(cfg)
    rec = _recovery(cfg, code)
    noise = _concrete(_noise(cfg, code.n), np.random.default_rng(cfg.seed))
    readout = None
    if cfg.readout is not None:
        readout = readout_from_spec(load_json(cfg.readout), len(code.generators))
    engine = ConditionalChannels(code, noise)
    r = len(code.generators)
    rows, total = [], None
    for s, rmap in enumerate(rec.maps):
        ideal = engine.channel(rmap)
        row = {"syndrome": _bits(s, r), "recovery": str(rmap), "ptm": ideal.ptm.tolist()}
        chan = ideal
        if readout is not None:
            chan = noisy_conditional_logical_channel(code, rmap, noise, readout)
            row["noisy_ptm"] = chan.ptm.tolist()
            row["renormalization"] = renormalization_factor(code, rmap, readout)
        total = chan.ptm.copy() if total is None else total + chan.ptm
        rows.append(row)
    return {
        "code": code.to_dict(),
        "noise": noise.to_dict(),
        "labels": list(ideal.labels),
        "conditional": rows,
        "average_ptm": total.tolist(),
    }, 0


def cmd_classes(cfg: RunConfig) -> tuple[dict, int]:
    code = _code(cfg)
    family = _noise(cfg, code.n, default={"type": "iid"})
    syms = None if cfg.symmetries is None else symmetries_from_spec(load_json(cfg.symmetries), code.n)
    if cfg.weight_max is not None:
        targets = list(all_paulis(code.n, cfg.weight_max))
    else:
        targets = _recovery(cfg, code)
    part = partition(code, targets, syms, family, cfg.mode)
    out = part.to_dict()
    out["count_by_weight"] = {str(k): v for k, v in sorted(part.count_by_weight().items())}
    return out, 0


def _load_partition(cfg: RunConfig) -> DegeneracyPartition:
    if cfg.partition is None:
        raise SpecError("verify needs a partition file (positional argument)")
    data = load_json(cfg.partition)
    if isinstance(data, dict) and "result" in data:
        data = data["result"]
    if not isinstance(data, dict) or "classes" not in data:
        raise SpecError("partition file has no 'classes' field")
    return DegeneracyPartition.from_dict(data)


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    part = _load_partition(cfg)
    code = part.code
    if cfg.noise is not None:
        family = _noise(cfg, code.n)
    else:
        family = noise_from_spec(dict(part.noise_family), code.n)
    rng = np.random.default_rng(cfg.seed)
    replay = replay_all(part)
    draws = [family] if not family.is_family else [family.sample(rng) for _ in range(cfg.trials)]
    reports = [verify_partition(code, part, noise, cfg.tolerance).to_dict() for noise in draws]
    passed = replay and all(r["passed"] for r in reports)
    return {
        "passed": passed,
        "replay": replay,
        "num_classes": part.num_classes,
        "draws": reports,
    }, (0 if passed else 2)


def cmd_toric(cfg: RunConfig) -> tuple[dict, int]:
    weight = cfg.weight_max or 1
    syms = None
    if cfg.symmetries is not None:
        syms = symmetries_from_spec(load_json(cfg.symmetries), cfg.rows * cfg.cols // 2)
    family = None
    if cfg.noise is not None:
        family = _noise(cfg, cfg.rows * cfg.cols // 2)
    part = toric_weight_classes(cfg.rows, cfg.cols, weight, syms, family, cfg.include_j)
    out = part.to_dict()
    counts = part.count_by_weight()
    out["count_by_weight"] = {str(k): v for k, v in sorted(counts.items())}
    if weight >= 2:
        out["weight2_bound"] = toric_weight2_bound(cfg.rows, cfg.cols)
    out["available_symmetries"] = [op.name for op in toric_symmetries(cfg.rows, cfg.cols)]
    return out, 0


def cmd_concat(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.outer is None or cfg.inner is None:
        raise SpecError("concat needs --outer and --inner")
    cc = concatenate(code_from_spec(load_json(cfg.outer)), code_from_spec(load_json(cfg.inner)))
    noise = _noise(cfg, cc.n, default={"type": "depolarizing", "p": 0.9})
    noise = _concrete(noise, np.random.default_rng(cfg.seed))
    return concat_analysis(cc, noise, cfg.tolerance), 0


DISPATCH = {
    "channel": cmd_channel,
    "classes": cmd_classes,
    "verify": cmd_verify,
    "toric": cmd_toric,
    "concat": cmd_concat,
}


def run(cfg: RunConfig) -> tuple[dict, int]:
    result, status = DISPATCH[cfg.command](cfg)
    report = {
        "command": cfg.command,
        "version": __version__,
        "config_hash": cfg.hash(),
        "result": result,
    }
    return report, status


# output ------------------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"


def to_csv(report: dict) -> str:
    """Class table projection; other reports become key/value rows."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    result = report["result"]
    if "classes" in result and isinstance(result["classes"], list) and result["classes"] and isinstance(result["classes"][0], dict):
        writer.writerow(["representative", "weight", "size", "members"])
        for c in result["classes"]:
            rep = PauliOperator.from_string(c["representative"])
            writer.writerow([c["representative"], rep.weight(), len(c["members"]), " ".join(c["members"])])
    else:
        writer.writerow(["key", "value"])
        for k in sorted(result):
            v = result[k]
            writer.writerow([k, v if isinstance(v, (int, float, str, bool)) else json.dumps(v, sort_keys=True, default=_jsonable)])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qecsym", description="Exact logical noise and degeneracy classes of stabilizer codes")
    parser.add_argument("--version", action="version", version=f"qecsym {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, code=True):
        if code:
            p.add_argument("--code", help="builtin name, JSON object or JSON file")
        p.add_argument("--recovery", help="JSON list of recovery Paulis (file or inline)")
        p.add_argument("--noise", help="noise spec as JSON (file or inline)")
        p.add_argument("--readout", help="readout spec as JSON (file or inline)")
        p.add_argument("--symmetries", help="symmetry list overriding the builtins")
        p.add_argument("--mode", choices=("strict", "logical"), default="logical")
        p.add_argument("--weight-max", type=int, dest="weight_max")
        p.add_argument("--tol", type=float, default=1e-9, dest="tolerance")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("channel", help="conditional and average logical channels"))
    common(sub.add_parser("classes", help="degeneracy partition of the recovery maps"))
    pv = sub.add_parser("verify", help="replay witnesses and check them numerically")
    pv.add_argument("partition", help="report or partition JSON written by 'classes'")
    pv.add_argument("--trials", type=int, default=3)
    common(pv, code=False)
    pt = sub.add_parser("toric", help="low-weight classes of the toric code")
    pt.add_argument("--rows", type=int, default=4)
    pt.add_argument("--cols", type=int, default=4)
    pt.add_argument("--include-j", action="store_true", dest="include_j")
    common(pt, code=False)
    pc = sub.add_parser("concat", help="level-two class analysis of a concatenated code")
    pc.add_argument("--outer", required=True)
    pc.add_argument("--inner", required=True)
    common(pc, code=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = set(RunConfig.__dataclass_fields__)
    try:
        cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in fields})
        report, status = run(cfg)
    except INPUT_ERRORS as exc:
        print(f"qecsym: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = to_csv(report) if cfg.format == "csv" else to_json(report)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:  # e.g. piped into head
            sys.stderr.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
