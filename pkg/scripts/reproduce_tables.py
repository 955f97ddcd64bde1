"""Print recovery-set sizes and class counts for the built-in codes.

Usage: python scripts/reproduce_tables.py [--mode logical|strict]
"""

import argparse
from dataclasses import dataclass

from qecsym.channels import DepolarizingNoise, IIDNoise
from qecsym.codes import builtin, default_recovery_set
from qecsym.degeneracy import partition


@dataclass
class TableConfig:
    codes: tuple[str, ...] = ("three_qubit", "five_qubit", "steane")
    mode: str = "logical"


def class_table(cfg: TableConfig) -> list[dict]:
    rows = []
    for name in cfg.codes:
        code = builtin(name)
        rec = default_recovery_set(code)
        iid = partition(code, rec, noise_family=IIDNoise(None, code.n), mode=cfg.mode)
        row = {"code": name, "n": code.n, "recoveries": len(rec), "iid": iid.num_classes, "depolarizing": None}
        if name != "three_qubit":
            dep = partition(code, rec, noise_family=DepolarizingNoise(None, code.n), mode=cfg.mode)
            row["depolarizing"] = dep.num_classes
            row["depolarizing_reps"] = [str(r) for r in dep.representatives]
        row["iid_reps"] = [str(r) for r in iid.representatives]
        rows.append(row)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--mode", choices=("logical", "strict"), default="logical")
    cfg = TableConfig(mode=parser.parse_args().mode)
    print(f"{'code':<12} {'n':>2} {'|R|':>4} {'IID':>4} {'depol':>6}")
    for row in class_table(cfg):
        dep = "-" if row["depolarizing"] is None else row["depolarizing"]
        print(f"{row['code']:<12} {row['n']:>2} {row['recoveries']:>4} {row['iid']:>4} {dep:>6}")
    for row in class_table(cfg):
        print(f"{row['code']} IID representatives: {', '.join(row['iid_reps'])}")
        if row["depolarizing"] is not None:
            print(f"{row['code']} depolarizing representatives: {', '.join(row['depolarizing_reps'])}")


if __name__ == "__main__":
    main()
