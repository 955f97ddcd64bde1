"""Low-weight degeneracy classes of small toric codes.

Usage: python scripts/toric_counts.py [--sizes 4x4 4x6] [--weight-max 2]
"""

import argparse
from dataclasses import dataclass, field

from qecsym.degeneracy import toric_weight2_bound, toric_weight_classes


@dataclass
class ToricConfig:
    sizes: list[tuple[int, int]] = field(default_factory=lambda: [(4, 4), (4, 6)])
    weight_max: int = 2


def counts(cfg: ToricConfig) -> list[dict]:
    rows = []
    for r, c in cfg.sizes:
        plain = toric_weight_classes(r, c, cfg.weight_max).count_by_weight()
        with_j = toric_weight_classes(r, c, cfg.weight_max, include_j=True).count_by_weight()
        rows.append({"size": f"{r}x{c}", "plain": plain, "with_j": with_j, "weight2_bound": toric_weight2_bound(r, c)})
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", nargs="+", default=["4x4", "4x6"])
    parser.add_argument("--weight-max", type=int, default=2)
    args = parser.parse_args()
    cfg = ToricConfig([tuple(int(v) for v in s.split("x")) for s in args.sizes], args.weight_max)
    for row in counts(cfg):
        print(f"toric {row['size']}: classes by weight {row['plain']}, with J {row['with_j']}, "
              f"weight-2 bound {row['weight2_bound']}")


if __name__ == "__main__":
    main()
