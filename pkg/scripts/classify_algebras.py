"""Classify the bundled algebras: separable, symmetric, orbifold, r-spin, SIT flag.

    python3 scripts/classify_algebras.py [--max-r 4]
"""

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

from orbicat import completion2 as c2, frobenius as fr

DATA = Path(__file__).resolve().parents[1] / "src" / "orbicat" / "data" / "algebras"


@dataclass
class ClassifyConfig:
    data: Path = DATA
    max_r: int = 4


def classify(F: fr.FrobeniusAlgebra, max_r: int) -> dict:
    sit = c2.sit_equivalence_so2(F)
    return {
        "dim": F.dim,
        "separable": fr.check_delta_separable(F),
        "symmetric": fr.is_symmetric(F),
        "orbifold": c2.check_orbifold_object(F),
        "spin_strict": [r for r in range(1, max_r + 1) if fr.is_r_spin(F, r, "strict").holds],
        "spin_inner": [r for r in range(1, max_r + 1) if fr.is_r_spin(F, r, "inner").holds],
        "sit_coincide": sit.coincide,
        "strict_inner_flag": sit.strict_inner_flag,
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-r", type=int, default=4)
    p.add_argument("--data", type=Path, default=DATA)
    a = p.parse_args()
    cfg = ClassifyConfig(a.data, a.max_r)
    out = {}
    for path in sorted(cfg.data.glob("*.json")):
        F = fr.load_algebra(json.loads(path.read_text()))
        out[path.stem] = classify(F, cfg.max_r)
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
