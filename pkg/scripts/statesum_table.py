"""Tabulate state-sum values over algebras and triangulations.

    python3 scripts/statesum_table.py [--moves 2] [--seed 0] [--json]

Each row also records the value after a few random Pachner moves, so
the table doubles as an invariance check.
"""

import argparse
import json
import random
from dataclasses import dataclass, field

from orbicat import completion2 as c2, frobenius as fr, statesum as ss
from orbicat.exactnum import format_scalar


@dataclass
class TableConfig:
    algebras: dict = field(default_factory=lambda: {
        "Q": (fr.trivial_algebra, "identity"),
        "Q[Z2]": (lambda: fr.group_algebra(2), "identity"),
        "Q[Z3]": (lambda: fr.group_algebra(3), "identity"),
        "QxQ": (fr.product_algebra, "identity"),
        "M2": (lambda: fr.matrix_algebra(2), "transpose"),
    })
    surfaces: dict = field(default_factory=lambda: {
        "sphere (2)": ss.sphere,
        "sphere (4)": lambda: ss.sphere("tetrahedron"),
        "torus (fan)": ss.torus,
        "torus (cone)": lambda: ss.torus("cone"),
        "klein (fan)": ss.klein_bottle,
        "klein (cone)": lambda: ss.klein_bottle("cone"),
        "rp2 (cone)": ss.projective_plane,
        "rp2 (fan)": lambda: ss.projective_plane("fan"),
    })
    moves: int = 2
    seed: int = 0


def random_moves(S, count, rng):
    for _ in range(count):
        idx = S.side_index()
        plus = [i for i, (a, b, s) in enumerate(S.gluings) if s == 1 and idx[a][0] != idx[b][0]]
        if plus and rng.random() < 0.5:
            S = ss.pachner_22(S, rng.choice(plus))
        else:
            S = ss.pachner_13(S, rng.randrange(len(S.triangles)))
    return S


def run(cfg: TableConfig) -> list[dict]:
    rng = random.Random(cfg.seed)
    rows = []
    for sname, make in cfg.surfaces.items():
        S = make()
        row = {"surface": sname, "chi": S.euler_characteristic(), "orientable": S.is_orientable()}
        moved = random_moves(S, cfg.moves, rng)
        for aname, (build, theta) in cfg.algebras.items():
            F = build()
            O = c2.check_o2_object(F, fr.named_map(F, theta))
            v = ss.evaluate_unoriented(O, S).value
            w = ss.evaluate_unoriented(O, moved).value
            row[aname] = format_scalar(v) + ("" if v == w else f" (moved: {format_scalar(w)})")
        rows.append(row)
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--moves", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    a = p.parse_args()
    rows = run(TableConfig(moves=a.moves, seed=a.seed))
    if a.json:
        print(json.dumps(rows, indent=2))
        return
    cols = list(rows[0])
    widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in rows:
        print("  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)))


if __name__ == "__main__":
    main()
