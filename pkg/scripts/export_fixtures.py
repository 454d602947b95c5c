"""Regenerate the bundled JSON fixtures under src/orbicat/data.

    python3 scripts/export_fixtures.py [--out DIR]
"""

import argparse
import json
import shutil
from pathlib import Path

from orbicat import cat1, frobenius as fr, statesum as ss
from orbicat.exactnum import Matrix

ROOT = Path(__file__).resolve().parents[1] / "src" / "orbicat" / "data"


def algebras() -> dict:
    out = {"q": fr.trivial_algebra()}
    for n in range(2, 6):
        out[f"z{n}"] = fr.group_algebra(n)
    out["m2"] = fr.matrix_algebra(2)
    out["m3"] = fr.matrix_algebra(3)
    out["qxq"] = fr.product_algebra(2)
    out["m2u"] = fr.matrix_algebra(2, u=Matrix.diag([1, 2]))
    out["cl1"] = fr.clifford_algebra(1)
    out["cl2"] = fr.clifford_algebra(2)
    return out


# Expected verdicts, fixed by hand from the algebra's definition.
EXPECT = {
    "q": {"separable": True, "symmetric": True, "spin": {"1": True, "2": True, "3": True, "4": True}},
    "z2": {"separable": True, "symmetric": True},
    "z3": {"separable": True, "symmetric": True},
    "z4": {"separable": True, "symmetric": True},
    "z5": {"separable": True, "symmetric": True},
    "m2": {"separable": True, "symmetric": True, "orbifold": True},
    "m3": {"separable": True, "symmetric": True},
    "qxq": {"separable": True, "symmetric": True},
    "m2u": {"separable": False, "symmetric": False, "orbifold": False},
    "cl1": {"separable": True, "symmetric": False, "spin": {"1": False, "2": True}},
}

SURFACES = {
    "sphere": lambda: ss.sphere(),
    "tetrahedron": lambda: ss.tetrahedron(),
    "torus-fan": lambda: ss.torus(method="fan"),
    "torus-cone": lambda: ss.torus(method="cone"),
    "klein-fan": lambda: ss.klein_bottle(method="fan"),
    "klein-cone": lambda: ss.klein_bottle(method="cone"),
    "rp2-cone": lambda: ss.projective_plane(method="cone"),
    "rp2-fan": lambda: ss.projective_plane(method="fan"),
}


def dump(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def main(out: Path) -> None:
    algs = algebras()
    for key, F in algs.items():
        dump(out / "algebras" / f"{key}.json", F.to_json())
    dump(out / "theta" / "transpose.json", {"named": "transpose"})
    dump(out / "theta" / "identity.json", {"named": "identity"})
    surf = {k: f() for k, f in SURFACES.items()}
    for key, S in surf.items():
        dump(out / "surfaces" / f"{key}.json", S.to_json())
    for key, make in cat1.FINITE_FIXTURES.items():
        C, d = make()
        dump(out / "categories" / f"{key}.json", cat1.finite_to_json(C, d.as_volution()))

    m2 = algs["m2"]
    bimods = {
        "col2": fr.column_module(m2, 2),
        "row2": fr.row_module(m2, 2),
        "regular-m2": fr.regular_bimodule(m2),
        "regular-z2": fr.regular_bimodule(algs["z2"]),
        "regular-qxq": fr.regular_bimodule(algs["qxq"]),
    }
    for key, X in bimods.items():
        dump(out / "bimodules" / f"{key}.json", X.to_json())

    corpus = out / "corpus"
    if corpus.exists():
        shutil.rmtree(corpus)
    for key, C in ((k, make()) for k, make in cat1.FINITE_FIXTURES.items()):
        dump(corpus / f"category-{key}.json", cat1.finite_to_json(C[0], C[1].as_volution()))
    C, v = cat1.fixture_s3_twisted()
    dump(corpus / "category-s3-twisted.json", cat1.finite_to_json(C, v))
    dump(out / "categories" / "s3-twisted.json", cat1.finite_to_json(C, v))
    for key, F in algs.items():
        data = F.to_json()
        if key in EXPECT:
            data["expect"] = EXPECT[key]
        dump(corpus / f"algebra-{key}.json", data)
    for key, X in bimods.items():
        dump(corpus / f"bimodule-{key}.json", X.to_json())
    m2j = m2.to_json()
    groups = {
        "sphere-m2": (m2j, None, ["sphere", "tetrahedron"]),
        "torus-m2": (m2j, None, ["torus-fan", "torus-cone"]),
        "klein-m2": (m2j, {"named": "transpose"}, ["klein-fan", "klein-cone"]),
        "rp2-m2": (m2j, {"named": "transpose"}, ["rp2-cone", "rp2-fan"]),
        "torus-z2": (algs["z2"].to_json(), None, ["torus-fan", "torus-cone"]),
    }
    for key, (alg, theta, names) in groups.items():
        dump(corpus / f"statesum-{key}.json",
             {"kind": "statesum", "algebra": alg, "theta": theta,
              "surfaces": [surf[n].to_json() for n in names], "expect_equal": True})


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=ROOT)
    main(p.parse_args().out)
