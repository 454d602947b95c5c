"""Command line interface.

Reports go to standard output as JSON; diagnostics go to standard error.
Exit status: 0 valid, 1 invalid, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import cat1, completion2, frobenius, statesum
from .exactnum import FieldError, format_scalar, set_field

EXIT_VALID, EXIT_INVALID, EXIT_MALFORMED = 0, 1, 2


class Malformed(Exception):
    pass


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise Malformed(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise Malformed(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _build(fn, *args, what: str = "input"):
    """Run a loader, mapping structural errors to Malformed."""
    try:
        return fn(*args)
    except (KeyError, TypeError, IndexError, ValueError, FieldError) as exc:
        if isinstance(exc, (frobenius.DegeneratePairing, frobenius.AxiomFailure,
                            frobenius.InvalidBimodule)):
            raise
        raise Malformed(f"malformed {what}: {type(exc).__name__}: {exc}") from exc


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _verdict(ok: bool) -> str:
    return "valid" if ok else "invalid"


# ---------------------------------------------------------------------------
# cat


def _load_category(path):
    data = _read_json(path)
    C, vol = _build(cat1.load_finite, data, what="category")
    problems = C.check_axioms()
    return data, C, vol, problems


def cmd_cat(args) -> int:
    data, C, vol, problems = _load_category(args.input)
    rep = {"command": f"cat {args.action}", "name": C.name, "objects": len(C.objects()),
           "morphisms": len(C.morphisms()), "category_axioms": problems}
    if problems:
        rep["verdict"] = "invalid"
        rep["witnesses"] = problems
        _emit(rep)
        return EXIT_INVALID
    if args.action == "check":
        if vol is None:
            rep["verdict"] = "valid"
            _emit(rep)
            return EXIT_VALID
        r = cat1.check_o1_volution(C, vol)
        rep["volution"] = r.to_json()
        is_dagger = cat1.volution_is_strict_dagger(C, vol)
        rep["strict_dagger"] = is_dagger
        if is_dagger:
            rep["dagger"] = cat1.check_dagger(C, cat1.volution_as_dagger(C, vol)).to_json()
        rep["verdict"] = _verdict(r.valid)
        if not r.valid:
            rep["witnesses"] = [f.to_json() for f in r.failures]
        _emit(rep)
        return EXIT_VALID if r.valid else EXIT_INVALID
    if vol is None:
        raise Malformed("this command needs a volution block")
    r = cat1.check_o1_volution(C, vol)
    if not r.valid:
        rep["verdict"] = "invalid"
        rep["witnesses"] = [f.to_json() for f in r.failures]
        _emit(rep)
        return EXIT_INVALID
    if args.action == "strictify":
        S, dS = cat1.s_o1(C, vol)
        dr = cat1.check_dagger(S, dS)
        rep["strict_objects"] = [cat1.describe(x) for x in S.objects()]
        rep["dagger"] = dr.to_json()
        rep["verdict"] = _verdict(dr.valid)
        _emit(rep)
        return EXIT_VALID if dr.valid else EXIT_INVALID
    if not cat1.volution_is_strict_dagger(C, vol):
        rep["verdict"] = "invalid"
        rep["witnesses"] = [{"axiom": "dagger", "witness": "volution is not identity on objects with trivial eta"}]
        _emit(rep)
        return EXIT_INVALID
    d = cat1.volution_as_dagger(C, vol)
    dr = cat1.check_dagger(C, d)
    if not dr.valid:
        rep["verdict"] = "invalid"
        rep["witnesses"] = [f.to_json() for f in dr.failures]
        _emit(rep)
        return EXIT_INVALID
    if args.action == "karoubi":
        K, dK = cat1.d_karoubi(C, d)
        I = cat1.idempotent_completion(C)
        ii = cat1.ide_idempotency_witness(C)
        io = cat1.io1_idempotency_witness(C, vol)
        split = cat1.check_idempotents_split(I)
        rep["idempotent_completion"] = [cat1.describe(x) for x in I.objects()]
        rep["karoubi_objects"] = [cat1.describe(x) for x in K.objects()]
        reports = {"karoubi_dagger": cat1.check_dagger(K, dK), "idempotents_split": split}
        reports.update({f"ide_ide_{k}": v for k, v in ii["reports"].items()})
        reports.update({f"io1_io1_{k}": v for k, v in io["reports"].items()})
        rep["reports"] = {k: v.to_json() for k, v in sorted(reports.items())}
        ok = all(v.valid for v in reports.values())
        rep["verdict"] = _verdict(ok)
        _emit(rep)
        return EXIT_VALID if ok else EXIT_INVALID
    if args.action == "psi-check":
        w = cat1.psi_embed(C, d)
        rep["source_objects"] = len(w["source"].objects())
        rep["images"] = [{"object": cat1.describe(x), "image": cat1.describe(w["functor"](x))}
                         for x in w["source"].objects()]
        rep["reports"] = {k: v.to_json() for k, v in w["reports"].items()}
        rep["verdict"] = _verdict(w["valid"])
        _emit(rep)
        return EXIT_VALID if w["valid"] else EXIT_INVALID
    raise Malformed(f"unknown cat action {args.action}")


# ---------------------------------------------------------------------------
# frob


def _load_algebra(path) -> frobenius.FrobeniusAlgebra:
    data = _read_json(path)
    return _build(frobenius.load_algebra, data, what="algebra")


def _load_bimodule(path) -> frobenius.Bimodule:
    data = _read_json(path)
    return _build(frobenius.load_bimodule, data, Path(path).parent, what="bimodule")


def _vec(v):
    return [format_scalar(x) for x in v]


def cmd_frob(args) -> int:
    rep = {"command": f"frob {args.action}"}
    if args.action in ("tensor", "adjoint"):
        X = _load_bimodule(args.input)
        if args.action == "tensor":
            if not args.right:
                raise Malformed("frob tensor needs --right")
            Y = _load_bimodule(args.right)
            if X.right.alg != Y.left.alg:
                raise Malformed("middle algebras differ")
            try:
                T = frobenius.rel_tensor(X, Y)
            except frobenius.MiddleNotSeparable as exc:
                rep.update(verdict="invalid", witnesses=[{"error": "MiddleNotSeparable", "detail": str(exc)}])
                _emit(rep)
                return EXIT_INVALID
            tr = T.idempotent.trace()
            rep.update(dim=T.dim, trace=format_scalar(tr),
                       left_actions=[M.to_json() for M in T.bimodule.left_actions],
                       right_actions=[M.to_json() for M in T.bimodule.right_actions])
            ok = tr == T.dim
            rep["verdict"] = _verdict(ok)
            _emit(rep)
            return EXIT_VALID if ok else EXIT_INVALID
        try:
            adj = frobenius.star_adjoint(X)
        except frobenius.MiddleNotSeparable as exc:
            rep.update(verdict="invalid", witnesses=[{"error": "MiddleNotSeparable", "detail": str(exc)}])
            _emit(rep)
            return EXIT_INVALID
        rep.update(dim=adj.star.dim, zorro=list(adj.zorro), ev=adj.ev.mat.to_json(),
                   coev=adj.coev.mat.to_json(), verdict=_verdict(adj.valid))
        if not adj.valid:
            rep["witnesses"] = [{"zorro": list(adj.zorro)}]
        _emit(rep)
        return EXIT_VALID if adj.valid else EXIT_INVALID
    try:
        F = _load_algebra(args.input)
    except frobenius.DegeneratePairing as exc:
        rep.update(verdict="invalid", witnesses=[{"error": "DegeneratePairing",
                                                  "det": format_scalar(exc.det)}])
        _emit(rep)
        return EXIT_INVALID
    except frobenius.AxiomFailure as exc:
        rep.update(verdict="invalid", witnesses=[{"error": "AxiomFailure", "axiom": exc.axiom,
                                                  "at": list(exc.witness)}])
        _emit(rep)
        return EXIT_INVALID
    rep["algebra"] = F.name
    rep["dim"] = F.dim
    if args.action == "check":
        rep["axioms"] = ["associativity", "unit", "nondegenerate-pairing", "frobenius-identity",
                         "counitality"]
        rep.update(frobenius.frobenius_report(F))
        rep["verdict"] = "valid"
        _emit(rep)
        return EXIT_VALID
    if args.action == "separable":
        ok = frobenius.check_delta_separable(F)
        rep["mu_delta"] = frobenius.mu_delta(F).to_json()
        rep["verdict"] = _verdict(ok)
        if not ok:
            rep["witnesses"] = [{"mu_delta": rep["mu_delta"]}]
        _emit(rep)
        return EXIT_VALID if ok else EXIT_INVALID
    if args.action == "nakayama":
        nu = frobenius.nakayama_automorphism(F)
        rep["nakayama"] = {F.alg.labels[i]: _vec(nu(F.alg.basis(i))) for i in range(F.dim)}
        rep["symmetric"] = nu.is_identity()
        rep["verdict"] = "valid"
        _emit(rep)
        return EXIT_VALID
    if args.action == "spin":
        mode = args.mode or "strict"
        if mode not in ("strict", "inner"):
            raise Malformed("spin mode must be strict or inner")
        v = frobenius.is_r_spin(F, args.r, mode)
        rep.update(v.to_json())
        rep["verdict"] = _verdict(v.holds)
        if not v.holds:
            rep["witnesses"] = [{"nakayama_power": frobenius.nakayama_automorphism(F).power(args.r).mat.to_json()}]
        _emit(rep)
        return EXIT_VALID if v.holds else EXIT_INVALID
    raise Malformed(f"unknown frob action {args.action}")


# ---------------------------------------------------------------------------
# classify


def _load_theta(path, F):
    if path is None:
        return frobenius.named_map(F, "identity")
    data = _read_json(path)
    return _build(frobenius.load_theta, data, F, what="theta")


def cmd_classify(args) -> int:
    F = _load_algebra(args.input)
    rep = {"command": "classify", "structure": args.structure, "algebra": F.name}
    s = args.structure
    if s == "so2":
        ok = completion2.check_orbifold_object(F)
        rep["delta_separable"] = frobenius.check_delta_separable(F)
        rep["symmetric"] = frobenius.is_symmetric(F)
        rep["sit"] = completion2.sit_equivalence_so2(F).to_json()
        rep["verdict"] = _verdict(ok)
        if not ok:
            rep["witnesses"] = [{"delta_separable": rep["delta_separable"], "symmetric": rep["symmetric"]}]
        _emit(rep)
        return EXIT_VALID if ok else EXIT_INVALID
    if s.startswith("spin:"):
        try:
            r = int(s.split(":", 1)[1])
        except ValueError as exc:
            raise Malformed("structure spin:R needs an integer R") from exc
        if r < 1:
            raise Malformed("R must be positive")
        mode = args.mode or "strict"
        if mode not in ("strict", "inner"):
            raise Malformed("mode must be strict or inner")
        obj = completion2.check_spin_object(F, r, mode)
        rep["mode"] = mode
        if obj is None:
            rep["verdict"] = "invalid"
            rep["witnesses"] = [{"nakayama_power": frobenius.nakayama_automorphism(F).power(r).mat.to_json()}]
            _emit(rep)
            return EXIT_INVALID
        rep["object"] = obj.to_json()
        rep["verdict"] = "valid"
        _emit(rep)
        return EXIT_VALID
    if s == "o2":
        theta = _load_theta(args.theta, F)
        try:
            obj = completion2.check_o2_object(F, theta)
        except completion2.O2Error as exc:
            rep["verdict"] = "invalid"
            rep["witnesses"] = [{"error": exc.kind, "pair": list(exc.witness)}]
            _emit(rep)
            return EXIT_INVALID
        rep["object"] = obj.to_json()
        rep["verdict"] = "valid"
        _emit(rep)
        return EXIT_VALID
    raise Malformed(f"unknown structure {s!r}")


# ---------------------------------------------------------------------------
# statesum


def cmd_statesum(args) -> int:
    F = _load_algebra(args.algebra)
    S = _build(statesum.load_surface, _read_json(args.surface), what="surface")
    if args.theta:
        theta = _load_theta(args.theta, F)
        try:
            O = completion2.check_o2_object(F, theta)
        except completion2.O2Error as exc:
            _emit({"verdict": "invalid", "witnesses": [{"error": exc.kind, "pair": list(exc.witness)}]})
            return EXIT_INVALID
        _emit(statesum.evaluate_unoriented(O, S).to_json())
        return EXIT_VALID
    if not completion2.check_orbifold_object(F):
        _emit({"verdict": "invalid", "witnesses": [{"error": "not a separable symmetric Frobenius algebra"}]})
        return EXIT_INVALID
    try:
        _emit(statesum.evaluate_oriented(F, S).to_json())
    except statesum.NotOrientable as exc:
        _emit({"verdict": "invalid", "witnesses": [{"error": "NotOrientable", "detail": str(exc)}]})
        return EXIT_INVALID
    return EXIT_VALID


# ---------------------------------------------------------------------------
# corpus


def _kind(data: dict) -> str:
    if "kind" in data:
        return data["kind"]
    if "composition" in data:
        return "category"
    if "structure_constants" in data:
        return "algebra"
    if "left_actions" in data:
        return "bimodule"
    if "triangles" in data:
        return "surface"
    raise Malformed("cannot tell what kind of fixture this is")


def _check_category(data, base) -> list:
    C, vol = cat1.load_finite(data)
    problems = C.check_axioms()
    if problems:
        return problems
    fails = []
    if vol is not None:
        r = cat1.check_o1_volution(C, vol)
        fails += [f"volution {f.axiom}" for f in r.failures]
        if r.valid:
            S, dS = cat1.s_o1(C, vol)
            fails += [f"strictified dagger {f.axiom}" for f in cat1.check_dagger(S, dS).failures]
            I = cat1.idempotent_completion(C)
            fails += [f"i_o1 {f.axiom}" for f in cat1.check_o1_volution(I, cat1.i_o1(I, vol)).failures]
            io = cat1.io1_idempotency_witness(C, vol)
            fails += [f"io1 {k}" for k, v in io["reports"].items() if not v.valid]
            if cat1.volution_is_strict_dagger(C, vol):
                d = cat1.volution_as_dagger(C, vol)
                w = cat1.psi_embed(C, d)
                fails += [f"psi {k}" for k, v in w["reports"].items() if not v.valid]
    ii = cat1.ide_idempotency_witness(C)
    fails += [f"ide {k}" for k, v in ii["reports"].items() if not v.valid]
    return fails


def _check_algebra(data, base) -> list:
    F = frobenius.load_algebra(data)
    A = F.alg
    fails = []
    nu = frobenius.nakayama_automorphism(F)
    for i in range(A.dim):
        for j in range(A.dim):
            a, b = A.basis(i), A.basis(j)
            if F.pair(nu(a), b) != A.sign(i, j) * F.pair(b, a):
                fails.append(f"nakayama at {A.labels[i]},{A.labels[j]}")
    frobenius.opposite_algebra(F)
    expect = data.get("expect", {})
    checks = {"separable": lambda: frobenius.check_delta_separable(F),
              "symmetric": lambda: frobenius.is_symmetric(F),
              "orbifold": lambda: completion2.check_orbifold_object(F)}
    for key, fn in checks.items():
        if key in expect and fn() != expect[key]:
            fails.append(f"expected {key}={expect[key]}")
    for r, want in sorted(expect.get("spin", {}).items()):
        if frobenius.is_r_spin(F, int(r)).holds != want:
            fails.append(f"expected spin:{r}={want}")
    return fails


def _check_bimodule(data, base) -> list:
    X = frobenius.load_bimodule(data, base)
    fails = []
    seps = [frobenius.check_delta_separable(F) for F in (X.left, X.right)]
    if seps[0]:
        if not frobenius.left_unitor(X).verified():
            fails.append("left unitor")
    if seps[1]:
        if not frobenius.right_unitor(X).verified():
            fails.append("right unitor")
    if all(seps):
        adj = frobenius.star_adjoint(X)
        if not adj.valid:
            fails.append("zorro")
    return fails


def _check_statesum(data, base) -> list:
    F = frobenius.load_algebra(_resolve_ref(data["algebra"], base))
    theta = data.get("theta")
    O = None
    if theta is not None:
        O = completion2.check_o2_object(F, frobenius.load_theta(_resolve_ref(theta, base), F))
    values = []
    for ref in data["surfaces"]:
        S = statesum.load_surface(_resolve_ref(ref, base))
        v = statesum.evaluate_unoriented(O, S).value if O else statesum.evaluate_oriented(F, S).value
        values.append(v)
        if O is None and S.is_orientable():
            So = S.oriented()
            for move in (statesum.pachner_22, statesum.pachner_13):
                if statesum.evaluate_oriented(F, move(So)).value != v:
                    return [f"{move.__name__} changes the value on {ref if isinstance(ref, str) else 'surface'}"]
    if data.get("expect_equal", True) and len(set(values)) > 1:
        return ["values differ: " + ", ".join(format_scalar(v) for v in values)]
    return []


def _resolve_ref(ref, base: Path):
    if isinstance(ref, dict):
        return ref
    return json.loads((base / ref).read_text())


CHECKERS = {"category": _check_category, "algebra": _check_algebra, "bimodule": _check_bimodule,
            "statesum": _check_statesum}


def run_corpus(directory) -> tuple[dict, int]:
    d = Path(directory)
    if not d.is_dir():
        raise Malformed(f"{directory} is not a directory")
    entries = []
    for path in sorted(d.glob("*.json")):
        entry = {"fixture": path.name}
        try:
            data = json.loads(path.read_text())
            kind = _kind(data)
            entry["kind"] = kind
            if kind == "surface":
                statesum.load_surface(data)
                fails = []
            else:
                fails = CHECKERS[kind](data, path.parent)
        except Exception as exc:  # a broken fixture is reported, not fatal
            fails = [f"{type(exc).__name__}: {exc}"]
        entry["verdict"] = "pass" if not fails else "fail"
        if fails:
            entry["failures"] = fails
        entries.append(entry)
    failed = [e["fixture"] for e in entries if e["verdict"] == "fail"]
    summary = {"command": "corpus", "fixtures": entries, "total": len(entries),
               "passed": len(entries) - len(failed), "failed": failed,
               "verdict": "valid" if not failed else "invalid"}
    return summary, (EXIT_VALID if not failed else EXIT_INVALID)


def cmd_corpus(args) -> int:
    summary, code = run_corpus(args.directory)
    _emit(summary)
    return code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbicat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--output", choices=["json"], default="json")

    c = sub.add_parser("cat", help="finite categories with volutions")
    c.add_argument("action", choices=["check", "strictify", "karoubi", "psi-check"])
    c.add_argument("--input", required=True)
    common(c)

    f = sub.add_parser("frob", help="Frobenius algebras and bimodules")
    f.add_argument("action", choices=["check", "separable", "nakayama", "spin", "tensor", "adjoint"])
    f.add_argument("--input", required=True)
    f.add_argument("--right", help="second bimodule for tensor")
    f.add_argument("--r", type=int, default=1)
    f.add_argument("--mode", choices=["strict", "inner"])
    common(f)

    k = sub.add_parser("classify", help="classify an algebra as an object of a completion")
    k.add_argument("--structure", required=True)
    k.add_argument("--input", required=True)
    k.add_argument("--theta")
    k.add_argument("--mode", choices=["strict", "inner"])
    common(k)

    s = sub.add_parser("statesum", help="evaluate a state sum on a triangulated surface")
    s.add_argument("--algebra", required=True)
    s.add_argument("--surface", required=True)
    s.add_argument("--theta")
    s.add_argument("--input", help=argparse.SUPPRESS)
    common(s)

    r = sub.add_parser("corpus", help="run the invariant suite over a fixture directory")
    r.add_argument("directory")
    common(r)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_VALID
    field = os.environ.get("ORBICAT_FIELD")
    if field:
        try:
            set_field(field)
        except FieldError as exc:
            sys.stderr.write(f"orbicat: {exc}\n")
            _emit({"verdict": "error", "error": str(exc)})
            return EXIT_MALFORMED
    handlers = {"cat": cmd_cat, "frob": cmd_frob, "classify": cmd_classify,
                "statesum": cmd_statesum, "corpus": cmd_corpus}
    try:
        return handlers[args.command](args)
    except Malformed as exc:
        sys.stderr.write(f"orbicat: {exc}\n")
        _emit({"verdict": "error", "error": str(exc)})
        return EXIT_MALFORMED
    except (frobenius.InvalidBimodule,) as exc:
        sys.stderr.write(f"orbicat: {exc}\n")
        _emit({"verdict": "invalid", "witnesses": [{"error": "InvalidBimodule", "axiom": exc.axiom,
                                                    "at": [str(x) for x in exc.witness]}]})
        return EXIT_INVALID
    except (frobenius.DegeneratePairing, frobenius.AxiomFailure) as exc:
        sys.stderr.write(f"orbicat: {exc}\n")
        _emit({"verdict": "invalid", "witnesses": [{"error": type(exc).__name__, "detail": str(exc)}]})
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
