"""Lattice state sums on closed triangulated surfaces.

A surface is a list of triangles, each given by its three side labels in
cyclic order, together with a pairing of all sides.  A pairing flagged "+1"
glues two sides traversed in opposite directions (orientation compatible);
"-1" glues them traversed in the same direction.

The weight of a labelling is the product over triangles of eps(e_a e_b e_c)
(indices in side order) times the product over gluings of the copairing
g^{-1}[a][b], with theta applied to the second index on "-1" gluings.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exactnum import Matrix, format_scalar, zero
from .frobenius import AlgebraMap, FrobeniusAlgebra


class NotOrientable(ValueError):
    pass


class NotClosed(ValueError):
    pass


@dataclass(frozen=True)
class CombSurface:
    triangles: tuple   # tuple of (s0, s1, s2) side labels
    gluings: tuple     # tuple of (sideA, sideB, +1 | -1)

    def __post_init__(self):
        seen = {}
        for t, tri in enumerate(self.triangles):
            if len(tri) != 3:
                raise ValueError(f"triangle {t} does not have three sides")
            for j, s in enumerate(tri):
                if s in seen:
                    raise ValueError(f"side label {s!r} used twice")
                seen[s] = (t, j)
        glued = {}
        for a, b, sgn in self.gluings:
            if sgn not in (1, -1):
                raise ValueError(f"gluing sign must be +1 or -1, got {sgn!r}")
            if a == b:
                raise ValueError(f"side {a!r} glued to itself")
            for s in (a, b):
                if s not in seen:
                    raise NotClosed(f"gluing refers to unknown side {s!r}")
                if s in glued:
                    raise NotClosed(f"side {s!r} glued twice")
                glued[s] = True
        free = [s for s in seen if s not in glued]
        if free:
            raise NotClosed(f"unglued sides: {sorted(map(str, free))}")

    @classmethod
    def make(cls, triangles, gluings) -> "CombSurface":
        tris = tuple(tuple(t) for t in triangles)
        gl = tuple((a, b, _sign(s)) for a, b, s in gluings)
        return cls(tris, gl)

    # structure -------------------------------------------------------------

    def side_index(self) -> dict:
        return {s: (t, j) for t, tri in enumerate(self.triangles) for j, s in enumerate(tri)}

    def vertex_count(self) -> int:
        """Corners identified along gluings (union-find)."""
        idx = self.side_index()
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for t in range(len(self.triangles)):
            for j in range(3):
                find((t, j))
        for a, b, sgn in self.gluings:
            (ta, ja), (tb, jb) = idx[a], idx[b]
            a0, a1 = (ta, ja), (ta, (ja + 1) % 3)
            b0, b1 = (tb, jb), (tb, (jb + 1) % 3)
            if sgn == 1:
                union(a0, b1)
                union(a1, b0)
            else:
                union(a0, b0)
                union(a1, b1)
        return len({find(x) for x in list(parent)})

    def euler_characteristic(self) -> int:
        return self.vertex_count() - len(self.gluings) + len(self.triangles)

    def orientation(self) -> list[int] | None:
        """Signs s_t with s_A s_B = sign for every gluing, or None."""
        idx = self.side_index()
        adj: dict[int, list] = {t: [] for t in range(len(self.triangles))}
        for a, b, sgn in self.gluings:
            ta, tb = idx[a][0], idx[b][0]
            adj[ta].append((tb, sgn))
            adj[tb].append((ta, sgn))
        sign: dict[int, int] = {}
        for start in range(len(self.triangles)):
            if start in sign:
                continue
            sign[start] = 1
            stack = [start]
            while stack:
                t = stack.pop()
                for u, sgn in adj[t]:
                    want = sign[t] * sgn
                    if u not in sign:
                        sign[u] = want
                        stack.append(u)
                    elif sign[u] != want:
                        return None
        return [sign[t] for t in range(len(self.triangles))]

    def is_orientable(self) -> bool:
        return self.orientation() is not None

    def components(self) -> int:
        idx = self.side_index()
        parent = list(range(len(self.triangles)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, _ in self.gluings:
            ra, rb = find(idx[a][0]), find(idx[b][0])
            if ra != rb:
                parent[ra] = rb
        return len({find(t) for t in range(len(self.triangles))})

    # edits -----------------------------------------------------------------

    def flip(self, t: int) -> "CombSurface":
        """Reverse triangle t's orientation and toggle the signs of its gluings."""
        tri = self.triangles[t]
        sides = set(tri)
        tris = list(self.triangles)
        tris[t] = tuple(reversed(tri))
        gl = []
        for a, b, s in self.gluings:
            k = (a in sides) + (b in sides)
            gl.append((a, b, -s if k == 1 else s))
        return CombSurface(tuple(tris), tuple(gl))

    def oriented(self) -> "CombSurface":
        """Equivalent surface with every gluing +1; NotOrientable if impossible."""
        signs = self.orientation()
        if signs is None:
            raise NotOrientable("no consistent orientation of the triangles")
        S = self
        for t, s in enumerate(signs):
            if s == -1:
                S = S.flip(t)
        return S

    def relabel(self, names) -> "CombSurface":
        """Rename sides by a prefix string or an explicit mapping."""
        if isinstance(names, str):
            f = lambda s: f"{names}{s}"
        else:
            f = names.__getitem__
        return CombSurface(tuple(tuple(f(s) for s in t) for t in self.triangles),
                           tuple((f(a), f(b), g) for a, b, g in self.gluings))

    def to_json(self) -> dict:
        return {"triangles": [list(t) for t in self.triangles],
                "gluings": [[a, b, "+1" if s == 1 else "-1"] for a, b, s in self.gluings]}

    @classmethod
    def from_json(cls, data: dict) -> "CombSurface":
        return cls.make(data["triangles"], data["gluings"])


def _sign(s) -> int:
    if isinstance(s, str):
        s = s.strip()
        if s in ("+1", "1"):
            return 1
        if s == "-1":
            return -1
        raise ValueError(f"bad gluing sign {s!r}")
    if s in (1, -1):
        return int(s)
    raise ValueError(f"bad gluing sign {s!r}")


def disjoint_union(S: CombSurface, T: CombSurface) -> CombSurface:
    A, B = S.relabel("L."), T.relabel("R.")
    return CombSurface(A.triangles + B.triangles, A.gluings + B.gluings)


# ---------------------------------------------------------------------------
# builders


def polygon_surface(word: str, method: str = "cone") -> CombSurface:
    """Surface from a polygon word such as "a b a^-1 b^-1".

    Sides of the polygon are traversed counter-clockwise; a letter occurring
    once plain and once inverted is glued orientation compatibly.  ``cone``
    triangulates from an interior point, ``fan`` from the first corner.
    """
    letters = word.split()
    L = len(letters)
    parsed = []
    for tok in letters:
        if tok.endswith("^-1"):
            parsed.append((tok[:-3], -1))
        else:
            parsed.append((tok, 1))
    counts: dict[str, list[int]] = {}
    for k, (x, _) in enumerate(parsed):
        counts.setdefault(x, []).append(k)
    if any(len(v) != 2 for v in counts.values()):
        raise ValueError("every letter must occur exactly twice")
    tris = []
    gl = []
    boundary = {}
    if method == "cone":
        for k in range(L):
            tris.append((f"r{k}", f"s{k}", f"q{k}"))
            boundary[k] = f"s{k}"
        for k in range(L):
            gl.append((f"q{k}", f"r{(k + 1) % L}", 1))
    elif method == "fan":
        if L < 3:
            raise ValueError("fan needs at least three sides")
        for k in range(1, L - 1):
            first = f"s0" if k == 1 else f"d{k}b"
            last = f"s{L - 1}" if k == L - 2 else f"d{k + 1}a"
            tris.append((first, f"s{k}", last))
        for k in range(L):
            boundary[k] = f"s{k}"
        for k in range(2, L - 1):
            gl.append((f"d{k}a", f"d{k}b", 1))
    else:
        raise ValueError(f"unknown method {method!r}")
    for x, (i, j) in sorted(counts.items()):
        same = parsed[i][1] == parsed[j][1]
        gl.append((boundary[i], boundary[j], -1 if same else 1))
    return CombSurface(tuple(tris), tuple(gl))


def tetrahedron() -> CombSurface:
    """Boundary of a tetrahedron, faces oriented outward."""
    faces = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    tris = []
    edge_sides: dict = {}
    for f, (a, b, c) in enumerate(faces):
        sides = []
        for j, (p, q) in enumerate(((a, b), (b, c), (c, a))):
            name = f"f{f}.{p}{q}"
            sides.append(name)
            edge_sides.setdefault(frozenset((p, q)), []).append((name, (p, q)))
        tris.append(tuple(sides))
    gl = []
    for key in sorted(edge_sides, key=sorted):
        (n1, d1), (n2, d2) = edge_sides[key]
        gl.append((n1, n2, 1 if d1 != d2 else -1))
    return CombSurface(tuple(tris), tuple(gl))


def sphere(method: str = "cone") -> CombSurface:
    if method == "tetrahedron":
        return tetrahedron()
    return polygon_surface("a a^-1", "cone")


def torus(method: str = "fan") -> CombSurface:
    return polygon_surface("a b a^-1 b^-1", method)


def klein_bottle(method: str = "fan") -> CombSurface:
    return polygon_surface("a b a^-1 b", method)


def projective_plane(method: str = "cone") -> CombSurface:
    if method == "cone":
        return polygon_surface("a a", "cone")
    return polygon_surface("a b a b", method)


# ---------------------------------------------------------------------------
# Pachner moves (on orientation-compatible gluings)


def _fresh(S: CombSurface, stem: str, count: int) -> list[str]:
    used = {s for t in S.triangles for s in t}
    out = []
    k = 0
    while len(out) < count:
        name = f"{stem}{k}"
        if name not in used:
            out.append(name)
            used.add(name)
        k += 1
    return out


def _rotate(tri, side):
    j = tri.index(side)
    return tri[j:] + tri[:j]


def pachner_22(S: CombSurface, gluing: int | None = None) -> CombSurface:
    """Flip the diagonal shared by two distinct triangles across a +1 gluing."""
    idx = S.side_index()
    order = range(len(S.gluings)) if gluing is None else [gluing]
    for g in order:
        s, t, sgn = S.gluings[g]
        t1, t2 = idx[s][0], idx[t][0]
        if sgn != 1 or t1 == t2:
            continue
        _, a, b = _rotate(S.triangles[t1], s)
        _, c, d = _rotate(S.triangles[t2], t)
        x, y = _fresh(S, "p", 2)
        tris = [tri for k, tri in enumerate(S.triangles) if k not in (t1, t2)]
        tris += [(b, c, x), (d, a, y)]
        gl = [G for k, G in enumerate(S.gluings) if k != g] + [(x, y, 1)]
        return CombSurface(tuple(tris), tuple(gl))
    raise ValueError("no +1 gluing between distinct triangles available")


def pachner_13(S: CombSurface, triangle: int = 0) -> CombSurface:
    """Replace one triangle by three around a new interior vertex."""
    a, b, c = S.triangles[triangle]
    q1, q2, r1, r2, p1, p2 = _fresh(S, "n", 6)
    tris = [tri for k, tri in enumerate(S.triangles) if k != triangle]
    tris += [(a, q1, p1), (b, r1, q2), (c, p2, r2)]
    gl = list(S.gluings) + [(q1, q2, 1), (r1, r2, 1), (p1, p2, 1)]
    return CombSurface(tuple(tris), tuple(gl))


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Invariant:
    value: object

    def to_json(self) -> dict:
        return {"value": format_scalar(self.value)}


def triangle_tensor(F: FrobeniusAlgebra) -> np.ndarray:
    A = F.alg
    n = A.dim
    T = np.empty((n, n, n), dtype=object)
    prods = [[A.mul(A.basis(a), A.basis(b)) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            ab = prods[a][b]
            for c in range(n):
                T[a, b, c] = F.counit(A.mul(ab, A.basis(c)))
    return T


def _to_array(M: Matrix) -> np.ndarray:
    arr = np.empty(M.shape, dtype=object)
    for i in range(M.rows):
        for j in range(M.cols):
            arr[i, j] = M[i, j]
    return arr


def propagators(F: FrobeniusAlgebra, theta: AlgebraMap | None = None) -> dict:
    P = {1: _to_array(F.ginv)}
    if theta is not None:
        P[-1] = _to_array(F.ginv @ theta.mat.T)
    return P


def contract(S: CombSurface, tri: np.ndarray, prop: dict, field: str = "Q"):
    """Exact contraction of the network; greedy pairwise order."""
    tensors = []
    for t, sides in enumerate(S.triangles):
        tensors.append((tri, list(sides)))
    for a, b, sgn in S.gluings:
        if sgn not in prop:
            raise NotOrientable("orientation-reversing gluing without theta")
        tensors.append((prop[sgn], [("e", a), ("e", b)]))
    # rename triangle legs so that each propagator shares its two legs
    rename = {}
    for a, b, _ in S.gluings:
        rename[a] = ("e", a)
        rename[b] = ("e", b)
    tensors = [(arr, [rename.get(l, l) for l in legs]) for arr, legs in tensors]
    scalar = None
    while tensors:
        best = None
        for i in range(len(tensors)):
            li = set(tensors[i][1])
            for j in range(i + 1, len(tensors)):
                shared = li & set(tensors[j][1])
                if not shared:
                    continue
                size = len(li) + len(tensors[j][1]) - 2 * len(shared)
                key = (size, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j, shared)
        if best is None:
            for arr, legs in tensors:
                if legs:
                    raise NotClosed("dangling legs in the network")
                v = arr[()] if isinstance(arr, np.ndarray) else arr
                scalar = v if scalar is None else scalar * v
            break
        _, i, j, shared = best
        (A, la), (B, lb) = tensors[i], tensors[j]
        sh = sorted(shared, key=lambda x: la.index(x))
        ax_a = [la.index(x) for x in sh]
        ax_b = [lb.index(x) for x in sh]
        C = np.tensordot(A, B, axes=(ax_a, ax_b))
        legs = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
        tensors = [tensors[k] for k in range(len(tensors)) if k not in (i, j)] + [(C, legs)]
    if scalar is None:
        scalar = 1
    if isinstance(scalar, np.ndarray):
        scalar = scalar[()]
    return scalar + zero(field)


def evaluate_oriented(F: FrobeniusAlgebra, S: CombSurface) -> Invariant:
    So = S.oriented()
    return Invariant(contract(So, triangle_tensor(F), propagators(F), F.field))


def evaluate_unoriented(O, S: CombSurface) -> Invariant:
    """O is an O2Object (anything with .F and .theta)."""
    F = O.F
    return Invariant(contract(S, triangle_tensor(F), propagators(F, O.theta), F.field))


def brute_force(F: FrobeniusAlgebra, S: CombSurface, theta: AlgebraMap | None = None):
    """Direct sum over all labellings supported on non-zero copairing entries."""
    tri = triangle_tensor(F)
    prop = propagators(F, theta)
    idx = S.side_index()
    supports = []
    for a, b, sgn in S.gluings:
        P = prop[sgn]
        supports.append([(i, j, P[i, j]) for i in range(P.shape[0]) for j in range(P.shape[1])
                         if P[i, j]])
    total = zero(F.field)
    for choice in itertools.product(*supports):
        label = {}
        w = 1
        for (a, b, _), (i, j, p) in zip(S.gluings, choice):
            label[a], label[b] = i, j
            w = w * p
        for sides in S.triangles:
            w = w * tri[label[sides[0]], label[sides[1]], label[sides[2]]]
            if not w:
                break
        total = total + w
    return total


def load_surface(data: dict) -> CombSurface:
    return CombSurface.from_json(data)
