"""Exact scalars and dense matrices over Q and Q(i).

Rationals are ``gmpy2.mpq``; Gaussian rationals are :class:`GaussQ`.  Every
:class:`Matrix` carries the name of its ground field and refuses to combine
with a matrix over the other field.  The default field for new matrices is the
session field, read from ``ORBICAT_FIELD`` (``Q`` or ``Qi``) and changeable
with :func:`set_field` / :func:`field_scope`.
"""

from __future__ import annotations

import contextlib
import os
import re
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from gmpy2 import mpq

FIELDS = ("Q", "Qi")


class FieldError(ValueError):
    """Raised when values from different ground fields are mixed."""


class NotIdempotent(ValueError):
    def __init__(self, e):
        super().__init__("matrix is not idempotent: e*e != e")
        self.matrix = e


class SingularMatrix(ValueError):
    pass


_session_field = os.environ.get("ORBICAT_FIELD", "Q")
if _session_field not in FIELDS:
    raise FieldError(f"ORBICAT_FIELD must be one of {FIELDS}, got {_session_field!r}")


def get_field() -> str:
    return _session_field


def set_field(name: str) -> None:
    global _session_field
    if name not in FIELDS:
        raise FieldError(f"unknown field {name!r}")
    _session_field = name


@contextlib.contextmanager
def field_scope(name: str) -> Iterator[None]:
    old = get_field()
    set_field(name)
    try:
        yield
    finally:
        set_field(old)


# ---------------------------------------------------------------------------
# scalars


class GaussQ:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, (int, Fraction)) or type(x) is type(mpq(0)):
            return GaussQ(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussQ(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        return f"GaussQ({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def conj(x):
    """Field involution: complex conjugation on Q(i), identity on Q."""
    if isinstance(x, GaussQ):
        return x.conjugate()
    return x


def _rat_str(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    if isinstance(x, GaussQ):
        if x.im == 0:
            return _rat_str(x.re)
        im = _rat_str(x.im)
        if x.re == 0:
            return f"{im} i"
        sign = "+" if x.im > 0 else ""
        return f"{_rat_str(x.re)}{sign}{im} i"
    return _rat_str(x)


_RAT_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def _parse_rat(tok: str):
    if not _RAT_RE.match(tok):
        raise ValueError(f"cannot parse rational {tok!r}")
    return mpq(tok.lstrip("+"))


def _parse_str(s: str):
    t = s.replace(" ", "").replace("*", "")
    if not t:
        raise ValueError("empty scalar")
    if not t.endswith("i"):
        return _parse_rat(t)
    body = t[:-1]
    # split real and imaginary parts at the last sign that is not leading
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut > 0:
        re_tok, im_tok = body[:cut], body[cut:]
    else:
        re_tok, im_tok = "", body
    if im_tok in ("", "+", "-"):
        im_tok += "1"
    return GaussQ(_parse_rat(re_tok) if re_tok else 0, _parse_rat(im_tok))


def parse_scalar(s, field: str | None = None):
    """Parse "p/q" or "p/q+r/s i" (also plain ints) into a field element."""
    field = field or get_field()
    if isinstance(s, GaussQ):
        value = s
    elif isinstance(s, bool):
        raise ValueError(f"not a scalar: {s!r}")
    elif isinstance(s, (int, Fraction)) or type(s) is type(mpq(0)):
        value = mpq(s)
    elif isinstance(s, str):
        value = _parse_str(s)
    else:
        raise ValueError(f"cannot parse scalar {s!r}")
    return coerce(value, field)


def coerce(x, field: str):
    if field == "Q":
        if isinstance(x, GaussQ):
            if x.im != 0:
                raise FieldError(f"{x} is not in Q")
            return x.re
        return mpq(x)
    if field == "Qi":
        if isinstance(x, GaussQ):
            return x
        return GaussQ(x, 0)
    raise FieldError(f"unknown field {field!r}")


def zero(field: str):
    return coerce(0, field)


def one(field: str):
    return coerce(1, field)


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Immutable dense matrix with exact entries.

    Morphism convention: an m x n matrix is a map from dimension n to dimension m.
    """

    __slots__ = ("rows", "cols", "field", "_e", "_hash")

    def __init__(self, entries: Sequence[Sequence], field: str | None = None, *,
                 shape: tuple[int, int] | None = None, _trusted: bool = False):
        field = field or get_field()
        if field not in FIELDS:
            raise FieldError(f"unknown field {field!r}")
        if _trusted:
            e = entries
        else:
            e = tuple(tuple(parse_scalar(x, field) for x in row) for row in entries)
        if shape is None:
            rows = len(e)
            cols = len(e[0]) if rows else 0
        else:
            rows, cols = shape
        if len(e) != rows or any(len(r) != cols for r in e):
            raise ValueError("ragged matrix")
        self.rows = rows
        self.cols = cols
        self.field = field
        self._e = e
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def _make(cls, e, field, rows, cols):
        return cls(e, field, shape=(rows, cols), _trusted=True)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: str | None = None) -> "Matrix":
        field = field or get_field()
        z = zero(field)
        return cls._make(tuple((z,) * cols for _ in range(rows)), field, rows, cols)

    @classmethod
    def identity(cls, n: int, field: str | None = None) -> "Matrix":
        field = field or get_field()
        z, o = zero(field), one(field)
        return cls._make(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)),
                         field, n, n)

    @classmethod
    def unit(cls, rows: int, cols: int, i: int, j: int, field: str | None = None,
             value=1) -> "Matrix":
        field = field or get_field()
        z = zero(field)
        v = coerce(value, field)
        return cls._make(tuple(tuple(v if (r, c) == (i, j) else z for c in range(cols))
                               for r in range(rows)), field, rows, cols)

    @classmethod
    def diag(cls, values: Sequence, field: str | None = None) -> "Matrix":
        field = field or get_field()
        vals = [parse_scalar(v, field) for v in values]
        n = len(vals)
        z = zero(field)
        return cls._make(tuple(tuple(vals[i] if i == j else z for j in range(n))
                               for i in range(n)), field, n, n)

    @classmethod
    def column(cls, values: Sequence, field: str | None = None) -> "Matrix":
        return cls([[v] for v in values], field, shape=(len(values), 1))

    @classmethod
    def from_columns(cls, columns: Sequence["Matrix"], rows: int | None = None,
                     field: str | None = None) -> "Matrix":
        if not columns:
            if rows is None:
                raise ValueError("need rows for an empty column list")
            return cls.zeros(rows, 0, field)
        field = columns[0].field
        rows = columns[0].rows
        e = tuple(tuple(c._e[i][0] for c in columns) for i in range(rows))
        return cls._make(e, field, rows, len(columns))

    # access ------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple:
        return self._e

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i: int) -> tuple:
        return self._e[i]

    def col(self, j: int) -> "Matrix":
        return Matrix._make(tuple((r[j],) for r in self._e), self.field, self.rows, 1)

    def columns(self) -> list["Matrix"]:
        return [self.col(j) for j in range(self.cols)]

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Matrix":
        rows, cols = list(rows), list(cols)
        return Matrix._make(tuple(tuple(self._e[i][j] for j in cols) for i in rows),
                            self.field, len(rows), len(cols))

    def tolist(self) -> list[list]:
        return [list(r) for r in self._e]

    def flat(self) -> tuple:
        """Row-major entries."""
        return tuple(x for r in self._e for x in r)

    # comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self._e))
        return self._hash

    def is_zero(self) -> bool:
        return all(not x for r in self._e for x in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.rows, self.field)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # arithmetic ------------------------------------------------------------

    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldError(f"cannot mix fields {self.field} and {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        e = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._e, other._e))
        return Matrix._make(e, self.field, self.rows, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        e = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._e, other._e))
        return Matrix._make(e, self.field, self.rows, self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix._make(tuple(tuple(-a for a in r) for r in self._e),
                            self.field, self.rows, self.cols)

    def scale(self, c) -> "Matrix":
        c = coerce(c, self.field)
        return Matrix._make(tuple(tuple(c * a for a in r) for r in self._e),
                            self.field, self.rows, self.cols)

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        z = zero(self.field)
        ocols = list(zip(*other._e)) if other.rows else [() for _ in range(other.cols)]
        e = []
        for r in self._e:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for c in ocols:
                s = z
                for k, a in nz:
                    b = c[k]
                    if b:
                        s = s + a * b
                row.append(s)
            e.append(tuple(row))
        return Matrix._make(tuple(e), self.field, self.rows, other.cols)

    def __pow__(self, n: int) -> "Matrix":
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if n < 0:
            return self.inverse() ** (-n)
        result = Matrix.identity(self.rows, self.field)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    @property
    def T(self) -> "Matrix":
        return Matrix._make(tuple(zip(*self._e)) if self.rows else tuple(() for _ in range(self.cols)),
                            self.field, self.cols, self.rows)

    def conj(self) -> "Matrix":
        if self.field == "Q":
            return self
        return Matrix._make(tuple(tuple(conj(a) for a in r) for r in self._e),
                            self.field, self.rows, self.cols)

    @property
    def H(self) -> "Matrix":
        return self.conj().T

    def kron(self, other: "Matrix") -> "Matrix":
        self._check(other)
        e = []
        for r in self._e:
            for s in other._e:
                e.append(tuple(a * b for a in r for b in s))
        return Matrix._make(tuple(e), self.field, self.rows * other.rows, self.cols * other.cols)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Matrix._make(tuple(r + s for r, s in zip(self._e, other._e)),
                            self.field, self.rows, self.cols + other.cols)

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return Matrix._make(self._e + other._e, self.field, self.rows + other.rows, self.cols)

    def trace(self):
        if not self.is_square():
            raise ValueError("trace of a non-square matrix")
        s = zero(self.field)
        for i in range(self.rows):
            s = s + self._e[i][i]
        return s

    def vec(self) -> "Matrix":
        """Row-major vectorisation as a column."""
        return Matrix._make(tuple((x,) for x in self.flat()), self.field, self.rows * self.cols, 1)

    @classmethod
    def unvec(cls, v: "Matrix", rows: int, cols: int) -> "Matrix":
        flat = [v._e[i][0] for i in range(v.rows)]
        return cls._make(tuple(tuple(flat[i * cols:(i + 1) * cols]) for i in range(rows)),
                         v.field, rows, cols)

    # elimination -------------------------------------------------------

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form; pivots are taken leftmost-first, top-down."""
        m = [list(r) for r in self._e]
        pivots = []
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, self.rows) if m[i][c]), None)
            if p is None:
                continue
            if p != r:
                m[r], m[p] = m[p], m[r]
            piv = m[r][c]
            if piv != 1:
                inv = 1 / piv
                m[r] = [x * inv if x else x for x in m[r]]
            prow = m[r]
            for i in range(self.rows):
                if i != r:
                    f = m[i][c]
                    if f:
                        m[i] = [x - f * y if y else x for x, y in zip(m[i], prow)]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return Matrix._make(tuple(tuple(x) for x in m), self.field, self.rows, self.cols), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list["Matrix"]:
        return nullspace_basis(self)

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        m = [list(r) for r in self._e]
        n = self.rows
        d = one(self.field)
        for c in range(n):
            p = next((i for i in range(c, n) if m[i][c]), None)
            if p is None:
                return zero(self.field)
            if p != c:
                m[c], m[p] = m[p], m[c]
                d = -d
            piv = m[c][c]
            d = d * piv
            for i in range(c + 1, n):
                f = m[i][c]
                if f:
                    f = f / piv
                    m[i] = [x - f * y for x, y in zip(m[i], m[c])]
        return d

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise SingularMatrix("inverse of a non-square matrix")
        n = self.rows
        aug = self.hstack(Matrix.identity(n, self.field))
        r, piv = aug.rref()
        if piv[:n] != tuple(range(n)):
            raise SingularMatrix("matrix is singular")
        return r.submatrix(range(n), range(n, 2 * n))

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.rows

    def solve(self, b: "Matrix") -> "Matrix | None":
        """One solution x of self @ x = b (free variables set to 0), or None."""
        self._check(b)
        aug = self.hstack(b)
        r, piv = aug.rref()
        if any(p >= self.cols for p in piv):
            return None
        x = [[zero(self.field)] * b.cols for _ in range(self.cols)]
        for i, p in enumerate(piv):
            x[p] = list(r._e[i][self.cols:])
        return Matrix._make(tuple(tuple(row) for row in x), self.field, self.cols, b.cols)

    # io ------------------------------------------------------------------

    def to_json(self) -> list[list[str]]:
        return [[format_scalar(x) for x in r] for r in self._e]

    @classmethod
    def from_json(cls, data, field: str | None = None) -> "Matrix":
        return cls(data, field)

    def __repr__(self):
        return f"Matrix({self.to_json()}, field={self.field!r})"


def as_matrix(x, field: str | None = None) -> Matrix:
    if isinstance(x, Matrix):
        return x
    return Matrix(x, field)


def nullspace_basis(M: Matrix) -> list[Matrix]:
    """Basis of ker(M) read off the reduced echelon form.

    One vector per free column f: entry 1 at f, minus the pivot-row entries in
    column f at the pivot positions, zero elsewhere.  Ordered by free column.
    """
    r, pivots = M.rref()
    pset = set(pivots)
    z, o = zero(M.field), one(M.field)
    basis = []
    for f in range(M.cols):
        if f in pset:
            continue
        v = [z] * M.cols
        v[f] = o
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        basis.append(Matrix._make(tuple((x,) for x in v), M.field, M.cols, 1))
    return basis


def split_idempotent(e: Matrix) -> tuple[Matrix, Matrix]:
    """Split an idempotent as e = Z @ Y with Y @ Z = identity.

    Z collects the pivot columns of e and Y the non-zero rows of rref(e), so
    Y has full row rank rank(e).
    """
    if not e.is_square() or e @ e != e:
        raise NotIdempotent(e)
    r, pivots = e.rref()
    k = len(pivots)
    Y = r.submatrix(range(k), range(e.cols))
    Z = e.submatrix(range(e.rows), pivots)
    return Y, Z


def span_basis(vectors: Sequence[Matrix], dim: int, field: str | None = None) -> list[Matrix]:
    """A basis (as columns) of the span of the given column vectors."""
    if not vectors:
        return []
    M = Matrix.from_columns(list(vectors))
    _, pivots = M.rref()
    return [vectors[p] for p in pivots]


def block_diag(blocks: Sequence[Matrix], field: str | None = None) -> Matrix:
    field = blocks[0].field if blocks else (field or get_field())
    n = sum(b.rows for b in blocks)
    m = sum(b.cols for b in blocks)
    z = zero(field)
    rows = []
    c0 = 0
    for b in blocks:
        for r in b.entries:
            rows.append((z,) * c0 + tuple(r) + (z,) * (m - c0 - b.cols))
        c0 += b.cols
    return Matrix._make(tuple(rows), field, n, m)
