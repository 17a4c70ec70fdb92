"""Exact linear algebra over GF(p) and the rationals.

Everything here is exact: GF(p) scalars are Python ints in ``[0, p)`` and
rational scalars are :class:`fractions.Fraction`.  Matrices are dense and
immutable; subspaces are kept in reduced echelon form so that two equal
subspaces compare equal as plain data.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

Scalar = int | Fraction

_MAX_CHAR = 2**31


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """A prime field GF(p) (``characteristic=p``) or the rationals (``0``)."""

    __slots__ = ("characteristic",)

    def __init__(self, characteristic: int = 2):
        if characteristic != 0:
            if not _is_prime(characteristic) or characteristic > _MAX_CHAR:
                raise ValueError(f"GF({characteristic}) is not a supported prime field")
        self.characteristic = characteristic

    @classmethod
    def parse(cls, descriptor: str) -> "Field":
        """Accepts ``q``/``qq``/``rational``, ``gf2``, ``gf7``, ``gf(7)`` ..."""
        d = descriptor.strip().lower()
        if d in ("q", "qq", "rational", "rationals"):
            return cls(0)
        m = re.fullmatch(r"(?:gf|f)\(?(\d+)\)?", d)
        if m is None:
            raise ValueError(f"unknown field descriptor {descriptor!r}")
        return cls(int(m.group(1)))

    @property
    def name(self) -> str:
        return "q" if self.characteristic == 0 else f"gf{self.characteristic}"

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    def __repr__(self) -> str:
        return "Field(Q)" if self.is_rational else f"Field(GF({self.characteristic}))"

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self) -> int:
        return hash(("Field", self.characteristic))

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.is_rational else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.is_rational else 1

    def __call__(self, x) -> Scalar:
        """Coerce an int, Fraction or ``"a/b"`` string into the field."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        elif isinstance(x, float):
            raise TypeError("floating point values are not field elements")
        if self.is_rational:
            return Fraction(x)
        p = self.characteristic
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({p})")
            return (x.numerator * pow(x.denominator, -1, p)) % p
        return int(x) % p

    def reduce(self, x: Scalar) -> Scalar:
        return x if self.is_rational else x % self.characteristic

    def inv(self, x: Scalar) -> Scalar:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational:
            return 1 / Fraction(x)
        return pow(x, -1, self.characteristic)

    def sign(self, exponent: int) -> Scalar:
        """``(-1) ** exponent`` as a field element."""
        return self.one if exponent % 2 == 0 else self.reduce(-self.one)

    def to_json(self, x: Scalar):
        if self.is_rational:
            x = Fraction(x)
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return int(x)


GF2 = Field(2)
QQ = Field(0)


# ---------------------------------------------------------------------------
# elimination kernel


def _rref(rows: list[list[Scalar]], ncols: int, fld: Field) -> list[int]:
    """Row-reduce ``rows`` in place to reduced row echelon form.

    Returns the pivot columns; rows beyond ``len(pivots)`` are zero.
    """
    p = fld.characteristic
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        row = rows[r]
        inv = fld.inv(row[c])
        if inv != 1:
            if p:
                row[:] = [(v * inv) % p for v in row]
            else:
                row[:] = [v * inv for v in row]
        nz = [k for k in range(c, ncols) if row[k] != 0]
        for i in range(nrows):
            if i == r:
                continue
            other = rows[i]
            f = other[c]
            if f == 0:
                continue
            if p:
                for k in nz:
                    other[k] = (other[k] - f * row[k]) % p
            else:
                for k in nz:
                    other[k] = other[k] - f * row[k]
        pivots.append(c)
        r += 1
    return pivots


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense immutable matrix over a :class:`Field`."""

    field: Field
    rows: int
    cols: int
    data: tuple[tuple[Scalar, ...], ...] = dc_field(repr=False)

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("matrix data does not match its declared shape")

    # construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, fld: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(fld(v) for v in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(fld, len(data), cols, data)

    @classmethod
    def from_columns(cls, fld: Field, columns: Sequence[Sequence], rows: int) -> "Matrix":
        columns = [tuple(fld(v) for v in c) for c in columns]
        data = tuple(tuple(c[i] for c in columns) for i in range(rows))
        return cls(fld, rows, len(columns), data)

    @classmethod
    def zeros(cls, fld: Field, rows: int, cols: int) -> "Matrix":
        z = fld.zero
        return cls(fld, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, fld: Field, n: int) -> "Matrix":
        z, o = fld.zero, fld.one
        return cls(fld, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def from_sparse_columns(cls, fld: Field, columns: Sequence[dict[int, Scalar]], rows: int) -> "Matrix":
        z = fld.zero
        data = [[z] * len(columns) for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                data[i][j] = fld.reduce(v)
        return cls(fld, rows, len(columns), tuple(tuple(r) for r in data))

    # access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> Scalar:
        i, j = idx
        return self.data[i][j]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple[Scalar, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def sparse_column(self, j: int) -> dict[int, Scalar]:
        return {i: r[j] for i, r in enumerate(self.data) if r[j] != 0}

    def to_lists(self) -> list[list[Scalar]]:
        return [list(r) for r in self.data]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.data for v in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        return hash((self.field, self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        return f"Matrix({self.field.name}, {self.rows}x{self.cols})"

    # arithmetic -------------------------------------------------------
    def _check(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise ValueError("matrices over different fields")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        red = self.field.reduce
        data = tuple(tuple(red(a + b) for a, b in zip(r, s)) for r, s in zip(self.data, other.data))
        return Matrix(self.field, self.rows, self.cols, data)

    def __neg__(self) -> "Matrix":
        red = self.field.reduce
        return Matrix(self.field, self.rows, self.cols, tuple(tuple(red(-a) for a in r) for r in self.data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        red = self.field.reduce
        return Matrix(self.field, self.rows, self.cols, tuple(tuple(red(c * a) for a in r) for r in self.data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        fld = self.field
        p = fld.characteristic
        z = fld.zero
        ocols = other.cols
        odata = other.data
        out = []
        for row in self.data:
            acc = [z] * ocols
            for k, a in enumerate(row):
                if a == 0:
                    continue
                orow = odata[k]
                for j in range(ocols):
                    b = orow[j]
                    if b != 0:
                        acc[j] += a * b
            if p:
                acc = [v % p for v in acc]
            out.append(tuple(acc))
        return Matrix(fld, self.rows, ocols, tuple(out))

    def apply(self, vec: Sequence[Scalar]) -> tuple[Scalar, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length does not match matrix columns")
        red = self.field.reduce
        return tuple(red(sum((a * v for a, v in zip(r, vec) if a != 0 and v != 0), self.field.zero)) for r in self.data)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("hstack needs equal row counts")
        return Matrix(self.field, self.rows, self.cols + other.cols, tuple(a + b for a, b in zip(self.data, other.data)))

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("vstack needs equal column counts")
        return Matrix(self.field, self.rows + other.rows, self.cols, self.data + other.data)

    def select_rows(self, idx: Iterable[int]) -> "Matrix":
        data = tuple(self.data[i] for i in idx)
        return Matrix(self.field, len(data), self.cols, data)

    def select_columns(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(self.field, self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.data))

    # elimination ------------------------------------------------------
    def rref(self) -> tuple["Matrix", list[int]]:
        rows = self.to_lists()
        piv = _rref(rows, self.cols, self.field)
        return Matrix(self.field, self.rows, self.cols, tuple(tuple(r) for r in rows)), piv

    def rank(self) -> int:
        return len(_rref(self.to_lists(), self.cols, self.field))

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices are invertible")
        n = self.rows
        aug = [list(r) + list(e) for r, e in zip(self.data, Matrix.identity(self.field, n).data)]
        piv = _rref(aug, 2 * n, self.field)
        if piv[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return Matrix(self.field, n, n, tuple(tuple(r[n:]) for r in aug))

    def solve(self, rhs: "Matrix") -> "Matrix":
        """Some X with ``self @ X == rhs``; raises if the system is inconsistent."""
        self._check(rhs)
        if rhs.rows != self.rows:
            raise ValueError("right-hand side has the wrong number of rows")
        n = self.cols
        aug = [list(r) + list(b) for r, b in zip(self.data, rhs.data)]
        piv = _rref(aug, n + rhs.cols, self.field)
        if any(c >= n for c in piv):
            raise ValueError("linear system is inconsistent")
        z = self.field.zero
        out = [[z] * rhs.cols for _ in range(n)]
        for r, c in enumerate(piv):
            out[c] = aug[r][n:]
        return Matrix(self.field, n, rhs.cols, tuple(tuple(r) for r in out))


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``field ** ambient_dim`` in canonical echelon form.

    ``basis`` holds the nonzero rows of the reduced row echelon form of any
    spanning set, i.e. the reduced *column* echelon form of the basis
    matrix.  ``pivots[k]`` is the leading coordinate of ``basis[k]``.
    """

    field: Field
    ambient_dim: int
    basis: tuple[tuple[Scalar, ...], ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, fld: Field, ambient_dim: int, vectors: Iterable[Sequence[Scalar]]) -> "Subspace":
        rows = [[fld.reduce(v) for v in vec] for vec in vectors]
        if any(len(r) != ambient_dim for r in rows):
            raise ValueError("vector length does not match ambient dimension")
        piv = _rref(rows, ambient_dim, fld)
        return cls(fld, ambient_dim, tuple(tuple(r) for r in rows[: len(piv)]), tuple(piv))

    @classmethod
    def zero(cls, fld: Field, ambient_dim: int) -> "Subspace":
        return cls(fld, ambient_dim, (), ())

    @classmethod
    def full(cls, fld: Field, ambient_dim: int) -> "Subspace":
        return cls(fld, ambient_dim, Matrix.identity(fld, ambient_dim).data, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        """Basis vectors as the columns of an ``ambient_dim x dim`` matrix."""
        return Matrix.from_columns(self.field, self.basis, self.ambient_dim)

    def coordinates(self, vec: Sequence[Scalar]) -> tuple[Scalar, ...] | None:
        """Coordinates of ``vec`` in ``basis``, or None when outside the span."""
        coords = tuple(vec[c] for c in self.pivots)
        red = self.field.reduce
        for i in range(self.ambient_dim):
            if red(sum((a * b[i] for a, b in zip(coords, self.basis) if a != 0), self.field.zero)) != red(vec[i]):
                return None
        return coords

    def contains(self, vec: Sequence[Scalar]) -> bool:
        return self.coordinates(vec) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def __le__(self, other: "Subspace") -> bool:
        return other.contains_subspace(self)


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.field != b.field:
        raise ValueError("subspaces over different fields")
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def kernel_basis(m: Matrix) -> Subspace:
    """The null space ``{v : m v = 0}``."""
    rows = m.to_lists()
    piv = _rref(rows, m.cols, m.field)
    pivset = set(piv)
    fld = m.field
    vecs = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [fld.zero] * m.cols
        v[free] = fld.one
        for r, c in enumerate(piv):
            v[c] = fld.reduce(-rows[r][free])
        vecs.append(v)
    return Subspace.span(fld, m.cols, vecs)


def image_basis(m: Matrix) -> Subspace:
    """The column space of ``m``."""
    return Subspace.span(m.field, m.rows, m.columns())


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return Subspace.span(a.field, a.ambient_dim, a.basis + b.basis)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Largest subspace contained in both, via the kernel of ``[A | -B]``."""
    _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.field, a.ambient_dim)
    A = a.matrix()
    block = A.hstack(-b.matrix())
    ker = kernel_basis(block)
    return Subspace.span(a.field, a.ambient_dim, (A.apply(v[: a.dim]) for v in ker.basis))


def intersect_all(subspaces: Iterable[Subspace]) -> Subspace:
    it = iter(subspaces)
    acc = next(it)
    for s in it:
        acc = intersect(acc, s)
    return acc


def preimage(m: Matrix, target: Subspace) -> Subspace:
    """``{v : m v in target}``."""
    if target.ambient_dim != m.rows:
        raise ValueError("target subspace lives in the wrong space")
    if target.dim == 0:
        return kernel_basis(m)
    block = m.hstack(-target.matrix())
    ker = kernel_basis(block)
    return Subspace.span(m.field, m.cols, (v[: m.cols] for v in ker.basis))


def apply_to_subspace(m: Matrix, dom: Subspace) -> Subspace:
    if dom.ambient_dim != m.cols:
        raise ValueError(f"subspace of dimension {dom.ambient_dim} cannot feed a {m.rows}x{m.cols} map")
    return Subspace.span(m.field, m.rows, (m.apply(v) for v in dom.basis))


def restrict_and_project(m: Matrix, dom: Subspace) -> tuple[Subspace, int]:
    """Image of ``m`` restricted to ``dom`` together with its dimension."""
    img = apply_to_subspace(m, dom)
    return img, img.dim


def extend_to_complement(sub: Subspace, candidates: Iterable[Sequence[Scalar]]) -> list[tuple[Scalar, ...]]:
    """Greedily pick candidates independent of ``sub`` and of each other.

    Returns the chosen vectors in candidate order; together with ``sub`` they
    span ``sub + span(candidates)``.
    """
    fld = sub.field
    red = fld.reduce
    # fully reduced rows keyed by pivot: each row vanishes on the other pivots
    reduced: dict[int, list[Scalar]] = {c: list(v) for c, v in zip(sub.pivots, sub.basis)}
    chosen = []
    for cand in candidates:
        cand = tuple(red(x) for x in cand)
        r = list(cand)
        for c, row in reduced.items():
            f = r[c]
            if f != 0:
                r = [red(a - f * b) for a, b in zip(r, row)]
        lead = next((i for i, x in enumerate(r) if x != 0), None)
        if lead is None:
            continue
        inv = fld.inv(r[lead])
        r = [red(x * inv) for x in r]
        for c, row in reduced.items():
            f = row[lead]
            if f != 0:
                reduced[c] = [red(a - f * b) for a, b in zip(row, r)]
        reduced[lead] = r
        chosen.append(cand)
    return chosen


def standard_basis(fld: Field, n: int) -> list[tuple[Scalar, ...]]:
    return [tuple(fld.one if i == j else fld.zero for i in range(n)) for j in range(n)]
