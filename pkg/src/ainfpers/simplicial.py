"""Filtered simplicial complexes and their chain-level structure.

A filtration is stored as the step at which each simplex first appears.
Within a step, the q-simplices are ordered by (appearance step, vertex
tuple); that order fixes every basis used downstream, so inclusion maps
are an identity block followed by zero rows for the newcomers.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .linalg import Field, Matrix

Simplex = tuple[int, ...]


class FiltrationError(ValueError):
    """Malformed or inconsistent filtration input."""


def faces(s: Simplex) -> list[Simplex]:
    """Codimension-one faces, in the order of the omitted vertex."""
    if len(s) == 1:
        return []
    return [s[:r] + s[r + 1:] for r in range(len(s))]


def all_faces(s: Simplex) -> Iterable[Simplex]:
    for k in range(1, len(s) + 1):
        yield from combinations(s, k)


def aw_terms(s: Simplex) -> list[tuple[Simplex, Simplex]]:
    """Front/back face pairs of the Alexander-Whitney diagonal."""
    return [(s[: r + 1], s[r:]) for r in range(len(s))]


@dataclass(frozen=True)
class FilteredComplex:
    """K_0 ⊆ K_1 ⊆ ... ⊆ K_N, stored as first-appearance steps."""

    birth: dict[Simplex, int] = dc_field(hash=False)
    n_steps: int = 1
    step_labels: tuple[int, ...] = ()

    @property
    def N(self) -> int:
        return self.n_steps - 1

    @cached_property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.birth), default=-1)

    @cached_property
    def _ordered(self) -> list[Simplex]:
        return sorted(self.birth, key=lambda s: (self.birth[s], len(s), s))

    def simplices(self, step: int, q: int) -> list[Simplex]:
        """Ordered basis of C_q(K_step)."""
        self._check_step(step)
        return self._basis(step, q)

    def _basis(self, step: int, q: int) -> list[Simplex]:
        cache = self.__dict__.setdefault("_basis_cache", {})
        key = (step, q)
        if key not in cache:
            cache[key] = [s for s in self._ordered if len(s) == q + 1 and self.birth[s] <= step]
        return cache[key]

    def index(self, step: int, q: int) -> dict[Simplex, int]:
        cache = self.__dict__.setdefault("_index_cache", {})
        key = (step, q)
        if key not in cache:
            cache[key] = {s: i for i, s in enumerate(self.simplices(step, q))}
        return cache[key]

    def counts(self, step: int) -> list[int]:
        return [len(self.simplices(step, q)) for q in range(self.dimension + 1)]

    def _check_step(self, step: int) -> None:
        if not 0 <= step < self.n_steps:
            raise IndexError(f"step {step} outside 0..{self.N}")

    def is_connected(self, step: int) -> bool:
        verts = self.simplices(step, 0)
        if not verts:
            return False
        parent = {v[0]: v[0] for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.simplices(step, 1):
            parent[find(a)] = find(b)
        return len({find(v[0]) for v in verts}) == 1


# ---------------------------------------------------------------------------
# parsing


def from_simplices(steps: dict[Simplex, int], *, autoclose: bool = False, strict: bool = True,
                   labels: tuple[int, ...] | None = None) -> FilteredComplex:
    """Validate a ``simplex -> step`` assignment and build the filtration.

    Steps are assumed already re-indexed to ``0..N``.
    """
    birth = dict(steps)
    if not birth:
        raise FiltrationError("empty filtration")
    if autoclose:
        # walk top-down so faces inherit the earliest cofacet step
        top = max(len(s) for s in birth)
        for size in range(top, 1, -1):
            for s in [s for s in birth if len(s) == size]:
                for f in faces(s):
                    if f not in birth or birth[f] > birth[s]:
                        birth[f] = birth[s]
    else:
        for s, t in birth.items():
            for f in faces(s):
                if f not in birth:
                    raise FiltrationError(f"step {t} is not closed: face {list(f)} of {list(s)} is missing")
                if birth[f] > t:
                    raise FiltrationError(
                        f"non-monotone filtration: face {list(f)} appears at step {birth[f]} "
                        f"after its cofacet {list(s)} at step {t}")
    n_steps = max(birth.values()) + 1
    fc = FilteredComplex(birth, n_steps, labels if labels is not None else tuple(range(n_steps)))
    for i in range(n_steps):
        if not fc.simplices(i, 0):
            raise FiltrationError(f"step {i} has no vertices")
        if strict and not fc.is_connected(i):
            raise FiltrationError(f"step {i} is disconnected (use non-strict mode to allow it)")
    return fc


def parse_filtration(text: str, *, autoclose: bool = False, strict: bool = True) -> FilteredComplex:
    """Parse ``<step>: v0 v1 ... vk`` lines; ``#`` starts a comment.

    Step labels are arbitrary integers, re-indexed to ``0..N`` in increasing
    order.  A simplex listed more than once keeps its earliest step.
    """
    raw: dict[Simplex, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise FiltrationError(f"line {lineno}: expected '<step>: v0 v1 ...'")
        try:
            step = int(head)
            verts = [int(tok) for tok in tail.split()]
        except ValueError:
            raise FiltrationError(f"line {lineno}: non-integer token in {line!r}") from None
        if not verts:
            raise FiltrationError(f"line {lineno}: simplex without vertices")
        if any(v < 0 for v in verts):
            raise FiltrationError(f"line {lineno}: vertex ids must be non-negative")
        s = tuple(sorted(verts))
        if len(set(s)) != len(s):
            raise FiltrationError(f"line {lineno}: repeated vertex in {verts}")
        raw[s] = min(step, raw.get(s, step))
    if not raw:
        raise FiltrationError("no simplices in input")
    labels = tuple(sorted(set(raw.values())))
    reindex = {lab: i for i, lab in enumerate(labels)}
    return from_simplices({s: reindex[t] for s, t in raw.items()},
                          autoclose=autoclose, strict=strict, labels=labels)


def read_filtration(path, **kw) -> FilteredComplex:
    with open(path, encoding="utf-8") as fh:
        return parse_filtration(fh.read(), **kw)


def format_filtration(fc: FilteredComplex) -> str:
    lines = [f"{fc.birth[s]}: {' '.join(map(str, s))}" for s in fc._ordered]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# chain-level operators


def boundary_matrix(fc: FilteredComplex, step: int, q: int, fld: Field) -> Matrix:
    """∂_q : C_q(K_step) -> C_{q-1}(K_step)."""
    cols = fc.simplices(step, q) if q >= 0 else []
    if q <= 0:
        return Matrix.zeros(fld, 0, len(cols))
    rows = fc.index(step, q - 1)
    sparse = []
    for s in cols:
        col = {}
        for r, f in enumerate(faces(s)):
            col[rows[f]] = fld.sign(r)
        sparse.append(col)
    return Matrix.from_sparse_columns(fld, sparse, len(rows))


def augmentation(fc: FilteredComplex, step: int, fld: Field) -> Matrix:
    n = len(fc.simplices(step, 0))
    return Matrix.from_rows(fld, [[1] * n], cols=n)


def tensor_pairs(fc: FilteredComplex, step: int, q: int) -> list[tuple[Simplex, Simplex]]:
    """Ordered basis of ⊕_{a+b=q} C_a ⊗ C_b."""
    out = []
    for a in range(q + 1):
        left = fc.simplices(step, a)
        right = fc.simplices(step, q - a)
        out.extend((x, y) for x in left for y in right)
    return out


def aw_coproduct(fc: FilteredComplex, step: int, q: int, fld: Field) -> Matrix:
    """Alexander-Whitney diagonal C_q -> ⊕_{a+b=q} C_a ⊗ C_b as a matrix.

    Rows follow :func:`tensor_pairs`.
    """
    rows = {pair: i for i, pair in enumerate(tensor_pairs(fc, step, q))}
    cols = [{rows[pair]: fld.one for pair in aw_terms(s)} for s in fc.simplices(step, q)]
    return Matrix.from_sparse_columns(fld, cols, len(rows))


def inclusion_chain_map(fc: FilteredComplex, i: int, j: int, q: int, fld: Field) -> Matrix:
    """Matrix of C_q(K_i) -> C_q(K_j) induced by the inclusion."""
    if i > j:
        raise ValueError(f"inclusion K_{i} -> K_{j} needs i <= j")
    target = fc.index(j, q)
    cols = [{target[s]: fld.one} for s in fc.simplices(i, q)]
    return Matrix.from_sparse_columns(fld, cols, len(target))


@dataclass(frozen=True)
class ChainComplex:
    """Chain data of a single step: bases and boundary matrices."""

    field: Field
    bases: dict[int, list[Simplex]]
    boundary: dict[int, Matrix]

    @property
    def top(self) -> int:
        return max(self.bases, default=-1)

    def dim(self, q: int) -> int:
        return len(self.bases.get(q, ()))

    def d(self, q: int) -> Matrix:
        """∂_q, including the zero maps at the ends of the complex."""
        if q in self.boundary:
            return self.boundary[q]
        return Matrix.zeros(self.field, self.dim(q - 1), self.dim(q))


def chain_complex(fc: FilteredComplex, step: int, fld: Field) -> ChainComplex:
    bases = {q: fc.simplices(step, q) for q in range(fc.dimension + 1)}
    bases = {q: b for q, b in bases.items() if b}
    bd = {q: boundary_matrix(fc, step, q, fld) for q in bases}
    return ChainComplex(fld, bases, bd)
