"""A-infinity coalgebras on finite graded vector spaces.

Basis elements are addressed by keys ``(degree, index)``.  An element of
the n-fold tensor power is a dict mapping n-tuples of keys to nonzero
coefficients.  The operation ``delta[n][p]`` is stored as a matrix whose
columns are the basis of degree ``p`` and whose rows follow
:func:`tensor_basis` for total degree ``p + n - 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterator

from .linalg import Field, Matrix, Scalar

Key = tuple[int, int]
Tensor = dict[tuple[Key, ...], Scalar]


def tensor_basis(dims: dict[int, int], n: int, total: int) -> list[tuple[Key, ...]]:
    """All n-tuples of basis keys with degrees summing to ``total``.

    Ordered lexicographically on the tuple of ``(degree, index)`` pairs.
    """
    degrees = sorted(d for d, k in dims.items() if k > 0)
    if n == 0:
        return [()] if total == 0 else []
    if not degrees:
        return []
    lo, hi = degrees[0], degrees[-1]
    out: list[tuple[Key, ...]] = []

    def rec(prefix: tuple[Key, ...], remaining: int, slots: int) -> None:
        if slots == 0:
            if remaining == 0:
                out.append(prefix)
            return
        for d in degrees:
            rest = remaining - d
            if rest < lo * (slots - 1) or rest > hi * (slots - 1):
                continue
            for i in range(dims[d]):
                rec(prefix + ((d, i),), rest, slots - 1)

    rec((), total, n)
    return out


def add_into(acc: Tensor, other: Tensor, coeff: Scalar, fld: Field) -> None:
    """``acc += coeff * other`` in place, dropping zero coefficients."""
    if coeff == 0:
        return
    red = fld.reduce
    for k, v in other.items():
        nv = red(acc.get(k, 0) + coeff * v)
        if nv == 0:
            acc.pop(k, None)
        else:
            acc[k] = nv


def tensor_degree(keys: tuple[Key, ...]) -> int:
    return sum(k[0] for k in keys)


# ---------------------------------------------------------------------------
# suspension signs


def desuspension_sign(degrees: tuple[int, ...]) -> int:
    """Exponent of the sign of ``(s^-1)^{⊗n}`` on ``y_1 ⊗ ... ⊗ y_n``.

    The factors act left to right, so the a-th copy of ``s^-1`` passes the
    already desuspended prefix: Σ_a (n - a)(|y_a| - 1).
    """
    n = len(degrees)
    return sum((n - a) * (d - 1) for a, d in enumerate(degrees, 1))


def suspension_sign(degrees: tuple[int, ...]) -> int:
    """Exponent of the sign of ``s^{⊗n}`` on ``s^-1 y_1 ⊗ ... ⊗ s^-1 y_n``.

    ``degrees`` are the unshifted degrees ``|y_a|``; the a-th copy of ``s``
    passes the already suspended prefix: Σ_a (n - a)|y_a|.
    """
    n = len(degrees)
    return sum((n - a) * d for a, d in enumerate(degrees, 1))


def delta_to_cobar(n: int, value: Tensor, fld: Field) -> Tensor:
    """``d_n(s^-1 x) = -(-1)^{n(n-1)/2} (s^-1)^{⊗n} Δ_n(x)``; keys are kept."""
    base = 1 + n * (n - 1) // 2
    out = {}
    for keys, c in value.items():
        e = base + desuspension_sign(tuple(k[0] for k in keys))
        out[keys] = fld.reduce(fld.sign(e) * c)
    return out


def cobar_to_delta(n: int, value: Tensor, fld: Field) -> Tensor:
    """``Δ_n(x) = -s^{⊗n} d_n(s^-1 x)``; keys are kept."""
    out = {}
    for keys, c in value.items():
        e = 1 + suspension_sign(tuple(k[0] for k in keys))
        out[keys] = fld.reduce(fld.sign(e) * c)
    return out


# ---------------------------------------------------------------------------
# the structure


@dataclass
class AInftyCoalgebra:
    """Graded space with operations Δ_n of degree n - 2.

    ``dims`` lists the (reduced) homology dimensions per degree.  Missing
    ``delta[n][p]`` entries are zero maps.  ``delta[1]`` is always zero.
    """

    field: Field
    dims: dict[int, int]
    delta: dict[int, dict[int, Matrix]] = dc_field(default_factory=dict)
    labels: dict[int, list[str]] = dc_field(default_factory=dict)
    n_max: int = 4

    def __post_init__(self):
        self.dims = {int(d): int(k) for d, k in self.dims.items() if k > 0}
        for d, k in self.dims.items():
            self.labels.setdefault(d, [f"h{d}_{i}" for i in range(k)])
        self._basis_cache: dict[tuple[int, int], list[tuple[Key, ...]]] = {}
        self._row_cache: dict[tuple[int, int], dict[tuple[Key, ...], int]] = {}
        self._col_cache: dict[tuple[int, int, int], Tensor] = {}

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def keys(self, p: int) -> list[Key]:
        return [(p, i) for i in range(self.dim(p))]

    def target_basis(self, n: int, p: int) -> list[tuple[Key, ...]]:
        key = (n, p)
        if key not in self._basis_cache:
            self._basis_cache[key] = tensor_basis(self.dims, n, p + n - 2)
        return self._basis_cache[key]

    def target_index(self, n: int, p: int) -> dict[tuple[Key, ...], int]:
        key = (n, p)
        if key not in self._row_cache:
            self._row_cache[key] = {t: i for i, t in enumerate(self.target_basis(n, p))}
        return self._row_cache[key]

    def has_delta(self, n: int) -> bool:
        return n == 1 or n in self.delta or n <= self.n_max

    def delta_matrix(self, n: int, p: int) -> Matrix:
        """Δ_n restricted to degree p; zero when nothing is stored."""
        m = self.delta.get(n, {}).get(p)
        if m is not None:
            return m
        return Matrix.zeros(self.field, len(self.target_basis(n, p)), self.dim(p))

    def apply(self, n: int, key: Key) -> Tensor:
        """Δ_n of a single basis element as a sparse tensor."""
        ck = (n, key[0], key[1])
        if ck not in self._col_cache:
            m = self.delta.get(n, {}).get(key[0])
            if m is None or n == 1:
                self._col_cache[ck] = {}
            else:
                basis = self.target_basis(n, key[0])
                self._col_cache[ck] = {basis[i]: v for i, v in m.sparse_column(key[1]).items()}
        return self._col_cache[ck]

    def apply_vector(self, n: int, p: int, vec) -> Tensor:
        out: Tensor = {}
        for i, c in enumerate(vec):
            if c != 0:
                add_into(out, self.apply(n, (p, i)), c, self.field)
        return out

    def set_delta_from_tensors(self, n: int, p: int, columns: list[Tensor]) -> None:
        rows = self.target_index(n, p)
        sparse = [{rows[k]: v for k, v in col.items()} for col in columns]
        self.delta.setdefault(n, {})[p] = Matrix.from_sparse_columns(self.field, sparse, len(rows))
        self._col_cache = {k: v for k, v in self._col_cache.items() if k[:2] != (n, p)}

    def with_delta(self, n: int, p: int, m: Matrix) -> "AInftyCoalgebra":
        """Copy with one operation replaced (used for mutation tests)."""
        delta = {k: dict(v) for k, v in self.delta.items()}
        delta.setdefault(n, {})[p] = m
        return AInftyCoalgebra(self.field, dict(self.dims), delta,
                               {d: list(v) for d, v in self.labels.items()}, self.n_max)


# ---------------------------------------------------------------------------
# coassociativity identities


@dataclass(frozen=True)
class IdentityCheck:
    ok: bool
    n: int
    witness: tuple[Key, Tensor] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _insert(ac: AInftyCoalgebra, i: int, pos: int, value: Tensor, sign_fn, out: Tensor) -> None:
    """Apply Δ_i at tensor slot ``pos`` of ``value`` and accumulate into ``out``."""
    fld = ac.field
    red = fld.reduce
    for keys, c in value.items():
        inner = ac.apply(i, keys[pos])
        if not inner:
            continue
        s = fld.sign(sign_fn(keys[:pos]))
        pre, post = keys[:pos], keys[pos + 1:]
        for ik, iv in inner.items():
            k = pre + ik + post
            nv = red(out.get(k, 0) + s * c * iv)
            if nv == 0:
                out.pop(k, None)
            else:
                out[k] = nv


def stasheff_terms(ac: AInftyCoalgebra, n: int, key: Key) -> Tensor:
    """Left-hand side of the n-th coassociativity identity evaluated on ``key``.

    Σ_{i=1}^{n} Σ_{k=0}^{n-i} (-1)^{i+k+ik} (1^{⊗n-i-k} ⊗ Δ_i ⊗ 1^{⊗k}) Δ_{n-i+1}
    """
    out: Tensor = {}
    for i in range(1, n + 1):
        outer = n - i + 1
        if not (ac.has_delta(i) and ac.has_delta(outer)):
            continue
        if i == 1 or outer == 1:
            continue  # Δ_1 = 0 on homology
        first = ac.apply(outer, key)
        if not first:
            continue
        for k in range(n - i + 1):
            pos = n - i - k
            sgn = (i + k + i * k) % 2
            partial: Tensor = {}
            _insert(ac, i, pos, first, lambda pre, i=i: (i - 2) * sum(x[0] for x in pre), partial)
            if sgn:
                partial = {t: ac.field.reduce(-v) for t, v in partial.items()}
            for t, v in partial.items():
                nv = ac.field.reduce(out.get(t, 0) + v)
                if nv == 0:
                    out.pop(t, None)
                else:
                    out[t] = nv
    return out


def stasheff_check(ac: AInftyCoalgebra, n: int) -> IdentityCheck:
    """Evaluate the n-th identity on every basis element; report the first failure."""
    for p in ac.degrees:
        for key in ac.keys(p):
            val = stasheff_terms(ac, n, key)
            if val:
                return IdentityCheck(False, n, (key, val))
    return IdentityCheck(True, n)


def cobar_square_terms(ac: AInftyCoalgebra, n: int, key: Key) -> Tensor:
    """Length-n component of d² on s^-1(key) in the complete tensor algebra.

    Works on the cobar side: each d_j is derived from Δ_j through the
    suspension signs and extended as a derivation of degree -1.
    """
    fld = ac.field
    out: Tensor = {}
    for i in range(2, n):
        j = n - i + 1
        if j < 2 or not (ac.has_delta(i) and ac.has_delta(j)):
            continue
        first = delta_to_cobar(j, ac.apply(j, key), fld)
        for pos in range(j):
            for keys, c in first.items():
                inner = delta_to_cobar(i, ac.apply(i, keys[pos]), fld)
                if not inner:
                    continue
                s = fld.sign(sum(x[0] - 1 for x in keys[:pos]))
                for ik, iv in inner.items():
                    k = keys[:pos] + ik + keys[pos + 1:]
                    nv = fld.reduce(out.get(k, 0) + s * c * iv)
                    if nv == 0:
                        out.pop(k, None)
                    else:
                        out[k] = nv
    return out


def cobar_square_check(ac: AInftyCoalgebra, n: int) -> IdentityCheck:
    for p in ac.degrees:
        for key in ac.keys(p):
            val = cobar_square_terms(ac, n, key)
            if val:
                return IdentityCheck(False, n, (key, val))
    return IdentityCheck(True, n)


def tensor_differential_roundtrip(ac: AInftyCoalgebra, n: int) -> bool:
    """Δ_n -> d_n -> Δ_n through the suspension formulas is the identity."""
    for p in ac.degrees:
        for key in ac.keys(p):
            value = ac.apply(n, key)
            back = cobar_to_delta(n, delta_to_cobar(n, value, ac.field), ac.field)
            if back != value:
                return False
    return True


def iter_nonzero_deltas(ac: AInftyCoalgebra) -> Iterator[tuple[int, int, Matrix]]:
    for n in sorted(ac.delta):
        for p in sorted(ac.delta[n]):
            m = ac.delta[n][p]
            if not m.is_zero():
                yield n, p, m
