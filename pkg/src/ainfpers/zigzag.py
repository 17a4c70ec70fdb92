"""Finite zigzag modules and their interval decomposition.

Positions are numbered ``1..r``.  The decomposition sweeps left to right,
keeping one vector per open interval at the current position.  When a
relation forces a basis change, an interval may only absorb intervals that
are *stronger* than it; with that restriction every earlier arrow keeps the
form of a partial identity, so the final vectors form a certificate.

Strength: an interval entering through a forward arrow (or at position 1)
is weaker than one entering through a backward arrow; among forward-born
intervals the younger is weaker, among backward-born ones the older.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Any, Sequence

from .linalg import (Field, Matrix, Scalar, Subspace, extend_to_complement, image_basis, kernel_basis,
                     standard_basis)

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Arrow:
    """``forward``: U_k -> U_{k+1}; ``backward``: U_{k+1} -> U_k."""

    orientation: str
    matrix: Matrix

    def __post_init__(self):
        if self.orientation not in (FORWARD, BACKWARD):
            raise ValueError(f"unknown orientation {self.orientation!r}")


@dataclass
class ZigzagModule:
    field: Field
    dims: list[int]
    arrows: list[Arrow]
    bases: list[list[tuple[Scalar, ...]]] | None = None
    names: list[str] | None = None

    def __post_init__(self):
        if not self.dims:
            raise ValueError("a zigzag module needs at least one space")
        if len(self.arrows) != len(self.dims) - 1:
            raise ValueError(f"{len(self.dims)} spaces need {len(self.dims) - 1} arrows, got {len(self.arrows)}")
        for k, a in enumerate(self.arrows):
            src, dst = self.dims[k], self.dims[k + 1]
            want = (dst, src) if a.orientation == FORWARD else (src, dst)
            if a.matrix.shape != want:
                raise ValueError(f"arrow {k + 1} ({a.orientation}) has shape {a.matrix.shape}, expected {want}")

    @property
    def length(self) -> int:
        return len(self.dims)

    def dim(self, k: int) -> int:
        """Dimension at the 1-based position k."""
        return self.dims[k - 1]

    def arrow(self, k: int) -> Arrow:
        """The arrow between positions k and k + 1."""
        return self.arrows[k - 1]

    @classmethod
    def from_lists(cls, fld: Field, dims: Sequence[int], arrows: Sequence[tuple[str, Sequence[Sequence]]]):
        built = []
        for k, (orient, rows) in enumerate(arrows):
            src, dst = dims[k], dims[k + 1]
            r, c = (dst, src) if orient == FORWARD else (src, dst)
            m = Matrix.zeros(fld, r, c) if r == 0 or c == 0 else Matrix.from_rows(fld, rows, cols=c)
            built.append(Arrow(orient, m))
        return cls(fld, list(dims), built)


@dataclass(frozen=True, order=True)
class Interval:
    birth: int
    death: int

    def __post_init__(self):
        if not 1 <= self.birth <= self.death:
            raise ValueError(f"invalid interval [{self.birth}, {self.death}]")

    def __contains__(self, k: int) -> bool:
        return self.birth <= k <= self.death

    def __str__(self) -> str:
        return f"[{self.birth},{self.death}]"


@dataclass
class Decomposition:
    """Intervals plus, per position, the basis realising the isomorphism.

    ``certificate[k-1]`` has one column per interval alive at k, in the order
    of ``intervals``.
    """

    intervals: list[Interval]
    certificate: list[Matrix]

    def multiset(self) -> Counter:
        return Counter((iv.birth, iv.death) for iv in self.intervals)

    def alive(self, k: int) -> list[int]:
        return [t for t, iv in enumerate(self.intervals) if k in iv]


# ---------------------------------------------------------------------------
# the algorithm


class _Reducer:
    """Incremental echelon form that remembers how each row was obtained."""

    def __init__(self, fld: Field):
        self.fld = fld
        self.rows: dict[int, tuple[list[Scalar], dict[int, Scalar]]] = {}

    def reduce(self, vec: Sequence[Scalar], combo: dict[int, Scalar]) -> tuple[list[Scalar], dict[int, Scalar]]:
        red = self.fld.reduce
        v = list(vec)
        combo = dict(combo)
        for i in range(len(v)):
            if v[i] == 0 or i not in self.rows:
                continue
            row, rc = self.rows[i]
            c = v[i]
            v = [red(a - c * b) for a, b in zip(v, row)]
            for t, x in rc.items():
                combo[t] = red(combo.get(t, 0) - c * x)
        return v, {t: x for t, x in combo.items() if x != 0}

    def add(self, vec: list[Scalar], combo: dict[int, Scalar]) -> None:
        lead = next(i for i, x in enumerate(vec) if x != 0)
        inv = self.fld.inv(vec[lead])
        red = self.fld.reduce
        self.rows[lead] = ([red(x * inv) for x in vec], {t: red(x * inv) for t, x in combo.items()})


@dataclass
class _Track:
    birth: int
    kind: str  # "F" or "B"
    vectors: dict[int, list[Scalar]] = dc_field(default_factory=dict)
    death: int | None = None

    def strength(self, uid: int) -> tuple:
        # smaller is weaker; uid breaks ties deterministically
        return (0, -self.birth, -uid) if self.kind == "F" else (1, self.birth, -uid)


def decompose(z: ZigzagModule) -> Decomposition:
    fld = z.field
    red = fld.reduce
    tracks: list[_Track] = []
    active: list[int] = []

    def absorb(t: int, combo: dict[int, Scalar], k: int) -> None:
        # z_t += Σ c_s z_s on every position where both are alive
        for s, c in combo.items():
            if s == t or c == 0:
                continue
            lo = max(tracks[t].birth, tracks[s].birth)
            for m in range(lo, k + 1):
                zt, zs = tracks[t].vectors[m], tracks[s].vectors[m]
                tracks[t].vectors[m] = [red(a + c * b) for a, b in zip(zt, zs)]

    def open_tracks(k: int, kind: str, vectors) -> None:
        for v in vectors:
            tracks.append(_Track(k, kind, {k: list(v)}))
            active.append(len(tracks) - 1)

    open_tracks(1, "F", standard_basis(fld, z.dim(1)))
    for k in range(1, z.length):
        arrow = z.arrow(k)
        order = sorted(active, key=lambda t: tracks[t].strength(t), reverse=True)  # strongest first
        if arrow.orientation == FORWARD:
            A = arrow.matrix
            reducer = _Reducer(fld)
            survivors = []
            for t in order:
                img = list(A.apply(tracks[t].vectors[k]))
                v, combo = reducer.reduce(img, {t: fld.one})
                if all(x == 0 for x in v):
                    absorb(t, combo, k)
                    tracks[t].death = k
                else:
                    reducer.add(v, combo)
                    survivors.append(t)
            for t in survivors:
                tracks[t].vectors[k + 1] = list(A.apply(tracks[t].vectors[k]))
            active[:] = [t for t in active if tracks[t].death is None]
            span = Subspace.span(fld, z.dim(k + 1), [tracks[t].vectors[k + 1] for t in survivors])
            open_tracks(k + 1, "F", extend_to_complement(span, standard_basis(fld, z.dim(k + 1))))
        else:
            g = arrow.matrix
            reducer = _Reducer(fld)
            img = image_basis(g)
            for v in img.basis:
                reducer.add(list(v), {})
            continuing = []
            for t in order:
                v, combo = reducer.reduce(tracks[t].vectors[k], {t: fld.one})
                if all(x == 0 for x in v):
                    absorb(t, combo, k)
                    continuing.append(t)
                else:
                    reducer.add(v, combo)
                    tracks[t].death = k
            if continuing:
                rhs = Matrix.from_columns(fld, [tracks[t].vectors[k] for t in continuing], z.dim(k))
                pre = g.solve(rhs)
                for idx, t in enumerate(continuing):
                    tracks[t].vectors[k + 1] = list(pre.column(idx))
            active[:] = [t for t in active if tracks[t].death is None]
            open_tracks(k + 1, "B", kernel_basis(g).basis)
    for t in active:
        tracks[t].death = z.length

    order = sorted(range(len(tracks)), key=lambda t: (tracks[t].birth, tracks[t].death, t))
    intervals = [Interval(tracks[t].birth, tracks[t].death) for t in order]
    certificate = []
    for k in range(1, z.length + 1):
        cols = [tracks[t].vectors[k] for t in order if tracks[t].birth <= k <= tracks[t].death]
        certificate.append(Matrix.from_columns(fld, cols, z.dim(k)))
    return Decomposition(intervals, certificate)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    message: str = ""
    position: int | None = None
    square: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_decomposition(z: ZigzagModule, d: Decomposition) -> ValidationResult:
    """Check the certificate: invertible bases in which every arrow is a partial identity.

    ``square`` in a failure names the arrow between positions k and k + 1.
    """
    fld = z.field
    if len(d.certificate) != z.length:
        return ValidationResult(False, "certificate length differs from the module length")
    for k in range(1, z.length + 1):
        alive = d.alive(k)
        if len(alive) != z.dim(k):
            return ValidationResult(False, f"{len(alive)} intervals alive at position {k}, dimension {z.dim(k)}", k)
        c = d.certificate[k - 1]
        if c.shape != (z.dim(k), len(alive)):
            return ValidationResult(False, f"certificate at position {k} has shape {c.shape}", k)
        if c.rank() != z.dim(k):
            return ValidationResult(False, f"certificate at position {k} is singular", k)
    for k in range(1, z.length):
        arrow = z.arrow(k)
        src_k, dst_k = (k, k + 1) if arrow.orientation == FORWARD else (k + 1, k)
        src_alive, dst_alive = d.alive(src_k), d.alive(dst_k)
        src_c, dst_c = d.certificate[src_k - 1], d.certificate[dst_k - 1]
        dst_pos = {t: i for i, t in enumerate(dst_alive)}
        for i, t in enumerate(src_alive):
            image = arrow.matrix.apply(src_c.column(i))
            if t in dst_pos:
                expected = dst_c.column(dst_pos[t])
            else:
                expected = (fld.zero,) * len(image)
            if tuple(image) != tuple(expected):
                return ValidationResult(False, f"square {k} does not commute for interval {d.intervals[t]}",
                                        square=k)
    return ValidationResult(True)


def check_dimension_accounting(z: ZigzagModule, intervals: Sequence[Interval]) -> bool:
    return all(sum(1 for iv in intervals if k in iv) == z.dim(k) for k in range(1, z.length + 1))


# ---------------------------------------------------------------------------
# barcodes of the V/W zigzag


@dataclass(frozen=True, order=True)
class Bar:
    birth: int
    death: int

    def to_json(self) -> dict[str, int]:
        return {"birth": self.birth, "death": self.death}


@dataclass
class Barcode:
    """Bars in filtration steps; ``[a, b]`` is alive at every step a..b."""

    n: int
    degree: int
    bars: list[Bar]
    n_steps: int = 0
    decomposition: Decomposition | None = dc_field(default=None, repr=False, compare=False)
    zigzag: ZigzagModule | None = dc_field(default=None, repr=False, compare=False)

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "degree": self.degree, "bars": [b.to_json() for b in self.bars]}


def interval_to_bar(iv: Interval) -> Bar:
    """V_i sits at position 2i + 1 and W_i at 2i + 2."""
    if iv.birth % 2 == 0:
        raise AssertionError(f"interval {iv} is born at a W-position")
    return Bar((iv.birth - 1) // 2, (iv.death - 1) // 2)


def barcode(af, n: int, p: int) -> Barcode:
    """Δ_n-barcode of ``af`` in degree p."""
    from .persistence import build_vw_zigzag

    if n > af.n_max:
        raise ValueError(f"n = {n} exceeds n_max = {af.n_max}")
    z = build_vw_zigzag(af, n, p)
    d = decompose(z)
    bars = sorted(interval_to_bar(iv) for iv in d.intervals)
    return Barcode(n, p, bars, af.N + 1, d, z)


def bar_count(bc: Barcode, i: int, j: int) -> int:
    """Number of bars containing ``[i, j]``."""
    if i > j:
        raise ValueError("need i <= j")
    return sum(1 for b in bc.bars if b.birth <= i and j <= b.death)


# ---------------------------------------------------------------------------
# JSON fixtures


def load_zigzag(text: str | dict) -> tuple[ZigzagModule, list[Interval] | None]:
    """``{"field", "dims", "arrows": [{"orientation", "matrix"}], "expected"?}``."""
    doc = json.loads(text) if isinstance(text, str) else text
    fld = Field.parse(str(doc.get("field", "gf2")))
    dims = [int(x) for x in doc["dims"]]
    arrows = [(a["orientation"], a["matrix"]) for a in doc["arrows"]]
    z = ZigzagModule.from_lists(fld, dims, arrows)
    expected = doc.get("expected")
    if expected is not None:
        expected = sorted(Interval(int(a), int(b)) for a, b in expected)
    return z, expected


def zigzag_to_json(z: ZigzagModule) -> dict[str, Any]:
    fld = z.field
    return {
        "field": fld.name.lower(),
        "dims": list(z.dims),
        "arrows": [{"orientation": a.orientation,
                    "matrix": [[fld.to_json(v) for v in r] for r in a.matrix.to_lists()]} for a in z.arrows],
    }
