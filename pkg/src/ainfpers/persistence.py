"""Δ_n-persistence of a filtration of A-infinity coalgebras.

An :class:`AInftyFiltration` is a chain of (reduced) homologies, each with
its operations Δ_n, joined by the linear maps induced in homology.  It
comes either from a simplicial filtration through homotopy transfer or
from a JSON description.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Any, Sequence

from .coalgebra import AInftyCoalgebra
from .linalg import Field, Matrix, Scalar, Subspace, apply_to_subspace, intersect, intersect_all, kernel_basis
from .simplicial import FilteredComplex
from .transfer import InvariantError, TransferredFiltration, transfer_filtration
from .zigzag import BACKWARD, FORWARD, Arrow, ZigzagModule


class SchemaError(ValueError):
    """Abstract filtration input that does not follow the JSON schema."""


@dataclass
class AInftyFiltration:
    """``H(K_0) -> H(K_1) -> ... -> H(K_N)`` with an A-infinity structure per step.

    ``maps[i][p]`` is the matrix of ``f^{i,i+1}_p``; a missing degree means
    the zero map.
    """

    field: Field
    steps: list[AInftyCoalgebra]
    maps: list[dict[int, Matrix]]
    provenance: str = "abstract"
    source: TransferredFiltration | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        if not self.steps:
            raise SchemaError("a filtration needs at least one step")
        if len(self.maps) != len(self.steps) - 1:
            raise SchemaError(f"{len(self.steps)} steps need {len(self.steps) - 1} maps, got {len(self.maps)}")
        for i, step_maps in enumerate(self.maps):
            for p, m in step_maps.items():
                want = (self.dim(i + 1, p), self.dim(i, p))
                if m.shape != want:
                    raise SchemaError(f"map {i}->{i + 1} in degree {p} has shape {m.shape}, expected {want}")
        self._composite: dict[tuple[int, int, int], Matrix] = {}

    @property
    def N(self) -> int:
        return len(self.steps) - 1

    @property
    def n_max(self) -> int:
        return min(s.n_max for s in self.steps)

    def degrees(self) -> list[int]:
        return sorted({p for s in self.steps for p in s.dims})

    def dim(self, i: int, p: int) -> int:
        return self.steps[i].dim(p)

    def _check_range(self, i: int, j: int) -> None:
        if not 0 <= i <= j <= self.N:
            raise IndexError(f"need 0 <= i <= j <= {self.N}, got i={i}, j={j}")

    def step_map(self, i: int, p: int) -> Matrix:
        m = self.maps[i].get(p)
        if m is None:
            m = Matrix.zeros(self.field, self.dim(i + 1, p), self.dim(i, p))
        return m

    def f(self, i: int, j: int, p: int) -> Matrix:
        """Composite ``f^{i,j}_p``; the identity when ``i == j``."""
        self._check_range(i, j)
        key = (i, j, p)
        if key not in self._composite:
            if i == j:
                m = Matrix.identity(self.field, self.dim(i, p))
            else:
                m = self.step_map(j - 1, p) @ self.f(i, j - 1, p)
            self._composite[key] = m
        return self._composite[key]

    def delta(self, i: int, n: int, p: int) -> Matrix:
        """Δ_n on degree p of step i; Δ_1 is the zero map."""
        if n < 1:
            raise ValueError("n must be at least 1")
        ac = self.steps[i]
        if n > 1 and not ac.has_delta(n):
            raise ValueError(f"Δ_{n} was not computed (n_max = {ac.n_max})")
        if n == 1:
            return Matrix.zeros(self.field, 0, ac.dim(p))
        return ac.delta_matrix(n, p)

    def kernel(self, i: int, n: int, p: int) -> Subspace:
        return kernel_basis(self.delta(i, n, p))

    def label(self, i: int, p: int, k: int) -> str:
        return self.steps[i].labels[p][k]


def from_filtered_complex(fc: FilteredComplex, fld: Field, n_max: int = 4) -> AInftyFiltration:
    tf = transfer_filtration(fc, fld, n_max)
    return AInftyFiltration(fld, tf.structures, tf.maps, "transferred", tf)


# ---------------------------------------------------------------------------
# JSON input


def _parse_matrix(obj: Any, rows: int, cols: int, fld: Field, where: str) -> Matrix:
    """Dense row-major lists, or ``{"shape": [r, c], "entries": [[i, j, v], ...]}``."""
    try:
        if isinstance(obj, dict):
            shape = tuple(obj.get("shape", ()))
            if shape != (rows, cols):
                raise SchemaError(f"{where}: shape {list(shape)} does not match expected {[rows, cols]}")
            data = [[fld.zero] * cols for _ in range(rows)]
            for entry in obj.get("entries", []):
                r, c, v = entry
                if not (0 <= r < rows and 0 <= c < cols):
                    raise SchemaError(f"{where}: entry {entry} out of range")
                data[r][c] = fld(v)
            return Matrix.from_rows(fld, data, cols=cols)
        if not isinstance(obj, list):
            raise SchemaError(f"{where}: matrix must be a list of rows")
        if rows == 0 and all(r == [] for r in obj):
            return Matrix.zeros(fld, 0, cols)
        if len(obj) != rows or any(not isinstance(r, list) or len(r) != cols for r in obj):
            got = (len(obj), len(obj[0]) if obj and isinstance(obj[0], list) else 0)
            raise SchemaError(f"{where}: dimension mismatch, got {list(got)}, expected {[rows, cols]}")
        return Matrix.from_rows(fld, [[fld(v) for v in r] for r in obj], cols=cols)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"{where}: {exc}") from None


def _int_keys(obj: Any, where: str) -> dict[int, Any]:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object keyed by integers")
    try:
        return {int(k): v for k, v in obj.items()}
    except ValueError:
        raise SchemaError(f"{where}: keys must be integers") from None


def load_abstract_filtration(text: str | dict, n_max: int | None = None) -> AInftyFiltration:
    """Build an :class:`AInftyFiltration` from its JSON description.

    Operations that are not listed are zero.  Coassociativity is not
    required here; the caller may run the identity checks separately.
    """
    try:
        doc = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    try:
        fld = Field.parse(str(doc.get("field", "gf2")))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list) or not raw_steps:
        raise SchemaError("'steps' must be a non-empty list")
    raw_maps = doc.get("maps", [])
    if not isinstance(raw_maps, list):
        raise SchemaError("'maps' must be a list")

    steps = []
    for i, st in enumerate(raw_steps):
        if not isinstance(st, dict):
            raise SchemaError(f"step {i}: expected an object")
        dims = {p: int(k) for p, k in _int_keys(st.get("dims", {}), f"step {i} dims").items()}
        if any(p < 0 or k < 0 for p, k in dims.items()):
            raise SchemaError(f"step {i}: negative degree or dimension")
        labels = {p: list(v) for p, v in _int_keys(st.get("labels", {}), f"step {i} labels").items()}
        for p, names in labels.items():
            if len(names) != dims.get(p, 0):
                raise SchemaError(f"step {i}: {len(names)} labels for degree {p} of dimension {dims.get(p, 0)}")
        delta = _int_keys(st.get("delta", {}), f"step {i} delta")
        top = max(delta, default=2)
        ac = AInftyCoalgebra(fld, dims, labels=labels, n_max=n_max or max(4, top))
        for n, per_degree in delta.items():
            if n < 2:
                raise SchemaError(f"step {i}: delta[{n}] must not be given (Δ_1 vanishes on homology)")
            for p, mat in _int_keys(per_degree, f"step {i} delta[{n}]").items():
                rows = len(ac.target_basis(n, p))
                m = _parse_matrix(mat, rows, ac.dim(p), fld, f"step {i} delta[{n}][{p}]")
                ac.delta.setdefault(n, {})[p] = m
        steps.append(ac)

    if len(raw_maps) != len(steps) - 1:
        raise SchemaError(f"{len(steps)} steps need {len(steps) - 1} maps, got {len(raw_maps)}")
    maps = []
    for i, mp in enumerate(raw_maps):
        per = {}
        for p, mat in _int_keys(mp, f"map {i}").items():
            per[p] = _parse_matrix(mat, steps[i + 1].dim(p), steps[i].dim(p), fld, f"map {i}->{i + 1} degree {p}")
        maps.append(per)
    return AInftyFiltration(fld, steps, maps, "abstract")


def dump_abstract_filtration(af: AInftyFiltration) -> dict:
    """Inverse of :func:`load_abstract_filtration` (dense matrices)."""
    fld = af.field

    def mat(m: Matrix):
        return [[fld.to_json(v) for v in row] for row in m.to_lists()]

    steps = []
    for ac in af.steps:
        delta = {}
        for n in sorted(ac.delta):
            per = {str(p): mat(m) for p, m in sorted(ac.delta[n].items()) if not m.is_zero()}
            if per:
                delta[str(n)] = per
        steps.append({
            "dims": {str(p): k for p, k in sorted(ac.dims.items())},
            "labels": {str(p): ac.labels[p] for p in sorted(ac.dims)},
            "delta": delta,
        })
    maps = [{str(p): mat(m) for p, m in sorted(mp.items())} for mp in af.maps]
    return {"field": fld.name.lower(), "steps": steps, "maps": maps}


# ---------------------------------------------------------------------------
# persistent groups


@dataclass(frozen=True)
class PersistentGroupDim:
    n: int
    p: int
    i: int
    j: int
    dim: int


def awake_subspace(af: AInftyFiltration, n: int, p: int, i: int, j: int) -> Subspace:
    """``∩_{k=i}^{j} ker(Δ_n ∘ f^{i,k}_p)`` inside ``H_p(K_i)``."""
    af._check_range(i, j)
    return intersect_all(kernel_basis(af.delta(k, n, p) @ af.f(i, k, p)) for k in range(i, j + 1))


def delta_persistent_dim(af: AInftyFiltration, n: int, p: int, i: int, j: int) -> PersistentGroupDim:
    """Dimension of the image of ``f^{i,j}_p`` on classes awake all the way to j.

    Computed as an image and cross-checked against the quotient
    ``D / (D ∩ ker f^{i,j})``.
    """
    if n > af.n_max:
        raise ValueError(f"n = {n} exceeds n_max = {af.n_max}")
    dom = awake_subspace(af, n, p, i, j)
    fij = af.f(i, j, p)
    image_dim = apply_to_subspace(fij, dom).dim
    quotient = dom.dim - intersect(dom, kernel_basis(fij)).dim
    if image_dim != quotient:
        raise InvariantError(f"image ({image_dim}) and quotient ({quotient}) dimensions differ "
                             f"for n={n}, p={p}, i={i}, j={j}")
    return PersistentGroupDim(n, p, i, j, image_dim)


def classical_persistent_dim(af: AInftyFiltration, p: int, i: int, j: int) -> int:
    return af.f(i, j, p).rank()


# ---------------------------------------------------------------------------
# awake / asleep


@dataclass(frozen=True)
class AwakeEvent:
    class_label: str
    step: int
    kind: str  # "wakes_up" | "falls_asleep"

    def __str__(self) -> str:
        return f"{self.kind}@{self.step}"


def _is_zero(vec: Sequence[Scalar]) -> bool:
    return all(v == 0 for v in vec)


def is_awake(af: AInftyFiltration, n: int, p: int, alpha: Sequence[Scalar], i: int, j: int) -> bool:
    """Whether ``alpha ∈ H_p(K_i)`` is Δ_n-awake at ``K_j``."""
    af._check_range(i, j)
    if len(alpha) != af.dim(i, p):
        raise ValueError(f"class has {len(alpha)} coordinates, H_{p}(K_{i}) has dimension {af.dim(i, p)}")
    image = af.f(i, j, p).apply([af.field(x) for x in alpha])
    if _is_zero(image):
        return False
    return _is_zero(af.delta(j, n, p).apply(image))


def awake_events(af: AInftyFiltration, n: int, p: int, alpha: Sequence[Scalar], birth_step: int,
                 label: str = "") -> list[AwakeEvent]:
    """Wake-up and fall-asleep events of one class along the filtration.

    The scan stops when the class dies; a class awake at that moment falls
    asleep at its death step.
    """
    alpha = [af.field(x) for x in alpha]
    if _is_zero(alpha):
        raise ValueError("the zero class is never awake")
    label = label or f"H{p}(K{birth_step}){list(map(str, alpha))}"
    events: list[AwakeEvent] = []
    awake_before = False
    for j in range(birth_step, af.N + 1):
        alive = not _is_zero(af.f(birth_step, j, p).apply(alpha))
        awake = alive and is_awake(af, n, p, alpha, birth_step, j)
        if awake and not awake_before:
            events.append(AwakeEvent(label, j, "wakes_up"))
        elif awake_before and not awake:
            events.append(AwakeEvent(label, j, "falls_asleep"))
        awake_before = awake
        if not alive:
            break
    return events


# ---------------------------------------------------------------------------
# the V/W zigzag


def vw_position(step: int, kind: str) -> int:
    """1-based zigzag position of ``V_step`` or ``W_step``."""
    return 2 * step + (1 if kind == "V" else 2)


def build_vw_zigzag(af: AInftyFiltration, n: int, p: int) -> ZigzagModule:
    """``V_0 <- W_0 -> V_1 <- W_1 -> ... -> V_N``.

    ``V_i = ker Δ_n`` in ``H_p(K_i)`` and ``W_i = V_i ∩ ker(Δ_n f^{i,i+1})``;
    the backward arrows are the inclusions and the forward arrows restrict
    ``f^{i,i+1}``.  Each space is coordinatised by its echelon basis.
    """
    fld = af.field
    V = [af.kernel(i, n, p) for i in range(af.N + 1)]
    W = [intersect(V[i], kernel_basis(af.delta(i + 1, n, p) @ af.step_map(i, p))) for i in range(af.N)]
    spaces: list[Subspace] = []
    names: list[str] = []
    arrows: list[Arrow] = []
    for i in range(af.N + 1):
        spaces.append(V[i])
        names.append(f"V{i}")
        if i == af.N:
            break
        spaces.append(W[i])
        names.append(f"W{i}")
        incl = Matrix.from_columns(fld, [V[i].coordinates(w) for w in W[i].basis], V[i].dim)
        arrows.append(Arrow(BACKWARD, incl))
        cols = []
        f = af.step_map(i, p)
        for w in W[i].basis:
            c = V[i + 1].coordinates(f.apply(w))
            if c is None:
                raise InvariantError(f"f^{{{i},{i + 1}}}(W_{i}) is not contained in V_{i + 1}")
            cols.append(c)
        arrows.append(Arrow(FORWARD, Matrix.from_columns(fld, cols, V[i + 1].dim)))
    return ZigzagModule(fld, [s.dim for s in spaces], arrows,
                        bases=[list(s.basis) for s in spaces], names=names)
