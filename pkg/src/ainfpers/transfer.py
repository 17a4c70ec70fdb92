"""Homotopy transfer of the Alexander-Whitney coalgebra onto homology.

For each degree the chain group splits as ``C = A ⊕ dA ⊕ H``: ``H`` is the
greedy complement of the boundaries inside the cycles (taken from the
echelon basis of the cycles) and ``A`` the greedy complement of the cycles
inside ``C`` (taken from the simplex basis).  Then ``ι`` includes ``H``,
``p`` projects onto it and ``φ = -(∂|_A)^{-1}`` on ``dA``, zero elsewhere,
so that ``φ∂ + ∂φ = ιp - 1``.

The transferred operations are sums over planar binary trees: ``ι`` at the
root, the diagonal at each vertex, ``φ`` on internal edges and ``p`` at the
leaves.  They are evaluated on the desuspension ``s^-1 C``, where every
map in a tree has even total degree and the only signs left are those of
the shifted diagonal; the result is converted back with the suspension
formulas of :mod:`ainfpers.coalgebra`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .coalgebra import AInftyCoalgebra, Key, Tensor, add_into, cobar_to_delta
from .linalg import (Field, Matrix, Scalar, Subspace, extend_to_complement, image_basis,
                     kernel_basis, standard_basis)
from .simplicial import ChainComplex, FilteredComplex, Simplex, aw_terms, chain_complex, inclusion_chain_map


class InvariantError(RuntimeError):
    """An algebraic identity that must hold exactly was violated."""


@dataclass
class TransferDiagram:
    """ι, p, φ for one chain complex, degree by degree.

    ``iota[q]`` is ``C_q x H_q``, ``proj[q]`` is ``H_q x C_q`` and
    ``phi[q]`` maps ``C_q -> C_{q+1}``.  The homology basis in degree 0 starts
    with the class of the basepoint vertex; the remaining degree-0 classes are
    represented by differences with it so that they lie in ker ε.
    """

    cc: ChainComplex
    A: dict[int, Subspace]
    dA: dict[int, Subspace]
    H: dict[int, Subspace]
    iota: dict[int, Matrix]
    proj: dict[int, Matrix]
    phi: dict[int, Matrix]
    _sparse: dict = dc_field(default_factory=dict, repr=False)

    @property
    def field(self) -> Field:
        return self.cc.field

    @property
    def degrees(self) -> list[int]:
        return sorted(self.cc.bases)

    def splitting_dims(self, q: int) -> tuple[int, int, int]:
        return (self.A[q].dim, self.dA[q].dim, self.H[q].dim)

    def homology_dim(self, q: int) -> int:
        return self.iota[q].cols if q in self.iota else 0

    def reduced_indices(self, q: int) -> list[int]:
        """Positions of the reduced classes inside the homology basis of degree q."""
        start = 1 if q == 0 else 0
        return list(range(start, self.homology_dim(q)))

    def reduced_dims(self) -> dict[int, int]:
        return {q: len(self.reduced_indices(q)) for q in self.degrees}

    def reduced_iota(self, q: int) -> Matrix:
        return self.iota[q].select_columns(self.reduced_indices(q))

    def reduced_proj(self, q: int) -> Matrix:
        return self.proj[q].select_rows(self.reduced_indices(q))

    # sparse views used by the tree sums
    def proj_of(self, s: Simplex) -> dict[Key, Scalar]:
        """Reduced homology coordinates of a simplex, keyed ``(degree, index)``."""
        cache = self._sparse.setdefault("proj", {})
        if s not in cache:
            q = len(s) - 1
            j = self._position(s)
            idx = self.reduced_indices(q)
            col = self.proj[q].column(j) if q in self.proj else ()
            cache[s] = {(q, r): col[i] for r, i in enumerate(idx) if col[i] != 0}
        return cache[s]

    def phi_of(self, s: Simplex) -> dict[Simplex, Scalar]:
        cache = self._sparse.setdefault("phi", {})
        if s not in cache:
            q = len(s) - 1
            if q + 1 not in self.cc.bases:
                cache[s] = {}
            else:
                col = self.phi[q].column(self._position(s))
                basis = self.cc.bases[q + 1]
                cache[s] = {basis[i]: v for i, v in enumerate(col) if v != 0}
        return cache[s]

    def representative(self, key: Key) -> dict[Simplex, Scalar]:
        q, r = key
        col = self.iota[q].column(self.reduced_indices(q)[r])
        basis = self.cc.bases[q]
        return {basis[i]: v for i, v in enumerate(col) if v != 0}

    def _position(self, s: Simplex) -> int:
        pos = self._sparse.setdefault("pos", {})
        if not pos:
            for q, basis in self.cc.bases.items():
                for i, t in enumerate(basis):
                    pos[t] = i
        return pos[s]


def build_transfer_diagram(cc: ChainComplex) -> TransferDiagram:
    fld = cc.field
    degrees = sorted(cc.bases)
    for q in degrees:
        if not (cc.d(q) @ cc.d(q + 1)).is_zero():
            raise InvariantError(f"∂∂ != 0 in degree {q}")
    Z = {q: kernel_basis(cc.d(q)) for q in degrees}
    B = {q: image_basis(cc.d(q + 1)) for q in degrees}
    Avecs = {q: extend_to_complement(Z[q], standard_basis(fld, cc.dim(q))) for q in degrees}
    Hvecs = {q: extend_to_complement(B[q], Z[q].basis) for q in degrees}

    A, dA, H, iota, proj, phi = {}, {}, {}, {}, {}, {}
    for q in degrees:
        n = cc.dim(q)
        above = Avecs.get(q + 1, [])
        dq1 = cc.d(q + 1)
        dAvecs = [dq1.apply(a) for a in above]
        hreps = list(Hvecs[q])
        if q == 0 and hreps:
            base = hreps[0]
            hreps = [base] + [tuple(fld.reduce(x - y) for x, y in zip(h, base)) for h in hreps[1:]]
        cols = list(Avecs[q]) + dAvecs + hreps
        if len(cols) != n:
            raise InvariantError(f"splitting of C_{q} has {len(cols)} vectors for dimension {n}")
        M = Matrix.from_columns(fld, cols, n)
        Minv = M.inverse()
        a, b, h = len(Avecs[q]), len(dAvecs), len(hreps)
        A[q] = Subspace.span(fld, n, Avecs[q])
        dA[q] = Subspace.span(fld, n, dAvecs)
        H[q] = Subspace.span(fld, n, hreps)
        iota[q] = Matrix.from_columns(fld, hreps, n)
        proj[q] = Minv.select_rows(range(a + b, a + b + h))
        if above:
            Aup = Matrix.from_columns(fld, above, cc.dim(q + 1))
            phi[q] = -(Aup @ Minv.select_rows(range(a, a + b)))
        else:
            phi[q] = Matrix.zeros(fld, cc.dim(q + 1), n)
    return TransferDiagram(cc, A, dA, H, iota, proj, phi)


def check_transfer_diagram(td: TransferDiagram) -> list[str]:
    """Every violated identity, as human-readable strings (empty when valid)."""
    fld = td.field
    cc = td.cc
    bad = []
    for q in td.degrees:
        n = cc.dim(q)
        h = td.homology_dim(q)
        if not td.proj[q] @ td.iota[q] == Matrix.identity(fld, h):
            bad.append(f"p ι != id in degree {q}")
        if not (cc.d(q) @ td.iota[q]).is_zero():
            bad.append(f"∂ ι != 0 in degree {q}")
        if not (td.phi[q] @ td.iota[q]).is_zero():
            bad.append(f"φ ι != 0 in degree {q}")
        if q + 1 in td.proj and not (td.proj[q + 1] @ td.phi[q]).is_zero():
            bad.append(f"p φ != 0 in degree {q}")
        if q + 1 in td.phi and not (td.phi[q + 1] @ td.phi[q]).is_zero():
            bad.append(f"φ φ != 0 in degree {q}")
        lhs = cc.d(q + 1) @ td.phi[q]
        if q - 1 in td.phi:
            lhs = lhs + td.phi[q - 1] @ cc.d(q)
        rhs = td.iota[q] @ td.proj[q] - Matrix.identity(fld, n)
        if lhs != rhs:
            bad.append(f"φ∂ + ∂φ != ιp - id in degree {q}")
    return bad


def transferred_delta(td: TransferDiagram, n: int) -> dict[int, list[Tensor]]:
    """Δ_n on reduced homology, as sparse columns per degree.

    Raises :class:`InvariantError` if the diagram is not a valid transfer
    diagram.
    """
    if n < 2:
        raise ValueError("Δ_1 vanishes on homology; ask for n >= 2")
    problems = td._sparse.get("checked")
    if problems is None:
        problems = check_transfer_diagram(td)
        td._sparse["checked"] = problems
    if problems:
        raise InvariantError("invalid transfer diagram: " + "; ".join(problems))
    ev = _TreeEvaluator(td)
    out = {}
    for q, k in td.reduced_dims().items():
        cols = []
        for r in range(k):
            rep = td.representative((q, r))
            cobar: Tensor = {}
            for s, c in rep.items():
                add_into(cobar, ev.F(n, s), c, td.field)
            cols.append(cobar_to_delta(n, cobar, td.field))
        out[q] = cols
    return out


class _TreeEvaluator:
    """Memoized tree sums on the desuspended chains.

    ``F(n, σ)`` is the sum over planar binary trees with n leaves of the
    composite starting from σ; ``G(k, τ) = F(k, φ τ)`` for internal edges and
    ``G(1, τ) = p τ`` for leaves.  The shifted diagonal carries the sign
    ``(-1)^r`` on the term whose front face has dimension r.
    """

    def __init__(self, td: TransferDiagram):
        self.td = td
        self.fld = td.field
        self._F: dict[tuple[int, Simplex], Tensor] = {}
        self._G: dict[tuple[int, Simplex], Tensor] = {}

    def leaf(self, s: Simplex) -> Tensor:
        return {(k,): v for k, v in self.td.proj_of(s).items()}

    def G(self, k: int, s: Simplex) -> Tensor:
        if k == 1:
            return self.leaf(s)
        key = (k, s)
        if key not in self._G:
            acc: Tensor = {}
            for t, c in self.td.phi_of(s).items():
                add_into(acc, self.F(k, t), c, self.fld)
            self._G[key] = acc
        return self._G[key]

    def F(self, n: int, s: Simplex) -> Tensor:
        if n == 1:
            return self.leaf(s)
        key = (n, s)
        if key in self._F:
            return self._F[key]
        fld = self.fld
        red = fld.reduce
        acc: Tensor = {}
        for r, (front, back) in enumerate(aw_terms(s)):
            sgn = fld.sign(r)
            for k in range(1, n):
                left = self.G(k, front)
                if not left:
                    continue
                right = self.G(n - k, back)
                if not right:
                    continue
                for lk, lv in left.items():
                    for rk, rv in right.items():
                        t = lk + rk
                        nv = red(acc.get(t, 0) + sgn * lv * rv)
                        if nv == 0:
                            acc.pop(t, None)
                        else:
                            acc[t] = nv
        self._F[key] = acc
        return acc


def transferred_structure(td: TransferDiagram, n_max: int = 4) -> AInftyCoalgebra:
    ac = AInftyCoalgebra(td.field, td.reduced_dims(), n_max=n_max)
    for n in range(2, n_max + 1):
        for q, cols in transferred_delta(td, n).items():
            if cols and ac.target_basis(n, q):
                ac.set_delta_from_tensors(n, q, cols)
    return ac


def induced_homology_map(td_i: TransferDiagram, td_j: TransferDiagram, incl: Matrix, q: int) -> Matrix:
    """Reduced f^{i,j}_q = p_j · incl · ι_i restricted to reduced classes."""
    fld = td_i.field
    ri, rj = td_i.reduced_indices(q), td_j.reduced_indices(q)
    if not ri or not rj:
        return Matrix.zeros(fld, len(rj), len(ri))
    return td_j.reduced_proj(q) @ incl @ td_i.reduced_iota(q)


@dataclass
class TransferredFiltration:
    """Per-step diagrams and structures of a filtered complex."""

    fc: FilteredComplex
    field: Field
    diagrams: list[TransferDiagram]
    structures: list[AInftyCoalgebra]
    maps: list[dict[int, Matrix]]


def transfer_filtration(fc: FilteredComplex, fld: Field, n_max: int = 4) -> TransferredFiltration:
    diagrams = [build_transfer_diagram(chain_complex(fc, i, fld)) for i in range(fc.n_steps)]
    structures = [transferred_structure(td, n_max) for td in diagrams]
    maps = []
    for i in range(fc.N):
        step = {}
        for q in range(fc.dimension + 1):
            incl = inclusion_chain_map(fc, i, i + 1, q, fld)
            step[q] = induced_homology_map(diagrams[i], diagrams[i + 1], incl, q)
        maps.append(step)
    return TransferredFiltration(fc, fld, diagrams, structures, maps)
