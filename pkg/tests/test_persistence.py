import json
import random

import pytest
from hypothesis import given, strategies as st

from ainfpers.linalg import apply_to_subspace, kernel_basis
from ainfpers.persistence import (SchemaError, awake_events, awake_subspace, build_vw_zigzag, delta_persistent_dim,
                                  dump_abstract_filtration, from_filtered_complex, is_awake, load_abstract_filtration)
from ainfpers.linalg import GF2, Field
from ainfpers.simplicial import from_simplices
from conftest import CORPUS, FLT, transferred
from oracles import random_filtration


# the section-3 style fixture ------------------------------------------------

def test_fixture_shape(fourstep):
    af = fourstep
    assert af.N == 3
    assert [af.dim(i, 6) for i in range(4)] == [2, 2, 3, 3]
    for i in range(3):
        for p in af.degrees():
            m = af.step_map(i, p)
            assert m.rank() == m.cols  # injective


def test_fixture_awake_trajectory(fourstep):
    gamma = [1, 0]
    assert [is_awake(fourstep, 4, 6, gamma, 0, j) for j in range(4)] == [False, True, False, True]
    events = awake_events(fourstep, 4, 6, gamma, 0, "gamma6")
    assert [str(e) for e in events] == ["wakes_up@1", "falls_asleep@2", "wakes_up@3"]


def test_fixture_persistent_group(fourstep):
    assert delta_persistent_dim(fourstep, 4, 6, 1, 2).dim == 1
    assert [fourstep.kernel(i, 4, 6).dim for i in range(4)] == [1, 2, 2, 2]


def test_kernel_of_delta4_is_not_preserved(fourstep):
    ker1 = fourstep.kernel(1, 4, 6)
    image = apply_to_subspace(fourstep.f(1, 2, 6), ker1)
    assert not image <= fourstep.kernel(2, 4, 6)


def test_vw_zigzag_of_fixture(fourstep):
    z = build_vw_zigzag(fourstep, 4, 6)
    assert z.names == ["V0", "W0", "V1", "W1", "V2", "W2", "V3"]
    assert z.dims[::2] == [1, 2, 2, 2]


# definitions on transferred filtrations ------------------------------------

@pytest.mark.parametrize("name", FLT)
def test_delta1_is_classical_persistence(name):
    af = transferred(name, 2)
    for p in range(3):
        for i in range(af.N + 1):
            for j in range(i, af.N + 1):
                assert delta_persistent_dim(af, 1, p, i, j).dim == af.f(i, j, p).rank()


@pytest.mark.parametrize("name", FLT)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_diagonal_and_monotonicity(name, n):
    af = transferred(name, 0)
    for p in range(3):
        for i in range(af.N + 1):
            assert delta_persistent_dim(af, n, p, i, i).dim == af.kernel(i, n, p).dim
            dims = [delta_persistent_dim(af, n, p, i, j).dim for j in range(i, af.N + 1)]
            assert dims == sorted(dims, reverse=True)


def test_composition_law():
    af = transferred("torus.flt", 2)
    for p in (1, 2):
        assert af.f(0, 2, p) == af.f(1, 2, p) @ af.f(0, 1, p)


def test_vw_zigzag_for_n1_is_homology():
    af = transferred("torus.flt", 2)
    z = build_vw_zigzag(af, 1, 1)
    assert z.dims == [15, 15, 8, 8, 2]


def test_index_errors():
    af = transferred("circle.flt", 2)
    with pytest.raises(IndexError):
        delta_persistent_dim(af, 1, 1, 2, 1)
    with pytest.raises(IndexError):
        delta_persistent_dim(af, 1, 1, 0, 9)
    with pytest.raises(ValueError):
        delta_persistent_dim(af, 9, 1, 0, 1)


# awake events ----------------------------------------------------------------

def test_zero_class_is_never_awake():
    af = transferred("circle.flt", 2)
    assert not is_awake(af, 1, 1, [0], 2, 2)
    with pytest.raises(ValueError):
        awake_events(af, 1, 1, [0], 2)


def test_n1_events_are_birth_and_death():
    af = transferred("circle.flt", 2)
    events = awake_events(af, 1, 1, [1], 2, "loop")
    assert [(e.kind, e.step) for e in events] == [("wakes_up", 2), ("falls_asleep", 3)]


def test_class_with_vanishing_delta_wakes_once():
    af = transferred("wedge.flt", 0)
    assert af.delta(1, 2, 2).is_zero()
    events = awake_events(af, 2, 2, [1], 1)
    assert [str(e) for e in events] == ["wakes_up@1"]


def _abstract_random(data):
    fld = data.draw(st.sampled_from(["gf2", "gf3", "q"]))
    n_steps = data.draw(st.integers(1, 4))
    dims = [{1: data.draw(st.integers(0, 2)), 2: data.draw(st.integers(0, 2))} for _ in range(n_steps)]
    vals = st.integers(0, 2)

    def mat(r, c):
        return data.draw(st.lists(st.lists(vals, min_size=c, max_size=c), min_size=r, max_size=r))

    steps = [{"dims": {"1": d[1], "2": d[2]}, "delta": {"2": {"2": mat(d[1] * d[1], d[2])}}}
             for d in dims]
    maps = [{"1": mat(dims[i + 1][1], dims[i][1]), "2": mat(dims[i + 1][2], dims[i][2])} for i in range(n_steps - 1)]
    return load_abstract_filtration({"field": fld, "steps": steps, "maps": maps})


@given(st.data())
def test_events_alternate_and_image_equals_quotient(data):
    af = _abstract_random(data)
    for p in (1, 2):
        for i in range(af.N + 1):
            for j in range(i, af.N + 1):
                delta_persistent_dim(af, 2, p, i, j)  # raises if the two formulas disagree
            for k in range(af.dim(i, p)):
                alpha = [0] * af.dim(i, p)
                alpha[k] = 1
                events = awake_events(af, 2, p, alpha, i)
                kinds = [e.kind for e in events]
                assert all(a != b for a, b in zip(kinds, kinds[1:]))
                if kinds:
                    assert kinds[0] == "wakes_up"


def test_awake_subspace_inside_kernels():
    af = transferred("torus.flt", 0)
    d = awake_subspace(af, 2, 1, 0, 2)
    for k in range(3):
        assert d <= kernel_basis(af.delta(k, 2, 1) @ af.f(0, k, 1))


# JSON input -------------------------------------------------------------------

def test_empty_filtration_is_valid():
    af = load_abstract_filtration('{"field": "q", "steps": [{"dims": {}}], "maps": []}')
    assert af.N == 0 and af.degrees() == []


@pytest.mark.parametrize("doc, message", [
    ({"steps": []}, "non-empty"),
    ({"steps": [{"dims": {"1": 1}}, {"dims": {"1": 1}}], "maps": []}, "need 1 maps"),
    ({"steps": [{"dims": {"1": 1}}, {"dims": {"1": 2}}], "maps": [{"1": [[1, 0]]}]}, "dimension mismatch"),
    ({"steps": [{"dims": {"2": 1}, "delta": {"2": {"2": [[1]]}}}]}, "dimension mismatch"),
    ({"steps": [{"dims": {"1": 1}, "delta": {"1": {"1": [[0]]}}}]}, "must not be given"),
    ({"field": "gf4", "steps": [{"dims": {}}]}, "not a supported prime field"),
    ({"steps": [{"dims": {"x": 1}}]}, "integers"),
])
def test_schema_errors(doc, message):
    with pytest.raises(SchemaError, match=message):
        load_abstract_filtration(doc)


def test_invalid_json_text():
    with pytest.raises(SchemaError):
        load_abstract_filtration("{not json")


def test_sparse_and_dense_matrices_agree(fourstep):
    doc = dump_abstract_filtration(fourstep)
    again = load_abstract_filtration(json.dumps(doc))
    for i in range(4):
        assert again.delta(i, 4, 6) == fourstep.delta(i, 4, 6)


def test_transferred_filtration_roundtrips_through_json():
    af = transferred("torus.flt", 0)
    again = load_abstract_filtration(json.dumps(dump_abstract_filtration(af)))
    for i in range(af.N + 1):
        for p in (1, 2):
            assert again.delta(i, 2, p) == af.delta(i, 2, p)
            assert again.f(0, i, p) == af.f(0, i, p)


def test_random_transferred_filtrations_have_monotone_dims():
    rng = random.Random(2)
    for _ in range(10):
        af = from_filtered_complex(from_simplices(random_filtration(rng), strict=False), GF2, 3)
        for n in (1, 2, 3):
            for p in range(3):
                for i in range(af.N + 1):
                    dims = [delta_persistent_dim(af, n, p, i, j).dim for j in range(i, af.N + 1)]
                    assert dims == sorted(dims, reverse=True)
