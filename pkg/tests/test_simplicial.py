import random

import pytest
from hypothesis import given, strategies as st

from ainfpers.linalg import GF2, QQ, Field
from ainfpers.simplicial import (FiltrationError, aw_terms, boundary_matrix, chain_complex, faces,
                                 format_filtration, from_simplices, inclusion_chain_map, parse_filtration)
from conftest import FLT, load_corpus
from oracles import random_filtration


def test_parse_comments_labels_and_duplicates():
    fc = parse_filtration("# c\n10: 0\n10: 1\n10: 0 1\n30: 2 # late\n30: 1 2\n20: 1 0\n")
    assert fc.n_steps == 2
    assert fc.step_labels == (10, 30)
    assert fc.birth[(0, 1)] == 0
    assert fc.simplices(1, 0) == [(0,), (1,), (2,)]


@pytest.mark.parametrize("text, message", [
    ("0: 0 1\n", "not closed"),
    ("1: 0\n0: 1\n1: 0 1\n0: 0 1\n", "non-monotone"),
    ("0: 0 0\n", "repeated vertex"),
    ("0 0 1\n", "expected"),
    ("x: 0\n", "non-integer"),
    ("", "no simplices"),
    ("0: 0\n0: 1\n", "disconnected"),
])
def test_parse_errors(text, message):
    with pytest.raises(FiltrationError, match=message):
        parse_filtration(text)


def test_non_strict_allows_disconnected_and_autoclose_fills_faces():
    fc = parse_filtration("0: 0\n0: 1\n", strict=False)
    assert not fc.is_connected(0)
    fc = parse_filtration("0: 0 1 2\n1: 2 3\n", autoclose=True)
    assert fc.counts(0) == [3, 3, 1]
    assert fc.birth[(3,)] == 1


def test_format_roundtrip():
    fc = load_corpus("torus.flt")
    again = parse_filtration(format_filtration(fc))
    assert again.birth == fc.birth


@pytest.mark.parametrize("name", FLT)
@pytest.mark.parametrize("p", [2, 0])
def test_boundary_squares_to_zero(name, p):
    fc = load_corpus(name)
    fld = Field(p)
    for i in range(fc.n_steps):
        for q in range(2, fc.dimension + 1):
            assert (boundary_matrix(fc, i, q - 1, fld) @ boundary_matrix(fc, i, q, fld)).is_zero()


def test_inclusion_is_identity_block():
    fc = load_corpus("torus.flt")
    m = inclusion_chain_map(fc, 0, 2, 1, GF2)
    assert m.rows == m.cols == 21
    m = inclusion_chain_map(fc, 1, 2, 2, GF2)
    assert m.select_rows(range(7)).to_lists() == [[int(i == j) for j in range(7)] for i in range(7)]
    assert m.select_rows(range(7, 14)).is_zero()
    with pytest.raises(ValueError):
        inclusion_chain_map(fc, 2, 1, 0, GF2)


def _boundary(s):
    return {f: (-1) ** r for r, f in enumerate(faces(s))} if len(s) > 1 else {}


def _add(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


@given(st.integers(1, 5))
def test_alexander_whitney_is_coassociative_chain_map(q):
    s = tuple(range(q + 1))
    # (Δ ⊗ 1)Δ = (1 ⊗ Δ)Δ
    left, right = {}, {}
    for a, b in aw_terms(s):
        for a1, a2 in aw_terms(a):
            _add(left, (a1, a2, b), 1)
        for b1, b2 in aw_terms(b):
            _add(right, (a, b1, b2), 1)
    assert left == right
    # Δ∂ = (∂ ⊗ 1 + 1 ⊗ ∂)Δ with the Koszul sign on the second term
    lhs, rhs = {}, {}
    for f, c in _boundary(s).items():
        for a, b in aw_terms(f):
            _add(lhs, (a, b), c)
    for a, b in aw_terms(s):
        for f, c in _boundary(a).items():
            _add(rhs, (f, b), c)
        for f, c in _boundary(b).items():
            _add(rhs, (a, f), (-1) ** (len(a) - 1) * c)
    assert lhs == rhs


def test_random_filtrations_are_valid():
    rng = random.Random(0)
    for _ in range(30):
        birth = random_filtration(rng)
        fc = from_simplices(birth, strict=False)
        for i in range(fc.n_steps):
            cc = chain_complex(fc, i, QQ)
            for q in range(2, cc.top + 1):
                assert (cc.d(q - 1) @ cc.d(q)).is_zero()
