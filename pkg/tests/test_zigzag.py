import random

import pytest
from hypothesis import given, strategies as st

from ainfpers.linalg import GF2, QQ, Field, Matrix
from ainfpers.zigzag import (BACKWARD, FORWARD, Arrow, Bar, Barcode, Decomposition, Interval, ZigzagModule,
                             bar_count, barcode, check_dimension_accounting, decompose, load_zigzag,
                             validate_decomposition)
from conftest import CORPUS
from oracles import brute_force_intervals


def _intervals(z):
    return [(iv.birth, iv.death) for iv in sorted(decompose(z).intervals)]


@pytest.mark.parametrize("dims, arrows, expected", [
    ([1, 1], [(FORWARD, [[1]])], [(1, 2)]),
    ([1, 1, 1], [(BACKWARD, [[1]]), (FORWARD, [[1]])], [(1, 3)]),
    ([1, 1], [(FORWARD, [[0]])], [(1, 1), (2, 2)]),
    ([0, 1], [(FORWARD, [])], [(2, 2)]),
    ([2], [], [(1, 1), (1, 1)]),
])
def test_small_modules(dims, arrows, expected):
    z = ZigzagModule.from_lists(GF2, dims, arrows)
    d = decompose(z)
    assert _intervals(z) == expected
    assert validate_decomposition(z, d)


def test_caution_fixture_is_not_one_long_interval():
    z, expected = load_zigzag((CORPUS / "zigzag_caution.json").read_text())
    d = decompose(z)
    assert sorted(d.intervals) == expected
    # the compatible sequence 1 <- (1, 1) -> 1 exists, yet no interval spans all three positions
    assert z.arrows[0].matrix.apply((1, 1)) == (1,) and z.arrows[1].matrix.apply((1, 1)) == (1,)
    assert Interval(1, 3) not in d.intervals
    assert brute_force_intervals(z.dims, [("backward", [[1, 0]]), ("forward", [[0, 1]])]) == d.multiset()


def test_hand_built_certificate():
    z = ZigzagModule.from_lists(GF2, [1, 1], [(FORWARD, [[1]])])
    d = Decomposition([Interval(1, 2)], [Matrix.identity(GF2, 1), Matrix.identity(GF2, 1)])
    assert validate_decomposition(z, d)


def test_corrupted_certificate_reports_square():
    z = ZigzagModule.from_lists(QQ, [2, 2, 1], [(FORWARD, [[1, 0], [1, 1]]), (BACKWARD, [[1], [0]])])
    d = decompose(z)
    assert validate_decomposition(z, d)
    cert = list(d.certificate)
    rows = cert[1].to_lists()
    rows[0][0] += 1
    cert[1] = Matrix.from_rows(QQ, rows, cols=cert[1].cols)
    res = validate_decomposition(z, Decomposition(d.intervals, cert))
    assert not res
    assert res.square in (1, 2)


def test_singular_certificate_reports_position():
    z = ZigzagModule.from_lists(QQ, [2], [])
    d = Decomposition([Interval(1, 1), Interval(1, 1)], [Matrix.from_rows(QQ, [[1, 1], [1, 1]])])
    res = validate_decomposition(z, d)
    assert not res and res.position == 1


def test_shape_checks():
    with pytest.raises(ValueError):
        ZigzagModule(GF2, [1, 2], [Arrow(FORWARD, Matrix.zeros(GF2, 1, 2))])
    with pytest.raises(ValueError):
        ZigzagModule(GF2, [1, 2], [])
    with pytest.raises(ValueError):
        Interval(2, 1)


@st.composite
def zigzags(draw, p, max_dim=2, max_len=5):
    length = draw(st.integers(1, max_len))
    dims = [draw(st.integers(0, max_dim)) for _ in range(length)]
    arrows = []
    for k in range(length - 1):
        orient = draw(st.sampled_from([FORWARD, BACKWARD]))
        r, c = (dims[k + 1], dims[k]) if orient == FORWARD else (dims[k], dims[k + 1])
        rows = [[draw(st.integers(0, p - 1)) for _ in range(c)] for _ in range(r)]
        arrows.append((orient, rows))
    return dims, arrows


@given(zigzags(2))
def test_matches_exhaustive_search_gf2(data):
    dims, arrows = data
    z = ZigzagModule.from_lists(GF2, dims, arrows)
    d = decompose(z)
    assert validate_decomposition(z, d)
    assert d.multiset() == brute_force_intervals(dims, arrows, 2)


@given(zigzags(3, max_len=3))
def test_matches_exhaustive_search_gf3(data):
    dims, arrows = data
    z = ZigzagModule.from_lists(Field(3), dims, arrows)
    assert decompose(z).multiset() == brute_force_intervals(dims, arrows, 3)


def _random_invertible(fld, n, rng):
    while True:
        m = Matrix.from_rows(fld, [[rng.randrange(-3, 4) for _ in range(n)] for _ in range(n)], cols=n)
        if m.rank() == n:
            return m


def _rebase(z, rng):
    P = [_random_invertible(z.field, d, rng) for d in z.dims]
    arrows = []
    for k, a in enumerate(z.arrows):
        if a.orientation == FORWARD:
            m = P[k + 1].inverse() @ a.matrix @ P[k]
        else:
            m = P[k].inverse() @ a.matrix @ P[k + 1]
        arrows.append(Arrow(a.orientation, m))
    return ZigzagModule(z.field, list(z.dims), arrows)


@given(st.sampled_from([2, 5, 0]).flatmap(lambda p: st.tuples(st.just(p), zigzags(p or 3, max_dim=4, max_len=7))),
       st.integers(0, 2**32))
def test_certificate_accounting_and_basis_independence(data, seed):
    p, (dims, arrows) = data
    fld = Field(p)
    z = ZigzagModule.from_lists(fld, dims, arrows)
    d = decompose(z)
    assert validate_decomposition(z, d)
    assert check_dimension_accounting(z, d.intervals)
    assert decompose(_rebase(z, random.Random(seed))).multiset() == d.multiset()
    assert [(i.birth, i.death) for i in d.intervals] == sorted((i.birth, i.death) for i in d.intervals)


def test_bar_count():
    assert bar_count(Barcode(1, 0, []), 0, 0) == 0
    bc = Barcode(1, 0, [Bar(0, 4)])
    assert all(bar_count(bc, i, j) == 1 for i in range(5) for j in range(i, 5))
    with pytest.raises(ValueError):
        bar_count(bc, 2, 1)


def test_fixture_barcode(fourstep):
    bc = barcode(fourstep, 4, 6)
    assert bc.to_json()["bars"] == [{"birth": 0, "death": 3}, {"birth": 1, "death": 1},
                                    {"birth": 2, "death": 2}, {"birth": 3, "death": 3}]
    assert barcode(fourstep, 4, 5).bars == []
