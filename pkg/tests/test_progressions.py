import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import brute
from vdwforge.groups import Group, cyclic, product
from vdwforge.progressions import (
    APWitness,
    Coloring,
    color_masks,
    find_ap_in_set,
    find_mono_ap,
    is_k_ap_free,
    is_valid_coloring,
    make_ap,
)

Z9 = cyclic(9)
Z5 = cyclic(5)


def test_make_ap_wraps():
    seq, P = make_ap(Z9, 3, 3, 4)
    assert seq == [(3,), (6,), (0,), (3,)]
    assert P == {(0,), (3,), (6,)}


def test_make_ap_product():
    G = product(cyclic(3), cyclic(5))
    seq, P = make_ap(G, (0, 0), (1, 0), 5)
    assert P == {(0, 0), (1, 0), (2, 0)}
    assert len(seq) == 5


def test_make_ap_zero_difference_is_trivial():
    _, P = make_ap(Z9, 4, 0, 6)
    assert P == {(4,)}


def test_digit_set_is_3_ap_free():
    S = {4, 5, 7, 8}
    assert is_k_ap_free(Z9, S, 3)
    assert brute.is_free_cyclic(9, S, 3)


def test_find_ap_in_set_witness():
    w = find_ap_in_set(Z9, {1, 2, 3}, 3)
    assert w.start == (1,) and w.diff == (1,)
    assert w.elements == (1, 2, 3)


def test_empty_set_is_free():
    assert is_k_ap_free(Z9, set(), 3)


def test_find_mono_ap_z5():
    c = Coloring(Z5, 2, (1, 1, 2, 2, 2))
    w = find_mono_ap(c, 3)
    assert (w.start, w.diff, w.color) == ((2,), (1,), 2)
    assert w.elements == (2, 3, 4)
    assert find_mono_ap(c, 4) is None
    assert not brute.has_mono_cyclic(c.colors, 4)


def test_k2_degenerate():
    # any class with two elements holds a non-trivial 2-AP
    assert find_mono_ap(Coloring(Z5, 5, (1, 2, 3, 4, 5)), 2) is None
    assert find_mono_ap(Coloring(Z5, 4, (1, 2, 3, 4, 1)), 2) is not None


def test_wraparound_collision_counts():
    # {0, 3, 6} is the 4-AP 0, 3, 6, 0 in Z/9
    c = Coloring(Z9, 2, (1, 2, 2, 1, 2, 2, 1, 2, 2))
    w = find_mono_ap(c, 4, mode="naive")
    assert w is not None and w.color == 1
    assert find_mono_ap(c, 4) == w


def test_witness_str():
    w = APWitness((2,), (1,), 3, (2, 3, 4), 2)
    assert str(w) == "x=2 d=1 k=3 color=2 elements=2 3 4"


def test_coloring_validation():
    with pytest.raises(ValueError):
        Coloring(Z5, 2, (1, 2, 3, 1, 1))
    with pytest.raises(ValueError):
        Coloring(Z5, 2, (1, 2))
    c = Coloring(Z5, 2, (1, 1, 2, 2, 2))
    assert c[6] == 1 and c[7] == 2
    assert c.classes() == [frozenset({0, 1}), frozenset({2, 3, 4})]
    assert c.digest() == Coloring(Z5, 2, [1, 1, 2, 2, 2]).digest()


def test_color_masks():
    assert color_masks([1, 2, 1, 1], 2) == [0b1101, 0b0010]


def test_unknown_mode():
    with pytest.raises(ValueError):
        find_mono_ap(Coloring(Z5, 1, (1,) * 5), 3, mode="slow")


def test_parallel_matches_serial():
    rng = np.random.default_rng(7)
    c = Coloring(cyclic(6000), 6, rng.integers(1, 7, 6000))
    assert find_mono_ap(c, 6, workers=3) == find_mono_ap(c, 6, workers=1)


def test_product_group_routes():
    rng = np.random.default_rng(1)
    for factors in [(3, 5), (4, 9), (2, 2, 3), (6, 4)]:
        G = Group(factors)
        for _ in range(20):
            c = Coloring(G, 3, rng.integers(1, 4, G.order))
            fast = find_mono_ap(c, 3)
            naive = find_mono_ap(c, 3, mode="naive")
            assert (fast is None) == (naive is None)
            if fast is not None:
                assert len({c.colors[i] for i in fast.elements}) == 1


colorings = st.integers(1, 60).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.integers(1, 4).flatmap(lambda r: st.tuples(st.just(r), st.lists(st.integers(1, r), min_size=n, max_size=n))),
    )
)


@settings(max_examples=300, deadline=None)
@given(colorings, st.integers(2, 6))
def test_fast_equals_naive(data, k):
    n, (r, colors) = data
    c = Coloring(cyclic(n), r, colors)
    fast = find_mono_ap(c, k)
    assert fast == find_mono_ap(c, k, mode="naive")
    assert (fast is None) == (not brute.has_mono_cyclic(colors, k))


@settings(max_examples=200, deadline=None)
@given(colorings, st.integers(2, 6))
def test_reversal_symmetry(data, k):
    # x -> -x maps k-APs to k-APs
    n, (r, colors) = data
    rev = [colors[-i % n] for i in range(n)]
    a = is_valid_coloring(Coloring(cyclic(n), r, colors), k)
    b = is_valid_coloring(Coloring(cyclic(n), r, rev), k)
    assert a == b


@settings(max_examples=200, deadline=None)
@given(colorings, st.integers(2, 6))
def test_validity_monotone_in_k(data, k):
    n, (r, colors) = data
    c = Coloring(cyclic(n), r, colors)
    if is_valid_coloring(c, k):
        assert is_valid_coloring(c, k + 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.data())
def test_free_sets_closed_under_subsets(n, data):
    S = data.draw(st.sets(st.integers(0, n - 1)))
    k = data.draw(st.integers(2, 5))
    T = data.draw(st.sets(st.sampled_from(sorted(S)))) if S else set()
    G = cyclic(n)
    if is_k_ap_free(G, S, k):
        assert is_k_ap_free(G, T, k)
    assert is_k_ap_free(G, S, k) == brute.is_free_cyclic(n, S, k)
