import functools
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from tubdecide import eulerk0 as ek
from tubdecide import intlin as il
from tubdecide.algcore import canonical

B = il.Block
V_CLAIM = [0, -1, 0, 0, 0, 1]


@pytest.fixture(scope="module")
def A():
    return canonical()


@functools.lru_cache(maxsize=None)
def window_vectors(lo, hi, bound=12):
    """Indecomposable vectors with slope in (lo, hi), entries <= bound; chi <= 1 prunes the arms."""
    A = canonical()
    ed = ek.euler_data(A)
    out = []
    for x0 in range(bound + 1):
        for xi in range(bound + 1):
            s = x0 + xi
            arms = [c for c in range(bound + 1) if abs(2 * c - s) <= 2]
            for mid in itertools.product(arms, repeat=4):
                x = (x0,) + mid + (xi,)
                if not ek.is_indec_dimvector(A, x) or ek.classify_vector(ed, x) != "slope":
                    continue
                q = ed.slope(x)
                if q is not None and q is not ek.INF and lo < q < hi:
                    out.append(x)
    return out


def test_feasible_examples():
    assert il.feasible(il.single(1, B().gt([1], 0).lt([1], 1))) is None
    assert list(il.feasible(il.single(1, B().eq([2], 4)))) == [2]
    x = il.feasible(il.single(2, B().eq([3, -2], 1).ge([1, 0], 0).ge([0, 1], 0)))
    assert 3 * x[0] - 2 * x[1] == 1 and min(x) >= 0


def random_system(rng):
    n = rng.randint(1, 3)
    blocks = []
    for _ in range(rng.randint(1, 2)):
        b = B()
        for i in range(n):
            e = [0] * n
            e[i] = 1
            b.ge(e, -4)
            b.le(e, 4)
        for _ in range(rng.randint(0, 2)):
            b.eq([rng.randint(-4, 4) for _ in range(n)], rng.randint(-6, 6))
        for _ in range(rng.randint(0, 4)):
            b.le([rng.randint(-5, 5) for _ in range(n)], rng.randint(-6, 6))
        blocks.append(b)
    return il.LinearConstraintSystem(n, blocks)


def test_feasible_agrees_with_brute_force():
    rng = random.Random(3)
    for _ in range(250):
        s = random_system(rng)
        a, bf = il.feasible(s), il.brute_force(s, 4)
        assert (a is None) == (bf is None)
        if a is not None:
            assert s.holds(a)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_unbounded_systems_witness_when_brute_force_finds_one(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    b = B()
    for _ in range(rng.randint(1, 4)):
        b.le([rng.randint(-7, 7) for _ in range(n)], rng.randint(-9, 9))
    s = il.single(n, b)
    a = il.feasible(s)
    if a is not None:
        assert s.holds(a)
    elif il.brute_force(s, 8) is not None:
        pytest.fail("feasible missed a bounded witness")


def test_encode_indecomposable_matches_predicate(A):
    sys = il.encode_indecomposable(A)
    assert sys.holds((1, 0, 1, 1, 1, 1))
    for k in range(1, 4):
        assert sys.holds(tuple(k * 2 for _ in range(6)))
    for x in itertools.product(range(3), repeat=6):
        assert sys.holds(x) == ek.is_indec_dimvector(A, x)


def test_window_examples(A):
    ed = ek.euler_data(A)
    x = il.window_query(A, "1", "2", [1, 0, 0, 0, 0, 0])
    assert x is not None and x[0] > 0 and 1 < ed.slope(x) < 2
    assert il.window_query(A, "1", "2", [1, 1, 1, 1, 1, 1], [[1, 0, 0, 0, 0, 0]]) is None
    y = il.window_query(A, "1", "2", V_CLAIM)
    assert ed.pair((1, 0, 1, 1, 1, 1), y) > 0 and 1 < ed.slope(y) < 2
    assert il.window_system(A, "1", "2", V_CLAIM).holds((4, 5, 5, 5, 5, 6))
    assert il.window_system(A, "1", "2", [1, 0, 0, 0, 0, 0], [V_CLAIM]).holds((2, 3, 2, 2, 2, 3))


def test_window_against_brute_force(A):
    brute = window_vectors(1, 2)
    closed = [x for x in brute if x[0] > 0 and x[5] == x[1]]
    assert (2, 3, 2, 2, 2, 3) in closed
    x = il.window_query(A, "1", "2", [1, 0, 0, 0, 0, 0], [V_CLAIM])
    assert x is not None and tuple(x) in set(brute) and x[5] == x[1]
    assert not [x for x in brute if x[0] == 0]


def test_window_infinite_end(A):
    ed = ek.euler_data(A)
    x = il.window_query(A, 1, ek.INF, V_CLAIM)
    assert x is not None and ed.slope(x) > 1


def test_invalid_window(A):
    with pytest.raises(Exception):
        il.window_query(A, "2", "1", [1] * 6)


def test_nonuniformity_probe(A):
    r = il.nonuniformity_probe(A, ("1", "2"), V_CLAIM)
    assert r.nonuniform
    ed = ek.euler_data(A)
    for x in (r.open_witness, r.closed_witness):
        assert ek.is_indec_dimvector(A, x) and 1 < ed.slope(x) < 2
    assert ed.pair((1, 0, 1, 1, 1, 1), r.open_witness) > 0
    assert ed.pair((1, 0, 1, 1, 1, 1), r.closed_witness) == 0
    r0 = il.nonuniformity_probe(A, ("1", "2"), [0] * 6)
    assert r0.open_witness is None and r0.closed_witness is not None
    r1 = il.nonuniformity_probe(A, ("1", "2"), [1] * 6)
    assert r1.open_witness is not None and r1.closed_witness is None


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(["1/3", "1/2", "1", "3/2", "2"]), st.sampled_from(["1/2", "1", "2", "3"]),
       st.lists(st.integers(-1, 1), min_size=6, max_size=6))
def test_window_witness_rechecks_and_monotone(a, width, w):
    A = canonical()
    ed = ek.euler_data(A)
    lo = ek.parse_slope(a)
    hi = lo + ek.parse_slope(width)
    if not any(w):
        return
    x = il.window_query(A, lo, hi, w)
    if x is not None:
        assert ek.is_indec_dimvector(A, x) and lo < ed.slope(x) < hi
        assert sum(p * q for p, q in zip(w, x)) > 0
        # enlarging the window keeps a witness
        assert il.window_query(A, lo / 2, hi + 1, w) is not None
