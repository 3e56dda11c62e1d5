from hypothesis import given, settings, strategies as st

from tubdecide import exactla as la

small = st.integers(min_value=-4, max_value=4)


def matrices(max_rows=4, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_kernel_of_zero_matrix_is_everything():
    ker = la.kernel_basis([[0, 0], [0, 0]], "right")
    assert la.rank(ker) == 2


def test_kernel_of_identity_is_empty():
    assert la.kernel_basis(la.identity(3), "right") == []


def test_kernel_rank_one():
    ker = la.kernel_basis([[1, 2], [2, 4]], "right")
    assert len(ker) == 1
    k = ker[0]
    assert k[0] == -2 * k[1]


def test_span_membership_and_complement():
    assert la.span_membership([[1, 0]], [1, 0])
    assert not la.span_membership([[1, 0]], [0, 1])
    comp = la.span_complement([[1, 0]], 2)
    assert la.rank([[1, 0]] + comp) == 2 and len(comp) == 1
    assert la.span_membership([[1, 2], [2, 4]], [3, 6])


def test_solve_examples():
    assert la.solve(la.identity(2), [3, 5]) == [3, 5]
    x = la.solve([[1, 1]], [2])
    assert x[0] + x[1] == 2
    assert la.solve([[1], [1]], [1, 2]) is None


def test_rationals_in_lowest_terms():
    q = la.rat("6/4")
    assert la.rat_str(q) == "3/2"
    assert la.rat_str(la.rat(-4) / 2) == "-2"


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    cols = len(m[0])
    ker = la.kernel_basis(m, "right", cols=cols)
    assert la.rank(m) + len(ker) == cols
    for k in ker:
        assert all(x == 0 for x in la.mat_vec(m, k))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_left_kernel_and_combinations(m, data):
    ker = la.kernel_basis(m, "left")
    assert la.rank(m) + len(ker) == len(m)
    coeffs = [data.draw(small) for _ in ker]
    v = [sum(c * k[i] for c, k in zip(coeffs, ker)) for i in range(len(m))]
    assert all(x == 0 for x in la.vec_mat(v, m))


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4), st.lists(small, min_size=4, max_size=4))
def test_solve_is_exact(m, b):
    b = b[:len(m)]
    x = la.solve(m, b)
    if x is not None:
        assert la.mat_vec(m, x) == [la.rat(v) for v in b]
    else:
        # inconsistent: b raises the rank of the augmented matrix
        aug = [row + [bi] for row, bi in zip(m, b)]
        assert la.rank(aug) > la.rank(m)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_inverse_and_det(m):
    inv = la.inverse(m)
    if la.det(m) == 0:
        assert inv is None
    else:
        assert la.mat_mul(m, inv) == la.identity(len(m))
