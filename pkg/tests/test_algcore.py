import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from tubdecide import eulerk0 as ek
from tubdecide import exactla as la
from tubdecide import fixtures as fx
from tubdecide.algcore import (
    AlgebraError, ModulePresentation, algebra_from_json, algebra_to_json, build_canonical, canonical,
    dim_vector, direct_sum, dual_module, hom_basis, hom_dim, module_from_json, module_to_json,
    quotient_by_tuple, regular_module, simple_module, validate,
)

CARTAN = [
    [1, 1, 1, 1, 1, 2],
    [0, 1, 0, 0, 0, 1],
    [0, 0, 1, 0, 0, 1],
    [0, 0, 0, 1, 0, 1],
    [0, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 1],
]


@pytest.fixture(scope="module")
def A():
    return canonical()


def test_canonical_dimension_and_cartan(A):
    assert A.cartan == CARTAN
    assert A.dim == 16 == sum(map(sum, CARTAN))
    assert A.vertices == ("0", "1", "2", "3", "4", "inf")


def test_idempotents_sum_to_one(A):
    total = [la.ZERO] * A.dim
    for e in A.idempotents:
        total = [a + b for a, b in zip(total, e)]
    assert total == A.one


@pytest.mark.parametrize("weights,params", [((2, 2, 2, 2), (2,)), ((2, 2, 2, 2), (3,)), ((3, 3, 3), ()),
                                            ((2, 4, 4), ()), ((2, 3, 6), ())])
def test_all_tubular_types_validate(weights, params):
    assert validate(build_canonical(weights, params)) == (True, "ok")


def test_invalid_parameter_rejected():
    for bad in ((0,), (1,)):
        with pytest.raises(AlgebraError):
            build_canonical((2, 2, 2, 2), bad)


def test_validate_module_violations(A):
    X = fx.fixture_X(A)
    assert validate(X) == (True, "ok")
    acts = [list(map(list, M)) for M in X.actions]
    acts[A.unit_index][0][0] = la.rat(2)
    ok, msg = validate(ModulePresentation(A, X.dim, tuple(acts), "bad"))
    assert not ok and msg.startswith("unit action")
    # perturb one arrow entry: a relation breaks
    acts = [list(map(list, M)) for M in X.actions]
    k = A.basis.index("a4_1")
    r, c = next((r, c) for r in range(X.dim) for c in range(X.dim) if acts[k][r][c])
    acts[k][r][c] += 1
    ok, msg = validate(ModulePresentation(A, X.dim, tuple(acts), "bad"))
    assert not ok and "relation" in msg


def test_dim_vectors(A):
    for v in range(A.n_vertices):
        e = [0] * A.n_vertices
        e[v] = 1
        assert list(dim_vector(simple_module(A, v))) == e
    # regular module: row sums of the Cartan matrix (C[i][j] = dim e_j R e_i)
    assert list(dim_vector(regular_module(A))) == [sum(r) for r in CARTAN]
    assert dim_vector(fx.fixture_X(A)) == (1, 0, 1, 1, 1, 1)


def test_hom_basics(A):
    X = fx.fixture_X(A)
    H = hom_basis(X, X)
    assert len(H) == 1
    assert la.span_membership([sum(h, []) for h in H], sum(la.identity(X.dim), []))
    assert hom_dim(simple_module(A, 1), simple_module(A, 2)) == 0
    with pytest.raises(AlgebraError):
        hom_dim(X, simple_module(A.opposite, 0))


def test_projective_hom_identity(A):
    for M in fx.corpus()[:14]:
        for v in range(A.n_vertices):
            assert hom_dim(fx.projective(A, v), M) == dim_vector(M)[v]


def test_hom_composition_closed(A):
    C = fx.corpus()
    M, N, L = C[6], fx.fixture_X(A), C[12]
    HL = hom_basis(M, L)
    span = [sum(h, []) for h in HL]
    for f in hom_basis(M, N):
        for g in hom_basis(N, L):
            comp = la.mat_mul_shape(f, g, M.dim, N.dim, L.dim) if M.dim and N.dim and L.dim else []
            if comp:
                assert la.span_membership(span, sum(comp, [])) if span else la.is_zero_mat(comp)


def test_hom_matches_euler_form_off_slope(A):
    # X of slope 1; for Y of slope > 1 Ext(X,Y) = 0
    X = fx.fixture_X(A)
    for M in fx.slope_corpus():
        q = ek.slope_of(A, dim_vector(M))
        if q is not ek.INF and q > 1:
            assert hom_dim(X, M) == ek.euler_pair(A, dim_vector(X), dim_vector(M))


def test_quotients(A):
    X = fx.fixture_X(A)
    assert quotient_by_tuple(X, []).dim == X.dim
    assert quotient_by_tuple(X, la.identity(X.dim)).dim == 0
    R = regular_module(A)
    assert quotient_by_tuple(R, [A.one]).dim == 0


def test_duals_and_sums(A):
    X = fx.fixture_X(A)
    S = simple_module(A, 2)
    D = dual_module(S)
    assert D.algebra is A.opposite and dim_vector(D) == dim_vector(S)
    assert dim_vector(dual_module(dual_module(X))) == dim_vector(X)
    s = direct_sum(X, S)
    assert list(dim_vector(s)) == [a + b for a, b in zip(dim_vector(X), dim_vector(S))]
    # slope 1 goes to 1/1 over the opposite algebra
    assert ek.slope_of(A.opposite, dim_vector(dual_module(X))) == 1


def test_dual_inverts_slope(A):
    for M in fx.slope_corpus()[:6]:
        q = ek.slope_of(A, dim_vector(M))
        assert ek.slope_of(A.opposite, dim_vector(dual_module(M))) == 1 / q


def test_json_round_trip(A):
    B = algebra_from_json(json.loads(json.dumps(algebra_to_json(A))))
    assert B.dim == A.dim and B.cartan == A.cartan
    X = fx.fixture_X(A)
    Y = module_from_json(json.loads(json.dumps(module_to_json(X))))
    assert Y.algebra is A and Y.actions == X.actions


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_representations_are_modules(seed):
    A = canonical()
    rng = random.Random(seed)
    dims = [rng.randint(0, 2) for _ in range(6)]
    M = fx.random_representation(A, dims, rng)
    assert validate(M) == (True, "ok")
    assert list(dim_vector(M)) == dims
