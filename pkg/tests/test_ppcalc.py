import random

import pytest
from hypothesis import given, settings, strategies as st

from tubdecide import exactla as la
from tubdecide import fixtures as fx
from tubdecide import ppcalc as pp
from tubdecide.algcore import (
    canonical, dim_vector, dual_module, hom_dim, quotient_by_tuple, regular_module, simple_module, zero_module,
)
from tubdecide.moddecomp import are_isomorphic


@pytest.fixture(scope="module")
def A():
    return canonical()


def random_formula(A, rng, n=1):
    l, m = rng.randint(0, 1), rng.randint(1, 2)
    H = []
    for _ in range(n + l):
        row = []
        for _ in range(m):
            e = [la.ZERO] * A.dim
            for _ in range(rng.randint(0, 2)):
                e[rng.randrange(A.dim)] += rng.randint(-2, 2)
            row.append(e)
        H.append(row)
    return pp.make_formula(A, n, l, H)


def formula_corpus(A, size=24, seed=5):
    rng = random.Random(seed)
    out = [pp.top(A), pp.bottom(A), pp.parse("x1 = x1*e0", A), pp.parse("E y1 . x1 = y1*a1_1", A)]
    while len(out) < size:
        out.append(random_formula(A, rng))
    return out


def modules():
    return list(fx.corpus())


def test_parse_and_render(A):
    f = pp.parse("E y1 . x1 = y1*a1_1 & x1*e0 = 0", A)
    assert f.n == 1 and f.l == 1
    g = pp.parse(pp.render(f), A)
    assert pp.equivalent(f, g)
    with pytest.raises(pp.FormulaError):
        pp.parse("x1 = ", A)


def test_top_bottom_values(A):
    for M in modules():
        assert pp.evaluate(pp.top(A), M) == M.dim
        assert pp.evaluate(pp.bottom(A), M) == 0


def test_lattice_laws(A):
    fs = formula_corpus(A, 10)
    for f in fs:
        assert pp.equivalent(pp.meet(pp.top(A), f), f)
        assert pp.equivalent(pp.join(pp.bottom(A), f), f)
    for f, g in zip(fs, fs[1:]):
        for M in modules()[:12]:
            lhs = pp.evaluate(pp.meet(f, g), M) + pp.evaluate(pp.join(f, g), M)
            assert lhs == pp.evaluate(f, M) + pp.evaluate(g, M)


def test_meet_join_are_intersection_and_sum(A):
    fs = formula_corpus(A, 8, seed=9)
    for f, g in zip(fs, fs[1:]):
        for M in modules()[:10]:
            F = pp.solution_space(f, M)
            G = pp.solution_space(g, M)
            both = la.rank(F + G) if F + G else 0
            assert pp.evaluate(pp.join(f, g), M) == both
            assert pp.evaluate(pp.meet(f, g), M) == len(F) + len(G) - both


def test_dual_examples(A):
    assert pp.equivalent(pp.dual(pp.top(A)), pp.bottom(A, side="left"))
    for name in ("a1_1", "a2_2", "e0"):
        a = A.element(name)
        assert pp.equivalent(pp.dual(pp.annihilator(A, a)), pp.divisibility(A, a, "left"))


def test_double_dual(A):
    for f in formula_corpus(A):
        dd = pp.dual(pp.dual(f))
        assert dd.side == f.side
        assert pp.equivalent(dd, f)
        for M in modules()[:6]:
            assert pp.evaluate(dd, M) == pp.evaluate(f, M)


def test_duality_anti_isomorphism(A):
    fs = formula_corpus(A)
    mods = modules()[:12]
    for f, g in zip(fs, fs[3:]):
        p = pp.pair(f, g)
        d = pp.dual_pair(p)
        for M in mods:
            assert pp.pair_open(p, M) == pp.pair_open(d, dual_module(M))


def test_free_realization_identity(A):
    for f in formula_corpus(A, 12):
        M, tup = pp.free_realization(f)
        C = quotient_by_tuple(M, tup)
        for N in modules()[:12]:
            assert pp.evaluate(f, N) == hom_dim(M, N) - hom_dim(C, N)


def test_free_realization_examples(A):
    M, tup = pp.free_realization(pp.top(A))
    assert M.dim == A.dim
    M, tup = pp.free_realization(pp.bottom(A))
    assert M.dim == 0
    X = fx.fixture_X(A)
    M, _ = pp.free_realization(pp.pp_type_generator(X))
    assert are_isomorphic(M, X).verdict == "yes"


def test_pp_type_generator(A):
    R = regular_module(A)
    assert pp.equivalent(pp.pp_type_generator(R, [A.one]), pp.top(A))
    X = fx.fixture_X(A)
    gens = pp.module_generators(X)
    g = pp.pp_type_generator(X, gens)
    assert pp.satisfies(g, X, gens)
    S = simple_module(A, 2)
    gs = pp.pp_type_generator(S)
    for v in range(A.n_vertices):
        if v != 2:
            e = A.idempotents[v]
            assert pp.leq(gs, pp.annihilator(A, e))


def test_rep_functor_pair(A):
    assert all(pp.pair_dim(pp.rep_functor_pair(regular_module(A)), N) == N.dim for N in modules()[:8])
    mods = modules()
    rng = random.Random(1)
    for _ in range(10):
        M, N = rng.choice(mods), rng.choice(mods)
        assert pp.pair_dim(pp.rep_functor_pair(M), N) == hom_dim(M, N)


def test_tensor_functor_pair(A):
    z = pp.tensor_functor_pair(zero_module(A))
    assert not any(pp.pair_open(z, N) for N in modules())
    X = fx.fixture_X(A)
    t = pp.tensor_functor_pair(X)
    for N in modules()[:12]:
        assert pp.pair_dim(t, N) == hom_dim(N, X)
    P0 = fx.projective(A, 5)
    assert pp.pair_dim(pp.tensor_functor_pair(P0), simple_module(A, 5)) == hom_dim(simple_module(A, 5), P0)


def test_pair_open_consistency(A):
    X = fx.fixture_X(A)
    p = pp.pair(pp.parse("x1 = x1*einf", A), pp.bottom(A))
    for M in modules():
        assert pp.pair_dim(p, M) == dim_vector(M)[5]
    assert pp.pair_dim(p, X) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_leq_is_sound_on_modules(seed):
    A = canonical()
    rng = random.Random(seed)
    f, g = random_formula(A, rng), random_formula(A, rng)
    if pp.leq(f, g):
        for M in modules()[:10]:
            F = pp.solution_space(f, M)
            G = pp.solution_space(g, M)
            if not G:
                assert not F
            else:
                assert la.rank(F + G) == la.rank(G)
