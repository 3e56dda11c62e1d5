import random

import pytest
from hypothesis import given, settings, strategies as st

from tubdecide import zq

TOKENS = tuple(f"h{k}" for k in range(6))


@pytest.fixture
def m2():
    return zq.family_model("1", ranks=(2, 2, 2, 2))


def test_membership_examples(m2):
    assert zq.membership(m2, zq.FD(0, 0, 5), zq.Ray(0, 0, 3))
    assert not zq.membership(m2, zq.FD(0, 0, 2), zq.Ray(0, 0, 3))
    assert zq.membership(m2, zq.GENERIC, zq.Cofinite(frozenset([zq.FD(0, 0, 1)])))
    assert not zq.membership(m2, zq.FD(0, 0, 1), zq.Cofinite(frozenset([zq.FD(0, 0, 1)])))
    # [2]E_1 = E_0[2] in a rank-2 tube
    assert zq.membership(m2, zq.FD(0, 0, 2), zq.Coray(0, 1, 1))
    assert zq.membership(m2, zq.Prufer(0, 1), zq.Ray(0, 1, 4))
    assert zq.membership(m2, zq.Adic(0, 1), zq.Coray(0, 1, 4))
    assert not zq.membership(m2, zq.GENERIC, zq.Ray(0, 1, 1))


def test_coray_coordinates_small_table():
    m = zq.family_model("1", ranks=(3, 2, 2))
    # [l]E_i has top E_i: explicit table for rank 3
    table = {(0, 1): 0, (0, 2): 1, (0, 3): 2, (1, 2): 2, (2, 2): 0, (2, 4): 2}
    for (i, l), j in table.items():
        assert zq.coray_point(m, 0, i, l) == zq.FD(0, j, l)
        assert zq.top_index(m, zq.FD(0, j, l)) == i


def test_normalize_examples(m2):
    U = zq.normalize(m2, [zq.Ray(0, 0, 3), zq.Ray(0, 0, 1)])
    assert U == zq.Union(rays=(((0, 0), 1),))
    x = zq.FD(1, 0, 1)
    C = zq.normalize(m2, [zq.Cofinite(frozenset([x, zq.FD(0, 0, 3)])), zq.Ray(0, 0, 2)])
    assert C == zq.Cofinite(frozenset([x]))
    E = zq.normalize(m2, [zq.FD(0, 0, 1)])
    assert E == zq.Union(extras=frozenset([zq.FD(0, 0, 1)]))
    # a ray absorbs the point directly below it
    assert zq.normalize(m2, [zq.Ray(0, 0, 2), zq.FD(0, 0, 1)]) == zq.Union(rays=(((0, 0), 1),))


def test_contains_examples(m2):
    assert zq.contains(m2, zq.normalize(m2, [zq.Ray(0, 0, 2)]), [zq.normalize(m2, [zq.Ray(0, 0, 1)])])
    U = zq.normalize(m2, [zq.Ray(0, 0, 1)])
    Ws = [zq.normalize(m2, [zq.Ray(0, 0, 3)]), zq.normalize(m2, [zq.FD(0, 0, 1)]),
          zq.normalize(m2, [zq.FD(0, 0, 2)])]
    assert zq.contains(m2, U, Ws)
    assert zq.brute_contains(m2, U, Ws, levels=10)
    C = zq.normalize(m2, [zq.Cofinite(frozenset([zq.FD(2, 0, 1)]))])
    Ws = [zq.normalize(m2, [zq.Ray(0, 0, 1)]), zq.normalize(m2, [zq.Coray(1, 0, 1)]),
          zq.normalize(m2, [zq.FD(3, 1, 2)])]
    assert not zq.contains(m2, C, Ws)


def test_closure_examples(m2):
    S = zq.point_set(m2, [("ray", 0, 1, 1)])
    C = zq.closure_adjoin(S)
    assert C.has(zq.Prufer(0, 1)) and C.has(zq.GENERIC)
    assert not S.has(zq.Prufer(0, 1))
    F = zq.point_set(m2, [zq.FD(0, 0, 1), zq.FD(1, 1, 3)])
    assert zq.is_closed(F)
    A = zq.point_set(m2, [zq.Adic(2, 0)])
    CA = zq.closure_adjoin(A)
    assert CA.has(zq.GENERIC) and not A.has(zq.GENERIC)
    Co = zq.closure_adjoin(zq.point_set(m2, [("coray", 1, 0, 2)]))
    assert Co.has(zq.Adic(1, 0)) and Co.has(zq.GENERIC)


def test_rank_validation():
    with pytest.raises(zq.ModelError):
        zq.family_model("1", ranks=(1, 2))
    with pytest.raises(zq.ModelError):
        zq.family_model("0")


def test_json_round_trip(m2):
    U = zq.normalize(m2, [zq.Ray(0, 1, 2), zq.Coray("h0", 0, 3), zq.FD(2, 0, 1)])
    assert zq.form_from_json(m2, zq.form_to_json(U)) == U
    C = zq.normalize(m2, [zq.Cofinite(frozenset([zq.FD(0, 0, 2)]))])
    assert zq.form_from_json(m2, zq.form_to_json(C)) == C
    assert zq.model_from_json(zq.model_to_json(m2)) == m2


def random_form(m, tubes, rng):
    prims = []
    if rng.random() < 0.2:
        ex = [zq.fd_point(m, t, rng.randrange(m.rank(t)), rng.randint(1, 5))
              for t in rng.sample(tubes, 2) for _ in range(rng.randint(0, 2))]
        prims.append(zq.Cofinite(frozenset(ex)))
    for _ in range(rng.randint(0, 4)):
        t = rng.choice(tubes)
        i = rng.randrange(m.rank(t))
        s = rng.randint(1, 5)
        k = rng.random()
        if k < 0.35:
            prims.append(zq.Ray(t, i, s))
        elif k < 0.7:
            prims.append(zq.Coray(t, i, s))
        else:
            prims.append(zq.fd_point(m, t, i, rng.randint(1, 6)))
    return zq.normalize(m, prims), prims


def case_of(U) -> str:
    if isinstance(U, zq.Cofinite):
        return "cofinite"
    if U.rays:
        return "rays"
    if U.corays:
        return "corays"
    return "finite"


def run_random_instances(count_per_type: int, seed: int):
    rng = random.Random(seed)
    seen = {}
    agree = 0
    for ranks in zq.DEFAULT_RANKS.values():
        m = zq.family_model("3/2", ranks=ranks)
        tubes = list(range(len(ranks))) + list(TOKENS[:2])
        for _ in range(count_per_type):
            U, _ = random_form(m, tubes, rng)
            Ws = [random_form(m, tubes, rng)[0] for _ in range(rng.randint(0, 3))]
            got = zq.contains(m, U, Ws)
            agree += got == zq.brute_contains(m, U, Ws, levels=12, tokens=TOKENS)
            seen[(case_of(U), got)] = seen.get((case_of(U), got), 0) + 1
    return agree, seen


def test_contains_agrees_with_brute_force():
    agree, seen = run_random_instances(150, seed=3)
    assert agree == 600
    for case in ("finite", "cofinite", "rays", "corays"):
        assert sum(v for (c, _), v in seen.items() if c == case) > 0


def test_normalize_properties():
    rng = random.Random(11)
    for ranks in zq.DEFAULT_RANKS.values():
        m = zq.family_model("2", ranks=ranks)
        tubes = list(range(len(ranks))) + list(TOKENS[:2])
        for _ in range(40):
            U, prims = random_form(m, tubes, rng)
            assert zq.normalize(m, [U]) == U
            for p in zq.truncated_points(m, 10, TOKENS[:3]):
                assert zq.membership(m, p, U) == any(zq.membership(m, p, q) for q in prims)
            assert zq.is_closed(zq.complement(m, U))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_contains_property(seed):
    rng = random.Random(seed)
    ranks = rng.choice(list(zq.DEFAULT_RANKS.values()))
    m = zq.family_model("1", ranks=ranks)
    tubes = list(range(len(ranks))) + ["h0"]
    U, _ = random_form(m, tubes, rng)
    Ws = [random_form(m, tubes, rng)[0] for _ in range(rng.randint(0, 3))]
    assert zq.contains(m, U, Ws) == zq.brute_contains(m, U, Ws)
    assert zq.contains(m, U, [U])
