import json
import random

import pytest

from tubdecide import driver as dr
from tubdecide import eulerk0 as ek
from tubdecide import exactla as la
from tubdecide import fixtures as fx
from tubdecide import ppcalc as pp
from tubdecide import slopeprof as sp
from tubdecide.algcore import canonical, dim_vector

V_CLAIM = [0, -1, 0, 0, 0, 1]


@pytest.fixture(scope="module")
def A():
    return canonical()


@pytest.fixture(scope="module")
def rep_x(A):
    return pp.rep_functor_pair(fx.fixture_X(A))


@pytest.fixture(scope="module")
def x0(A):
    return pp.pair(pp.parse("x1 = x1*e0", A), pp.bottom(A))


def vertex_pairs(A):
    return [pp.pair(pp.parse(f"x1 = x1*e{v}", A), pp.bottom(A)) for v in A.vertices]


def test_closed_pair_is_included(A, rep_x):
    closed = pp.pair(pp.top(A), pp.top(A))
    assert dr.decide_inclusion(closed, []).verdict == dr.INCLUDED
    assert dr.decide_inclusion(closed, [rep_x]).verdict == dr.INCLUDED


def test_pair_inside_itself(rep_x):
    d = dr.decide_inclusion(rep_x, [rep_x])
    assert d.verdict == dr.INCLUDED and d.blocking == []


def test_claim_pair_not_included_in_nothing(A, rep_x):
    d = dr.decide_inclusion(rep_x, [])
    assert d.verdict == dr.NOT_INCLUDED
    w = d.witness
    x = w["dim_vector"]
    ed = ek.euler_data(A)
    # profile arithmetic route
    assert ek.is_indec_dimvector(A, x)
    q = ed.slope(x)
    prof = sp.slope_profile(rep_x)
    i = prof.interval_of(q)
    assert i is not None and ek.dot(prof.vectors[i], x) > 0
    # evaluation route
    assert w["kind"] == "module"
    M = w["module"]
    assert list(dim_vector(M)) == list(x) and pp.pair_open(rep_x, M)


def test_witness_closes_all_other_pairs(A, rep_x, x0):
    d = dr.decide_inclusion(x0, [rep_x])
    assert d.verdict == dr.NOT_INCLUDED
    M = d.witness["module"]
    assert pp.pair_open(x0, M) and not pp.pair_open(rep_x, M)


def test_boundary_exhaustion_gives_unknown(A):
    top = pp.pair(pp.top(A), pp.bottom(A))
    d = dr.decide_inclusion(top, vertex_pairs(A), boundary_bound=2)
    # every non-zero module opens some vertex pair, but the bounded boundary search cannot certify it
    assert d.verdict == dr.UNKNOWN
    assert {b["slope"] for b in d.blocking} == {"0", "inf"}


def test_never_false_included(A, rep_x, x0):
    for p, qs in [(x0, [rep_x]), (rep_x, []), (rep_x, [x0])]:
        assert dr.decide_inclusion(p, qs).verdict != dr.INCLUDED


def test_algebra_mismatch(A, rep_x):
    other = pp.pair(pp.top(canonical((2, 2, 2, 2), (3,))), pp.bottom(canonical((2, 2, 2, 2), (3,))))
    with pytest.raises(dr.DriverError):
        dr.decide_inclusion(rep_x, [other])


def test_determinism(rep_x, x0):
    a = json.dumps(dr.decide_inclusion(x0, [rep_x], seed=4).to_json(), sort_keys=True)
    b = json.dumps(dr.decide_inclusion(x0, [rep_x], seed=4).to_json(), sort_keys=True)
    assert a == b


def test_trace_streams_steps(rep_x):
    seen = []
    dr.decide_inclusion(rep_x, [], trace=seen.append)
    assert [e["step"] for e in seen][:2] == ["profiles", "interval"]


# --- breakpoint policy, branch by branch ---

def _bp(A, q, p, pairs, form=None):
    ed = ek.euler_data(A)
    return dr._breakpoint(A, ed, la.rat(q), p, sp.slope_profile(p), pairs,
                          [sp.slope_profile(r) for r in pairs], form, seed=0)


def test_breakpoint_homogeneous_witness(A):
    top = pp.pair(pp.top(A), pp.bottom(A))
    r = _bp(A, 1, top, [])
    assert r["result"] == "witness"
    M = r["witness"]["module"]
    assert dim_vector(M) == (1, 1, 1, 1, 1, 1) and pp.pair_open(top, M)


def test_breakpoint_passes_when_pair_closed(A, rep_x):
    r = _bp(A, "1/2", rep_x, [])
    assert r["result"] == "passed"


def test_breakpoint_of_the_pair_itself_is_unknown(A, rep_x):
    # v . (h0 + h_inf) = 0 on both sides of 1, yet X itself opens the pair
    r = _bp(A, 1, rep_x, [])
    assert r["result"] == "unknown"
    assert pp.pair_open(rep_x, fx.fixture_X(A))


def test_breakpoint_with_forms(A, rep_x):
    fam = {"slope": "1", "ranks": [2, 2, 2, 2]}
    inside = {"family": fam, "U": {"rays": [[0, 0, 2]]}, "W": [{"rays": [[0, 0, 1]]}]}
    assert _bp(A, 1, rep_x, [], inside)["result"] == "passed"
    outside = {"family": fam, "U": {"rays": [[0, 0, 1]]}, "W": [{"rays": [[0, 0, 3]]}]}
    r = _bp(A, 1, rep_x, [], outside)
    assert r["result"] == "witness" and r["witness"]["kind"] == "symbolic_point"
    assert r["witness"]["point"] == {"fd": [0, 0, 1]}


# --- sentences ---

def atom(p, **kw):
    return dict(pair=pp.pair_to_json(p), **kw)


def test_sentence_trivial_cases(A):
    top = pp.pair(pp.top(A), pp.bottom(A))
    closed = pp.pair(pp.top(A), pp.top(A))
    assert dr.decide_sentence(atom(top, gt=1), A)["result"] == dr.SATISFIABLE
    assert dr.decide_sentence(atom(closed, gt=1), A)["result"] == dr.UNSATISFIABLE
    assert dr.decide_sentence(atom(top, eq=3), A)["result"] == dr.UNSATISFIABLE
    assert dr.decide_sentence(atom(top, ge=1), A)["result"] == dr.SATISFIABLE
    both = {"and": [atom(top, ge=2), {"not": atom(top, ge=2)}]}
    assert dr.decide_sentence(both, A)["result"] == dr.UNSATISFIABLE
    assert dr.decide_sentence({"not": both}, A)["result"] == dr.SATISFIABLE
    with pytest.raises(dr.SentenceError):
        dr.decide_sentence({"pair": pp.pair_to_json(top)}, A)


def test_sentence_claim_pattern(A, rep_x, x0):
    expr = {"and": [atom(x0, gt=1), atom(rep_x, eq=1)]}
    r = dr.decide_sentence(expr, A)
    assert r["result"] == dr.SATISFIABLE
    for w in r["witness"]["summands"]:
        M = w["module"]
        assert pp.pair_open(x0, M) and not pp.pair_open(rep_x, M)
    # the (2,3,2,2,2,3) witness satisfies the same conjunct
    x = (2, 3, 2, 2, 2, 3)
    ed = ek.euler_data(A)
    assert ek.is_indec_dimvector(A, x) and 1 < ed.slope(x) < 2
    assert x[0] > 0 and ek.dot(V_CLAIM, x) == 0
    M = fx.random_indecomposable(A, x, random.Random(0))
    assert M is not None and pp.pair_open(x0, M) and not pp.pair_open(rep_x, M)


def test_dnf_expansion():
    a = dr.Atom(None, True, "a")
    b = dr.Atom(None, False, "b")
    tree = ("and", [("or", [("atom", a), ("atom", b)]), ("not", ("atom", a))])
    conj = dr._dnf(tree)
    assert [[(x.label, x.open) for x in c] for c in conj] == [[("a", True), ("a", False)],
                                                            [("b", False), ("a", False)]]
