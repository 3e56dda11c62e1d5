"""Deciding (phi/psi) inside the union of (phi_i/psi_i), and invariant sentences.

The pipeline runs over the slope line: open intervals between profile
breakpoints (window queries), interior breakpoints (homogeneous tests and
optional canonical forms), and the two boundary slopes (bounded search).
Any undecided piece makes the verdict Unknown; Included is only reported
when every piece is settled.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from . import eulerk0 as ek
from . import exactla as la
from . import intlin
from . import onept
from . import ppcalc as pp
from . import slopeprof as sp
from . import zq
from .algcore import dim_vector, module_to_json
from .fixtures import random_indecomposable

INCLUDED = "Included"
NOT_INCLUDED = "NotIncluded"
UNKNOWN = "Unknown"


class DriverError(ValueError):
    pass


@dataclass
class Decision:
    verdict: str
    witness: dict | None = None
    blocking: list = field(default_factory=list)
    log: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": _jsonable(self.witness),
                "blocking": self.blocking, "log": _jsonable(self.log)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "algebra") and hasattr(obj, "actions"):
        return module_to_json(obj)
    if obj is ek.INF:
        return "inf"
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    try:
        return la.rat_str(obj)
    except Exception:
        return str(obj)


def _dot(v, x) -> int:
    return sum(int(a) * int(b) for a, b in zip(v, x))


def _dominates(p: pp.PpPair, q: pp.PpPair) -> bool:
    """(p) inside (q) whenever phi_p <= phi_q and psi_q <= psi_p."""
    if p.n != q.n:
        return False
    return pp.leq(p.phi, q.phi) and pp.leq(q.psi, p.psi)


def _check_algebra(pair, pairs):
    for q in pairs:
        if q.phi.algebra is not pair.phi.algebra or q.side != pair.side:
            raise DriverError("algebra mismatch")
    if pair.side != "right":
        raise DriverError("pairs must be right pairs over a canonical algebra")


def _concrete(A, x, pair, pairs, seed):
    """A module of dimension vector x confirming the witness by direct evaluation, if one is found."""
    rng = random.Random(seed)
    M = random_indecomposable(A, x, rng, attempts=8, label=f"W{tuple(x)}")
    if M is None:
        return None
    if pp.pair_open(pair, M) and not any(pp.pair_open(q, M) for q in pairs):
        return M
    return None


def _interval_label(lo, hi) -> str:
    return f"({ek.slope_str(lo)},{ek.slope_str(hi)})"


def decide_inclusion(pair: pp.PpPair, pairs, forms: dict | None = None, boundary_bound: int = 3,
                     seed: int = 0, trace=None, concrete: bool = True) -> Decision:
    """Decide whether every indecomposable pure-injective opening ``pair`` opens some pair in ``pairs``.

    ``forms`` maps a slope string to {"family": ..., "U": form, "W": [forms]}
    giving canonical compact-open forms at that breakpoint.
    """
    pairs = list(pairs)
    _check_algebra(pair, pairs)
    A = pair.phi.algebra
    ed = ek.euler_data(A)
    log: list = []

    def note(entry):
        log.append(entry)
        if trace:
            trace(entry)

    if pp.leq(pair.phi, pair.psi):
        note({"step": "syntactic", "result": "pair closed everywhere"})
        return Decision(INCLUDED, log=log)
    for k, q in enumerate(pairs):
        if _dominates(pair, q):
            note({"step": "syntactic", "result": f"pair inside pair {k}"})
            return Decision(INCLUDED, log=log)

    prof = sp.slope_profile(pair)
    profs = [sp.slope_profile(q) for q in pairs]
    bps = sorted(set(prof.breakpoints).union(*[set(p.breakpoints) for p in profs]))
    note({"step": "profiles", "breakpoints": [ek.slope_str(b) for b in bps],
          "pair": prof.to_json(), "pairs": [p.to_json() for p in profs]})
    blocking = []

    # (2) open intervals
    ends = [la.rat(0)] + bps + [ek.INF]
    for lo, hi in zip(ends[:-1], ends[1:]):
        sample = sp._sample(bps, bps.index(hi) if hi is not ek.INF else len(bps))
        w = prof.vectors[prof.interval_of(sample)]
        V = [p.vectors[p.interval_of(sample)] for p in profs]
        if not any(w):
            note({"step": "interval", "interval": _interval_label(lo, hi), "result": "pair closed"})
            continue
        x = intlin.window_query(A, lo, hi, w, V)
        note({"step": "interval", "interval": _interval_label(lo, hi), "w": w, "V": V,
              "result": "witness" if x else "no witness", "x": x})
        if x is not None:
            wit = {"kind": "dimension_vector", "dim_vector": list(x), "slope": ek.slope_str(ed.slope(x)),
                   "interval": _interval_label(lo, hi), "pair_dim": _dot(w, x)}
            if concrete:
                M = _concrete(A, x, pair, pairs, seed)
                if M is not None:
                    wit["kind"] = "module"
                    wit["module"] = M
            return Decision(NOT_INCLUDED, wit, log=log)

    # (3) interior breakpoints
    forms = forms or {}
    for q in bps:
        res = _breakpoint(A, ed, q, pair, prof, pairs, profs, forms.get(ek.slope_str(q)), seed)
        note(dict(res, step="breakpoint", slope=ek.slope_str(q)))
        if res["result"] == "witness":
            return Decision(NOT_INCLUDED, res["witness"], log=log)
        if res["result"] == "unknown":
            blocking.append({"slope": ek.slope_str(q), "reason": res["reason"]})

    # (4) boundary slopes
    for side in ("zero", "infinity"):
        r = onept.boundary_query(pair, pairs, side, boundary_bound, seed)
        entry = {k: v for k, v in r.items() if k != "witness"}
        if r["result"] == "YES":
            w = r["witness"]
            entry["construction"] = w["construction"]
            note(dict(entry, step="boundary"))
            return Decision(NOT_INCLUDED, {"kind": "module", "boundary": side,
                                           "construction": w["construction"],
                                           "dim_vector": w["dim_vector"], "module": w["module"]}, log=log)
        note(dict(entry, step="boundary"))
        blocking.append({"slope": "0" if side == "zero" else "inf", "reason": "bounded boundary search exhausted"})

    if blocking:
        return Decision(UNKNOWN, blocking=blocking, log=log)
    return Decision(INCLUDED, log=log)


def _breakpoint(A, ed, q, pair, prof, pairs, profs, form, seed) -> dict:
    """Settle slope q: witness, passed, or unknown with a reason.

    For N in a homogeneous tube of slope q avoiding the finitely many tubes
    that contain factors of the free realizations, dim = v . dim N with v
    from either neighbouring interval (both agree on radical vectors of slope q).
    """
    wq = ed.radial_vector(q)
    below = (q + max([la.rat(0)] + [b for b in _all_bps(prof, profs) if b < q])) / 2

    def vec(p):
        return p.vectors[p.interval_of(below)]

    v = vec(prof)
    vs = [vec(p) for p in profs]
    open_h = _dot(v, wq) > 0
    closed_i = [_dot(u, wq) == 0 for u in vs]
    info = {"w_q": list(wq), "pair_homogeneous": "OpenOnHomogeneous" if open_h else "UniformlyClosed"}
    if q not in prof.breakpoints and not open_h:
        # v is valid on every module of slope q, so the pair is closed at q
        return dict(info, result="passed", reason="pair closed on all modules of slope q")
    if open_h and all(closed_i):
        M = _generic_homogeneous(A, wq, pair, pairs, seed)
        if M is not None:
            return dict(info, result="witness", witness={
                "kind": "module", "slope": ek.slope_str(q), "homogeneous": True,
                "dim_vector": list(dim_vector(M)), "module": M})
    if form is not None:
        model = zq.model_from_json(form.get("family", {"slope": ek.slope_str(q)}))
        U = zq.form_from_json(model, form["U"])
        Ws = [zq.form_from_json(model, W) for W in form.get("W", [])]
        if zq.contains(model, U, Ws):
            return dict(info, result="passed", reason="canonical forms: contained")
        pt = _point_outside(model, U, Ws)
        return dict(info, result="witness", witness={"kind": "symbolic_point", "slope": ek.slope_str(q),
                                                     "point": zq.point_to_json(pt) if pt else None})
    return dict(info, result="unknown", reason="breakpoint not settled by homogeneous tests")


def _all_bps(prof, profs):
    out = set(prof.breakpoints)
    for p in profs:
        out |= set(p.breakpoints)
    return sorted(out)


def _point_outside(model, U, Ws):
    tubes = set()
    for F in [U] + list(Ws):
        if isinstance(F, zq.Cofinite):
            tubes |= {p.tube for p in F.excluded}
        else:
            tubes |= {t for (t, _), _ in F.rays + F.corays} | {p.tube for p in F.extras}
    tokens = [t for t in tubes if isinstance(t, str)] + ["generic-tube"]
    for p in zq.truncated_points(model, 24, tokens):
        if zq.membership(model, p, U) and not any(zq.membership(model, p, W) for W in Ws):
            return p
    return None


def _generic_homogeneous(A, wq, pair, pairs, seed, attempts: int = 6):
    rng = random.Random(seed)
    for _ in range(attempts):
        M = random_indecomposable(A, wq, rng, attempts=4, label=f"H{tuple(wq)}")
        if M is None:
            continue
        if pp.pair_open(pair, M) and not any(pp.pair_open(r, M) for r in pairs):
            return M
    return None


# --- sentences ------------------------------------------------------------------

SATISFIABLE = "Satisfiable"
UNSATISFIABLE = "Unsatisfiable"


class SentenceError(ValueError):
    pass


@dataclass
class Atom:
    """|phi/psi| >= n (n >= 2 means open), or |phi/psi| = 1 (closed)."""

    pair: pp.PpPair
    open: bool
    label: str = ""


def parse_sentence(expr, algebra=None, loader=None):
    """Nested dict form: {"and": [...]}, {"or": [...]}, {"not": e}, or an atom
    {"pair": <pair json or file>, "ge": n} / {"pair": ..., "gt": n} / {"pair": ..., "eq": 1}.
    """
    if not isinstance(expr, dict):
        raise SentenceError("expression must be an object")
    for key in ("and", "or"):
        if key in expr:
            return (key, [parse_sentence(e, algebra, loader) for e in expr[key]])
    if "not" in expr:
        return ("not", parse_sentence(expr["not"], algebra, loader))
    if "pair" not in expr:
        raise SentenceError(f"malformed expression: {expr}")
    pj = expr["pair"]
    if isinstance(pj, str):
        if loader is None:
            raise SentenceError("pair given by file name but no loader")
        p = loader(pj)
    else:
        p = pp.pair_from_json(pj, algebra)
    label = expr.get("label", "")
    if "ge" in expr:
        n = int(expr["ge"])
        if n <= 1:
            return ("const", True)
        return ("atom", Atom(p, True, label))
    if "gt" in expr:
        n = int(expr["gt"])
        if n < 1:
            return ("const", True)
        return ("atom", Atom(p, True, label))
    if "eq" in expr:
        n = int(expr["eq"])
        if n == 1:
            return ("atom", Atom(p, False, label))
        # |phi/psi| = n for 1 < n: impossible over an infinite field
        return ("const", False)
    raise SentenceError("atom needs one of ge, gt, eq")


def _dnf(node, negate=False) -> list:
    """List of conjuncts; each conjunct a list of Atoms (or None for 'false')."""
    kind = node[0]
    if kind == "const":
        val = node[1] != negate
        return [[]] if val else []
    if kind == "atom":
        a = node[1]
        return [[Atom(a.pair, a.open != negate, a.label)]]
    if kind == "not":
        return _dnf(node[1], not negate)
    parts = [_dnf(c, negate) for c in node[1]]
    is_and = (kind == "and") != negate
    if is_and:
        out = [[]]
        for p in parts:
            out = [c + d for c in out for d in p]
        return out
    return [c for p in parts for c in p]


def decide_sentence(expr, algebra=None, loader=None, **kw) -> dict:
    """Satisfiable / Unsatisfiable / Unknown for a boolean combination of invariant conditions."""
    tree = parse_sentence(expr, algebra, loader) if isinstance(expr, dict) else expr
    conj = _dnf(tree)
    results = []
    any_unknown = False
    for c in conj:
        opens = [a for a in c if a.open]
        closed = [a.pair for a in c if not a.open]
        if not opens:
            results.append({"conjunct": _describe(c), "result": SATISFIABLE, "witness": "zero module"})
            return {"result": SATISFIABLE, "witness": {"conjunct": _describe(c), "modules": []},
                    "conjuncts": results}
        wits = []
        status = SATISFIABLE
        for a in opens:
            d = decide_inclusion(a.pair, closed, **kw)
            if d.verdict == NOT_INCLUDED:
                wits.append(d.witness)
            elif d.verdict == INCLUDED:
                status = UNSATISFIABLE
                break
            else:
                status = UNKNOWN
        results.append({"conjunct": _describe(c), "result": status})
        if status == SATISFIABLE:
            return {"result": SATISFIABLE, "witness": {"conjunct": _describe(c), "summands": wits},
                    "conjuncts": results}
        if status == UNKNOWN:
            any_unknown = True
    return {"result": UNKNOWN if any_unknown else UNSATISFIABLE, "conjuncts": results}


def _describe(c) -> list:
    return [("open " if a.open else "closed ") + (a.label or f"pair{k}") for k, a in enumerate(c)]


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2)
