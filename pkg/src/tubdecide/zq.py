"""Ziegler spectrum of a tubular family at a rational slope, symbolically.

Tubes are named by an int (index into the inhomogeneous ranks) or by a
string token (a homogeneous tube, rank 1).  Finite-dimensional points are
stored in ray coordinates: FD(tube, i, l) is E_i[l], the module of regular
length l with regular socle E_i.  Coray coordinates convert by

    [l]E_i = E_{(i + l - 1) mod r}[l]

which fixes the orientation of tau inside every tube.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import eulerk0 as ek
from . import exactla as la

DEFAULT_RANKS = {
    (2, 2, 2, 2): (2, 2, 2, 2),
    (3, 3, 3): (3, 3, 3),
    (2, 4, 4): (2, 4, 4),
    (2, 3, 6): (2, 3, 6),
}


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class TubularFamilyModel:
    slope: object
    ranks: tuple

    def __post_init__(self):
        if any(int(r) < 2 for r in self.ranks):
            raise ModelError("inhomogeneous tubes need rank >= 2")

    def rank(self, tube) -> int:
        if isinstance(tube, str):
            return 1
        if not (0 <= tube < len(self.ranks)):
            raise ModelError(f"no inhomogeneous tube {tube}")
        return int(self.ranks[tube])

    def quasi_simples(self, tube) -> range:
        return range(self.rank(tube))


def family_model(slope="1", weights=(2, 2, 2, 2), ranks=None) -> TubularFamilyModel:
    q = ek.parse_slope(slope) if isinstance(slope, str) else la.rat(slope)
    if q is ek.INF or q <= 0:
        raise ModelError("slope must be a positive rational")
    if ranks is None:
        ranks = DEFAULT_RANKS.get(tuple(sorted(weights)))
        if ranks is None:
            raise ModelError(f"unknown tubular type {weights}")
    return TubularFamilyModel(q, tuple(int(r) for r in ranks))


# --- points ---------------------------------------------------------------

@dataclass(frozen=True, order=True)
class FD:
    tube: object
    i: int
    l: int


@dataclass(frozen=True)
class Prufer:
    tube: object
    i: int


@dataclass(frozen=True)
class Adic:
    tube: object
    i: int


@dataclass(frozen=True)
class Generic:
    pass


GENERIC = Generic()


def fd_point(model: TubularFamilyModel, tube, i: int, l: int) -> FD:
    if l < 1:
        raise ModelError("regular length must be >= 1")
    return FD(tube, i % model.rank(tube), l)


def coray_point(model: TubularFamilyModel, tube, i: int, l: int) -> FD:
    """[l]E_i in ray coordinates."""
    r = model.rank(tube)
    return fd_point(model, tube, (i + l - 1) % r, l)


def top_index(model: TubularFamilyModel, p: FD) -> int:
    """The m with p = [l]E_m."""
    return (p.i - p.l + 1) % model.rank(p.tube)


# --- compact open forms ---------------------------------------------------

@dataclass(frozen=True)
class Ray:
    tube: object
    i: int
    start: int


@dataclass(frozen=True)
class Coray:
    tube: object
    i: int
    start: int


@dataclass(frozen=True)
class Cofinite:
    excluded: frozenset = frozenset()


@dataclass(frozen=True)
class Union:
    rays: tuple = ()      # sorted ((tube, i), start)
    corays: tuple = ()
    extras: frozenset = frozenset()

    def ray_map(self) -> dict:
        return dict(self.rays)

    def coray_map(self) -> dict:
        return dict(self.corays)


CompactOpenForm = Cofinite | Union


def _key(t):
    return (isinstance(t[0][0], str), str(t[0][0]), t[0][1])


def _in_ray(model, p: FD, tube, i, start) -> bool:
    return p.tube == tube and p.i == i % model.rank(tube) and p.l >= start


def _in_coray(model, p: FD, tube, i, start) -> bool:
    return p.tube == tube and top_index(model, p) == i % model.rank(tube) and p.l >= start


def membership(model: TubularFamilyModel, p, U) -> bool:
    if isinstance(U, Cofinite):
        return not (isinstance(p, FD) and p in U.excluded)
    if isinstance(U, Union):
        if isinstance(p, Generic):
            return False
        if isinstance(p, Prufer):
            return (p.tube, p.i) in U.ray_map()
        if isinstance(p, Adic):
            return (p.tube, p.i) in U.coray_map()
        if p in U.extras:
            return True
        rm = U.ray_map()
        if (p.tube, p.i) in rm and p.l >= rm[(p.tube, p.i)]:
            return True
        cm = U.coray_map()
        key = (p.tube, top_index(model, p))
        return key in cm and p.l >= cm[key]
    if isinstance(U, Ray):
        if isinstance(p, Prufer):
            return (p.tube, p.i) == (U.tube, U.i % model.rank(U.tube))
        return isinstance(p, FD) and _in_ray(model, p, U.tube, U.i, U.start)
    if isinstance(U, Coray):
        if isinstance(p, Adic):
            return (p.tube, p.i) == (U.tube, U.i % model.rank(U.tube))
        return isinstance(p, FD) and _in_coray(model, p, U.tube, U.i, U.start)
    if isinstance(U, FD):
        return p == U
    raise ModelError(f"not a form: {U!r}")


def _covered_fd(model, p: FD, prims) -> bool:
    return any(membership(model, p, q) for q in prims)


def normalize(model: TubularFamilyModel, primitives) -> CompactOpenForm:
    """Canonical form of a finite union of rays, corays, FD singletons and cofinite sets."""
    prims = []
    for q in primitives:
        if isinstance(q, Union):
            prims.extend(Ray(t, i, s) for (t, i), s in q.rays)
            prims.extend(Coray(t, i, s) for (t, i), s in q.corays)
            prims.extend(q.extras)
        elif isinstance(q, FD):
            prims.append(fd_point(model, q.tube, q.i, q.l))
        elif isinstance(q, (Ray, Coray)):
            model.rank(q.tube)
            if q.start < 1:
                raise ModelError("start must be >= 1")
            prims.append(type(q)(q.tube, q.i % model.rank(q.tube), q.start))
        elif isinstance(q, Cofinite):
            prims.append(q)
        else:
            raise ModelError(f"not a primitive: {q!r}")
    cof = [q for q in prims if isinstance(q, Cofinite)]
    if cof:
        excl = frozenset.intersection(*[q.excluded for q in cof])
        rest = [q for q in prims if not isinstance(q, Cofinite)]
        return Cofinite(frozenset(p for p in excl if not _covered_fd(model, p, rest)))

    rays: dict = {}
    corays: dict = {}
    extras = set()
    for q in prims:
        if isinstance(q, Ray):
            k = (q.tube, q.i)
            rays[k] = min(rays.get(k, q.start), q.start)
        elif isinstance(q, Coray):
            k = (q.tube, q.i)
            corays[k] = min(corays.get(k, q.start), q.start)
        else:
            extras.add(q)

    def present(p):
        if p in extras:
            return True
        k = (p.tube, p.i)
        if k in rays and p.l >= rays[k]:
            return True
        k = (p.tube, top_index(model, p))
        return k in corays and p.l >= corays[k]

    # lower each start while the point just below it is already present
    changed = True
    while changed:
        changed = False
        for (t, i), s in list(rays.items()):
            if s > 1 and present(FD(t, i, s - 1)):
                rays[(t, i)] = s - 1
                changed = True
        for (t, i), s in list(corays.items()):
            if s > 1 and present(coray_point(model, t, i, s - 1)):
                corays[(t, i)] = s - 1
                changed = True
    U0 = Union(tuple(sorted(rays.items(), key=_key)), tuple(sorted(corays.items(), key=_key)), frozenset())
    left = frozenset(p for p in extras if not membership(model, p, U0))
    return Union(U0.rays, U0.corays, left)


# --- contains ----------------------------------------------------------------

def _case0(model, points, Ws) -> bool:
    return all(any(membership(model, p, W) for W in Ws) for p in points)


def _ray_case(model, tube, i, j, Ws, dual: bool) -> bool:
    """R(E_i[j]) (or the coray C([j]E_i) when dual) inside the union of Ws."""
    limit = Adic(tube, i) if dual else Prufer(tube, i)
    member = coray_point if dual else (lambda m, t, a, l: FD(t, a, l))
    for W in Ws:
        if isinstance(W, Cofinite):
            missing = [p for p in W.excluded
                       if p.tube == tube and p.l >= j
                       and (top_index(model, p) if dual else p.i) == i]
            return _case0(model, missing, Ws)
    best = None
    for W in Ws:
        if membership(model, limit, W):
            s = (W.coray_map() if dual else W.ray_map())[(tube, i)]
            best = s if best is None else min(best, s)
    if best is None:
        return False
    if best <= j:
        return True
    return _case0(model, [member(model, tube, i, l) for l in range(j, best)], Ws)


def contains(model: TubularFamilyModel, U, Ws) -> bool:
    """Decide U inside the union of Ws (all in canonical form)."""
    Ws = list(Ws)
    if isinstance(U, Cofinite):
        for W in Ws:
            if isinstance(W, Cofinite):
                return _case0(model, sorted(W.excluded - U.excluded, key=_fd_key), Ws)
        return False
    if not _case0(model, sorted(U.extras, key=_fd_key), Ws):
        return False
    for (t, i), j in U.rays:
        if not _ray_case(model, t, i, j, Ws, dual=False):
            return False
    for (t, i), j in U.corays:
        if not _ray_case(model, t, i, j, Ws, dual=True):
            return False
    return True


# --- point sets and closure -------------------------------------------------

@dataclass
class TubePattern:
    """FD points of one tube: explicit below ``base``, periodic in l mod rank from ``base`` on."""

    rank: int
    base: int = 1
    low: frozenset = frozenset()       # (i, l) with l < base
    periodic: frozenset = frozenset()  # (i, l mod rank) for l >= base

    def has(self, i: int, l: int) -> bool:
        if l < self.base:
            return (i, l) in self.low
        return (i, l % self.rank) in self.periodic

    def rebased(self, base: int) -> "TubePattern":
        base = max(base, self.base)
        r = self.rank
        low = frozenset((i, l) for i in range(r) for l in range(1, base) if self.has(i, l))
        per = frozenset((i, c) for i in range(r) for c in range(r)
                        if self.has(i, base + (c - base) % r))
        return TubePattern(r, base, low, per)

    def union(self, other: "TubePattern") -> "TubePattern":
        b = max(self.base, other.base)
        a, c = self.rebased(b), other.rebased(b)
        return TubePattern(self.rank, b, a.low | c.low, a.periodic | c.periodic)

    def complement(self) -> "TubePattern":
        r = self.rank
        low = frozenset((i, l) for i in range(r) for l in range(1, self.base)) - self.low
        per = frozenset((i, c) for i in range(r) for c in range(r)) - self.periodic
        return TubePattern(r, self.base, low, per)

    def infinite(self) -> bool:
        return bool(self.periodic)

    def infinitely_many_from(self, i: int) -> bool:
        return any(a == i for a, _ in self.periodic)

    def infinitely_many_onto(self, m: int) -> bool:
        r = self.rank
        return any(((m + c - 1) % r, c) in self.periodic for c in range(r))

    def same_points(self, other: "TubePattern") -> bool:
        b = max(self.base, other.base)
        a, c = self.rebased(b), other.rebased(b)
        return a.low == c.low and a.periodic == c.periodic


@dataclass
class PointSet:
    """A subset of the spectrum at one slope.

    ``tubes`` describes the FD points of the listed tubes; every other tube
    has either all or none of its FD points (``others_fd``) and likewise for
    its Prufer and adic points (``others_inf``).
    """

    model: TubularFamilyModel
    tubes: dict = field(default_factory=dict)
    infinite: frozenset = frozenset()   # Prufer / Adic points of listed tubes
    others_fd: bool = False
    others_inf: bool = False
    generic: bool = False

    def pattern(self, tube) -> TubePattern:
        if tube in self.tubes:
            return self.tubes[tube]
        r = self.model.rank(tube)
        if self.others_fd:
            return TubePattern(r, 1, frozenset(), frozenset((i, c) for i in range(r) for c in range(r)))
        return TubePattern(r)

    def has(self, p) -> bool:
        if isinstance(p, Generic):
            return self.generic
        if isinstance(p, FD):
            return self.pattern(p.tube).has(p.i, p.l)
        if p.tube in self.tubes:
            return p in self.infinite
        return self.others_inf


def _full_pattern(r):
    return TubePattern(r, 1, frozenset(), frozenset((i, c) for i in range(r) for c in range(r)))


def point_set(model: TubularFamilyModel, items) -> PointSet:
    """Build a PointSet from ("ray", tube, i, j), ("coray", tube, i, k), ("tube", tube) and points."""
    S = PointSet(model)
    inf = set()

    def add(tube, pat):
        S.tubes[tube] = S.tubes[tube].union(pat) if tube in S.tubes else pat

    for it in items:
        if isinstance(it, tuple) and it and it[0] in ("ray", "coray", "tube"):
            kind, tube = it[0], it[1]
            r = model.rank(tube)
            if kind == "tube":
                add(tube, _full_pattern(r))
            elif kind == "ray":
                i, j = it[2] % r, it[3]
                add(tube, TubePattern(r, j, frozenset(), frozenset((i, c) for c in range(r))))
            else:
                m, k = it[2] % r, it[3]
                add(tube, TubePattern(r, k, frozenset(), frozenset(((m + c - 1) % r, c) for c in range(r))))
        elif isinstance(it, FD):
            p = fd_point(model, it.tube, it.i, it.l)
            r = model.rank(p.tube)
            add(p.tube, TubePattern(r, p.l + 1, frozenset([(p.i, p.l)]), frozenset()))
        elif isinstance(it, (Prufer, Adic)):
            if it.tube not in S.tubes:
                S.tubes[it.tube] = TubePattern(model.rank(it.tube))
            inf.add(type(it)(it.tube, it.i % model.rank(it.tube)))
        elif isinstance(it, Generic):
            S.generic = True
        else:
            raise ModelError(f"description not supported: {it!r}")
    S.infinite = frozenset(inf)
    return S


def closure_adjoin(S: PointSet) -> PointSet:
    """Smallest closed set containing S (the three closure clauses)."""
    model = S.model
    inf = set(S.infinite)
    for tube, pat in S.tubes.items():
        for i in model.quasi_simples(tube):
            if pat.infinitely_many_from(i):
                inf.add(Prufer(tube, i))
            if pat.infinitely_many_onto(i):
                inf.add(Adic(tube, i))
    others_inf = S.others_inf or S.others_fd
    generic = (S.generic or bool(inf) or others_inf
               or any(p.infinite() for p in S.tubes.values()))
    return PointSet(model, dict(S.tubes), frozenset(inf), S.others_fd, others_inf, generic)


def is_closed(S: PointSet) -> bool:
    C = closure_adjoin(S)
    return C.infinite == S.infinite and C.others_inf == S.others_inf and C.generic == S.generic


def complement(model: TubularFamilyModel, U) -> PointSet:
    """The complement of a canonical compact open form."""
    if isinstance(U, Cofinite):
        return point_set(model, sorted(U.excluded, key=_fd_key))
    S = PointSet(model, others_fd=True, others_inf=True, generic=True)
    tubes = {t for (t, _), _ in U.rays} | {t for (t, _), _ in U.corays} | {p.tube for p in U.extras}
    inf = set()
    for t in tubes:
        r = model.rank(t)
        base = 1 + max([s for (tt, _), s in U.rays + U.corays if tt == t] + [p.l for p in U.extras if p.tube == t] + [0])
        low = frozenset((i, l) for i in range(r) for l in range(1, base)
                        if not membership(model, FD(t, i, l), U))
        per = frozenset((i, c) for i in range(r) for c in range(r)
                        if not membership(model, FD(t, i, base + (c - base) % r), U))
        S.tubes[t] = TubePattern(r, base, low, per)
        for i in range(r):
            if not membership(model, Prufer(t, i), U):
                inf.add(Prufer(t, i))
            if not membership(model, Adic(t, i), U):
                inf.add(Adic(t, i))
    S.infinite = frozenset(inf)
    return S


# --- truncated model oracle -------------------------------------------------

def truncated_points(model: TubularFamilyModel, levels: int, tokens) -> list:
    """Every point of the model with FD regular length <= levels and the given homogeneous tokens."""
    tubes = list(range(len(model.ranks))) + list(tokens)
    pts = [GENERIC]
    for t in tubes:
        for i in model.quasi_simples(t):
            pts.append(Prufer(t, i))
            pts.append(Adic(t, i))
            pts.extend(FD(t, i, l) for l in range(1, levels + 1))
    return pts


def brute_contains(model, U, Ws, levels: int = 12, tokens=tuple(f"h{k}" for k in range(6))) -> bool:
    for p in truncated_points(model, levels, tokens):
        if membership(model, p, U) and not any(membership(model, p, W) for W in Ws):
            return False
    return True


# --- JSON ---------------------------------------------------------------------

def _tube_from_json(t):
    return t if isinstance(t, str) else int(t)


def model_to_json(model: TubularFamilyModel) -> dict:
    return {"slope": ek.slope_str(model.slope), "ranks": list(model.ranks)}


def model_from_json(d: dict) -> TubularFamilyModel:
    return family_model(d.get("slope", "1"), ranks=d.get("ranks", (2, 2, 2, 2)))


def form_to_json(U) -> dict:
    if isinstance(U, Cofinite):
        return {"cofinite": [[p.tube, p.i, p.l] for p in sorted(U.excluded, key=_fd_key)]}
    return {
        "rays": [[t, i, s] for (t, i), s in U.rays],
        "corays": [[t, i, s] for (t, i), s in U.corays],
        "extras": [[p.tube, p.i, p.l] for p in sorted(U.extras, key=_fd_key)],
    }


def _fd_key(p: FD):
    return (isinstance(p.tube, str), str(p.tube), p.i, p.l)


def form_from_json(model: TubularFamilyModel, d: dict):
    """Parse a form and put it into canonical form; rays/corays entries are [tube, i, start]."""
    if "cofinite" in d:
        return normalize(model, [Cofinite(frozenset(fd_point(model, _tube_from_json(t), i, l)
                                                    for t, i, l in d["cofinite"]))])
    prims = [Ray(_tube_from_json(t), int(i), int(s)) for t, i, s in d.get("rays", [])]
    prims += [Coray(_tube_from_json(t), int(i), int(s)) for t, i, s in d.get("corays", [])]
    prims += [fd_point(model, _tube_from_json(t), int(i), int(l)) for t, i, l in d.get("extras", [])]
    return normalize(model, prims)


def point_to_json(p) -> dict:
    if isinstance(p, Generic):
        return {"generic": True}
    if isinstance(p, FD):
        return {"fd": [p.tube, p.i, p.l]}
    return {"prufer" if isinstance(p, Prufer) else "adic": [p.tube, p.i]}


def tubes_of(model: TubularFamilyModel, tokens) -> list:
    return list(range(len(model.ranks))) + list(tokens)
