"""Slope profiles of pp-pairs.

For N indecomposable of slope r in (0, inf), away from finitely many
breakpoints, dim phi(N) is a linear function v . dim N.  With (M, m) a free
realization of phi and C = M / <m>, dim phi(N) = dim Hom(M, N) - dim Hom(C, N).
For an indecomposable summand Y of M or C:

* Y preprojective or of slope < r: Ext(Y, N) = D Hom(N, tau Y) = 0, so
  dim Hom(Y, N) = <dim Y, dim N>;
* Y preinjective or of slope > r: Hom(Y, N) = 0.

So on each interval between consecutive summand slopes the functional is
<w - u, ->, w and u the summed dimension vectors of the summands of M and C
lying below the interval.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import eulerk0 as ek
from . import exactla as la
from .algcore import AlgebraPresentation, dim_vector, quotient_by_tuple
from .moddecomp import decompose
from .ppcalc import PpFormula, PpPair, free_realization, pair_dim


class ProfileError(ValueError):
    pass


def classify_component(A: AlgebraPresentation, x) -> tuple:
    """('preprojective',), ('preinjective',) or ('slope', q) for an indecomposable dimension vector."""
    x = [int(a) for a in x]
    if not ek.is_indec_dimvector(A, x):
        raise ProfileError(f"{tuple(x)} is not an indecomposable dimension vector")
    ed = ek.euler_data(A)
    kind = ek.classify_vector(ed, x)
    if kind != "slope":
        return (kind,)
    return ("slope", ed.slope(x))


@dataclass
class SlopeProfile:
    """breakpoints q_1 < ... < q_n in (0, inf); vectors[i] valid on (q_i, q_{i+1}), q_0 = 0, q_{n+1} = inf."""

    breakpoints: list
    vectors: list

    def interval_of(self, q):
        """Index of the open interval containing q, or None at a breakpoint."""
        if q is ek.INF or q is None or q <= 0:
            return None
        for i, b in enumerate(self.breakpoints):
            if q == b:
                return None
            if q < b:
                return i
        return len(self.breakpoints)

    def predict(self, A: AlgebraPresentation, x):
        ed = ek.euler_data(A)
        if ek.classify_vector(ed, x) != "slope":
            return None
        i = self.interval_of(ed.slope(x))
        if i is None:
            return None
        return sum(a * int(b) for a, b in zip(self.vectors[i], x))

    def to_json(self) -> dict:
        return {
            "breakpoints": [ek.slope_str(q) for q in self.breakpoints],
            "vectors": [list(v) for v in self.vectors],
        }

    def __sub__(self, other: "SlopeProfile") -> "SlopeProfile":
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        vecs = []
        for i in range(len(bps) + 1):
            q = _sample(bps, i)
            a = self.vectors[self.interval_of(q)]
            b = other.vectors[other.interval_of(q)]
            vecs.append([p - r for p, r in zip(a, b)])
        return SlopeProfile(bps, vecs)


def _sample(bps, i):
    """A rational strictly inside the i-th interval."""
    lo = bps[i - 1] if i > 0 else la.rat(0)
    if i < len(bps):
        return (lo + bps[i]) / 2
    return lo + 1


def _factors(M) -> list:
    if M.dim == 0:
        return []
    dec = decompose(M)
    if not dec.absolute:
        raise ProfileError("non-absolute decomposition")
    out = []
    for p in dec.parts:
        out.append(dim_vector(p.module))
    return out


def _placed(A, dims) -> list:
    """(position, dim vector): position -1 below everything, +inf above, or the slope."""
    ed = ek.euler_data(A)
    out = []
    for x in dims:
        kind = ek.classify_vector(ed, x)
        if kind == "preprojective":
            out.append((-1, x))
        elif kind == "preinjective":
            out.append((ek.INF, x))
        else:
            q = ed.slope(x)
            if q is None:
                raise ProfileError(f"summand {x} has undefined slope")
            out.append((q, x))
    return out


def _below(pos, q) -> bool:
    if pos is ek.INF:
        return False
    return pos < q


def formula_profile(f: PpFormula) -> SlopeProfile:
    A = f.ring
    if f.side != "right":
        raise ProfileError("profiles are computed for right formulas")
    ed = ek.euler_data(A)
    M, tup = free_realization(f)
    C = quotient_by_tuple(M, tup) if M.dim else M
    fm = _placed(A, _factors(M))
    fc = _placed(A, _factors(C))
    bps = sorted({p for p, _ in fm + fc if p is not ek.INF and p != -1 and p > 0})
    vecs = []
    n = ed.n
    for i in range(len(bps) + 1):
        q = _sample(bps, i)
        w = [0] * n
        u = [0] * n
        for p, x in fm:
            if _below(p, q):
                w = [a + b for a, b in zip(w, x)]
        for p, x in fc:
            if _below(p, q):
                u = [a + b for a, b in zip(u, x)]
        d = [a - b for a, b in zip(w, u)]
        vecs.append([int(ed.pair(d, [1 if k == j else 0 for k in range(n)])) for j in range(n)])
    return SlopeProfile(bps, vecs)


def slope_profile(p: PpPair) -> SlopeProfile:
    return formula_profile(p.phi) - formula_profile(p.psi)


def check_profile(p: PpPair, prof: SlopeProfile, modules) -> list:
    """Modules (with interior slope) where the prediction differs from direct evaluation."""
    bad = []
    for N in modules:
        x = dim_vector(N)
        pred = prof.predict(p.phi.ring, x)
        if pred is None:
            continue
        if pred != pair_dim(p, N):
            bad.append(N)
    return bad


def uniformity_at_q(A: AlgebraPresentation, v, q) -> str:
    """UniformlyClosed iff v vanishes on the primitive radical vector of slope q."""
    q = ek.parse_slope(q) if isinstance(q, str) else la.rat(q)
    if q is ek.INF or q <= 0:
        raise ProfileError("q must lie in (0, inf)")
    w = ek.euler_data(A).radial_vector(q)
    return "UniformlyClosed" if sum(int(a) * int(b) for a, b in zip(v, w)) == 0 else "OpenOnHomogeneous"
