"""Existential linear integer arithmetic and dimension-vector queries.

The decision kernel is the Omega test: integer equalities are removed by a
lattice parametrization (Hermite normal form), inequalities by exact
Fourier-Motzkin steps when a unit coefficient allows it, otherwise by the
dark shadow followed by splinter enumeration.  Every answer carries an
integer witness that is re-checked against the original constraints.

On top of it sit the encodings of indecomposable dimension vectors over a
tubular algebra (positive, connected support, chi in {0,1}) and slope-window
queries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import eulerk0 as ek
from .algcore import AlgebraPresentation


# --- constraint systems -----------------------------------------------------

@dataclass
class Block:
    """Conjunction: eqs are (a, b) with a.x = b; les are (a, b) with a.x <= b."""

    eqs: list = field(default_factory=list)
    les: list = field(default_factory=list)

    def copy(self) -> "Block":
        return Block(list(self.eqs), list(self.les))

    def eq(self, a, b=0):
        self.eqs.append(([int(v) for v in a], int(b)))
        return self

    def le(self, a, b=0):
        self.les.append(([int(v) for v in a], int(b)))
        return self

    def ge(self, a, b=0):
        return self.le([-int(v) for v in a], -int(b))

    def lt(self, a, b=0):
        return self.le(a, int(b) - 1)

    def gt(self, a, b=0):
        return self.ge(a, int(b) + 1)

    def holds(self, x) -> bool:
        return all(_dot(a, x) == b for a, b in self.eqs) and all(_dot(a, x) <= b for a, b in self.les)


@dataclass
class LinearConstraintSystem:
    """Disjunction of conjunctive blocks over ``nvars`` integer variables."""

    nvars: int
    blocks: list

    def holds(self, x) -> bool:
        return any(b.holds(x) for b in self.blocks)

    def conjoin(self, other: "LinearConstraintSystem") -> "LinearConstraintSystem":
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out = []
        for a, b in itertools.product(self.blocks, other.blocks):
            out.append(Block(a.eqs + b.eqs, a.les + b.les))
        return LinearConstraintSystem(self.nvars, out)


def single(nvars: int, block: Block | None = None) -> LinearConstraintSystem:
    return LinearConstraintSystem(nvars, [block or Block()])


def _dot(a, x) -> int:
    return sum(int(p) * int(q) for p, q in zip(a, x))


def _ceildiv(a: int, b: int) -> int:
    return -((-a) // b)


# --- the Omega test ------------------------------------------------------------

def _solve_equalities(eqs: list, n: int):
    """All integer x with A x = b as x0 + sum t_k d_k; None when there are none."""
    if not eqs:
        return [0] * n, [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    e = len(eqs)
    At = [[eqs[r][0][i] for r in range(e)] for i in range(n)]  # n x e
    H, U, rk = ek.hnf_with_transform(At)
    b = [eqs[r][1] for r in range(e)]
    y = [0] * n
    resid = list(b)
    for k in range(rk):
        row = H[k]
        p = next(i for i, a in enumerate(row) if a)
        if resid[p] % row[p]:
            return None
        y[k] = resid[p] // row[p]
        resid = [r - y[k] * a for r, a in zip(resid, row)]
    if any(resid):
        return None
    x0 = [0] * n
    for k in range(rk):
        if y[k]:
            x0 = [a + y[k] * u for a, u in zip(x0, U[k])]
    dirs = [list(U[k]) for k in range(rk, n)]
    return x0, dirs


def _normalize(les: list):
    """Tighten a.x <= b by the content of a; detect trivial and contradictory rows."""
    out = {}
    for a, b in les:
        g = 0
        for v in a:
            g = gcd(g, v)
        if g == 0:
            if b < 0:
                return None
            continue
        a = tuple(v // g for v in a)
        b = b // g
        if a in out:
            out[a] = min(out[a], b)
        else:
            out[a] = b
    # opposite pairs a.x <= b, -a.x <= c need -c <= b
    for a, b in out.items():
        neg = tuple(-v for v in a)
        if neg in out and -out[neg] > b:
            return None
    return [(list(a), b) for a, b in out.items()]


def omega(eqs: list, les: list, n: int, _depth: int = 0):
    """Integer x with the given equalities and inequalities, or None."""
    if eqs:
        sol = _solve_equalities(eqs, n)
        if sol is None:
            return None
        x0, dirs = sol
        k = len(dirs)
        new = []
        for a, b in les:
            new.append(([_dot(a, d) for d in dirs], b - _dot(a, x0)))
        t = _omega_ineq(new, k, _depth)
        if t is None:
            return None
        x = list(x0)
        for tv, d in zip(t, dirs):
            if tv:
                x = [p + tv * q for p, q in zip(x, d)]
        return x
    return _omega_ineq(les, n, _depth)


def _bounds_for(les: list, j: int, x: list):
    """Integer bounds on x_j from the constraints, other coordinates fixed by x."""
    lo, hi = None, None
    for a, b in les:
        c = a[j]
        if not c:
            continue
        rest = b - sum(a[i] * x[i] for i in range(len(a)) if i != j)
        if c > 0:
            v = rest // c
            hi = v if hi is None else min(hi, v)
        else:
            v = _ceildiv(rest, c)
            lo = v if lo is None else max(lo, v)
    return lo, hi


def _pick(lo, hi):
    if lo is None and hi is None:
        return 0
    if lo is None:
        return min(hi, 0)
    if hi is None:
        return max(lo, 0)
    if lo > hi:
        return None
    return min(max(0, lo), hi)


def _omega_ineq(les: list, n: int, depth: int):
    les = _normalize(les)
    if les is None:
        return None
    if n == 0:
        return [] if all(b >= 0 for _, b in les) else None
    active = [j for j in range(n) if any(a[j] for a, _ in les)]
    if not active:
        return [0] * n
    # a variable bounded on one side only can be eliminated for free
    for j in active:
        signs = {a[j] > 0 for a, _ in les if a[j]}
        if len(signs) == 1:
            rest = [(a, b) for a, b in les if not a[j]]
            x = _omega_ineq(rest, n, depth)
            if x is None:
                return None
            lo, hi = _bounds_for(les, j, x)
            x[j] = _pick(lo, hi)
            return x

    def cost(j):
        lo = [a for a, _ in les if a[j] < 0]
        up = [a for a, _ in les if a[j] > 0]
        exact = all(-a[j] == 1 for a in lo) or all(a[j] == 1 for a in up)
        return (0 if exact else 1, len(lo) * len(up))

    j = min(active, key=cost)
    lowers = [(a, b) for a, b in les if a[j] < 0]
    uppers = [(a, b) for a, b in les if a[j] > 0]
    others = [(a, b) for a, b in les if not a[j]]
    exact = cost(j)[0] == 0

    def shadow(dark: bool):
        out = list(others)
        for al, bl in lowers:
            lb = -al[j]  # lb x_j >= al'.x' - bl  written as  -lb x_j + al'.x' <= bl
            for au, bu in uppers:
                ub = au[j]  # ub x_j <= bu - au'.x'
                # ub*(al'.x' - bl) <= lb*(bu - au'.x')  (real shadow), minus (ub-1)(lb-1) for dark
                row = [ub * al[i] + lb * au[i] for i in range(n)]
                row[j] = 0
                rhs = ub * bl + lb * bu
                if dark:
                    rhs -= (ub - 1) * (lb - 1)
                out.append((row, rhs))
        return out

    def finish(x):
        lo, hi = _bounds_for(les, j, x)
        v = _pick(lo, hi)
        if v is None:
            return None
        x[j] = v
        return x

    real = _omega_ineq(shadow(False), n, depth + 1)
    if real is None:
        return None
    if exact:
        return finish(real)
    dark = _omega_ineq(shadow(True), n, depth + 1)
    if dark is not None:
        x = finish(dark)
        if x is not None:
            return x
    # splinters: some lower bound is within a bounded distance of tight
    amax = max(a[j] for a, _ in uppers)
    for al, bl in lowers:
        lb = -al[j]
        top = (amax * lb - amax - lb) // amax
        for i in range(top + 1):
            # lb x_j = al'.x' - bl + i   <=>   -lb x_j + al'.x' = bl - i
            x = omega([(list(al), bl - i)], les, n, depth + 1)
            if x is not None:
                return x
    return None


def feasible(sys: LinearConstraintSystem):
    """An integer witness satisfying some block, or None (proved infeasible)."""
    for blk in sys.blocks:
        x = omega(blk.eqs, blk.les, sys.nvars)
        if x is not None:
            if not blk.holds(x):
                raise AssertionError("omega test produced an invalid witness")
            return x
    return None


def brute_force(sys: LinearConstraintSystem, bound: int):
    """Search all integer points with |x_i| <= bound (test oracle)."""
    rng = range(-bound, bound + 1)
    for x in itertools.product(rng, repeat=sys.nvars):
        if sys.holds(x):
            return list(x)
    return None


# --- encodings over a tubular algebra -----------------------------------------------

def connected_supports(ed: ek.EulerData) -> list:
    """All non-empty vertex sets inducing a connected subquiver."""
    n = ed.n
    out = []
    for mask in range(1, 1 << n):
        x = [1 if mask >> i & 1 else 0 for i in range(n)]
        if ek.is_connected_support(ed, x):
            out.append(x)
    return out


def _sym(ed):
    return [[int(v) for v in row] for row in ed.S]


def encode_indecomposable(A: AlgebraPresentation, roots: str = "all") -> LinearConstraintSystem:
    """x positive with connected support and x in rad chi or in y + rad chi for some root coset y.

    ``roots`` restricts to radical vectors ("radical", chi = 0) or real roots ("real", chi = 1).
    """
    ed = ek.euler_data(A)
    n = ed.n
    S = _sym(ed)
    supports = []
    for supp in connected_supports(ed):
        b = Block()
        for i in range(n):
            e = [0] * n
            e[i] = 1
            if supp[i]:
                b.ge(e, 1)
            else:
                b.eq(e, 0)
        supports.append(b)
    reps = []
    if roots in ("all", "radical"):
        reps.append([0] * n)
    if roots in ("all", "real"):
        reps.extend(list(v) for v in ek.omega_cached(A))
    if not reps:
        raise ValueError(f"unknown root selector {roots!r}")
    cosets = []
    for y in reps:
        b = Block()
        Sy = [sum(S[i][k] * y[k] for k in range(n)) for i in range(n)]
        for i in range(n):
            b.eq(S[i], Sy[i])
        cosets.append(b)
    return LinearConstraintSystem(n, supports).conjoin(LinearConstraintSystem(n, cosets))


def _frac(q):
    if q is ek.INF or q is None:
        return q
    return Fraction(int(q.numerator), int(q.denominator))


def slope_window(A: AlgebraPresentation, a, b) -> LinearConstraintSystem:
    """slope(x) = N/D strictly inside (a, b), N = -g0.x, D = ginf.x, both sign cases."""
    ed = ek.euler_data(A)
    a = ek.parse_slope(a) if isinstance(a, str) else a
    b = ek.parse_slope(b) if isinstance(b, str) else b
    if a is ek.INF or (b is not ek.INF and not (a < b)) or a < 0:
        raise ValueError("invalid interval")
    n = ed.n
    N = [-int(v) for v in ed.g0]
    D = [int(v) for v in ed.ginf]
    blocks = []
    for sign in (1, -1):
        blk = Block()
        blk.gt([sign * v for v in N], 0)
        blk.gt([sign * v for v in D], 0)
        fa = _frac(a)
        # sign*(q_a N - p_a D) > 0
        blk.gt([sign * (fa.denominator * u - fa.numerator * v) for u, v in zip(N, D)], 0)
        if b is not ek.INF:
            fb = _frac(b)
            blk.gt([sign * (fb.numerator * v - fb.denominator * u) for u, v in zip(N, D)], 0)
        blocks.append(blk)
    return LinearConstraintSystem(n, blocks)


def slope_exact(A: AlgebraPresentation, q) -> LinearConstraintSystem:
    """slope(x) = q for a positive rational q (both sign cases)."""
    ed = ek.euler_data(A)
    q = ek.parse_slope(q) if isinstance(q, str) else q
    if q is ek.INF or q <= 0:
        raise ValueError("slope must be a positive rational")
    fq = _frac(q)
    N = [-int(v) for v in ed.g0]
    D = [int(v) for v in ed.ginf]
    blocks = []
    for sign in (1, -1):
        blk = Block()
        blk.gt([sign * v for v in N], 0)
        blk.gt([sign * v for v in D], 0)
        blk.eq([fq.denominator * u - fq.numerator * v for u, v in zip(N, D)], 0)
        blocks.append(blk)
    return LinearConstraintSystem(ed.n, blocks)


def _extra(n, w, V):
    blk = Block().gt(w, 0)
    for v in V:
        blk.eq(v, 0)
    return LinearConstraintSystem(n, [blk])


def window_system(A: AlgebraPresentation, a, b, w: Sequence[int], V: Sequence[Sequence[int]] = (),
                  roots: str = "all"):
    n = ek.euler_data(A).n
    return encode_indecomposable(A, roots).conjoin(slope_window(A, a, b)).conjoin(_extra(n, w, V))


def _minimized(sys: LinearConstraintSystem, x):
    """Witness of least total dimension, by bisection on sum(x)."""
    n = sys.nvars
    lo, hi = 1, sum(x)
    best = x
    while lo < hi:
        mid = (lo + hi) // 2
        y = feasible(sys.conjoin(single(n, Block().le([1] * n, mid))))
        if y is None:
            lo = mid + 1
        else:
            best = y
            hi = sum(y)
    return best


def window_query(A: AlgebraPresentation, a, b, w: Sequence[int], V: Sequence[Sequence[int]] = (),
                 minimize: bool = True, roots: str = "all"):
    """Indecomposable dimension vector x with slope in (a,b), w.x > 0, v.x = 0; or None.

    With ``minimize`` the witness has the least possible total dimension.
    """
    sys = window_system(A, a, b, w, V, roots)
    x = feasible(sys)
    if x is None or not minimize:
        return x
    return _minimized(sys, x)


def slope_query(A: AlgebraPresentation, q, w: Sequence[int], V: Sequence[Sequence[int]] = (),
                minimize: bool = True, roots: str = "all"):
    """As window_query but with slope exactly q."""
    n = ek.euler_data(A).n
    sys = encode_indecomposable(A, roots).conjoin(slope_exact(A, q)).conjoin(_extra(n, w, V))
    x = feasible(sys)
    if x is None or not minimize:
        return x
    return _minimized(sys, x)


@dataclass
class ProbeResult:
    uniform_zero_possible: bool
    open_witness: list | None
    closed_witness: list | None
    open_homogeneous: bool = False
    slope: object = None  # slope of the closed witness
    open_at_slope: list | None = None  # open witness with exactly that slope

    @property
    def nonuniform(self) -> bool:
        return self.open_witness is not None and self.closed_witness is not None


def nonuniformity_probe(A: AlgebraPresentation, window, v: Sequence[int]) -> ProbeResult:
    """Indecomposables in the window where v.x is nonzero and where it vanishes.

    The open witness is taken among radical (homogeneous) vectors when one
    exists.  When a closed witness of slope q is found, an open witness of
    the same slope q is also searched, which exhibits non-uniformity at q.
    """
    a, b = window
    ed = ek.euler_data(A)
    n = len(v)
    open_w, homog = None, False
    if any(v):
        for roots in ("radical", "all"):
            for sgn in (1, -1):
                open_w = window_query(A, a, b, [sgn * c for c in v], roots=roots)
                if open_w is not None:
                    break
            if open_w is not None:
                homog = roots == "radical"
                break
    closed_w = window_query(A, a, b, [1] * n, [v])
    q = at_q = None
    if closed_w is not None:
        q = ed.slope(closed_w)
        if any(v):
            for sgn in (1, -1):
                at_q = slope_query(A, q, [sgn * c for c in v], roots="radical") or \
                    slope_query(A, q, [sgn * c for c in v])
                if at_q is not None:
                    break
    return ProbeResult(open_w is None, open_w, closed_w, homog, q, at_q)
