"""Indecomposability, Krull-Schmidt decomposition and isomorphism tests.

Everything happens inside End(M), computed once in vertex-adapted
coordinates where endomorphisms are block diagonal.  The radical is the
kernel of the trace form (exact in characteristic zero).  Idempotents come
from the primary decomposition of endomorphisms: for x with minimal
polynomial f*g, gcd(f, g) = 1, the element (v g)(x) with u f + v g = 1 is an
idempotent.  Candidates for x are basis elements, small random combinations,
and random elements of annihilators {x : m x = 0}, which catch matrix-algebra
factors where generic elements have irreducible minimal polynomials.
Splitting continues inside corner algebras e End(M) e.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import sympy

from . import exactla as la
from .algcore import (
    AlgebraError, ModulePresentation, blocks_to_matrix, dim_vector, hom_blocks,
    is_hom, submodule,
)
from .exactla import ONE, ZERO


# --- block arithmetic ---------------------------------------------------

def _bmul(x, y, dims_a, dims_b, dims_c):
    return [la.mat_mul_shape(xv, yv, a, b, c) for xv, yv, a, b, c in zip(x, y, dims_a, dims_b, dims_c)]


def _badd(x, y):
    return [[[p + q for p, q in zip(rx, ry)] for rx, ry in zip(xv, yv)] for xv, yv in zip(x, y)]


def _bscale(c, x):
    return [[[c * p for p in r] for r in xv] for xv in x]


def _bflat(x) -> list:
    return [p for xv in x for r in xv for p in r]


def _bzero(dr, dc):
    return [la.zeros(a, b) for a, b in zip(dr, dc)]


def _bident(d):
    return [la.identity(a) for a in d]


def _bcombo(coeffs, basis, dr, dc):
    out = _bzero(dr, dc)
    for c, b in zip(coeffs, basis):
        if c:
            out = _badd(out, _bscale(c, b))
    return out


class EndRing:
    """A subspace of block-diagonal endomorphisms of M, closed under products."""

    def __init__(self, M: ModulePresentation, basis: list | None = None):
        self.M = M
        self.dims = list(M.vertex_layout.dims)
        self.basis = hom_blocks(M, M) if basis is None else basis

    def mul(self, x, y):
        d = self.dims
        return _bmul(x, y, d, d, d)

    def one(self):
        return _bident(self.dims)

    def zero(self):
        return _bzero(self.dims, self.dims)

    def combo(self, coeffs):
        return _bcombo(coeffs, self.basis, self.dims, self.dims)

    def trace(self, x):
        return sum((xv[i][i] for xv in x for i in range(len(xv))), ZERO)

    def matrix(self, x) -> list:
        return blocks_to_matrix(self.M, self.M, x)

    def coords(self, x) -> list | None:
        return la.coords_in_basis([_bflat(b) for b in self.basis], _bflat(x))


def _radical(R: EndRing, basis: list) -> list:
    """Kernel of the trace form tr(xy) restricted to span(basis)."""
    n = len(basis)
    if n == 0:
        return []
    G = [[R.trace(R.mul(basis[a], basis[b])) for b in range(n)] for a in range(n)]
    ker = la.kernel_basis(G, "right", cols=n)
    return [_bcombo(c, basis, R.dims, R.dims) for c in ker]


def endo_radical(M: ModulePresentation) -> list:
    """Basis of the Jacobson radical of End(M), as d x d matrices."""
    R = EndRing(M)
    return [R.matrix(j) for j in _radical(R, R.basis)]


# --- polynomials --------------------------------------------------------

_T = sympy.Symbol("t")


def _to_sym(q):
    q = la.rat(q)
    return sympy.Rational(int(q.numerator), int(q.denominator))


def _min_poly(R: EndRing, x) -> list:
    """Coefficients c_0..c_k (monic, c_k = 1) of the minimal polynomial of x."""
    powers = [R.one()]
    flats = [_bflat(powers[0])]
    ech = la.Echelon(len(flats[0]))
    ech.add_rat(flats[0])
    while True:
        nxt = R.mul(powers[-1], x)
        f = _bflat(nxt)
        if not ech.add_rat(f):
            c = la.coords_in_basis(flats, f)
            return [-a for a in c] + [ONE]
        powers.append(nxt)
        flats.append(f)


def _poly_eval(R: EndRing, coeffs: Sequence, x):
    out = R.zero()
    for c in reversed(coeffs):
        out = R.mul(out, x)
        if c:
            out = _badd(out, _bscale(la.rat(c), R.one()))
    return out


def _primary_idempotents(R: EndRing, x):
    """Idempotents projecting onto each primary component of x."""
    mp = _min_poly(R, x)
    if len(mp) <= 2:
        return
    P = sympy.Poly([_to_sym(c) for c in reversed(mp)], _T, domain="QQ")
    _, factors = P.factor_list()
    if len(factors) < 2:
        return
    for i in range(len(factors)):
        f = factors[i][0] ** factors[i][1]
        g = sympy.Poly(1, _T, domain="QQ")
        for j, (h, k) in enumerate(factors):
            if j != i:
                g = g * h ** k
        u, v, _ = sympy.gcdex(f, g)
        # u f + v g = 1: (v g)(x) is the identity on ker f(x) and zero on ker g(x)
        e_poly = sympy.Poly(v * g, _T, domain="QQ")
        coeffs = [la.rat(str(c)) for c in reversed(e_poly.all_coeffs())]
        yield lift_idempotent(R, _poly_eval(R, coeffs, x))


def lift_idempotent(R: EndRing, e, max_steps: int = 64):
    """Newton iteration e <- 3e^2 - 2e^3 until e is idempotent."""
    for _ in range(max_steps):
        e2 = R.mul(e, e)
        if e2 == e:
            return e
        e3 = R.mul(e2, e)
        e = _badd(_bscale(3, e2), _bscale(-2, e3))
    raise ArithmeticError("idempotent lift did not converge")


def _is_trivial(R: EndRing, e) -> bool:
    flat = _bflat(e)
    return not any(flat) or e == R.one()


def _corner(R: EndRing, e, basis: list) -> list:
    """Basis of e S e for S = span(basis)."""
    vecs = [R.mul(R.mul(e, b), e) for b in basis]
    n = len(_bflat(R.one()))
    ech = la.Echelon(n)
    out = []
    for v in vecs:
        if ech.add_rat(_bflat(v)):
            out.append(v)
    return out


def _find_idempotent(R: EndRing, basis: list, rad: list, unit, rng: random.Random, trials: int):
    """Non-trivial idempotent of the corner ring span(basis) with identity ``unit``."""
    if len(basis) - len(rad) <= 1:
        return None
    n = len(basis)

    def ok(e):
        return e is not None and any(_bflat(e)) and e != unit

    for b in basis:
        e = _split_corner(R, b, unit)
        if ok(e):
            return e
    for _ in range(trials):
        coeffs = [rng.randint(-3, 3) for _ in range(n)]
        x = _bcombo(coeffs, basis, R.dims, R.dims)
        e = _split_corner(R, x, unit)
        if ok(e):
            return e
        # annihilator of a random vector inside the image of the corner
        vs = [v for v in range(len(R.dims)) if R.dims[v]]
        v = rng.choice(vs)
        m = [la.rat(rng.randint(-5, 5)) for _ in range(R.dims[v])]
        m = la.vec_mat(m, unit[v]) if R.dims[v] else m
        if not any(m):
            continue
        rows = []
        for b in basis:
            rows.append(la.vec_mat(m, b[v]))
        ker = la.kernel_basis(rows, "left")
        if not ker:
            continue
        c = [sum((la.rat(rng.randint(-3, 3)) * k[i] for k in ker), ZERO) for i in range(n)]
        x = _bcombo(c, basis, R.dims, R.dims)
        e = _split_corner(R, x, unit)
        if ok(e):
            return e
    return None


def _split_corner(R: EndRing, x, unit):
    """Idempotent split of x inside the corner ring with identity ``unit``."""
    if unit != R.one():
        # shift the complement to a constant far from the spectrum of small combinations
        comp = _badd(R.one(), _bscale(-1, unit))
        x = _badd(x, _bscale(la.rat(7919), comp))
    for e in _primary_idempotents(R, x):
        # e commutes with unit, so its corner part is again idempotent
        ec = R.mul(R.mul(unit, e), unit)
        if any(_bflat(ec)) and ec != unit:
            return ec
    return None


# --- public API ---------------------------------------------------------

@dataclass
class Summand:
    module: ModulePresentation
    idempotent: list  # block form in the input's adapted coordinates
    rows: list  # basis of the summand inside M (original coordinates)
    absolute: bool


@dataclass
class Decomposition:
    """Indecomposable summands with multiplicity and a change-of-basis certificate.

    ``T`` has the stacked summand bases as rows, so T A_i T^-1 is block
    diagonal with the summands' actions in the order of ``parts``.
    """

    input: ModulePresentation
    parts: list
    summands: list  # (ModulePresentation, multiplicity)
    T: list
    absolute: bool
    isos: list = field(default_factory=list)  # (i, j, matrix from parts[i] to parts[j])

    @property
    def dim_vectors(self) -> list:
        return sorted(dim_vector(p.module) for p in self.parts)

    def report(self) -> str:
        return "ok" if self.absolute else "not absolutely decomposed"


def _primitive_idempotents(R: EndRing, rng, trials):
    """Complete set of primitive orthogonal idempotents, with absoluteness flags."""
    full = R.basis
    rad_full = _radical(R, full)
    todo = [R.one()]
    done = []
    while todo:
        e = todo.pop()
        basis = _corner(R, e, full)
        rad = _corner(R, e, rad_full)
        if len(basis) - len(rad) == 1:
            done.append((e, True))
            continue
        f = _find_idempotent(R, basis, rad, e, rng, trials)
        if f is None:
            done.append((e, False))
            continue
        g = _badd(e, _bscale(-1, f))
        todo.append(f)
        todo.append(g)
    return done, rad_full


def is_indecomposable(M: ModulePresentation, seed: int = 0, trials: int = 32) -> tuple[str, list | None]:
    """Returns (verdict, idempotent matrix or None).

    verdict is 'absolutely_indecomposable' when End/J is one-dimensional,
    'decomposable' when a non-trivial idempotent was exhibited, and
    'indecomposable' otherwise.
    """
    if M.dim == 0:
        return "decomposable", None
    R = EndRing(M)
    rad = _radical(R, R.basis)
    if len(R.basis) - len(rad) == 1:
        return "absolutely_indecomposable", None
    e = _find_idempotent(R, R.basis, rad, R.one(), random.Random(seed), trials)
    if e is not None:
        return "decomposable", R.matrix(e)
    return "indecomposable", None


def decompose(M: ModulePresentation, seed: int = 0, trials: int = 32) -> Decomposition:
    rng = random.Random(seed)
    if M.dim == 0:
        return Decomposition(M, [], [], [], True)
    R = EndRing(M)
    idems, rad_full = _primitive_idempotents(R, rng, trials)
    parts = []
    rows_all = []
    for e, absolute in idems:
        E = R.matrix(e)
        ech = la.echelon(E, M.dim)
        rows = ech.basis_rows()
        mod = submodule(M, rows, label="")
        parts.append(Summand(mod, e, rows, absolute))
    # order summands by dimension vector for readable output
    parts.sort(key=lambda p: (dim_vector(p.module), p.module.dim))
    for p in parts:
        rows_all.extend(p.rows)
    groups: list[list[int]] = []
    isos = []
    for i, p in enumerate(parts):
        placed = False
        for g in groups:
            j = g[0]
            if dim_vector(parts[j].module) != dim_vector(p.module):
                continue
            cert = _iso_indecomposable(R, parts[j], p, rad_full)
            if cert is not None:
                g.append(i)
                isos.append((j, i, cert))
                placed = True
                break
        if not placed:
            groups.append([i])
    summands = [(parts[g[0]].module, len(g)) for g in groups]
    absolute = all(p.absolute for p in parts)
    return Decomposition(M, parts, summands, rows_all, absolute, isos)


def _iso_indecomposable(R: EndRing, a: Summand, b: Summand, rad_full) -> list | None:
    """Isomorphism Ma -> Mb between indecomposable summands of M, or None.

    Uses e_a End e_b and e_b End e_a inside End(M): the summands are
    isomorphic iff some product x y lies outside the radical of e_a End e_a.
    """
    ea, eb = a.idempotent, b.idempotent
    full = R.basis
    X = _cornerpair(R, ea, eb, full)
    Y = _cornerpair(R, eb, ea, full)
    if not X or not Y:
        return None
    rad_a = _corner(R, ea, rad_full)
    n = len(_bflat(R.one()))
    ech = la.Echelon(n)
    for r in rad_a:
        ech.add_rat(_bflat(r))
    for x in X:
        for y in Y:
            if not ech.contains(_bflat(R.mul(x, y))):
                # x restricted to Ma is an isomorphism onto Mb
                Xm = R.matrix(x)
                return _restrict_map(a, b, Xm)
    return None


def _cornerpair(R: EndRing, e, f, basis):
    vecs = [R.mul(R.mul(e, b), f) for b in basis]
    ech = la.Echelon(len(_bflat(R.one())))
    return [v for v in vecs if ech.add_rat(_bflat(v))]


def _restrict_map(a: Summand, b: Summand, X: list) -> list:
    """Matrix of x : Ma -> Mb in the summands' own bases."""
    out = []
    for r in a.rows:
        img = la.vec_mat(r, X)
        c = la.coords_in_basis(b.rows, img)
        out.append(c)
    return out


def verify_decomposition(dec: Decomposition) -> bool:
    """Exact check: T A_i T^-1 equals the block diagonal of the parts, idempotents are idempotent."""
    M = dec.input
    if M.dim == 0:
        return True
    T = dec.T
    Tinv = la.inverse(T)
    if Tinv is None:
        return False
    for k, A in enumerate(M.actions):
        lhs = la.mat_mul(la.mat_mul(T, A), Tinv)
        rhs = la.block_diag([p.module.actions[k] for p in dec.parts], [(p.module.dim, p.module.dim) for p in dec.parts])
        if lhs != rhs:
            return False
    R = EndRing(M, basis=[])
    for p in dec.parts:
        e = p.idempotent
        if R.mul(e, e) != e:
            return False
    for i, j, X in dec.isos:
        if not is_hom(dec.parts[i].module, dec.parts[j].module, X) or la.inverse(X) is None:
            return False
    return True


@dataclass
class IsoResult:
    verdict: str  # yes | no | probably_no
    certificate: list | None = None
    reason: str = ""


def are_isomorphic(M: ModulePresentation, N: ModulePresentation, seed: int = 0, trials: int = 32) -> IsoResult:
    if M.algebra is not N.algebra:
        raise AlgebraError("algebra mismatch")
    if M.dim != N.dim:
        return IsoResult("no", reason="dimension mismatch")
    if dim_vector(M) != dim_vector(N):
        return IsoResult("no", reason="dimension vector mismatch")
    if M.dim == 0:
        return IsoResult("yes", [], "zero modules")
    H = hom_blocks(M, N)
    if not H:
        return IsoResult("no", reason="Hom(M,N) = 0")
    rng = random.Random(seed)
    dims = list(M.vertex_layout.dims)
    for _ in range(trials):
        coeffs = [rng.randint(1, 10 ** 6) for _ in H]
        F = _bcombo(coeffs, H, dims, dims)
        if all(la.rank(Fv) == d for Fv, d in zip(F, dims) if d):
            return IsoResult("yes", blocks_to_matrix(M, N, F), "random Hom combination is invertible")
    # deterministic fallback: decompose both and match indecomposable summands
    dm = decompose(M, seed=seed, trials=trials)
    dn = decompose(N, seed=seed + 1, trials=trials)
    if not (dm.absolute and dn.absolute):
        return IsoResult("probably_no", reason=f"{trials} random trials singular; decomposition not absolute")
    if dm.dim_vectors != dn.dim_vectors:
        return IsoResult("no", reason="indecomposable summands differ")
    used = [False] * len(dn.parts)
    for p in dm.parts:
        hit = False
        for j, q in enumerate(dn.parts):
            if used[j] or dim_vector(q.module) != dim_vector(p.module):
                continue
            if iso_indecomposables(p.module, q.module) is not None:
                used[j] = True
                hit = True
                break
        if not hit:
            return IsoResult("no", reason="indecomposable summands differ")
    return IsoResult("probably_no", reason="summands match but no invertible map was sampled")


def iso_indecomposables(L: ModulePresentation, K: ModulePresentation) -> list | None:
    """Isomorphism L -> K between indecomposables, or None (exact)."""
    if dim_vector(L) != dim_vector(K):
        return None
    X = hom_blocks(L, K)
    Y = hom_blocks(K, L)
    if not X or not Y:
        return None
    R = EndRing(L)
    rad = _radical(R, R.basis)
    ech = la.Echelon(len(_bflat(R.one())))
    for r in rad:
        ech.add_rat(_bflat(r))
    dl, dk = list(L.vertex_layout.dims), list(K.vertex_layout.dims)
    for x in X:
        for y in Y:
            if not ech.contains(_bflat(_bmul(x, y, dl, dk, dl))):
                return blocks_to_matrix(L, K, x)
    return None
