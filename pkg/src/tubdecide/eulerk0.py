"""Grothendieck-group arithmetic: Euler form, chi, radical, slope and root cosets."""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Sequence

import gmpy2

from . import exactla as la
from .algcore import AlgebraPresentation


class EulerError(ValueError):
    pass


class _Infinity:
    """The slope of vectors with vanishing denominator."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "inf"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def slope_str(q) -> str:
    if q is INF:
        return "inf"
    if q is None:
        return "undefined"
    return la.rat_str(q)


def parse_slope(s) :
    if s is INF:
        return INF
    if isinstance(s, str) and s.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return la.rat(s)


def slope_lt(a, b) -> bool:
    if a is INF:
        return False
    if b is INF:
        return True
    return a < b


# --- integer lattices ---------------------------------------------------

def hnf_with_transform(M: Sequence[Sequence[int]]) -> tuple[list, list, int]:
    """Row Hermite normal form: returns (H, U, rank) with U unimodular and U M = H.

    Rows rank.. of H are zero, so rows rank.. of U span the integer left kernel.
    """
    r = len(M)
    c = len(M[0]) if M else 0
    m = [[int(x) for x in row] for row in M]
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    row = 0
    for col in range(c):
        if row >= r:
            break
        while True:
            nz = [i for i in range(row, r) if m[i][col]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(m[i][col]))
            m[row], m[p] = m[p], m[row]
            U[row], U[p] = U[p], U[row]
            done = True
            for i in range(row + 1, r):
                if m[i][col]:
                    q = m[i][col] // m[row][col]
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[row])]
                    if m[i][col]:
                        done = False
            if done:
                break
        if m[row][col]:
            if m[row][col] < 0:
                m[row] = [-a for a in m[row]]
                U[row] = [-a for a in U[row]]
            for i in range(row):
                q = m[i][col] // m[row][col]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[row])]
            row += 1
    return m, U, row


def integer_left_kernel(M: Sequence[Sequence[int]]) -> list:
    _, U, rk = hnf_with_transform(M)
    return U[rk:]


def hnf_basis(rows: Sequence[Sequence[int]]) -> list:
    """Reduced row HNF of the lattice spanned by the rows (zero rows dropped)."""
    H, _, rk = hnf_with_transform(rows)
    return H[:rk]


def in_lattice(basis_hnf: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    return not any(reduce_mod_lattice(basis_hnf, x))


def reduce_mod_lattice(basis_hnf: Sequence[Sequence[int]], x: Sequence[int]) -> list:
    """Canonical representative of x modulo the lattice given in row HNF."""
    x = [int(a) for a in x]
    for row in basis_hnf:
        p = next(i for i, a in enumerate(row) if a)
        q = x[p] // row[p]
        if q:
            x = [a - q * b for a, b in zip(x, row)]
    return x


# --- Euler data ---------------------------------------------------------

@dataclass(frozen=True)
class EulerData:
    """Euler form data of an algebra with unitriangular Cartan matrix.

    ``E`` is the Euler matrix with <x, y> = x E y^T, equal to C^{-T} for the
    Cartan matrix C of :mod:`algcore`.  ``S = E + E^T``.  ``radical_basis`` is
    the row HNF basis of the integer kernel of S.
    """

    vertices: tuple
    E: tuple
    S: tuple
    radical_basis: tuple
    h0: tuple | None
    hinf: tuple | None
    g0: tuple | None
    ginf: tuple | None
    source: int | None
    sink: int | None
    quotient_basis: tuple  # rows completing the radical to a basis of Z^n
    coords: tuple  # n x n rational matrix mapping x to coordinates in (quotient_basis, radical rows)
    adjacency: tuple

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def radical_rank(self) -> int:
        return len(self.radical_basis)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        if len(x) != self.n or len(y) != self.n:
            raise EulerError("length mismatch")
        return sum(int(x[i]) * self.E[i][j] * int(y[j])
                   for i in range(self.n) if x[i] for j in range(self.n) if y[j])

    def chi(self, x: Sequence[int]) -> int:
        return self.pair(x, x)

    def is_radical(self, x: Sequence[int]) -> bool:
        return all(sum(self.S[i][j] * int(x[j]) for j in range(self.n)) == 0 for i in range(self.n))

    def slope(self, x: Sequence[int]):
        """-(g0.x)/(ginf.x) as an exact rational, INF, or None when 0/0."""
        if self.g0 is None:
            raise EulerError("slope needs a rank-2 radical with h0 and h_inf")
        num = -dot(self.g0, x)
        den = dot(self.ginf, x)
        if den == 0:
            return None if num == 0 else INF
        return gmpy2.mpq(num, den)

    def coset_reduce(self, x: Sequence[int]) -> tuple:
        return tuple(reduce_mod_lattice(self.radical_basis, x))

    def band_bounds(self) -> tuple[int, int]:
        """(<h0, h_inf>, -<h_inf, h0>)."""
        return self.pair(self.h0, self.hinf), -self.pair(self.hinf, self.h0)

    def quotient_coords(self, x: Sequence[int]) -> list:
        z = la.vec_mat([la.rat(a) for a in x], [list(r) for r in self.coords])
        k = len(self.quotient_basis)
        return [int(a) for a in z[:k]]

    def quotient_gram(self) -> list:
        """Gram matrix G of chi on Z^n / rad in the quotient basis: chi(qW) = q G q^T."""
        W = self.quotient_basis
        Sm = [list(r) for r in self.S]
        WS = la.mat_mul(la.mat(W), la.mat(Sm))
        G = la.mat_mul(WS, la.transpose(la.mat(W)))
        return [[g / 2 for g in row] for row in G]

    def radial_vector(self, q) -> tuple:
        """Primitive positive radical vector of slope q = b/a: a h0 + b h_inf divided by its content."""
        if q is INF or q is None:
            raise EulerError("q must be a positive rational")
        q = la.rat(q)
        if q <= 0:
            raise EulerError("q must lie in (0, inf)")
        a, b = int(q.denominator), int(q.numerator)
        v = [a * s + b * t for s, t in zip(self.h0, self.hinf)]
        g = 0
        for x in v:
            g = math.gcd(g, x)
        return tuple(x // g for x in v)


def dot(u: Sequence, v: Sequence) -> int:
    return sum(int(a) * int(b) for a, b in zip(u, v))


_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def euler_data(A: AlgebraPresentation) -> EulerData:
    if A in _CACHE:
        return _CACHE[A]
    C = A.cartan
    n = len(C)
    Cinv = la.inverse(la.mat(C))
    if Cinv is None:
        raise EulerError("Cartan matrix is singular")
    E = [[int(Cinv[j][i]) for j in range(n)] for i in range(n)]  # C^{-T}
    if any(Cinv[j][i].denominator != 1 for i in range(n) for j in range(n)):
        raise EulerError("Cartan matrix is not unimodular")
    S = [[E[i][j] + E[j][i] for j in range(n)] for i in range(n)]
    H, U, rk = hnf_with_transform(S)
    rad = hnf_basis(U[rk:]) if rk < n else []
    # complete the radical to a basis of Z^n: rows of U above rk together with U[rk:]
    W = U[:rk]
    full = [list(r) for r in W] + [list(r) for r in U[rk:]]
    coords = la.inverse(la.mat(full))
    source = next((v for v in range(n) if all(C[i][v] == (1 if i == v else 0) for i in range(n))), None)
    sink = next((v for v in range(n) if all(C[v][j] == (1 if j == v else 0) for j in range(n))), None)
    h0 = hinf = g0 = ginf = None
    if len(rad) == 2 and source is not None and sink is not None:
        h0 = _radical_with_zero(rad, sink)
        hinf = _radical_with_zero(rad, source)
        g0 = tuple(sum(h0[i] * E[i][j] for i in range(n)) for j in range(n))
        ginf = tuple(sum(hinf[i] * E[i][j] for i in range(n)) for j in range(n))
    adj = tuple(tuple(r) for r in A.quiver_adjacency)
    data = EulerData(
        vertices=tuple(A.vertices), E=tuple(map(tuple, E)), S=tuple(map(tuple, S)),
        radical_basis=tuple(map(tuple, rad)), h0=h0, hinf=hinf, g0=g0, ginf=ginf,
        source=source, sink=sink, quotient_basis=tuple(map(tuple, W)),
        coords=tuple(map(tuple, coords)), adjacency=adj,
    )
    _CACHE[A] = data
    return data


def _radical_with_zero(rad: Sequence[Sequence[int]], v: int) -> tuple:
    """Primitive radical vector vanishing at vertex v, with non-negative entries."""
    (a1, a2) = rad[0][v], rad[1][v]
    # c1 a1 + c2 a2 = 0
    g = math.gcd(a1, a2)
    if g == 0:
        c1, c2 = 1, 0
    else:
        c1, c2 = a2 // g, -a1 // g
    x = [c1 * p + c2 * q for p, q in zip(rad[0], rad[1])]
    cont = 0
    for t in x:
        cont = math.gcd(cont, t)
    x = [t // cont for t in x]
    if min(x) < 0:
        x = [-t for t in x]
    if min(x) < 0:
        raise EulerError("no non-negative radical vector at this vertex")
    return tuple(x)


# --- module-level conveniences ------------------------------------------

def euler_pair(A: AlgebraPresentation, x, y) -> int:
    return euler_data(A).pair(x, y)


def chi(A: AlgebraPresentation, x) -> int:
    return euler_data(A).chi(x)


def slope_of(A: AlgebraPresentation, x):
    return euler_data(A).slope(x)


def radical_basis(A: AlgebraPresentation) -> list:
    return [list(r) for r in euler_data(A).radical_basis]


def coset_reduce(A: AlgebraPresentation, x) -> tuple:
    return euler_data(A).coset_reduce(x)


def is_connected_support(ed: EulerData, x: Sequence[int]) -> bool:
    supp = [i for i, a in enumerate(x) if a]
    if not supp:
        return False
    seen = {supp[0]}
    stack = [supp[0]]
    sset = set(supp)
    while stack:
        v = stack.pop()
        for w in sset:
            if w not in seen and ed.adjacency[v][w]:
                seen.add(w)
                stack.append(w)
    return seen == sset


def is_indec_dimvector(A: AlgebraPresentation, x: Sequence[int]) -> bool:
    """Positive, connected support, and chi(x) in {0, 1}."""
    ed = euler_data(A)
    if any(int(a) < 0 for a in x) or not any(x):
        return False
    if not is_connected_support(ed, x):
        return False
    return ed.chi(x) in (0, 1)


# --- roots modulo the radical ---------------------------------------------

def _ldl(G: Sequence[Sequence]) -> tuple[list, list]:
    """Exact LDL^T of a symmetric matrix; raises unless positive definite."""
    n = len(G)
    L = [[la.ZERO] * n for _ in range(n)]
    D = [la.ZERO] * n
    for i in range(n):
        L[i][i] = la.ONE
    for j in range(n):
        s = la.rat(G[j][j]) - sum((L[j][k] ** 2 * D[k] for k in range(j)), la.ZERO)
        if s <= 0:
            raise EulerError("form not positive definite on the quotient by the radical")
        D[j] = s
        for i in range(j + 1, n):
            t = la.rat(G[i][j]) - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), la.ZERO)
            L[i][j] = t / s
    return L, D


def short_vectors(G: Sequence[Sequence], radius) -> list:
    """All integer q with q G q^T <= radius for positive definite G (exact Fincke-Pohst)."""
    n = len(G)
    L, D = _ldl(G)
    radius = la.rat(radius)
    out = []
    q = [0] * n

    # q G q^T = sum_j D_j (q_j + sum_{i>j} L_ij q_i)^2
    def rec(j, used):
        if j < 0:
            out.append(tuple(q))
            return
        c = sum((L[i][j] * q[i] for i in range(j + 1, n)), la.ZERO)
        rem = radius - used
        if rem < 0:
            return
        t = rem / D[j]
        s = math.sqrt(float(t)) + 1e-9
        lo = math.floor(float(-c) - s) - 1
        hi = math.ceil(float(-c) + s) + 1
        for v in range(lo, hi + 1):
            val = (v + c) ** 2 * D[j]
            if val <= rem:
                q[j] = v
                rec(j - 1, used + val)
        q[j] = 0

    rec(n - 1, la.ZERO)
    return out


def compute_omega(A: AlgebraPresentation, radius: int = 1) -> list:
    """Coset representatives y (coset_reduce form) of all x with chi(x) = 1.

    Enumerates the quotient lattice Z^n / rad chi with the positive definite
    induced form, keeping value exactly 1; ``radius`` is the enumeration bound.
    """
    ed = euler_data(A)
    if ed.radical_rank != 2:
        raise EulerError("form not positive semidefinite with a rank-2 radical")
    G = ed.quotient_gram()
    vecs = short_vectors(G, radius)
    W = [list(r) for r in ed.quotient_basis]
    out = set()
    for qv in vecs:
        val = sum(G[i][j] * qv[i] * qv[j] for i in range(len(qv)) for j in range(len(qv)))
        if val != 1:
            continue
        x = [sum(qv[i] * W[i][k] for i in range(len(qv))) for k in range(ed.n)]
        if ed.chi(x) != 1:
            raise EulerError("internal: quotient form mismatch")
        out.add(ed.coset_reduce(x))
    return sorted(out)


def omega_cached(A: AlgebraPresentation) -> list:
    ed = euler_data(A)
    key = ("omega", id(ed))
    if key not in _OMEGA:
        _OMEGA[key] = compute_omega(A)
    return _OMEGA[key]


_OMEGA: dict = {}


def is_semidefinite(A: AlgebraPresentation) -> bool:
    ed = euler_data(A)
    try:
        _ldl(ed.quotient_gram())
    except EulerError:
        return False
    return True


def classify_vector(ed: EulerData, x: Sequence[int]) -> str:
    """preprojective / preinjective / regular by the linear functionals g0 and g_inf."""
    a = dot(ed.g0, x)
    b = dot(ed.ginf, x)
    if a < 0 and b <= 0:
        return "preprojective"
    if a >= 0 and b > 0:
        return "preinjective"
    return "slope"
