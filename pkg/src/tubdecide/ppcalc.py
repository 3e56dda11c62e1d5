"""pp-formulas as matrices over the algebra.

A formula with n free variables x and l bound variables y is stored as an
(n+l) x m matrix H of algebra elements and read as

    exists y :  sum_k z_k H[k][c] = 0  for every column c,   z = (x, y).

For side "right" the z_k live in a right A-module and z_k H[k][c] is the
module action.  Side "left" formulas talk about left A-modules, which are
handled as right modules over the opposite algebra (same basis, so the same
coordinate vectors); there the stored matrix is the transpose of the usual
column convention H z = 0.  With this storage the elementary dual is the same
block transform on both sides.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Sequence

from . import exactla as la
from .algcore import (
    AlgebraError, AlgebraPresentation, ModulePresentation, direct_sum, dual_module,
    generated_subspace, quotient_by_tuple, quotient_projection, regular_module, resolve_algebra,
    zero_module,
)
from .exactla import ONE, ZERO


class FormulaError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PpFormula:
    algebra: AlgebraPresentation  # base algebra; side decides which ring acts
    side: str
    n: int
    l: int
    H: tuple  # (n+l) rows of m coordinate vectors

    def __post_init__(self):
        if self.side not in ("right", "left"):
            raise FormulaError(f"bad side {self.side!r}")
        if len(self.H) != self.n + self.l:
            raise FormulaError("H must have n+l rows")
        m = {len(r) for r in self.H}
        if len(m) > 1:
            raise FormulaError("ragged relation matrix")
        for r in self.H:
            for e in r:
                if len(e) != self.algebra.dim:
                    raise FormulaError("algebra element of the wrong length")

    @property
    def m(self) -> int:
        return len(self.H[0]) if self.H else 0

    @property
    def ring(self) -> AlgebraPresentation:
        """The algebra whose right modules this formula is evaluated on."""
        return self.algebra if self.side == "right" else self.algebra.opposite

    def columns(self) -> list:
        return [[self.H[k][c] for k in range(self.n + self.l)] for c in range(self.m)]

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, eq=False)
class PpPair:
    """phi / psi with psi stored as phi & psi_raw, so psi <= phi holds syntactically."""

    phi: PpFormula
    psi: PpFormula

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def side(self) -> str:
        return self.phi.side


def _zero_el(A):
    return [ZERO] * A.dim


def _unit(A):
    return list(A.one)


def _scaled(A, c):
    return [la.rat(c) * x for x in A.one]


def make_formula(A: AlgebraPresentation, n: int, l: int, H, side: str = "right") -> PpFormula:
    rows = tuple(tuple(tuple(la.rat(x) for x in e) for e in r) for r in H)
    if not rows:
        rows = tuple(() for _ in range(n + l))
    return PpFormula(A, side, n, l, rows)


def top(A: AlgebraPresentation, n: int = 1, side: str = "right") -> PpFormula:
    """x = x."""
    return make_formula(A, n, 0, [[] for _ in range(n)], side)


def bottom(A: AlgebraPresentation, n: int = 1, side: str = "right") -> PpFormula:
    """x = 0."""
    H = [[_unit(A) if i == j else _zero_el(A) for j in range(n)] for i in range(n)]
    return make_formula(A, n, 0, H, side)


def annihilator(A: AlgebraPresentation, a, side: str = "right") -> PpFormula:
    """x a = 0 (a x = 0 on the left)."""
    return make_formula(A, 1, 0, [[list(a)]], side)


def divisibility(A: AlgebraPresentation, a, side: str = "right") -> PpFormula:
    """a | x: exists y with x = y a (x = a y on the left)."""
    return make_formula(A, 1, 1, [[_unit(A)], [[-v for v in la.vec(a)]]], side)


def _check_compatible(f: PpFormula, g: PpFormula):
    if f.algebra is not g.algebra:
        raise FormulaError("algebra mismatch")
    if f.side != g.side:
        raise FormulaError("side mismatch")
    if f.n != g.n:
        raise FormulaError("arity mismatch")


def meet(f: PpFormula, g: PpFormula) -> PpFormula:
    _check_compatible(f, g)
    A = f.algebra
    n = f.n
    zf, zg = [_zero_el(A)] * f.m, [_zero_el(A)] * g.m
    H = []
    for k in range(n):
        H.append(list(f.H[k]) + list(g.H[k]))
    for k in range(f.l):
        H.append(list(f.H[n + k]) + zg)
    for k in range(g.l):
        H.append(zf + list(g.H[n + k]))
    return make_formula(A, n, f.l + g.l, H, f.side)


def join(f: PpFormula, g: PpFormula) -> PpFormula:
    """exists x1, x2: x = x1 + x2, f(x1), g(x2)."""
    _check_compatible(f, g)
    A = f.algebra
    n = f.n
    one, zero = _unit(A), _zero_el(A)
    minus = [-v for v in one]
    zf, zg = [zero] * f.m, [zero] * g.m
    H = []
    for k in range(n):  # x
        H.append([one if c == k else zero for c in range(n)] + zf + zg)
    for k in range(n):  # x1
        H.append([minus if c == k else zero for c in range(n)] + list(f.H[k]) + zg)
    for k in range(n):  # x2
        H.append([minus if c == k else zero for c in range(n)] + zf + list(g.H[k]))
    for k in range(f.l):
        H.append([zero] * n + list(f.H[n + k]) + zg)
    for k in range(g.l):
        H.append([zero] * n + zf + list(g.H[n + k]))
    return make_formula(A, n, 2 * n + f.l + g.l, H, f.side)


def dual(f: PpFormula) -> PpFormula:
    """Elementary dual: block matrix [[I, 0], [H'^T, H''^T]] on the other side."""
    A = f.algebra
    n, m = f.n, f.m
    one, zero = _unit(A), _zero_el(A)
    H = []
    for k in range(n):
        H.append([one if c == k else zero for c in range(n)] + [zero] * f.l)
    for j in range(m):
        H.append([f.H[c][j] for c in range(n)] + [f.H[n + c][j] for c in range(f.l)])
    side = "left" if f.side == "right" else "right"
    return make_formula(A, n, m, H, side)


def pair(phi: PpFormula, psi: PpFormula) -> PpPair:
    return PpPair(phi, meet(phi, psi))


def dual_pair(p: PpPair) -> PpPair:
    """D(phi/psi) = D psi / D phi."""
    return pair(dual(p.psi), dual(p.phi))


# --- evaluation ----------------------------------------------------------

def _check_module(f: PpFormula, M: ModulePresentation):
    if M.algebra is not f.ring:
        raise FormulaError(f"formula for {f.side} modules over {f.algebra.name} applied to a module over {M.algebra.name}")


def _system(f: PpFormula, M: ModulePresentation) -> list:
    """Rows of the linear map z -> (sum_k z_k H_kc)_c, one block of d rows per variable."""
    d = M.dim
    m = f.m
    cache = {}

    def act(e):
        key = tuple(e)
        if key not in cache:
            cache[key] = M.act(e) if any(e) else None
        return cache[key]

    rows = []
    for k in range(f.n + f.l):
        blk = [[ZERO] * (m * d) for _ in range(d)]
        for c in range(m):
            X = act(f.H[k][c])
            if X is None:
                continue
            for i in range(d):
                Xi = X[i]
                for j in range(d):
                    if Xi[j]:
                        blk[i][c * d + j] = Xi[j]
        rows.extend(blk)
    return rows


def evaluate(f: PpFormula, M: ModulePresentation) -> int:
    """dim of f(M) over the rationals."""
    _check_module(f, M)
    d = M.dim
    if d == 0:
        return 0
    if f.m == 0:
        return f.n * d
    K = _system(f, M)
    ncols = f.m * d
    full = la.echelon(K, ncols).rank
    ys = la.echelon(K[f.n * d:], ncols).rank
    return f.n * d - full + ys


def solution_space(f: PpFormula, M: ModulePresentation) -> list:
    """Basis of f(M) as vectors in M^n (concatenated)."""
    _check_module(f, M)
    d = M.dim
    N = (f.n + f.l) * d
    if f.m == 0:
        ker = la.identity(N) if N else []
    else:
        ker = la.kernel_basis(_system(f, M), "left")
    proj = [v[: f.n * d] for v in ker]
    return la.echelon(proj, f.n * d).basis_rows() if proj else []


def satisfies(f: PpFormula, M: ModulePresentation, tup: Sequence[Sequence]) -> bool:
    """Whether the n-tuple ``tup`` of elements of M lies in f(M)."""
    _check_module(f, M)
    d = M.dim
    if len(tup) != f.n:
        raise FormulaError("tuple length differs from the arity")
    if f.m == 0 or d == 0:
        return True
    K = _system(f, M)
    x = [la.rat(v) for t in tup for v in t]
    # need y with y K_y = -x K_x
    target = [-v for v in la.vec_mat(x, K[: f.n * d])]
    Ky = K[f.n * d:]
    if not Ky:
        return not any(target)
    return la.solve_left(Ky, target) is not None


def pair_dim(p: PpPair, M: ModulePresentation) -> int:
    return evaluate(p.phi, M) - evaluate(p.psi, M)


def pair_open(p: PpPair, M: ModulePresentation) -> bool:
    return pair_dim(p, M) > 0


def leq(f: PpFormula, g: PpFormula) -> bool:
    """f(M) <= g(M) in every module, decided on the free realization of f."""
    _check_compatible(f, g)
    M, tup = free_realization(f)
    return satisfies(g, M, tup)


def equivalent(f: PpFormula, g: PpFormula) -> bool:
    return leq(f, g) and leq(g, f)


# --- free realizations and pp-types ----------------------------------------

def free_realization(f: PpFormula) -> tuple[ModulePresentation, list]:
    """(M, m) with M = R^(n+l) / sum_c h_c R and m the images of the first n generators."""
    R = f.ring
    k = f.n + f.l
    if k == 0:
        return zero_module(R), []
    F = direct_sum(*[regular_module(R)] * k)
    s = R.dim
    gens = []
    for col in f.columns():
        v = []
        for e in col:
            v.extend(e)
        gens.append(v)
    Q = quotient_by_tuple(F, gens, label="free")
    P = quotient_projection(F, gens)
    tup = []
    for i in range(f.n):
        u = [ZERO] * (k * s)
        one = R.one
        for j in range(s):
            u[i * s + j] = one[j]
        tup.append(la.vec_mat(u, P) if Q.dim else [])
    return Q, tup


def module_generators(M: ModulePresentation) -> list:
    """A generating tuple of vertex-homogeneous elements, chosen greedily."""
    L = M.vertex_layout
    basis = L.T if L.T is not None else la.identity(M.dim)
    gens = []
    ech = la.Echelon(M.dim)
    for v in basis:
        if not ech.contains(v):
            gens.append(list(v))
            ech = generated_subspace(M, gens)
            if ech.rank == M.dim:
                break
    return gens


def _relations_of(M: ModulePresentation, tup: list) -> list:
    """Module generators of the kernel of R^n -> M, (r_i) -> sum m_i r_i."""
    R = M.algebra
    s = R.dim
    n = len(tup)
    rows = []
    for m in tup:
        for j in range(s):
            rows.append(la.vec_mat(m, M.actions[j]))
    ker = la.kernel_basis(rows, "left")
    closure = la.Echelon(n * s)
    out = []
    for k in ker:
        if closure.contains(k):
            continue
        out.append(k)
        for j in range(s):
            b = R.basis_vector(j)
            closure.add_rat([x for i in range(n) for x in R.mul(k[i * s:(i + 1) * s], b)])
    return out


def pp_type_generator(M: ModulePresentation, tup: Sequence[Sequence] | None = None) -> PpFormula:
    """A formula generating the pp-type of ``tup`` in M.

    For a generating tuple the result is quantifier free.  Otherwise the
    tuple is extended by module generators that are then quantified away.
    """
    R = M.algebra
    base = R.opposite if R.opposite_flag else R
    side = "left" if R.opposite_flag else "right"
    tup = [la.vec(t) for t in (tup if tup is not None else module_generators(M))]
    n = len(tup)
    if M.dim and generated_subspace(M, tup).rank < M.dim:
        extra = module_generators(M)
    else:
        extra = []
    full = tup + extra
    s = R.dim
    rels = _relations_of(M, full) if full else []
    k = len(full)
    H = [[r[i * s:(i + 1) * s] for r in rels] for i in range(k)]
    if not rels:
        H = [[] for _ in range(k)]
    f = make_formula(base, n, len(extra), H, side)
    return f


def rep_functor_pair(M: ModulePresentation) -> PpPair:
    """A pair whose value at N has dimension dim Hom(M, N)."""
    phi = pp_type_generator(M)
    return pair(phi, bottom(phi.algebra, phi.n, phi.side))


def tensor_functor_pair(M: ModulePresentation) -> PpPair:
    """A pair whose value at N has dimension dim N (x) M*, i.e. dim Hom(N, M)."""
    A = M.algebra
    base = A.opposite if A.opposite_flag else A
    side = "left" if A.opposite_flag else "right"
    if M.dim == 0:
        return pair(top(base, 1, side), top(base, 1, side))
    phi = pp_type_generator(dual_module(M))
    return pair(top(base, phi.n, side), dual(phi))


# --- text syntax -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*=&.()|]))")


def _tokens(text: str) -> list:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaError(f"cannot parse near {text[pos:pos + 12]!r}")
        pos = m.end()
        for kind in ("num", "name", "op"):
            if m.group(kind) is not None:
                out.append((kind, m.group(kind)))
    return out


class _Parser:
    def __init__(self, A, text):
        self.A = A
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise FormulaError(f"expected {value!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def element(self):
        """elem := number | name | '(' linear combination of names ')'"""
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return _scaled(self.A, la.rat(val))
        if kind == "name":
            self.take()
            return self.A.element(val)
        if val == "(":
            self.take("(")
            acc = _zero_el(self.A)
            sign = ONE
            first = True
            while True:
                k2, v2 = self.peek()
                if v2 in ("+", "-"):
                    self.take()
                    sign = ONE if v2 == "+" else -ONE
                elif not first:
                    break
                coef = ONE
                if self.peek()[0] == "num":
                    coef = la.rat(self.take()[1])
                    if self.peek()[1] == "*":
                        self.take("*")
                        e = self.element()
                    else:
                        e = _unit(self.A)
                else:
                    e = self.element()
                acc = [a + sign * coef * b for a, b in zip(acc, e)]
                sign = ONE
                first = False
                if self.peek()[1] == ")":
                    break
            self.take(")")
            return acc
        raise FormulaError(f"expected an algebra element, got {val!r}")

    def side_expr(self, out: dict, sign):
        """Linear expression: [+-] term { [+-] term }; term := [num *] var [* elem] | elem * var."""
        first = True
        while True:
            kind, val = self.peek()
            s = sign
            if val in ("+", "-"):
                self.take()
                if val == "-":
                    s = -sign
            elif not first:
                return
            first = False
            coef = ONE
            if self.peek()[0] == "num":
                coef = la.rat(self.take()[1])
                if self.peek()[1] != "*":
                    if coef:
                        raise FormulaError("constant terms are not allowed")
                    continue
                self.take("*")
            kind, val = self.peek()
            if kind == "name" and _VAR.fullmatch(val):
                self.take()
                var = val
                el = _unit(self.A)
                if self.peek()[1] == "*":
                    self.take("*")
                    el = self.element()
            else:
                el = self.element()
                self.take("*")
                var = self.take()[1]
                if not _VAR.fullmatch(var):
                    raise FormulaError(f"expected a variable, got {var!r}")
            prev = out.get(var, _zero_el(self.A))
            out[var] = [p + s * coef * e for p, e in zip(prev, el)]
            if self.peek()[0] is None or self.peek()[1] in ("=", "&"):
                return

    def atom(self) -> dict:
        out: dict = {}
        self.side_expr(out, ONE)
        self.take("=")
        self.side_expr(out, -ONE)
        return out


_VAR = re.compile(r"[xy]\d+")


def parse(text: str, algebra: AlgebraPresentation, n: int | None = None, side: str = "right") -> PpFormula:
    """Parse ``E y1 y2 . x1*a + y1 = 0 & x2 = x1*b``.

    Variables are x1..xn (free) and y1..yl (bound); ``x = x`` alone, or an
    empty body ``true``, gives the top formula.
    """
    p = _Parser(algebra, text)
    bound = []
    if p.peek()[1] == "E":
        p.take()
        while p.peek()[1] != ".":
            v = p.take()[1]
            if not re.fullmatch(r"y\d+", v):
                raise FormulaError(f"bound variables must be y1, y2, ...: {v!r}")
            bound.append(v)
        p.take(".")
    atoms = []
    if p.peek()[1] == "true":
        p.take()
    else:
        while True:
            atoms.append(p.atom())
            if p.peek()[1] == "&":
                p.take("&")
                continue
            break
    if p.peek()[0] is not None:
        raise FormulaError(f"trailing input {p.peek()[1]!r}")
    xs = {v for a in atoms for v in a if v.startswith("x")}
    ys = {v for a in atoms for v in a if v.startswith("y")}
    nmax = max([int(v[1:]) for v in xs] + [0])
    n = nmax if n is None else n
    if nmax > n:
        raise FormulaError("free variable index exceeds the arity")
    undeclared = ys - set(bound)
    if undeclared:
        raise FormulaError(f"undeclared bound variable(s): {sorted(undeclared)}")
    lmax = max([int(v[1:]) for v in bound] + [0])
    if n == 0 and not atoms:
        n = 1
    order = [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, lmax + 1)]
    H = [[a.get(v, _zero_el(algebra)) for a in atoms if any(any(e) for e in a.values())] for v in order]
    return make_formula(algebra, n, lmax, H, side)


def _el_str(A, e) -> str:
    terms = [(k, c) for k, c in enumerate(e) if c]
    if len(terms) == 1:
        k, c = terms[0]
        name = A.basis[k]
        if c == 1:
            return name
        if c == -1:
            return f"(-{name})"
        return f"({la.rat_str(c)}*{name})"
    parts = []
    for k, c in terms:
        sgn = "-" if c < 0 else "+"
        mag = abs(c)
        body = A.basis[k] if mag == 1 else f"{la.rat_str(mag)}*{A.basis[k]}"
        parts.append(f"{sgn} {body}")
    s = " ".join(parts)
    if s.startswith("+ "):
        s = s[2:]
    return f"({s})"


def render(f: PpFormula) -> str:
    A = f.algebra
    names = [f"x{i + 1}" for i in range(f.n)] + [f"y{i + 1}" for i in range(f.l)]
    atoms = []
    for c in range(f.m):
        terms = []
        for k, v in enumerate(names):
            e = f.H[k][c]
            if any(e):
                es = _el_str(A, e)
                terms.append(v if es == "1" else f"{v}*{es}")
        if terms:
            atoms.append(" + ".join(terms) + " = 0")
    body = " & ".join(atoms) if atoms else "true"
    prefix = ("E " + " ".join(names[f.n:]) + " . ") if f.l else ""
    return prefix + body


# --- JSON ------------------------------------------------------------------

def formula_to_json(f: PpFormula) -> dict:
    return {
        "algebra_ref": f.algebra.name,
        "side": f.side,
        "n": f.n,
        "l": f.l,
        "H": [[[la.rat_str(x) for x in e] for e in row] for row in f.H],
        "text": render(f),
    }


def formula_from_json(data: dict, algebra: AlgebraPresentation | None = None) -> PpFormula:
    A = algebra or resolve_algebra(data["algebra_ref"])
    side = data.get("side", "right")
    if "H" in data:
        return make_formula(A, int(data["n"]), int(data["l"]), data["H"], side)
    if "text" in data:
        return parse(data["text"], A, data.get("n"), side)
    raise FormulaError("formula JSON needs H or text")


def pair_to_json(p: PpPair) -> dict:
    return {"phi": formula_to_json(p.phi), "psi": formula_to_json(p.psi)}


def pair_from_json(data: dict, algebra: AlgebraPresentation | None = None) -> PpPair:
    phi = formula_from_json(data["phi"], algebra)
    psi = formula_from_json(data["psi"], algebra or phi.algebra)
    return pair(phi, psi)


def load_formula(path: str, algebra: AlgebraPresentation | None = None) -> PpFormula:
    with open(path) as fh:
        return formula_from_json(json.load(fh), algebra)


def load_pair(path: str, algebra: AlgebraPresentation | None = None) -> PpPair:
    with open(path) as fh:
        return pair_from_json(json.load(fh), algebra)


__all__ = [
    "PpFormula", "PpPair", "FormulaError", "make_formula", "top", "bottom", "annihilator",
    "divisibility", "meet", "join", "dual", "pair", "dual_pair", "evaluate", "satisfies",
    "solution_space", "pair_dim", "pair_open", "leq", "equivalent", "free_realization",
    "module_generators", "pp_type_generator", "rep_functor_pair", "tensor_functor_pair",
    "parse", "render", "formula_to_json", "formula_from_json", "pair_to_json",
    "pair_from_json", "load_formula", "load_pair", "AlgebraError",
]
