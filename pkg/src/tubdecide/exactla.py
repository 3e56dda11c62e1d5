"""Exact linear algebra over the rationals.

Matrices are plain row-major lists of lists of :data:`Rat` values.  All
routines are pure: inputs are never mutated.  Row reduction is done
fraction-free on integer rows (each row is scaled to a primitive integer
vector after every update), so intermediate coefficients stay small and no
rational arithmetic happens inside the elimination loop.
"""

from __future__ import annotations

from math import gcd, lcm
from typing import Iterable, Sequence

import gmpy2

Rat = type(gmpy2.mpq(0))
ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)

Vec = list
Mat = list


def rat(x) -> "Rat":
    """Coerce an int, Fraction, mpq or a string "p/q" to a rational."""
    if isinstance(x, Rat):
        return x
    if isinstance(x, str):
        return gmpy2.mpq(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return gmpy2.mpq(int(x.numerator), int(x.denominator))
    return gmpy2.mpq(x)


def rat_str(x) -> str:
    x = rat(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def vec(xs: Iterable) -> list:
    return [rat(x) for x in xs]


def mat(rows: Iterable[Iterable]) -> list:
    return [[rat(x) for x in row] for row in rows]


def zeros(r: int, c: int) -> list:
    return [[ZERO] * c for _ in range(r)]


def identity(n: int) -> list:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def shape(m: Sequence[Sequence], cols: int | None = None) -> tuple[int, int]:
    if not m:
        return 0, (cols or 0)
    return len(m), len(m[0])


def transpose(m: Sequence[Sequence], cols: int = 0) -> list:
    if not m:
        return [[] for _ in range(cols)]
    return [list(c) for c in zip(*m)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence], inner: int | None = None) -> list:
    """Product of an r x k and a k x c matrix, skipping zero entries."""
    if not a:
        return []
    k = len(a[0]) if inner is None else inner
    if k == 0:
        c = len(b[0]) if b else 0
        return zeros(len(a), c)
    c = len(b[0])
    brows = [[(j, x) for j, x in enumerate(row) if x] for row in b]
    out = []
    for row in a:
        acc = [ZERO] * c
        for t, x in enumerate(row):
            if x:
                for j, y in brows[t]:
                    acc[j] += x * y
        out.append(acc)
    return out


def mat_mul_shape(a, b, r: int, k: int, c: int) -> list:
    """Product with explicit shapes r x k times k x c, safe for empty dimensions."""
    if r == 0 or c == 0 or k == 0:
        return zeros(r, c)
    return mat_mul(a, b)


def mat_add(a, b) -> list:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b) -> list:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a) -> list:
    c = rat(c)
    return [[c * x for x in row] for row in a]


def vec_mat(v: Sequence, m: Sequence[Sequence]) -> list:
    """Row vector times matrix."""
    if not m:
        return []
    out = [ZERO] * len(m[0])
    for x, row in zip(v, m):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return out


def mat_vec(m: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in m]


def is_zero_mat(m) -> bool:
    return all(not x for row in m for x in row)


def block_diag(blocks: Sequence[Sequence[Sequence]], sizes: Sequence[tuple[int, int]] | None = None) -> list:
    if sizes is None:
        sizes = [(len(b), len(b[0]) if b else 0) for b in blocks]
    R = sum(r for r, _ in sizes)
    C = sum(c for _, c in sizes)
    out = zeros(R, C)
    r0 = c0 = 0
    for b, (r, c) in zip(blocks, sizes):
        for i in range(r):
            for j in range(c):
                out[r0 + i][c0 + j] = b[i][j]
        r0 += r
        c0 += c
    return out


# --- fraction-free row reduction ---------------------------------------

def _int_row(row: Sequence) -> dict:
    """Scale a rational row to a primitive sparse integer row."""
    nz = [(j, rat(x)) for j, x in enumerate(row) if x]
    if not nz:
        return {}
    den = 1
    for _, x in nz:
        den = lcm(den, int(x.denominator))
    out = {j: int(x.numerator) * (den // int(x.denominator)) for j, x in nz}
    return _primitive(out)


def _primitive(row: dict) -> dict:
    g = 0
    for x in row.values():
        g = gcd(g, x)
        if g == 1:
            break
    if g > 1:
        row = {j: x // g for j, x in row.items()}
    return row


def _combine(p: int, row: dict, f: int, prow: dict) -> dict:
    """Return primitive(p*row - f*prow), assuming the result is wanted sparse."""
    out = {j: p * x for j, x in row.items()} if p != 1 else dict(row)
    for j, y in prow.items():
        v = out.get(j, 0) - f * y
        if v:
            out[j] = v
        else:
            out.pop(j, None)
    return _primitive(out)


class Echelon:
    """Incrementally maintained reduced row echelon form over the integers.

    Each stored row is primitive, has a distinguished pivot column and is
    zero in every other pivot column.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict] = {}

    def copy(self) -> "Echelon":
        e = Echelon(self.ncols)
        e.rows = dict(self.rows)
        return e

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: dict) -> dict:
        for c in [c for c in row if c in self.rows]:
            f = row.get(c, 0)
            if not f:
                continue
            prow = self.rows[c]
            p = prow[c]
            g = gcd(p, f)
            row = _combine(p // g, row, f // g, prow)
        return row

    def add(self, row: dict) -> bool:
        """Insert a row; returns True when it increased the rank."""
        row = self.reduce(row)
        if not row:
            return False
        c = min(row)
        if row[c] < 0:
            row = {j: -x for j, x in row.items()}
        for pc, prow in list(self.rows.items()):
            f = prow.get(c, 0)
            if f:
                p = row[c]
                g = gcd(p, f)
                new = _combine(p // g, prow, f // g, row)
                if new.get(pc, 0) < 0:
                    new = {j: -x for j, x in new.items()}
                self.rows[pc] = new
        self.rows[c] = row
        return True

    def add_rat(self, row: Sequence) -> bool:
        return self.add(_int_row(row))

    def contains(self, row: Sequence) -> bool:
        return not self.reduce(_int_row(row))

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def kernel(self) -> list:
        """Basis of {x : row . x = 0 for every stored row}."""
        piv = self.rows
        free = [j for j in range(self.ncols) if j not in piv]
        basis = []
        for f in free:
            v = [ZERO] * self.ncols
            v[f] = ONE
            for c, row in piv.items():
                a = row.get(f, 0)
                if a:
                    v[c] = gmpy2.mpq(-a, row[c])
            basis.append(v)
        return basis

    def basis_rows(self) -> list:
        out = []
        for c in sorted(self.rows):
            row = self.rows[c]
            p = row[c]
            v = [ZERO] * self.ncols
            for j, x in row.items():
                v[j] = gmpy2.mpq(x, p)
            out.append(v)
        return out


def echelon(m: Sequence[Sequence], ncols: int | None = None) -> Echelon:
    if ncols is None:
        ncols = len(m[0]) if m else 0
    e = Echelon(ncols)
    for row in m:
        e.add_rat(row)
    return e


def rank(m: Sequence[Sequence]) -> int:
    return echelon(m).rank


def rref(m: Sequence[Sequence], ncols: int | None = None) -> tuple[list, list[int]]:
    e = echelon(m, ncols)
    return e.basis_rows(), e.pivots()


def kernel_basis(m: Sequence[Sequence], side: str = "right", cols: int | None = None) -> list:
    """Basis of the right kernel {v : m v = 0} or the left kernel {v : v m = 0}.

    ``cols`` gives the column count when ``m`` has no rows.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if side == "left":
        ncols = len(m)
        return echelon(transpose(m), ncols).kernel()
    if cols is None:
        cols = len(m[0]) if m else 0
    return echelon(m, cols).kernel()


def _check_lengths(vs: Sequence[Sequence], n: int | None = None) -> int:
    lens = {len(v) for v in vs}
    if n is not None:
        lens.add(n)
    if len(lens) > 1:
        raise ValueError("dimension mismatch")
    return lens.pop() if lens else 0


def span_membership(S: Sequence[Sequence], v: Sequence) -> bool:
    n = _check_lengths(list(S) + [v])
    return echelon(S, n).contains(v)


def span_complement(S: Sequence[Sequence], n: int | None = None) -> list:
    """Standard basis vectors completing a basis of span(S) to the whole space."""
    n = _check_lengths(S, n)
    e = echelon(S, n)
    out = []
    for j in range(n):
        if j not in e.rows:
            v = [ZERO] * n
            v[j] = ONE
            out.append(v)
    return out


def row_basis(S: Sequence[Sequence], n: int | None = None) -> list:
    """A basis of span(S) chosen among the input vectors, in input order."""
    n = _check_lengths(S, n)
    e = Echelon(n)
    return [list(v) for v in S if e.add_rat(v)]


def solve(m: Sequence[Sequence], b: Sequence) -> list | None:
    """One solution x of m x = b, or None when the system is inconsistent."""
    rows = len(m)
    if len(b) != rows:
        raise ValueError("dimension mismatch")
    cols = len(m[0]) if m else 0
    e = Echelon(cols + 1)
    for row, bi in zip(m, b):
        e.add_rat(list(row) + [bi])
    if cols in e.rows:
        return None
    x = [ZERO] * cols
    for c, row in e.rows.items():
        # stored rows read p x_c + (free terms) = r, with free variables set to 0
        x[c] = gmpy2.mpq(row.get(cols, 0), row[c])
    return x


def solve_left(m: Sequence[Sequence], b: Sequence) -> list | None:
    """One solution x of x m = b, or None."""
    return solve(transpose(m, len(b)), b)


def inverse(m: Sequence[Sequence]) -> list | None:
    n = len(m)
    e = Echelon(2 * n)
    for i, row in enumerate(m):
        e.add_rat(list(row) + [ONE if j == i else ZERO for j in range(n)])
    if any(c not in e.rows for c in range(n)):
        return None
    out = []
    for c in range(n):
        row = e.rows[c]
        p = row[c]
        out.append([gmpy2.mpq(row.get(n + j, 0), p) for j in range(n)])
    return out


def det(m: Sequence[Sequence]) -> "Rat":
    """Determinant by exact elimination."""
    n = len(m)
    a = [[rat(x) for x in row] for row in m]
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        piv = a[c][c]
        d *= piv
        for i in range(c + 1, n):
            f = a[i][c]
            if f:
                q = f / piv
                a[i] = [x - q * y for x, y in zip(a[i], a[c])]
    return d


def coords_in_basis(basis: Sequence[Sequence], v: Sequence) -> list | None:
    """Coefficients c with sum c_i basis_i = v, or None."""
    if not basis:
        return [] if not any(v) else None
    return solve(transpose(basis), v)


def stack(*ms: Sequence[Sequence]) -> list:
    out = []
    for m in ms:
        out.extend(list(r) for r in m)
    return out


def dot(u: Sequence, v: Sequence):
    return sum((x * y for x, y in zip(u, v) if x and y), ZERO)
