"""Fixture modules over canonical algebras.

Representations are built from arrow maps.  For the canonical quiver every
relation is linear in the first arrow of each arm (the one leaving vertex 0),
so random modules come from fixing the other arrows at random and taking a
random point of the resulting linear solution space.
"""

from __future__ import annotations

import functools
import itertools
import random

from . import exactla as la
from . import eulerk0 as ek
from .algcore import (
    AlgebraPresentation, ModulePresentation, canonical, dim_vector, dual_module,
    from_representation, regular_module, simple_module, submodule,
)
from .exactla import ONE, ZERO


def _lambdas(A: AlgebraPresentation) -> list:
    """Coefficient of arm 2 in each relation (lambda_j)."""
    out = []
    for rel in A.relations:
        out.append(rel.terms[1][0])
    return out


def _arm_arrows(A: AlgebraPresentation) -> list:
    """Arrow names of each arm, from vertex 0 towards the sink."""
    arms: dict[int, list] = {}
    for name, _, _ in A.arrows:
        i, k = name[1:].split("_")
        arms.setdefault(int(i), []).append((int(k), name))
    return [[n for _, n in sorted(arms[i])] for i in sorted(arms)]


def arm_module(A: AlgebraPresentation, dims, arm_maps: list, label: str = "") -> ModulePresentation:
    """Module from per-arm lists of arrow matrices (in arm order)."""
    maps = {}
    for names, mats in zip(_arm_arrows(A), arm_maps):
        for n, m in zip(names, mats):
            maps[n] = m
    return from_representation(A, dims, maps, label)


def projective(A: AlgebraPresentation, v: int) -> ModulePresentation:
    e = A.idempotents[v]
    rows = [A.mul(e, A.basis_vector(k)) for k in range(A.dim)]
    return submodule(regular_module(A), rows, label=f"P{A.vertices[v]}")


def injective(A: AlgebraPresentation, v: int) -> ModulePresentation:
    M = dual_module(projective(A.opposite, v))
    return ModulePresentation(M.algebra, M.dim, M.actions, f"I{A.vertices[v]}")


def random_representation(A: AlgebraPresentation, dims, rng: random.Random, bound: int = 3,
                          label: str = "") -> ModulePresentation:
    """Random module with the given dimension vector satisfying the relations.

    Arrows not leaving vertex 0 get random integer matrices; the arrows
    leaving vertex 0 form a random point of the linear solution space.
    """
    dims = [int(d) for d in dims]
    fixed = {}
    unknown = []
    for name, s, t in A.arrows:
        if s == 0:
            unknown.append((name, s, t))
        else:
            fixed[name] = [[la.rat(rng.randint(-bound, bound)) for _ in range(dims[s])] for _ in range(dims[t])]
    # variable layout: arrow name -> offset; matrix entry (r, c) of dims[t] x dims[0]
    offs = {}
    pos = 0
    for name, s, t in unknown:
        offs[name] = pos
        pos += dims[t] * dims[s]
    nvars = pos
    names = [a[0] for a in A.arrows]
    eqs = []
    for rel in A.relations:
        t_end = A.arrows[rel.terms[0][1][-1]][2]
        rows = dims[t_end]
        cols = dims[0]
        # sum over terms of coef * C_term * B_first, C_term = product of the fixed arrows
        acc = [[[ZERO] * nvars for _ in range(cols)] for _ in range(rows)]
        for coef, path in rel.terms:
            first = names[path[0]]
            mid = A.arrows[path[0]][2]
            C = la.identity(dims[t_end])
            for a in reversed(path[1:]):
                _, s_a, t_a = A.arrows[a]
                C = la.mat_mul_shape(C, fixed[names[a]], dims[t_end], dims[t_a], dims[s_a])
            o = offs[first]
            for r in range(rows):
                for k in range(dims[mid]):
                    c_rk = C[r][k] if dims[mid] else ZERO
                    if not c_rk:
                        continue
                    for c in range(cols):
                        acc[r][c][o + k * cols + c] += la.rat(coef) * c_rk
        for r in range(rows):
            for c in range(cols):
                eqs.append(acc[r][c])
    ker = la.kernel_basis(eqs, "right", cols=nvars) if nvars else []
    x = [ZERO] * nvars
    for k in ker:
        c = rng.randint(-bound, bound)
        if c:
            x = [a + c * b for a, b in zip(x, k)]
    maps = dict(fixed)
    for name, s, t in unknown:
        o = offs[name]
        maps[name] = [[x[o + r * dims[s] + c] for c in range(dims[s])] for r in range(dims[t])]
    return from_representation(A, dims, maps, label)


def random_indecomposable(A: AlgebraPresentation, dims, rng: random.Random, attempts: int = 20,
                          label: str = "") -> ModulePresentation | None:
    """A random absolutely indecomposable module with the given dimension vector, or None."""
    from .moddecomp import is_indecomposable
    for _ in range(attempts):
        M = random_representation(A, dims, rng, label=label)
        if is_indecomposable(M)[0] == "absolutely_indecomposable":
            return M
    return None


# --- the C(2,2,2,2;lambda) fixtures -------------------------------------

def _lam(A: AlgebraPresentation):
    lams = _lambdas(A)
    if len(lams) != 2:
        raise ValueError("fixture needs a canonical algebra of type (2,2,2,2)")
    return lams[1]


def fixture_X(A: AlgebraPresentation | None = None) -> ModulePresentation:
    """The indecomposable of slope 1 with dimension vector (1,0,1,1,1,1)."""
    A = A or canonical()
    lam = _lam(A)
    return from_representation(A, (1, 0, 1, 1, 1, 1), {
        "a2_2": [[ONE]], "a3_2": [[ONE]], "a4_2": [[ONE]],
        "a2_1": [[ONE]], "a3_1": [[-ONE]], "a4_1": [[-lam]],
    }, label="X")


def homogeneous(A: AlgebraPresentation, t, size: int = 1) -> ModulePresentation:
    """Module of the homogeneous slope-1 tube at parameter t, regular length ``size``.

    Every vertex carries k^size; arms 1..4 map the sink space by
    I, J, -I-J, -I-lambda*J with J a Jordan block of eigenvalue t.
    """
    lam = _lam(A)
    t = la.rat(t)
    if t in (ZERO, -ONE) or lam * t == -ONE:
        raise ValueError("parameter lies on an exceptional tube")
    n = size
    I = la.identity(n)
    J = la.zeros(n, n)
    for i in range(n):
        J[i][i] = t
        if i + 1 < n:
            J[i][i + 1] = ONE
    q = [I, J, la.mat_scale(-1, la.mat_add(I, J)), la.mat_scale(-1, la.mat_add(I, la.mat_scale(lam, J)))]
    dims = (n,) * 6
    return arm_module(A, dims, [[I, qi] for qi in q], label=f"H({la.rat_str(t)},{n})")


def tube_length_two(A: AlgebraPresentation, top: str) -> ModulePresentation:
    """Length-two modules of the tube of X, dimension vector (1,1,1,1,1,1).

    ``top='X'`` has X as top and S_1 as socle; ``top='S1'`` the reverse.
    """
    lam = _lam(A)
    p1, q1 = (ONE, ZERO) if top == "X" else (ZERO, ONE)
    # arm maps: first arrow p_i, second q_i; products q_i p_i satisfy the relations with f1 = 0
    arms = [[[[p1]], [[q1]]], [[[ONE]], [[ONE]]], [[[ONE]], [[-ONE]]], [[[ONE]], [[-lam]]]]
    return arm_module(A, (1,) * 6, arms, label=f"T2({top})")


def tube_pair(A: AlgebraPresentation) -> tuple:
    return tube_length_two(A, "X"), tube_length_two(A, "S1")


@functools.lru_cache(maxsize=None)
def real_roots(weights=(2, 2, 2, 2), params=(2,), box: int = 3) -> tuple:
    """Positive vectors with chi = 1, connected support and positive rational slope."""
    A = canonical(weights, params)
    ed = ek.euler_data(A)
    out = []
    for x in itertools.product(range(box + 1), repeat=ed.n):
        if not any(x) or ed.chi(x) != 1 or not ek.is_connected_support(ed, x):
            continue
        if ek.classify_vector(ed, x) != "slope":
            continue
        q = ed.slope(x)
        if q is not None and q is not ek.INF and q > 0:
            out.append(x)
    return tuple(out)


def slope_fixture_dims(A: AlgebraPresentation, slopes=("1/3", "1/2", "2/3", "3/2", "2", "3"), box: int = 3) -> dict:
    """Small real-root dimension vectors for each requested slope."""
    ed = ek.euler_data(A)
    want = {la.rat(s): s for s in slopes}
    found: dict = {}
    for x in sorted(real_roots(box=box), key=lambda v: (sum(v), v)):
        q = ed.slope(x)
        if q in want and want[q] not in found:
            found[want[q]] = x
    return found


@functools.lru_cache(maxsize=None)
def corpus(seed: int = 7) -> tuple:
    """Named fixture modules over C(2,2,2,2;2), spread over all slopes."""
    A = canonical()
    rng = random.Random(seed)
    mods = []
    for v in range(A.n_vertices):
        mods.append(simple_module(A, v))
    for v in range(A.n_vertices):
        mods.append(projective(A, v))
    for v in range(A.n_vertices):
        mods.append(injective(A, v))
    mods.append(fixture_X(A))
    mods.extend(tube_pair(A))
    mods.append(homogeneous(A, 1))
    mods.append(homogeneous(A, 3, 2))
    ed = ek.euler_data(A)
    for name, h in (("0", ed.h0), ("inf", ed.hinf)):
        M = random_indecomposable(A, h, rng, label=f"R[{name}]")
        if M is not None:
            mods.append(M)
    for s, x in slope_fixture_dims(A).items():
        M = random_indecomposable(A, x, rng, label=f"R[{s}]")
        if M is not None:
            mods.append(M)
    return tuple(mods)


SLOPE_CORPUS = ("1/5", "1/4", "1/3", "1/2", "3/5", "2/3", "3/4", "4/3", "3/2", "5/3", "2", "3", "4", "5")


@functools.lru_cache(maxsize=None)
def slope_corpus(seed: int = 11) -> tuple:
    """Indecomposables of many positive slopes: real roots and homogeneous radical vectors."""
    A = canonical()
    ed = ek.euler_data(A)
    rng = random.Random(seed)
    mods = []
    for s, x in slope_fixture_dims(A, SLOPE_CORPUS, box=4).items():
        M = random_indecomposable(A, x, rng, label=f"R[{s}]")
        if M is not None:
            mods.append(M)
    for s in ("1/2", "2/3", "3/2", "2"):
        x = ed.radial_vector(la.rat(s))
        M = random_indecomposable(A, x, rng, label=f"H[{s}]")
        if M is not None:
            mods.append(M)
    return tuple(mods)


def corpus_by_label() -> dict:
    return {M.label: M for M in corpus()}


def shuffle_basis(M: ModulePresentation, rng: random.Random, steps: int = 6) -> ModulePresentation:
    """Conjugate by a product of random elementary shears (keeps entries small)."""
    from .algcore import change_basis
    n = M.dim
    if n < 2:
        return M
    T = la.identity(n)
    Tinv = la.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = la.rat(rng.choice([-2, -1, 1, 2]))
        # T <- (I + c E_ij) T, Tinv <- Tinv (I - c E_ij)
        T[i] = [a + c * b for a, b in zip(T[i], T[j])]
        for r in Tinv:
            r[j] -= c * r[i]
    return change_basis(M, T, Tinv)
