"""Finite-dimensional algebras given by structure constants, and their right modules.

Conventions
-----------
* The algebra product of two paths is composition: ``p*q`` is non-zero only
  when ``q`` ends where ``p`` starts, and then it means "first q, then p".
  A path from ``i`` to ``j`` therefore satisfies ``e_j p e_i = p``.
* Modules are right modules.  Elements are row vectors and act by ``v*A``.
  An arrow ``i -> j`` acts as a linear map ``M e_j -> M e_i``.
* The Cartan matrix has ``C[i][j] = dim e_j R e_i``, the number of
  independent paths from ``i`` to ``j``; column ``j`` is the dimension vector
  of the projective ``e_j R``.
* The basis of a path algebra is ordered by (source, target, path) and the
  trivial path at the first vertex is replaced by the unit, so ``r_1 = 1``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from . import exactla as la
from .exactla import ONE, ZERO, rat, rat_str


class AlgebraError(ValueError):
    pass


# --- algebras ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Relation:
    name: str
    source: int
    target: int
    terms: tuple  # ((coefficient, path), ...) with path a tuple of arrow indices


@dataclass(frozen=True, eq=False)
class AlgebraPresentation:
    """Basis, structure constants and quiver data of a finite-dimensional algebra.

    ``mult[i][j]`` is a dict ``k -> alpha_ij^k``.  ``idempotents`` holds the
    coordinate vectors of the primitive vertex idempotents, in vertex order.
    """

    basis: tuple
    mult: tuple
    vertices: tuple
    idempotents: tuple
    arrows: tuple = ()  # (name, source index, target index)
    relations: tuple = ()
    paths: tuple = ()  # per basis element: arrow tuple, ("e", v) or None for the unit
    name: str = "algebra"
    opposite_flag: bool = False
    unit_index: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    # elements

    def basis_vector(self, k: int) -> list:
        v = [ZERO] * self.dim
        v[k] = ONE
        return v

    @property
    def one(self) -> list:
        return self.basis_vector(self.unit_index)

    def mul(self, u: Sequence, v: Sequence) -> list:
        out = [ZERO] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            row = self.mult[i]
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in row[j].items():
                    out[k] += ab * c
        return out

    @cached_property
    def elements(self) -> dict:
        """Named elements: basis symbols plus vertex idempotents ``e<vertex>``."""
        out = {name: self.basis_vector(k) for k, name in enumerate(self.basis)}
        for v, e in zip(self.vertices, self.idempotents):
            out.setdefault(f"e{v}", list(e))
        return out

    def element(self, name: str) -> list:
        try:
            return list(self.elements[name])
        except KeyError:
            raise AlgebraError(f"unknown algebra element {name!r}") from None

    # derived structure

    @cached_property
    def opposite(self) -> "AlgebraPresentation":
        s = self.dim
        mult = tuple(tuple(dict(self.mult[j][i]) for j in range(s)) for i in range(s))
        arrows = tuple((n, t, sr) for n, sr, t in self.arrows)
        rels = tuple(
            Relation(r.name, r.target, r.source, r.terms) for r in self.relations
        )
        op = AlgebraPresentation(
            basis=self.basis, mult=mult, vertices=self.vertices,
            idempotents=self.idempotents, arrows=arrows, relations=rels,
            paths=self.paths, name=_op_name(self.name),
            opposite_flag=not self.opposite_flag, unit_index=self.unit_index,
        )
        object.__setattr__(op, "opposite", self)
        return op

    @cached_property
    def cartan(self) -> list:
        """C[i][j] = dim e_j R e_i."""
        n = self.n_vertices
        C = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                vs = [self.mul(self.mul(self.idempotents[j], self.basis_vector(k)), self.idempotents[i])
                      for k in range(self.dim)]
                C[i][j] = la.rank(vs)
        return C

    @cached_property
    def quiver_adjacency(self) -> list:
        """Symmetric adjacency: vertices i, j joined when e_j R e_i or e_i R e_j has arrows."""
        n = self.n_vertices
        adj = [[False] * n for _ in range(n)]
        if self.arrows:
            for _, a, b in self.arrows:
                if a != b:
                    adj[a][b] = adj[b][a] = True
            return adj
        for i in range(n):
            for j in range(n):
                if i != j and self.cartan[i][j]:
                    adj[i][j] = adj[j][i] = True
        return adj

    @cached_property
    def vertex_pieces(self) -> list:
        """Non-zero elements e_j b e_i for non-idempotent basis elements b.

        Returned as (vector, i, j); such an element maps M e_j to M e_i.
        """
        out = []
        idem = self.idempotents
        ids = {tuple(e) for e in idem}
        for k in range(self.dim):
            b = self.basis_vector(k)
            if tuple(b) in ids or k == self.unit_index:
                continue
            for i in range(self.n_vertices):
                bi = self.mul(b, idem[i])
                if not any(bi):
                    continue
                for j in range(self.n_vertices):
                    p = self.mul(idem[j], bi)
                    if not any(p):
                        continue
                    if i == j:
                        # drop the multiple of e_i so only the radical part remains
                        c = la.coords_in_basis([idem[i]], p)
                        if c is not None:
                            continue
                    out.append((p, i, j))
        return out

    @cached_property
    def generators(self) -> list:
        """A small set of vertex pieces that together with the idempotents generates R."""
        pieces = self.vertex_pieces
        if not pieces:
            return []
        s = self.dim
        sq = la.Echelon(s)
        for p, _, _ in pieces:
            for q, _, _ in pieces:
                sq.add_rat(self.mul(p, q))
        chosen = []
        ech = sq.copy()
        for p in pieces:
            if ech.add_rat(p[0]):
                chosen.append(p)
        if self._generates(chosen):
            return chosen
        return list(pieces)

    def _generates(self, gens: list) -> bool:
        span = la.Echelon(self.dim)
        frontier = [list(e) for e in self.idempotents] + [g for g, _, _ in gens]
        for v in frontier:
            span.add_rat(v)
        words = [g for g, _, _ in gens]
        while words:
            new = []
            for w in words:
                for g, _, _ in gens:
                    p = self.mul(g, w)
                    if any(p) and span.add_rat(p):
                        new.append(p)
            words = new
        return span.rank == self.dim


def _op_name(name: str) -> str:
    return name[3:] if name.startswith("op:") else "op:" + name


def _sparse_table(table: dict, s: int) -> tuple:
    return tuple(tuple(dict(table.get((i, j), {})) for j in range(s)) for i in range(s))


def rebase_unit_first(basis: list, table: dict, replaced: int, idempotents: list) -> tuple:
    """Replace basis element ``replaced`` by the unit (sum of idempotents) and move it first.

    ``table`` maps (i, j) to {k: coefficient}.  Returns (names, mult, idempotents,
    permutation) where permutation lists old indices in new order.
    """
    s = len(basis)
    unit = [ZERO] * s
    for e in idempotents:
        for k, x in enumerate(e):
            unit[k] += x
    order = [replaced] + [k for k in range(s) if k != replaced]
    # new basis vectors written in old coordinates
    P = []
    for k in order:
        if k == replaced:
            P.append(unit)
        else:
            v = [ZERO] * s
            v[k] = ONE
            P.append(v)
    Pinv = la.inverse(P)
    if Pinv is None:
        raise AlgebraError("unit is not independent of the remaining basis")

    def old_mul(u, v):
        out = [ZERO] * s
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        for k, c in table.get((i, j), {}).items():
                            out[k] += a * b * c
        return out

    new_table = {}
    for a in range(s):
        for b in range(s):
            prod = old_mul(P[a], P[b])
            if any(prod):
                coords = la.vec_mat(prod, Pinv)
                d = {k: x for k, x in enumerate(coords) if x}
                if d:
                    new_table[(a, b)] = d
    new_idem = [la.vec_mat(e, Pinv) for e in idempotents]
    names = ["1"] + [basis[k] for k in order[1:]]
    return names, new_table, new_idem, order


def _acyclic_path_algebra(vertices: list, arrows: list, relations: list, name: str) -> AlgebraPresentation:
    """Path algebra of an acyclic quiver modulo relations given as path combinations.

    ``arrows`` are (name, source, target) with vertex indices; a relation is
    (name, [(coefficient, path)]) with paths as arrow-index tuples in
    traversal order, all sharing source and target.
    """
    n = len(vertices)
    out_arrows = {v: [] for v in range(n)}
    for a, (_, s, t) in enumerate(arrows):
        out_arrows[s].append(a)
    # enumerate all paths, grouped by (source, target)
    paths = {(v, v): [()] for v in range(n)}
    stack = [(v, v, ()) for v in range(n)]
    while stack:
        start, v, p = stack.pop()
        for a in out_arrows[v]:
            t = arrows[a][2]
            q = p + (a,)
            if len(q) > n:
                raise AlgebraError("quiver has an oriented cycle")
            paths.setdefault((start, t), []).append(q)
            stack.append((start, t, q))
    for key in paths:
        paths[key] = sorted(set(paths[key]), key=lambda q: (len(q), q))

    def endpoints(p, v=None):
        if not p:
            return v, v
        return arrows[p[0]][1], arrows[p[-1]][2]

    rel_objs = []
    for rname, terms in relations:
        s0, t0 = endpoints(terms[0][1])
        for _, p in terms:
            if endpoints(p) != (s0, t0):
                raise AlgebraError(f"relation {rname} is not homogeneous")
        rel_objs.append(Relation(rname, s0, t0, tuple((rat(c), tuple(p)) for c, p in terms)))

    # ideal generated by the relations, per (source, target)
    ideal = {}
    for r in rel_objs:
        for (s1, t1), before in paths.items():
            if t1 != r.source:
                continue
            for (s2, t2), after in paths.items():
                if s2 != r.target:
                    continue
                for w in before:
                    for u in after:
                        combo = {}
                        for c, p in r.terms:
                            q = tuple(w) + tuple(p) + tuple(u)
                            combo[q] = combo.get(q, ZERO) + c
                        ideal.setdefault((s1, t2), []).append(combo)

    # choose basis paths per (source, target) and normal forms of every path
    basis_paths = []
    normal = {}
    for key in sorted(paths, key=lambda k: (k[0], k[1])):
        ps = paths[key]
        idx = {p: i for i, p in enumerate(ps)}
        rel_rows = []
        for combo in ideal.get(key, []):
            row = [ZERO] * len(ps)
            for p, c in combo.items():
                row[idx[p]] += c
            if any(row):
                rel_rows.append(row)
        ech = la.echelon(rel_rows, len(ps))
        chosen = []
        for p in ps:
            row = [ZERO] * len(ps)
            row[idx[p]] = ONE
            if ech.add_rat(row):
                chosen.append(p)
        # normal form of each path: coordinates in chosen, modulo the ideal
        cols = []
        for p in chosen:
            v = [ZERO] * len(ps)
            v[idx[p]] = ONE
            cols.append(v)
        gens = rel_rows + cols
        for p in ps:
            target = [ZERO] * len(ps)
            target[idx[p]] = ONE
            sol = la.coords_in_basis(gens, target)
            coeffs = sol[len(rel_rows):]
            normal[(key, p)] = {chosen[i]: c for i, c in enumerate(coeffs) if c}
        for p in chosen:
            basis_paths.append((key, p))

    index = {bp: k for k, bp in enumerate(basis_paths)}
    s = len(basis_paths)

    def to_vec(key, p):
        return {index[(key, q)]: c for q, c in normal[(key, p)].items()}

    table = {}
    for a, ((sa, ta), pa) in enumerate(basis_paths):
        for b, ((sb, tb), pb) in enumerate(basis_paths):
            # a*b = first b, then a
            if tb != sa:
                continue
            q = tuple(pb) + tuple(pa)
            d = to_vec((sb, ta), q)
            if d:
                table[(a, b)] = d

    def path_name(key, p):
        if not p:
            return f"e{vertices[key[0]]}"
        if len(p) == 1:
            return arrows[p[0]][0]
        return "".join(arrows[x][0] for x in reversed(p))

    names = [path_name(key, p) for key, p in basis_paths]
    idem = []
    for v in range(n):
        e = [ZERO] * s
        e[index[((v, v), ())]] = ONE
        idem.append(e)
    first = index[((0, 0), ())]
    names2, table2, idem2, order = rebase_unit_first(names, table, first, idem)
    path_meta = []
    for k in order:
        key, p = basis_paths[k]
        if k == first:
            path_meta.append(None)
        elif not p:
            path_meta.append(("e", key[0]))
        else:
            path_meta.append(tuple(p))
    return AlgebraPresentation(
        basis=tuple(names2), mult=_sparse_table(table2, s), vertices=tuple(vertices),
        idempotents=tuple(tuple(e) for e in idem2), arrows=tuple(arrows),
        relations=tuple(rel_objs), paths=tuple(path_meta), name=name,
    )


TUBULAR_TYPES = ((2, 2, 2, 2), (3, 3, 3), (2, 4, 4), (2, 3, 6))


def canonical_quiver(weights: Sequence[int]):
    """Vertices and arrows of the canonical quiver with the given arm weights.

    Vertex 0 is the source, ``inf`` the sink; arm ``i`` has ``weights[i]-1``
    interior vertices.  Arrow ``a{i}_{k}`` is the k-th arrow along arm i.
    """
    vertices = ["0"]
    arms = []
    counter = 1
    for w in weights:
        arm = []
        for _ in range(w - 1):
            arm.append(len(vertices))
            vertices.append(str(counter))
            counter += 1
        arms.append(arm)
    vertices.append("inf")
    sink = len(vertices) - 1
    arrows = []
    arm_paths = []
    for i, arm in enumerate(arms):
        chain = [0] + arm + [sink]
        path = []
        for k in range(len(chain) - 1):
            path.append(len(arrows))
            arrows.append((f"a{i + 1}_{k + 1}", chain[k], chain[k + 1]))
        arm_paths.append(tuple(path))
    return vertices, arrows, arm_paths


def build_canonical(weights: Sequence[int] = (2, 2, 2, 2), params: Sequence = (2,)) -> AlgebraPresentation:
    """Canonical algebra C(weights, params) of tubular type.

    Relations: arm_1 + lambda_j * arm_2 + arm_j = 0 for j = 3..t, with
    lambda_3 = 1 and the remaining lambda_j taken from ``params``.
    """
    weights = tuple(int(w) for w in weights)
    if tuple(sorted(weights)) not in {tuple(sorted(t)) for t in TUBULAR_TYPES}:
        raise AlgebraError(f"not a tubular type: {weights}")
    t = len(weights)
    lambdas = [ONE] + [rat(x) for x in params]
    if len(lambdas) != t - 2:
        raise AlgebraError(f"type {weights} needs {t - 3} parameter(s)")
    for lam in lambdas[1:]:
        if lam in (ZERO, ONE):
            raise AlgebraError("invalid lambda: parameters must avoid 0 and 1")
    if len(set(lambdas)) != len(lambdas):
        raise AlgebraError("invalid lambda: parameters must be pairwise distinct")
    vertices, arrows, arm_paths = canonical_quiver(weights)
    relations = []
    for j in range(2, t):
        terms = [(ONE, arm_paths[0]), (lambdas[j - 2], arm_paths[1]), (ONE, arm_paths[j])]
        relations.append((f"rel{j + 1}", terms))
    label = ",".join(map(str, weights))
    pstr = ";" + ",".join(rat_str(x) for x in params) if params else ""
    return _acyclic_path_algebra(vertices, arrows, relations, f"C({label}{pstr})")


def build_star(weights: Sequence[int] = (2, 2, 2, 2), drop: str = "inf") -> AlgebraPresentation:
    """Hereditary star algebra: the canonical quiver with one end vertex removed.

    ``drop="inf"`` removes the sink (centre 0, arms pointing away from it);
    ``drop="0"`` removes the source (centre inf).  Vertex and arrow names
    agree with ``canonical_quiver``, so the canonical algebra is a one-point
    extension of the first and its opposite one of the opposite of the second.
    """
    vertices, arrows, _ = canonical_quiver(weights)
    gone = len(vertices) - 1 if drop == "inf" else 0
    keep = [v for v in range(len(vertices)) if v != gone]
    new_index = {v: k for k, v in enumerate(keep)}
    sub = [(name, new_index[s], new_index[t]) for name, s, t in arrows if gone not in (s, t)]
    label = ",".join(map(str, weights))
    suffix = "" if drop == "inf" else ";drop0"
    return _acyclic_path_algebra([vertices[v] for v in keep], sub, [], f"star({label}{suffix})")


# --- modules -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModulePresentation:
    """A right module: one d x d action matrix per algebra basis element."""

    algebra: AlgebraPresentation
    dim: int
    actions: tuple
    label: str = ""

    def act(self, element: Sequence) -> list:
        d = self.dim
        out = la.zeros(d, d)
        for c, A in zip(element, self.actions):
            if c:
                for i in range(d):
                    row = A[i]
                    orow = out[i]
                    for j in range(d):
                        if row[j]:
                            orow[j] += c * row[j]
        return out

    @cached_property
    def vertex_layout(self):
        return _layout(self)


@dataclass(frozen=True)
class _Layout:
    """Vertex-adapted coordinates of a module.

    ``T`` has the adapted basis as rows (in original coordinates), grouped by
    vertex; ``Tinv`` is its inverse; ``offsets[v]`` and ``dims[v]`` locate the
    block of vertex v; ``blocks[g]`` is the action of generator g as a map
    from the block of its target vertex to the block of its source vertex.
    """

    T: list | None
    Tinv: list | None
    dims: tuple
    offsets: tuple
    blocks: tuple


def _layout(M: ModulePresentation) -> _Layout:
    A = M.algebra
    d = M.dim
    projs = [M.act(e) for e in A.idempotents]
    adapted = True
    pos = 0
    dims = []
    for P in projs:
        r = sum(1 for i in range(d) if P[i][i])
        dims.append(r)
    offsets = []
    for r in dims:
        offsets.append(pos)
        pos += r
    for v, P in enumerate(projs):
        for i in range(d):
            for j in range(d):
                want = ONE if (i == j and offsets[v] <= i < offsets[v] + dims[v]) else ZERO
                if P[i][j] != want:
                    adapted = False
                    break
            if not adapted:
                break
        if not adapted:
            break
    if adapted and sum(dims) == d:
        T = Tinv = None
        acts = None
    else:
        rows = []
        dims = []
        for P in projs:
            b = la.row_basis(P, d)
            dims.append(len(b))
            rows.extend(b)
        if len(rows) != d:
            raise AlgebraError("vertex idempotents do not decompose the module")
        T = rows
        Tinv = la.inverse(T)
        offsets = []
        pos = 0
        for r in dims:
            offsets.append(pos)
            pos += r
        acts = True
    blocks = []
    for g, i, j in A.generators:
        G = M.act(g)
        if acts:
            G = la.mat_mul(la.mat_mul(T, G), Tinv)
        oj, dj = offsets[j], dims[j]
        oi, di = offsets[i], dims[i]
        blocks.append([row[oi:oi + di] for row in G[oj:oj + dj]])
    return _Layout(T, Tinv, tuple(dims), tuple(offsets), tuple(blocks))


def make_module(algebra: AlgebraPresentation, actions: Sequence, label: str = "") -> ModulePresentation:
    acts = tuple(la.mat(A) for A in actions)
    d = len(acts[0]) if acts else 0
    if len(acts) != algebra.dim:
        raise AlgebraError("one action matrix per basis element is required")
    return ModulePresentation(algebra, d, acts, label)


def zero_module(algebra: AlgebraPresentation) -> ModulePresentation:
    return ModulePresentation(algebra, 0, tuple([] for _ in range(algebra.dim)), "0")


def from_representation(algebra: AlgebraPresentation, dims: Sequence[int], maps: dict, label: str = "") -> ModulePresentation:
    """Module from vertex dimensions and arrow maps.

    ``maps[arrow_name]`` for an arrow i -> j is a dims[j] x dims[i] matrix
    (the map M e_j -> M e_i on row vectors).  Missing arrows act as zero.
    """
    A = algebra
    if A.opposite_flag:
        raise AlgebraError("build the module over the base algebra and dualise")
    n = A.n_vertices
    dims = [int(x) for x in dims]
    if len(dims) != n:
        raise AlgebraError("dimension vector has the wrong length")
    offs = []
    pos = 0
    for r in dims:
        offs.append(pos)
        pos += r
    d = pos
    arrow_mats = []
    for name, s, t in A.arrows:
        m = maps.get(name)
        if m is None:
            m = la.zeros(dims[t], dims[s])
        m = la.mat(m)
        if dims[t] and (len(m) != dims[t] or (dims[s] and len(m[0]) != dims[s])):
            raise AlgebraError(f"map for arrow {name} has the wrong shape")
        arrow_mats.append(m)
    actions = []
    for meta in A.paths:
        full = la.zeros(d, d)
        if meta is None:
            full = la.identity(d)
        elif meta[0] == "e":
            v = meta[1]
            for i in range(offs[v], offs[v] + dims[v]):
                full[i][i] = ONE
        else:
            path = meta
            s = A.arrows[path[0]][1]
            t = A.arrows[path[-1]][2]
            blk = la.identity(dims[t])
            for a in reversed(path):
                blk = la.mat_mul_shape(blk, arrow_mats[a], dims[t], dims[A.arrows[a][2]], dims[A.arrows[a][1]])
            for i in range(dims[t]):
                for j in range(dims[s]):
                    full[offs[t] + i][offs[s] + j] = blk[i][j]
        actions.append(full)
    return ModulePresentation(A, d, tuple(actions), label)


def simple_module(algebra: AlgebraPresentation, v: int) -> ModulePresentation:
    acts = []
    for k in range(algebra.dim):
        c = algebra.idempotents[v]
        # the action of r_k on S_v is the coefficient of e_v in e_v r_k e_v
        val = la.coords_in_basis([list(c)], algebra.mul(algebra.mul(list(c), algebra.basis_vector(k)), list(c)))
        acts.append([[val[0] if val else ZERO]])
    return ModulePresentation(algebra, 1, tuple(acts), f"S{algebra.vertices[v]}")


def regular_module(algebra: AlgebraPresentation) -> ModulePresentation:
    s = algebra.dim
    acts = []
    for j in range(s):
        A = la.zeros(s, s)
        for i in range(s):
            for k, c in algebra.mult[i][j].items():
                A[i][k] = c
        acts.append(A)
    return ModulePresentation(algebra, s, tuple(acts), "R")


def submodule(M: ModulePresentation, rows: Sequence[Sequence], label: str = "") -> ModulePresentation:
    """Restriction of M to an invariant subspace with the given basis rows."""
    ech = la.echelon(rows, M.dim)
    basis = ech.basis_rows()
    piv = ech.pivots()
    acts = []
    for A in M.actions:
        img = la.mat_mul(basis, A, M.dim) if basis else []
        acts.append([[r[c] for c in piv] for r in img])
    return ModulePresentation(M.algebra, len(basis), tuple(acts), label)


def generated_subspace(M: ModulePresentation, elements: Sequence[Sequence]) -> la.Echelon:
    """Echelon form of the submodule generated by the given elements."""
    ech = la.Echelon(M.dim)
    frontier = []
    for m in elements:
        if ech.add_rat(m):
            frontier.append(list(m))
    gens = [M.act(g) for g, _, _ in M.algebra.generators] + [M.act(e) for e in M.algebra.idempotents]
    while frontier:
        new = []
        for m in frontier:
            for G in gens:
                w = la.vec_mat(m, G)
                if any(w) and ech.add_rat(w):
                    new.append(w)
        frontier = new
    return ech


def quotient_by_tuple(M: ModulePresentation, elements: Sequence[Sequence], label: str = "") -> ModulePresentation:
    """Presentation of M / sum m_i R, in the basis of standard vectors off the pivots."""
    ech = generated_subspace(M, elements)
    return _quotient(M, ech, label)


def _quotient(M: ModulePresentation, ech: la.Echelon, label: str = "") -> ModulePresentation:
    d = M.dim
    rows = ech.basis_rows()
    piv = ech.pivots()
    keep = [j for j in range(d) if j not in set(piv)]
    acts = []
    for A in M.actions:
        Q = []
        for j in keep:
            v = A[j]
            r = list(v)
            for row, c in zip(rows, piv):
                if r[c]:
                    f = r[c]
                    r = [x - f * y for x, y in zip(r, row)]
            Q.append([r[k] for k in keep])
        acts.append(Q)
    return ModulePresentation(M.algebra, len(keep), tuple(acts), label)


def quotient_projection(M: ModulePresentation, elements: Sequence[Sequence]) -> list:
    """Matrix of the canonical projection M -> M / sum m_i R (matching quotient_by_tuple)."""
    ech = generated_subspace(M, elements)
    rows = ech.basis_rows()
    piv = ech.pivots()
    keep = [j for j in range(M.dim) if j not in set(piv)]
    P = []
    for i in range(M.dim):
        r = [ONE if j == i else ZERO for j in range(M.dim)]
        for row, c in zip(rows, piv):
            if r[c]:
                f = r[c]
                r = [x - f * y for x, y in zip(r, row)]
        P.append([r[k] for k in keep])
    return P


def direct_sum(*mods: ModulePresentation) -> ModulePresentation:
    if not mods:
        raise AlgebraError("empty direct sum")
    A = mods[0].algebra
    for M in mods:
        if M.algebra is not A:
            raise AlgebraError("algebra mismatch")
    acts = []
    for k in range(A.dim):
        acts.append(la.block_diag([M.actions[k] for M in mods], [(M.dim, M.dim) for M in mods]))
    return ModulePresentation(A, sum(M.dim for M in mods), tuple(acts), "+".join(M.label for M in mods))


def opposite_algebra(A: AlgebraPresentation) -> AlgebraPresentation:
    return A.opposite


def dual_module(M: ModulePresentation) -> ModulePresentation:
    """k-dual: transposed actions, a right module over the opposite algebra."""
    acts = tuple(la.transpose(A, M.dim) if M.dim else [] for A in M.actions)
    return ModulePresentation(M.algebra.opposite, M.dim, acts, f"D({M.label})")


def change_basis(M: ModulePresentation, T: Sequence[Sequence], Tinv: Sequence[Sequence] | None = None) -> ModulePresentation:
    """Module with actions T A T^-1; T's rows are the new basis in old coordinates."""
    if Tinv is None:
        Tinv = la.inverse(T)
    acts = tuple(la.mat_mul(la.mat_mul(T, A), Tinv) for A in M.actions)
    return ModulePresentation(M.algebra, M.dim, acts, M.label)


def dim_vector(M: ModulePresentation) -> tuple:
    return tuple(M.vertex_layout.dims)


def validate(p) -> tuple[bool, str]:
    """Check the invariants of an algebra or module; returns (ok, message)."""
    if isinstance(p, AlgebraPresentation):
        return _validate_algebra(p)
    if isinstance(p, ModulePresentation):
        return _validate_module(p)
    raise TypeError("expected an algebra or module presentation")


def _validate_algebra(A: AlgebraPresentation) -> tuple[bool, str]:
    s = A.dim
    one = A.one
    for k in range(s):
        b = A.basis_vector(k)
        if A.mul(one, b) != b or A.mul(b, one) != b:
            return False, "unit: r_1 is not a two-sided unit"
    for i in range(s):
        bi = A.basis_vector(i)
        for j in range(s):
            bij = A.mul(bi, A.basis_vector(j))
            for k in range(s):
                bk = A.basis_vector(k)
                if A.mul(bij, bk) != A.mul(bi, A.mul(A.basis_vector(j), bk)):
                    return False, f"associativity fails at ({A.basis[i]},{A.basis[j]},{A.basis[k]})"
    total = [ZERO] * s
    for a, e in enumerate(A.idempotents):
        if A.mul(e, e) != list(e):
            return False, f"idempotent e{A.vertices[a]} is not idempotent"
        for b, f in enumerate(A.idempotents):
            if a != b and any(A.mul(e, f)):
                return False, "vertex idempotents are not orthogonal"
        total = [x + y for x, y in zip(total, e)]
    if total != one:
        return False, "vertex idempotents do not sum to 1"
    return True, "ok"


def _validate_module(M: ModulePresentation) -> tuple[bool, str]:
    A = M.algebra
    d = M.dim
    if len(M.actions) != A.dim:
        return False, "shape: wrong number of action matrices"
    for X in M.actions:
        if len(X) != d or any(len(r) != d for r in X):
            return False, "shape: action matrices must be d x d"
    if M.actions[A.unit_index] != la.identity(d):
        return False, "unit action: A_1 is not the identity"
    # quiver relations, evaluated through the arrow actions
    arrow_idx = {}
    for k, meta in enumerate(A.paths):
        if meta is not None and meta[0] != "e" and len(meta) == 1:
            arrow_idx[meta[0]] = k
    if A.relations and len(arrow_idx) == len(A.arrows):
        for r in A.relations:
            total = la.zeros(d, d)
            for c, path in r.terms:
                P = la.identity(d)
                for a in reversed(path):
                    P = la.mat_mul(P, M.actions[arrow_idx[a]])
                total = la.mat_add(total, la.mat_scale(c, P))
            if not la.is_zero_mat(total):
                return False, f"relation {r.name} violated"
    s = A.dim
    for i in range(s):
        for j in range(s):
            lhs = la.mat_mul(M.actions[i], M.actions[j]) if d else []
            rhs = la.zeros(d, d)
            for k, c in A.mult[i][j].items():
                rhs = la.mat_add(rhs, la.mat_scale(c, M.actions[k]))
            if lhs != rhs:
                return False, f"structure: A_{A.basis[i]} A_{A.basis[j]} != sum alpha A_k"
    return True, "ok"


# --- homomorphisms -----------------------------------------------------

def hom_basis(M: ModulePresentation, N: ModulePresentation) -> list:
    """Basis of Hom_R(M, N) as d_M x d_N matrices F with A_i F = F B_i."""
    if M.algebra is not N.algebra:
        raise AlgebraError("algebra mismatch")
    blocks = hom_blocks(M, N)
    return [blocks_to_matrix(M, N, b) for b in blocks]


def hom_dim(M: ModulePresentation, N: ModulePresentation) -> int:
    if M.algebra is not N.algebra:
        raise AlgebraError("algebra mismatch")
    return len(_hom_kernel(M, N)[0])


def _hom_kernel(M, N):
    LM, LN = M.vertex_layout, N.vertex_layout
    A = M.algebra
    nv = A.n_vertices
    var_off = []
    pos = 0
    for v in range(nv):
        var_off.append(pos)
        pos += LM.dims[v] * LN.dims[v]
    nvars = pos
    ech = la.Echelon(nvars)
    for (g, i, j), BM, BN in zip(A.generators, LM.blocks, LN.blocks):
        # BM : M_j -> M_i (dM_j x dM_i), BN : N_j -> N_i; need BM F_i = F_j BN
        dMi, dMj, dNi, dNj = LM.dims[i], LM.dims[j], LN.dims[i], LN.dims[j]
        if not dMj or not dNi:
            continue
        for r in range(dMj):
            for c in range(dNi):
                row = {}
                for t in range(dMi):
                    x = BM[r][t]
                    if x:
                        k = var_off[i] + t * dNi + c
                        row[k] = row.get(k, 0) + x
                for t in range(dNj):
                    y = BN[t][c]
                    if y:
                        k = var_off[j] + r * dNj + t
                        row[k] = row.get(k, 0) - y
                row = {k: x for k, x in row.items() if x}
                if row:
                    ech.add(_dict_to_int(row))
    return ech.kernel(), var_off


def _dict_to_int(row: dict) -> dict:
    from math import lcm
    den = 1
    for x in row.values():
        den = lcm(den, int(rat(x).denominator))
    out = {k: int(rat(x) * den) for k, x in row.items()}
    return la._primitive(out)


def hom_blocks(M: ModulePresentation, N: ModulePresentation) -> list:
    """Hom basis as per-vertex blocks in the adapted coordinates of M and N."""
    kern, var_off = _hom_kernel(M, N)
    LM, LN = M.vertex_layout, N.vertex_layout
    out = []
    for vecv in kern:
        blocks = []
        for v in range(M.algebra.n_vertices):
            r, c = LM.dims[v], LN.dims[v]
            o = var_off[v]
            blocks.append([vecv[o + a * c: o + a * c + c] for a in range(r)])
        out.append(blocks)
    return out


def blocks_to_matrix(M: ModulePresentation, N: ModulePresentation, blocks: list) -> list:
    LM, LN = M.vertex_layout, N.vertex_layout
    F = la.block_diag(blocks, list(zip(LM.dims, LN.dims)))
    if LM.T is not None:
        F = la.mat_mul(LM.Tinv, F, M.dim)
    if LN.T is not None:
        F = la.mat_mul(F, LN.T, N.dim)
    return F


def matrix_to_blocks(M: ModulePresentation, N: ModulePresentation, F: list) -> list:
    LM, LN = M.vertex_layout, N.vertex_layout
    G = F
    if LM.T is not None:
        G = la.mat_mul(LM.T, G, M.dim)
    if LN.T is not None:
        G = la.mat_mul(G, LN.Tinv, N.dim)
    out = []
    for v in range(M.algebra.n_vertices):
        om, dm = LM.offsets[v], LM.dims[v]
        on, dn = LN.offsets[v], LN.dims[v]
        out.append([row[on:on + dn] for row in G[om:om + dm]])
    return out


def is_hom(M: ModulePresentation, N: ModulePresentation, F: list) -> bool:
    if M.dim == 0 or N.dim == 0:
        return True
    for A, B in zip(M.actions, N.actions):
        if la.mat_mul(A, F) != la.mat_mul(F, B):
            return False
    return True


# --- JSON --------------------------------------------------------------

def algebra_to_json(A: AlgebraPresentation) -> dict:
    structure = []
    for i in range(A.dim):
        for j in range(A.dim):
            for k, c in sorted(A.mult[i][j].items()):
                structure.append([i, j, k, rat_str(c)])
    return {
        "name": A.name,
        "basis": list(A.basis),
        "unit_index": A.unit_index,
        "structure": structure,
        "vertices": [[rat_str(x) for x in e] for e in A.idempotents],
        "quiver": {
            "vertices": list(A.vertices),
            "edges": [[A.vertices[s], A.vertices[t], n] for n, s, t in A.arrows],
        },
        "cartan": A.cartan,
    }


def algebra_from_json(data: dict) -> AlgebraPresentation:
    ref = data.get("name")
    if ref and "structure" not in data:
        return resolve_algebra(ref)
    basis = tuple(data["basis"])
    s = len(basis)
    table = {}
    for i, j, k, c in data["structure"]:
        table.setdefault((int(i), int(j)), {})[int(k)] = rat(c)
    unit = int(data.get("unit_index", 0))
    qv = data.get("quiver", {})
    vnames = tuple(qv.get("vertices", [])) or tuple(str(i) for i in range(len(data.get("vertices", [[1]]))))
    idem = data.get("vertices")
    if not idem:
        idem = [[ONE if k == unit else ZERO for k in range(s)]]
        vnames = ("0",)
    idem = tuple(tuple(rat(x) for x in e) for e in idem)
    vindex = {v: i for i, v in enumerate(vnames)}
    arrows = tuple((e[2] if len(e) > 2 else f"x{n}", vindex[e[0]], vindex[e[1]])
                   for n, e in enumerate(qv.get("edges", [])))
    # raw algebras carry no path metadata; arrows are descriptive only
    return AlgebraPresentation(
        basis=basis, mult=_sparse_table(table, s), vertices=vnames, idempotents=idem,
        arrows=arrows, relations=(), paths=tuple([None] + [("raw", k) for k in range(1, s)]),
        name=data.get("name", "algebra"), unit_index=unit,
    )


_ALG_CACHE: dict = {}

_REF = re.compile(r"^(op:)?(C|star)\(([\d,\s]+)(?:;([^)]*))?\)$")


def resolve_algebra(ref: str) -> AlgebraPresentation:
    """Algebra from a reference such as ``C(2,2,2,2;2)``, ``star(2,2,2,2)``, ``op:C(3,3,3)``.

    A path to an algebra JSON file is also accepted.
    """
    ref = ref.strip()
    if ref in _ALG_CACHE:
        return _ALG_CACHE[ref]
    m = _REF.match(ref)
    if m:
        op, kind, ws, ps = m.groups()
        weights = tuple(int(x) for x in ws.split(",") if x.strip())
        params = tuple(x.strip() for x in ps.split(",")) if ps else ()
        if kind == "C":
            base = build_canonical(weights, params)
        else:
            base = build_star(weights)
        base_ref = ref[3:] if op else ref
        _ALG_CACHE.setdefault(base_ref, base)
        base = _ALG_CACHE[base_ref]
        A = base.opposite if op else base
    else:
        with open(ref) as fh:
            A = algebra_from_json(json.load(fh))
    _ALG_CACHE[ref] = A
    return A


def canonical(weights=(2, 2, 2, 2), params=(2,)) -> AlgebraPresentation:
    """Cached canonical algebra."""
    label = ",".join(map(str, weights))
    pstr = ";" + ",".join(rat_str(rat(x)) for x in params) if params else ""
    return resolve_algebra(f"C({label}{pstr})")


def module_to_json(M: ModulePresentation) -> dict:
    return {
        "algebra_ref": M.algebra.name,
        "dim": M.dim,
        "actions": [[[rat_str(x) for x in row] for row in A] for A in M.actions],
        **({"label": M.label} if M.label else {}),
    }


def module_from_json(data: dict, algebra: AlgebraPresentation | None = None) -> ModulePresentation:
    A = algebra or resolve_algebra(data["algebra_ref"])
    d = int(data["dim"])
    acts = tuple(la.mat(X) if d else [] for X in data["actions"])
    return ModulePresentation(A, d, acts, data.get("label", ""))


def load_module(path: str) -> ModulePresentation:
    with open(path) as fh:
        return module_from_json(json.load(fh))
