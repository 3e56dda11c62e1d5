"""Command line interface; every command prints JSON on stdout."""

from __future__ import annotations

import json
import sys

import click

from . import driver as dr
from . import eulerk0 as ek
from . import intlin
from . import onept
from . import ppcalc as pp
from . import slopeprof as sp
from . import zq
from .algcore import (
    algebra_to_json, dim_vector, hom_dim, load_module, module_to_json, resolve_algebra, validate,
)
from .moddecomp import are_isomorphic, decompose, verify_decomposition

DEFAULT_ALGEBRA = "C(2,2,2,2;2)"


def emit(obj):
    click.echo(json.dumps(dr._jsonable(obj), indent=2))


def vec(text: str) -> list:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise click.BadParameter(f"not an integer vector: {text!r}")


def slope_arg(text: str):
    return ek.INF if text in ("inf", "oo") else ek.parse_slope(text)


algebra_opt = click.option("--algebra", "algebra_ref", default=DEFAULT_ALGEBRA, show_default=True,
                           help="Algebra reference, e.g. C(2,2,2,2;3) or a JSON file.")


@click.group()
def main():
    """Modules over canonical tubular algebras."""


# --- algebra / module -------------------------------------------------------------

@main.group()
def algebra():
    """Algebra presentations."""


@algebra.command("show")
@click.argument("ref", default=DEFAULT_ALGEBRA)
def algebra_show(ref):
    emit(algebra_to_json(resolve_algebra(ref)))


@main.group()
def module():
    """Finite-dimensional modules."""


@module.command("validate")
@click.argument("path")
def module_validate(path):
    ok, msg = validate(load_module(path))
    emit({"valid": ok, "message": msg})
    sys.exit(0 if ok else 1)


@module.command("dimvec")
@click.argument("path")
def module_dimvec(path):
    emit(list(dim_vector(load_module(path))))


@module.command("homdim")
@click.argument("m")
@click.argument("n")
def module_homdim(m, n):
    emit(hom_dim(load_module(m), load_module(n)))


@module.command("decompose")
@click.argument("path")
@click.option("--seed", default=0)
def module_decompose(path, seed):
    dec = decompose(load_module(path), seed=seed)
    emit({
        "absolute": dec.absolute,
        "verified": verify_decomposition(dec),
        "summands": [{"dim_vector": list(dim_vector(M)), "multiplicity": k, "module": M}
                     for M, k in dec.summands],
    })


@module.command("iso")
@click.argument("a")
@click.argument("b")
@click.option("--seed", default=0)
@click.option("--trials", default=32)
def module_iso(a, b, seed, trials):
    r = are_isomorphic(load_module(a), load_module(b), seed=seed, trials=trials)
    emit({"verdict": r.verdict, "certificate": r.certificate, "reason": r.reason})
    sys.exit(0 if r.verdict == "yes" else 1)


# --- pp calculus ---------------------------------------------------------------------

@main.group("pp")
def pp_group():
    """Positive primitive formulas."""


@pp_group.command("eval")
@click.argument("formula")
@click.argument("module_path")
def pp_eval(formula, module_path):
    M = load_module(module_path)
    emit({"dim": pp.evaluate(pp.load_formula(formula, M.algebra), M)})


@pp_group.command("dual")
@click.argument("formula")
def pp_dual(formula):
    emit(pp.formula_to_json(pp.dual(pp.load_formula(formula))))


@pp_group.command("freereal")
@click.argument("formula")
def pp_freereal(formula):
    M, tup = pp.free_realization(pp.load_formula(formula))
    emit({"module": M, "tuple": tup})


@pp_group.command("meet")
@click.argument("f")
@click.argument("g")
def pp_meet(f, g):
    F = pp.load_formula(f)
    emit(pp.formula_to_json(pp.meet(F, pp.load_formula(g, F.algebra))))


@pp_group.command("join")
@click.argument("f")
@click.argument("g")
def pp_join(f, g):
    F = pp.load_formula(f)
    emit(pp.formula_to_json(pp.join(F, pp.load_formula(g, F.algebra))))


@pp_group.command("parse")
@click.argument("text")
@algebra_opt
def pp_parse(text, algebra_ref):
    """Formula in text syntax, e.g. 'E y1 . x1 = y1*a1_1'."""
    emit(pp.formula_to_json(pp.parse(text, resolve_algebra(algebra_ref))))


@pp_group.command("pair")
@click.argument("phi")
@click.argument("psi")
@algebra_opt
def pp_pair(phi, psi, algebra_ref):
    """Pair phi/psi from two formulas in text syntax (psi is replaced by phi & psi)."""
    A = resolve_algebra(algebra_ref)
    emit(pp.pair_to_json(pp.pair(pp.parse(phi, A), pp.parse(psi, A))))


@pp_group.command("rep")
@click.argument("module_path")
def pp_rep(module_path):
    """Pair whose value at N has dimension dim Hom(M, N)."""
    emit(pp.pair_to_json(pp.rep_functor_pair(load_module(module_path))))


@pp_group.command("genpp")
@click.argument("module_path")
def pp_genpp(module_path):
    emit(pp.formula_to_json(pp.pp_type_generator(load_module(module_path))))


# --- Euler form --------------------------------------------------------------------

@main.group()
def euler():
    """Euler form, slopes and indecomposable dimension vectors."""


@euler.command("pair")
@click.argument("x")
@click.argument("y")
@algebra_opt
def euler_pair(x, y, algebra_ref):
    emit(ek.euler_pair(resolve_algebra(algebra_ref), vec(x), vec(y)))


@euler.command("chi")
@click.argument("x")
@algebra_opt
def euler_chi(x, algebra_ref):
    emit(ek.chi(resolve_algebra(algebra_ref), vec(x)))


@euler.command("slope")
@click.argument("x")
@algebra_opt
def euler_slope(x, algebra_ref):
    q = ek.slope_of(resolve_algebra(algebra_ref), vec(x))
    emit(None if q is None else ek.slope_str(q))


@euler.command("omega")
@algebra_opt
@click.option("--radius", default=1)
def euler_omega(algebra_ref, radius):
    emit([list(y) for y in ek.compute_omega(resolve_algebra(algebra_ref), radius)])


@euler.command("indec")
@click.argument("x")
@algebra_opt
def euler_indec(x, algebra_ref):
    ok = ek.is_indec_dimvector(resolve_algebra(algebra_ref), vec(x))
    emit({"indecomposable_dimension_vector": ok})
    sys.exit(0 if ok else 1)


# --- integer queries ------------------------------------------------------------------

@main.group()
def presburger():
    """Indecomposable dimension vectors in slope windows."""


@presburger.command("query")
@click.option("--window", nargs=2, required=True, help="Open slope window a b (b may be inf).")
@click.option("--pos", "pos", required=True, help="Functional w with w.x > 0.")
@click.option("--zero", "zeros", multiple=True, help="Functional v with v.x = 0; repeatable.")
@algebra_opt
def presburger_query(window, pos, zeros, algebra_ref):
    A = resolve_algebra(algebra_ref)
    a, b = slope_arg(window[0]), slope_arg(window[1])
    x = intlin.window_query(A, a, b, vec(pos), [vec(z) for z in zeros])
    if x is None:
        emit("infeasible")
        sys.exit(1)
    emit({"witness": list(x), "slope": ek.slope_str(ek.slope_of(A, x))})


@main.command("slopeprofile")
@click.argument("pairfile")
def slopeprofile(pairfile):
    """Breakpoints and linear functionals of a right pp-pair."""
    emit(sp.slope_profile(pp.load_pair(pairfile)).to_json())


# --- tubular families -------------------------------------------------------------

def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


@main.group()
def ziegler():
    """Compact open sets in a tubular family."""


@ziegler.command("contain")
@click.argument("u")
@click.argument("ws", nargs=-1)
@click.option("--family", "family", default=None, help="Family JSON file (else taken from U).")
def ziegler_contain(u, ws, family):
    """U and W files hold a form, optionally wrapped as {"family": ..., "form": ...}."""
    du = _load_json(u)
    fam = _load_json(family) if family else du.get("family", {"slope": "1"})
    model = zq.model_from_json(fam)

    def form(d):
        return zq.form_from_json(model, d["form"] if "form" in d else d)

    U = form(du)
    Ws = [form(_load_json(w)) for w in ws]
    ok = zq.contains(model, U, Ws)
    emit({"contained": ok, "U": zq.form_to_json(U), "W": [zq.form_to_json(W) for W in Ws]})
    sys.exit(0 if ok else 1)


# --- one-point extension -----------------------------------------------------------

@main.group("onept")
def onept_group():
    """The canonical algebra as a one-point extension of the star algebra."""


lam_opt = click.option("--lam", default="2", show_default=True, help="Canonical parameter lambda.")


@onept_group.command("axioms")
@lam_opt
def onept_axioms(lam):
    ext = onept.canonical_extension((2, 2, 2, 2), (lam,))
    sigma, p = onept.image_axioms(ext)
    emit({"sigma": pp.formula_to_json(sigma), "pair": pp.pair_to_json(p),
          "f0_axiom": pp.formula_to_json(onept.f0_axiom(ext))})


@onept_group.command("f0")
@click.argument("module_path")
@lam_opt
def onept_f0(module_path, lam):
    ext = onept.canonical_extension((2, 2, 2, 2), (lam,))
    emit(onept.F0(ext, load_module(module_path)))


@onept_group.command("f1")
@click.argument("module_path")
@lam_opt
def onept_f1(module_path, lam):
    ext = onept.canonical_extension((2, 2, 2, 2), (lam,))
    emit(onept.F1(ext, load_module(module_path)))


@onept_group.command("boundary")
@click.argument("pairfile")
@click.argument("pairfiles", nargs=-1)
@click.option("--side", type=click.Choice(["zero", "infinity"]), default="zero")
@click.option("--bound", default=3)
@click.option("--seed", default=0)
def onept_boundary(pairfile, pairfiles, side, bound, seed):
    p = pp.load_pair(pairfile)
    qs = [pp.load_pair(f, p.phi.algebra) for f in pairfiles]
    r = onept.boundary_query(p, qs, side, bound, seed)
    emit(r)
    sys.exit(0 if r["result"] == "YES" else 2)


# --- decisions ---------------------------------------------------------------------

@main.group()
def decide():
    """Inclusions of pp-pair open sets and invariant sentences."""


EXIT = {dr.INCLUDED: 0, dr.NOT_INCLUDED: 1, dr.UNKNOWN: 2}


@decide.command("include")
@click.argument("pairfile")
@click.argument("pairfiles", nargs=-1)
@click.option("--forms", default=None, help="JSON map slope -> canonical forms at that breakpoint.")
@click.option("--boundary-bound", default=3, show_default=True)
@click.option("--seed", default=0)
@click.option("--trace", is_flag=True, help="Stream pipeline steps to stderr.")
def decide_include(pairfile, pairfiles, forms, boundary_bound, seed, trace):
    p = pp.load_pair(pairfile)
    qs = [pp.load_pair(f, p.phi.algebra) for f in pairfiles]
    tr = (lambda e: click.echo(json.dumps(dr._jsonable(e)), err=True)) if trace else None
    d = dr.decide_inclusion(p, qs, forms=_load_json(forms) if forms else None,
                            boundary_bound=boundary_bound, seed=seed, trace=tr)
    emit(d.to_json())
    sys.exit(EXIT[d.verdict])


@decide.command("sentence")
@click.argument("exprfile")
@algebra_opt
@click.option("--boundary-bound", default=3, show_default=True)
def decide_sentence(exprfile, algebra_ref, boundary_bound):
    A = resolve_algebra(algebra_ref)
    r = dr.decide_sentence(_load_json(exprfile), A, loader=lambda f: pp.load_pair(f, A),
                           boundary_bound=boundary_bound)
    emit(r)
    sys.exit({dr.SATISFIABLE: 0, dr.UNSATISFIABLE: 1}.get(r["result"], 2))


if __name__ == "__main__":
    main()
