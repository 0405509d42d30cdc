"""Command-line front end: ``stabkit <subcommand> ...``.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 bad input or
configuration, 3 a size budget was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import __version__, acceptance, cdga, complexes, fm_trees, injective_words, stability
from . import symmetric_powers
from .errors import BudgetExceeded
from .exact_linalg import homology

SCHEMA = "stabkit/1"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

# Each library operation is reachable from exactly one subcommand.
OPERATION_COMMANDS: dict[str, str] = {
    "exact_linalg.homology": "homology",
    "exact_linalg.smith_invariant_factors": "homology",
    "exact_linalg.rank_rational": "homology",
    "complexes.from_maximal": "homology",
    "complexes.chain_complex": "homology",
    "complexes.reduced_betti": "homology",
    "complexes.homological_connectivity": "homology",
    "complexes.link": "links",
    "complexes.star": "links",
    "complexes.make_simplex": "links",
    "complexes.join": "join",
    "complexes.cone": "join",
    "complexes.relabel": "join",
    "complexes.is_homologically_connected": "join",
    "complexes.first_nonvanishing_degree": "wcm-check",
    "complexes.ordered": "inj-derangement",
    "complexes.chain_complex_ss": "inj-derangement",
    "injective_words.build_inj_c": "inj-build",
    "injective_words.link_isomorphism_check": "inj-build",
    "injective_words.verify_wcm": "wcm-check",
    "injective_words.injective_words_top_rank": "inj-derangement",
    "injective_words.injective_words_top_homology": "inj-derangement",
    "injective_words.charge_multisets": "ledger",
    "acceptance.derangement": "inj-derangement",
    "fm_trees.enumerate_strata": "trees",
    "fm_trees.count_strata": "trees",
    "fm_trees.build_poset": "trees",
    "fm_trees.poset_to_dot": "trees",
    "fm_trees.corolla": "trees",
    "fm_trees.codimension": "tree-retract",
    "fm_trees.contracts_to": "tree-retract",
    "fm_trees.contract": "tree-retract",
    "fm_trees.overcharged_vertices": "tree-retract",
    "fm_trees.retract_to_bounded": "tree-retract",
    "fm_trees.parse_tree": "tree-retract",
    "fm_trees.format_tree": "tree-retract",
    "fm_trees.tree_to_dot": "tree-retract",
    "symmetric_powers.graded_sym": "sym-power",
    "symmetric_powers.sym_product_homology": "sym-power",
    "symmetric_powers.stabilization_monotone": "sym-power",
    "symmetric_powers.sphere": "sym-power",
    "symmetric_powers.free_graded_commutative_dims": "cdga-model",
    "cdga.cohomology": "cdga-cohomology",
    "cdga.is_exact": "cdga-cohomology",
    "cdga.is_cocycle": "cdga-cohomology",
    "cdga.algebra_from_json": "cdga-cohomology",
    "cdga.model_sym_sphere": "cdga-model",
    "cdga.model_odd_sphere": "cdga-model",
    "cdga.model_mapping_homology_sphere": "cdga-model",
    "cdga.model_mapping_cp2": "cdga-model",
    "cdga.algebra_to_json": "cdga-model",
    "cdga.loop_homotopy_dims": "cdga-model",
    "cdga.stable_component_homology": "cdga-model",
    "stability.stable_range": "stable-range",
    "stability.exceptional_range": "stable-range",
    "stability.exceptional_charge": "stable-range",
    "stability.partition_collection": "stable-range",
    "stability.compare_partition_bounds": "stable-range",
    "stability.closed_range": "closed-range",
    "stability.section_degree": "degree-solve",
    "stability.degree_shift": "degree-solve",
    "stability.solve_degree": "degree-solve",
    "stability.verify_vanishing_arithmetic": "vanishing-arith",
    "acceptance.run_suite": "ledger",
    "acceptance.run_check": "ledger",
    "acceptance.rp2": "ledger",
}


class InputError(ValueError):
    pass


# --- input helpers ------------------------------------------------------------


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _check_schema(obj: Any, path: str):
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    tag = obj.get("schema", SCHEMA)
    if tag != SCHEMA:
        raise InputError(f"{path}: unsupported schema {tag!r}, expected {SCHEMA!r}")


def _vertex(v):
    return tuple(_vertex(x) for x in v) if isinstance(v, list) else v


def load_complex(path: str) -> complexes.SimplicialComplex:
    obj = _read_json(path)
    _check_schema(obj, path)
    if "maximal_faces" not in obj:
        raise InputError(f"{path}: missing 'maximal_faces'")
    try:
        faces = [[_vertex(v) for v in f] for f in obj["maximal_faces"]]
        verts = [_vertex(v) for v in obj.get("vertices", [])]
        return complexes.from_maximal(faces, verts)
    except TypeError:
        raise InputError(f"{path}: vertex labels must be mutually comparable") from None


def complex_to_json(k: complexes.SimplicialComplex) -> dict:
    return {"schema": SCHEMA, "vertices": sorted(v[0] for v in k.by_dim.get(0, [])),
            "maximal_faces": [list(f) for f in sorted(k.maximal_faces())]}


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _load_charged(args) -> tuple[injective_words.ChargedSet, int]:
    if args.input:
        obj = _read_json(args.input)
        _check_schema(obj, args.input)
        charges, c = obj.get("charges"), obj.get("c")
        if args.c is not None:
            c = args.c
    else:
        charges = _int_list(args.charges) if args.charges else None
        c = args.c
    if charges is None or c is None:
        raise InputError("need charges and c (flags --charges/--c or --input)")
    return injective_words.ChargedSet(tuple(charges)), int(c)


def _parse_dims(text: str) -> symmetric_powers.GradedDims:
    out = {}
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        d, _, n = part.partition(":")
        try:
            out[int(d)] = int(n or 1)
        except ValueError:
            raise InputError(f"bad degree:dimension pair {part!r}") from None
    return symmetric_powers.GradedDims(out)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def _budget(args) -> int:
    if args.cell_budget is not None:
        b = args.cell_budget
    else:
        env = os.environ.get("STABKIT_CELL_BUDGET")
        try:
            b = int(env) if env else complexes.DEFAULT_CELL_BUDGET
        except ValueError:
            raise InputError(f"STABKIT_CELL_BUDGET must be an integer, got {env!r}") from None
    if b <= 0:
        raise InputError("cell budget must be positive")
    return b


def _max_degree(args, default: int | None) -> int | None:
    if args.max_degree is not None:
        v = args.max_degree
    else:
        env = os.environ.get("STABKIT_MAX_DEGREE")
        if not env:
            return default
        try:
            v = int(env)
        except ValueError:
            raise InputError(f"STABKIT_MAX_DEGREE must be an integer, got {env!r}") from None
    if v < 0:
        raise InputError("max degree must be non-negative")
    return v


def _dims_json(g: symmetric_powers.GradedDims) -> dict:
    return g.to_json()["dims"]


# --- subcommands --------------------------------------------------------------
# Each returns (report, ok).


def cmd_homology(args):
    k = load_complex(args.input)
    top = _max_degree(args, None)
    if k.is_empty():
        return {"dimension": -1, "betti": {}, "torsion": {}, "reduced_betti": {"-1": 1}}, True
    d = k.dim if top is None else min(top, k.dim)
    h = homology(complexes.chain_complex(k, d + 1), range(d + 1), over=args.over)
    red = complexes.reduced_betti(k, d, over=args.over)
    conn = complexes.homological_connectivity(k, d) if args.over == "Z" else None
    report = {
        "dimension": k.dim,
        "f_vector": k.f_vector(),
        "over": args.over,
        "betti": {str(i): h.betti[i] for i in range(d + 1)},
        "torsion": {str(i): h.torsion[i] for i in range(d + 1)},
        "reduced_betti": {str(i): b for i, b in red.items()},
    }
    if args.over == "Z":
        report["homological_connectivity"] = conn if conn is not None else f">= {d}"
    return report, True


def _simplex_arg(k, text: str):
    labels = [x for x in text.replace(" ", "").split(",") if x]
    verts = {str(v[0]): v[0] for v in k.by_dim.get(0, [])}
    try:
        return complexes.make_simplex(verts[x] for x in labels)
    except KeyError as exc:
        raise InputError(f"unknown vertex {exc.args[0]!r}") from None


def cmd_links(args):
    k = load_complex(args.input)
    s = _simplex_arg(k, args.simplex)
    if s not in k.faces and s:
        raise InputError(f"{list(s)} is not a face of the complex")
    lk, st = complexes.link(k, s), complexes.star(k, s)
    return {"simplex": list(s), "link": complex_to_json(lk), "star": complex_to_json(st),
            "link_f_vector": lk.f_vector(), "star_f_vector": st.f_vector()}, True


def cmd_join(args):
    a, b = load_complex(args.input), load_complex(args.other)
    a = complexes.relabel(a, lambda v: ("a", v))
    b = complexes.relabel(b, lambda v: ("b", v))
    j = complexes.cone(a) if args.cone_only else complexes.join(a, b)
    ka = complexes.homological_connectivity(a)
    kb = complexes.homological_connectivity(b)
    report = {"f_vector": j.f_vector(), "connectivity": [ka, kb]}
    ok = True
    if not args.cone_only and ka is not None and kb is not None:
        need = ka + kb + 2
        ok = complexes.is_homologically_connected(j, need)
        report.update(required=need, passed=ok)
    elif args.cone_only:
        ok = complexes.is_homologically_connected(j, j.dim)
        report.update(cone_acyclic=ok)
    return report, ok


def cmd_inj_build(args):
    s, c = _load_charged(args)
    k = injective_words.build_inj_c(s, c)
    budget = _budget(args)
    if len(k.faces) > budget:
        raise BudgetExceeded(f"{len(k.faces)} faces exceed the cell budget {budget}")
    report = {"charges": list(s.charges), "c": c, "dimension": k.dim,
              "f_vector": k.f_vector(), "faces": len(k.faces)}
    ok = True
    if args.check_links:
        bad = [list(map(list, sig)) for sig in k.faces
               if not injective_words.link_isomorphism_check(s, c, sig, k)]
        ok = not bad
        report.update(link_isomorphism=ok, link_failures=bad[:20])
    if args.faces:
        report["maximal_faces"] = [[list(v) for v in f] for f in sorted(k.maximal_faces())]
    return report, ok


def cmd_wcm_check(args):
    s, c = _load_charged(args)
    rep = injective_words.verify_wcm(s, c, _budget(args))
    out = rep.as_dict()
    out.update(charges=list(s.charges), c=c)
    if not rep.complete:
        raise _Incomplete(out)
    return out, rep.passed


class _Incomplete(Exception):
    def __init__(self, report):
        super().__init__("cell budget exceeded; link checks skipped")
        self.report = report


def cmd_inj_derangement(args):
    budget = args.budget
    betti, torsion = injective_words.injective_words_top_homology(args.n, budget)
    rank = injective_words.injective_words_top_rank(args.n, budget)
    d = acceptance.derangement(args.n)
    ok = betti == rank == d and not torsion
    return {"n": args.n, "snf_rank": betti, "rational_rank": rank, "torsion": torsion,
            "derangement_number": d, "passed": ok}, ok


def cmd_trees(args):
    trees = fm_trees.enumerate_strata(args.k, args.budget)
    count = fm_trees.count_strata(args.k)
    by_codim: dict[int, int] = {}
    for t in trees:
        by_codim[fm_trees.codimension(t)] = by_codim.get(fm_trees.codimension(t), 0) + 1
    ok = len(trees) == count
    report = {"k": args.k, "strata": len(trees), "recurrence_count": count,
              "by_codimension": {str(d): n for d, n in sorted(by_codim.items())},
              "corolla": fm_trees.format_tree(fm_trees.corolla(args.k))}
    if args.poset or args.dot:
        p = fm_trees.build_poset(args.k, args.budget)
        maxima = p.maxima()
        ok &= p.is_graded() and len(maxima) == 1
        report.update(graded=p.is_graded(), maxima=[fm_trees.format_tree(p.trees[i]) for i in maxima],
                      covers=len(p.covers()))
        if args.dot:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(fm_trees.poset_to_dot(p) + "\n")
            report["dot"] = args.dot
    if args.list:
        report["trees"] = [fm_trees.format_tree(t) for t in trees]
    report["passed"] = ok
    return report, ok


def cmd_tree_retract(args):
    t = fm_trees.parse_tree(args.tree)
    if t.leaf_charges is None:
        t = t.with_charges({x: 1 for x in range(1, t.k + 1)})
    over = fm_trees.overcharged_vertices(t, args.c)
    r = fm_trees.retract_to_bounded(t, args.c)
    left = fm_trees.overcharged_vertices(r, args.c)
    ok = not any(len(v) > 1 for v in left) and fm_trees.contracts_to(t, r)
    report = {
        "input": fm_trees.format_tree(t),
        "codimension": fm_trees.codimension(t),
        "overcharged": sorted(sorted(v) for v in over),
        "retract": fm_trees.format_tree(r),
        "retract_codimension": fm_trees.codimension(r),
        "overcharged_leaves_remaining": sorted(min(v) for v in left if len(v) == 1),
        "passed": ok,
    }
    if args.contract:
        groups = [frozenset(_int_list(g)) for g in args.contract]
        report["contracted"] = fm_trees.format_tree(fm_trees.contract(t, groups))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(fm_trees.tree_to_dot(r) + "\n")
        report["dot"] = args.dot
    return report, ok


def cmd_sym_power(args):
    if (args.sphere is None) == (args.dims is None):
        raise InputError("give exactly one of --sphere or --dims")
    h = symmetric_powers.sphere(args.sphere) if args.sphere is not None else _parse_dims(args.dims)
    top = _max_degree(args, None)
    result = symmetric_powers.sym_product_homology(h, args.k, top)
    return {"input": _dims_json(h), "k": args.k, "dims": _dims_json(result),
            "monotone_up_to_k": symmetric_powers.stabilization_monotone(h, args.k)}, True


def _build_model(args) -> cdga.SullivanAlgebra:
    need_c = args.model in ("sym-sphere", "mapping-sphere", "mapping-cp2")
    need_n = args.model in ("sym-sphere", "odd-sphere", "mapping-sphere")
    if need_c and args.c is None or need_n and args.n is None:
        raise InputError(f"model {args.model} needs " + " and ".join(
            f for f, need in (("--n", need_n), ("--c", need_c)) if need))
    if args.model == "sym-sphere":
        return cdga.model_sym_sphere(args.n, args.c, args.truncation)
    if args.model == "odd-sphere":
        return cdga.model_odd_sphere(args.n, args.truncation)
    if args.model == "mapping-sphere":
        return cdga.model_mapping_homology_sphere(args.n, args.c, args.truncation)
    return cdga.model_mapping_cp2(args.c, args.truncation)


def cmd_cdga_cohomology(args):
    if (args.model is None) == (args.input is None):
        raise InputError("give exactly one of --model or --input")
    if args.input:
        obj = _read_json(args.input)
        _check_schema(obj, args.input)
        try:
            a = cdga.algebra_from_json(obj)
        except (KeyError, TypeError) as exc:
            raise InputError(f"{args.input}: malformed algebra ({exc})") from None
        if args.truncation is not None:
            a = cdga.SullivanAlgebra(a.generators, a.differential, args.truncation)
    else:
        a = _build_model(args)
    window = args.window if args.window is not None else _max_degree(args, a.truncation - 1)
    h = cdga.cohomology(a, window)
    report = {"algebra": str(a), "window": window, "dims": _dims_json(h)}
    ok = True
    if args.exact:
        p = _parse_element(a, args.exact)
        report["element"] = a.format(p)
        report["cocycle"] = cdga.is_cocycle(a, p)
        report["exact"] = cdga.is_exact(a, p)
    return report, ok


def _parse_element(a: cdga.SullivanAlgebra, text: str) -> dict:
    # "a^3" or "x4^2*x2"; a single monomial with coefficient 1
    exps = {}
    for factor in text.replace(" ", "").split("*"):
        name, _, e = factor.partition("^")
        try:
            exps[name] = exps.get(name, 0) + int(e or 1)
        except ValueError:
            raise InputError(f"bad exponent in {factor!r}") from None
    try:
        return {a.monomial(**exps): Fraction(1)}
    except KeyError as exc:
        raise InputError(f"unknown generator {exc.args[0]!r}") from None


def cmd_cdga_model(args):
    a = _build_model(args)
    report = {"model": cdga.algebra_to_json(a), "minimal": a.is_minimal()}
    if args.loop is not None:
        pi = cdga.loop_homotopy_dims(a, args.loop)
        window = args.window if args.window is not None else _max_degree(args, None)
        report["loop_homotopy"] = _dims_json(pi)
        report["stable_component_homology"] = _dims_json(
            cdga.stable_component_homology(a, args.loop, window))
    return report, True


def cmd_stable_range(args):
    iso, surj = stability.stable_range(args.k, args.c)
    report = {"k": args.k, "c": args.c,
              "open": {"iso_below": iso, "surj_at": surj, "kind": "open manifold"}}
    if args.partition_m is not None:
        lam = stability.partition_collection(args.c, args.partition_m)
        q = stability.exceptional_charge(lam)
        report["collection"] = {"m": args.partition_m, "members": len(lam.members), "charge": q}
        if args.k >= q:
            iso2, surj2 = stability.exceptional_range(args.k, lam)
            report["exceptional"] = {"iso_below": iso2, "surj_at": surj2, "kind": "exceptional"}
        else:
            report["exceptional"] = None
    if args.compare:
        report["comparison"] = stability.compare_partition_bounds(args.compare, args.c, args.compare_m)
    return report, True


def cmd_closed_range(args):
    bound, admissible = stability.closed_range(args.k, args.j, args.c, _fraction(args.chi), args.n)
    return {"k": args.k, "j": args.j, "c": args.c, "chi": args.chi, "n": args.n,
            "bound": bound, "admissible": admissible, "kind": "closed manifold"}, True


def cmd_degree_solve(args):
    chi = _fraction(args.chi)
    report = {"k": args.k, "chi": str(chi), "section_degree": str(stability.section_degree(args.k, chi))}
    if args.d is not None:
        report["degree_shift"] = str(stability.degree_shift(_fraction(args.d), args.k, chi))
    if args.j is not None:
        d = stability.solve_degree(args.j, args.k, chi)
        report.update(j=args.j, d=str(d),
                      round_trip=stability.degree_shift(d, args.k, chi) == args.j)
    return report, report.get("round_trip", True)


def cmd_vanishing_arith(args):
    ok = stability.verify_vanishing_arithmetic(args.k_max, args.c_max)
    return {"k_max": args.k_max, "c_max": args.c_max, "passed": ok}, ok


def cmd_ledger(args):
    only = set(args.only.split(",")) if args.only else None
    known = {ch.claim_id for ch in acceptance.CHECKS}
    if only and not only <= known:
        raise InputError(f"unknown claim ids: {sorted(only - known)}")
    entries = acceptance.run_suite(args.seed, _budget(args), only, args.timing)
    rows = [e.as_dict() for e in entries]
    if any(e.status == "fail" for e in entries):
        return rows, False
    if any(e.status == "skipped" for e in entries):
        raise _Skipped(rows)
    return rows, True


class _Skipped(Exception):
    def __init__(self, report):
        super().__init__("some ledger entries were skipped for budget")
        self.report = report


# --- output -------------------------------------------------------------------


def _flatten(obj, prefix="") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        out = []
        for key, v in obj.items():
            out += _flatten(v, f"{prefix}.{key}" if prefix else str(key))
        return out
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, json.dumps(obj) if isinstance(obj, (list, bool)) or obj is None else str(obj))]


def render(report, fmt: str) -> str:
    if fmt == "json":
        body = {"schema": SCHEMA, "result": report}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"
    rows = _flatten(report)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


# --- parser -------------------------------------------------------------------


COMMANDS = {
    "homology": cmd_homology,
    "links": cmd_links,
    "join": cmd_join,
    "inj-build": cmd_inj_build,
    "wcm-check": cmd_wcm_check,
    "inj-derangement": cmd_inj_derangement,
    "trees": cmd_trees,
    "tree-retract": cmd_tree_retract,
    "sym-power": cmd_sym_power,
    "cdga-cohomology": cmd_cdga_cohomology,
    "cdga-model": cmd_cdga_model,
    "stable-range": cmd_stable_range,
    "closed-range": cmd_closed_range,
    "degree-solve": cmd_degree_solve,
    "vanishing-arith": cmd_vanishing_arith,
    "ledger": cmd_ledger,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--cell-budget", type=int, help="overrides STABKIT_CELL_BUDGET")
    common.add_argument("--max-degree", type=int, help="overrides STABKIT_MAX_DEGREE")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="stabkit", description="Exact homological-stability toolkit.")
    p.add_argument("--version", action="version", version=f"stabkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    s = add("homology", "integral or rational homology of a simplicial complex")
    s.add_argument("--input", required=True)
    s.add_argument("--over", choices=["Z", "Q"], default="Z")

    s = add("links", "link and star of a simplex")
    s.add_argument("--input", required=True)
    s.add_argument("--simplex", required=True, help="comma-separated vertex labels")

    s = add("join", "join of two complexes and its connectivity")
    s.add_argument("--input", required=True)
    s.add_argument("--other", required=True)
    s.add_argument("--cone-only", action="store_true", help="cone on the first complex instead")

    for name, text in (("inj-build", "build a bounded-charge injective-words complex"),
                       ("wcm-check", "verify weak Cohen-Macaulayness of Inj^c(S)")):
        s = add(name, text)
        s.add_argument("--charges", help="comma-separated charges, one per element")
        s.add_argument("--c", type=int)
        s.add_argument("--input", help="charged-set JSON")
        if name == "inj-build":
            s.add_argument("--faces", action="store_true", help="include the maximal faces")
            s.add_argument("--check-links", action="store_true")

    s = add("inj-derangement", "top homology of the complex of injective words")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--budget", type=int, default=injective_words.DERANGEMENT_BUDGET)

    s = add("trees", "enumerate stratum trees on k leaves")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--budget", type=int, default=fm_trees.TREE_BUDGET)
    s.add_argument("--poset", action="store_true")
    s.add_argument("--dot", help="write the poset as DOT to this path")
    s.add_argument("--list", action="store_true")

    s = add("tree-retract", "retract a charged tree to bounded charge")
    s.add_argument("--tree", required=True, help="e.g. '(r (v1 1:2 2:1) 3:1)'")
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--contract", action="append", help="comma-separated leaf set to contract")
    s.add_argument("--dot", help="write the retract as DOT to this path")

    s = add("sym-power", "rational homology of a symmetric product")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--sphere", type=int)
    s.add_argument("--dims", help="e.g. '0:1,1:2,2:1'")

    for name, text in (("cdga-cohomology", "cohomology of a Sullivan algebra"),
                       ("cdga-model", "emit one of the explicit models")):
        s = add(name, text)
        s.add_argument("--model", choices=["sym-sphere", "odd-sphere", "mapping-sphere",
                                           "mapping-cp2"], required=name == "cdga-model")
        s.add_argument("--n", type=int)
        s.add_argument("--c", type=int)
        s.add_argument("--truncation", type=int)
        s.add_argument("--window", type=int)
        if name == "cdga-cohomology":
            s.add_argument("--input", help="algebra JSON")
            s.add_argument("--exact", help="monomial to test, e.g. 'a^3'")
        else:
            s.add_argument("--loop", type=int, help="report the n-fold loop space")

    s = add("stable-range", "stability ranges for open manifolds")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--partition-m", type=int, help="also use the collection for (c+1)^(m+1)")
    s.add_argument("--compare", type=int, metavar="K_MAX",
                   help="compare the two partition-indexed bounds up to K_MAX")
    s.add_argument("--compare-m", type=int, default=5)

    s = add("closed-range", "stability range for closed manifolds")
    for flag in ("--k", "--j", "--c", "--n"):
        s.add_argument(flag, type=int, required=True)
    s.add_argument("--chi", required=True)

    s = add("degree-solve", "section-degree arithmetic")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--chi", required=True)
    s.add_argument("--j", type=int)
    s.add_argument("--d", help="report the degree shift for this d")

    s = add("vanishing-arith", "spectral-sequence vanishing arithmetic")
    s.add_argument("--k-max", type=int, default=200)
    s.add_argument("--c-max", type=int, default=5)

    s = add("ledger", "run every acceptance check and emit the claim ledger")
    s.add_argument("--only", help="comma-separated claim ids")
    s.add_argument("--timing", action="store_true", help="record wall-clock time (not deterministic)")
    return p


def _emit(report, args) -> None:
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, ok = COMMANDS[args.command](args)
    except (_Incomplete, _Skipped) as exc:
        _emit(exc.report, args)
        print(f"stabkit: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BudgetExceeded as exc:
        print(f"stabkit: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, OSError) as exc:
        print(f"stabkit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
