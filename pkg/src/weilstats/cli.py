"""Command-line surface.

Every command prints a deterministic record to stdout in markdown
(default), JSON, or CSV.  JSON serializes every integer as a decimal
string because eigenvalues comfortably exceed 2^64.  Exit codes:
0 success, 2 validation/integrity error, 3 unsupported range.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import curve_models as cm
from . import eichler_selberg as es
from . import gf
from . import moduli_stats as ms
from . import motive_ring as mr
from . import siegel_extract as se
from . import tables as tb
from . import zeta_bounds as zb
from .errors import UnsupportedRangeError, ValidationError

# ---------------------------------------------------------------------------
# output plumbing


def _jsonable(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def parse_cli_json(text: str):
    """Inverse of the JSON emission: decimal strings back to ints."""

    def back(x):
        if isinstance(x, str):
            if x.lstrip("-").isdigit():
                return int(x)
            if "/" in x:
                a, _, b = x.partition("/")
                if a.lstrip("-").isdigit() and b.isdigit():
                    return Fraction(int(a), int(b))
            return x
        if isinstance(x, list):
            return [back(v) for v in x]
        if isinstance(x, dict):
            return {k: back(v) for k, v in x.items()}
        return x

    return back(json.loads(text))


def emit(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(record), indent=2, sort_keys=True)
    rows = record.get("rows")
    if fmt == "csv":
        lines = []
        if rows is not None:
            cols = record["columns"]
            lines.append(",".join(cols))
            for r in rows:
                lines.append(",".join(str(r[c]) for c in cols))
        else:
            keys = [k for k in record if k not in ("columns",)]
            lines.append(",".join(keys))
            lines.append(",".join(str(record[k]) for k in keys))
        return "\n".join(lines)
    # markdown
    lines = []
    for k, v in record.items():
        if k in ("rows", "columns"):
            continue
        lines.append(f"- {k}: {v}")
    if rows is not None:
        cols = record["columns"]
        lines.append("")
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "|".join("---" for _ in cols) + "|")
        for r in rows:
            lines.append("| " + " | ".join(str(r[c]) for c in cols) + " |")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# model literals


def parse_model_literal(field: gf.Field, text: str):
    """Model grammar: 5 comma values = Weierstrass, 15 = ternary quartic
    (graded-lex), "F: c0,...,c_{2g+2}" = odd-characteristic hyperelliptic,
    "h0,..|f0,.." = characteristic-2 hyperelliptic."""
    text = text.strip()
    if text.startswith("F:"):
        coeffs = tuple(int(v) for v in text[2:].split(","))
        g = (len(coeffs) - 3) // 2
        if len(coeffs) != 2 * g + 3:
            raise ValidationError("hyperelliptic form needs 2g+3 coefficients")
        return cm.HyperellipticModel(field, g, coeffs)
    if "|" in text:
        h_txt, f_txt = text.split("|", 1)
        h = tuple(int(v) for v in h_txt.split(","))
        f = tuple(int(v) for v in f_txt.split(","))
        g = len(h) - 2
        return cm.HyperellipticModel(field, g, f, h)
    vals = tuple(int(v) for v in text.split(","))
    if len(vals) == 5:
        return cm.EllipticModel(field, *vals)
    if len(vals) == 15:
        return cm.PlaneCurveModel(field, 4, vals)
    raise ValidationError(
        "model literal must be 5 Weierstrass or 15 quartic coefficients, "
        "'F: ...' or 'h|f'"
    )


def _field_from_q(q: int) -> gf.Field:
    pf = gf.factorize(q)
    if len(pf) != 1:
        raise ValidationError(f"{q} is not a prime power")
    (p, f), = pf.items()
    return gf.make_field(p, f)


# ---------------------------------------------------------------------------
# ensemble cache plumbing


_GENUS_KEY = {1: "elliptic", 2: "genus2", 3: "genus3"}


def _cache_file(cache_dir, genus, q) -> Path:
    return Path(cache_dir) / f"ensemble_g{genus}_q{q}.json"


def load_cached_ensembles(cache_dir, needs):
    if not cache_dir:
        return
    for genus, q in needs:
        path = _cache_file(cache_dir, genus, q)
        key = (_GENUS_KEY[genus], q)
        if key in ms._ENSEMBLE_MEMO or not path.exists():
            continue
        try:
            ens = ms.ClassEnsemble.load(path)
        except ValidationError:
            continue  # stale cache versions are rejected, never trusted
        ms._ENSEMBLE_MEMO[key] = ens


def save_cached_ensembles(cache_dir, needs):
    if not cache_dir:
        return
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    for genus, q in needs:
        key = (_GENUS_KEY[genus], q)
        if key in ms._ENSEMBLE_MEMO:
            path = _cache_file(cache_dir, genus, q)
            if not path.exists():
                ms._ENSEMBLE_MEMO[key].save(path)


def build_ensemble(genus: int, q: int):
    if genus == 1:
        return ms.elliptic_ensemble(q)
    if genus == 2:
        return ms.genus2_ensemble(q)
    if genus == 3:
        return ms.genus3_ensemble(q)
    raise UnsupportedRangeError("ensembles exist for genus 1, 2, 3")


# ---------------------------------------------------------------------------
# subcommands


def cmd_bounds(args) -> dict:
    methods = {
        "hw": ("hw",),
        "ihara": ("ihara",),
        "search": ("search",),
        "all": ("hw", "ihara", "search"),
    }
    if args.method == "ef":
        if not args.u:
            raise ValidationError("--method ef needs --u coefficients")
        us = [Fraction(v) for v in args.u.split(",")]
        a_f, b_f, bound = zb.explicit_formula_bound(args.q, args.g, us)
        rec = {
            "q": args.q, "g": args.g, "method": "explicit_formula",
            "bound": bound, "u": [str(u) for u in us],
        }
    else:
        rep = zb.bound_report(args.q, args.g, methods=methods[args.method])
        rec = {"q": args.q, "g": args.g, **rep.methods, "best": rep.best}
        if rep.search_u is not None:
            rec["search_u"] = [str(u) for u in rep.search_u]
    if args.plot:
        from . import plotting

        meths = methods.get(args.method, ("hw", "ihara"))
        if args.method == "ef":
            meths = ("hw", "ihara")
        plotting.save_bounds_figure(args.plot, args.q, max(args.g, 10), meths)
        rec["plot"] = args.plot
    return rec


def cmd_zeta(args) -> dict:
    if args.counts:
        counts = [int(v) for v in args.counts.split(",")]
        w = zb.weil_from_counts(args.q, args.g, counts)
    elif args.model:
        field = _field_from_q(args.q)
        model = parse_model_literal(field, args.model)
        g = model.genus if not hasattr(model, "is_smooth") else model.genus
        ext = args.ext or g
        counts = [model.count_points(n) for n in range(1, max(ext, g) + 1)]
        w = zb.weil_from_counts(args.q, g, counts[:g])
    else:
        raise ValidationError("zeta needs --counts or --model")
    upto = max(args.ext or 0, 2 * w.g + 2)
    return {
        "q": w.q,
        "g": w.g,
        "weil_poly": list(w.weil_poly),
        "zeta": zb.zeta_rational_form(w),
        "counts": [zb.counts_from_weil(w, n) for n in range(1, upto + 1)],
    }


def cmd_moments(args) -> dict:
    return {"q": args.q, "a": args.a, "sigma": ms.sigma_moment(args.q, args.a)}


def cmd_trace(args) -> dict:
    return {"k": args.k, "n": args.n, "trace": es.trace_Tn(args.k, args.n),
            "dim": es.dim_Sk(args.k)}


def cmd_charpoly(args) -> dict:
    return {"k": args.k, "p": args.p, "dim": es.dim_Sk(args.k),
            "charpoly": es.hecke_charpoly(args.k, args.p)}


def cmd_siegel2(args) -> dict:
    q = args.q
    needs = [(2, q), (1, q), (1, q * q)]
    load_cached_ensembles(args.cache, needs)
    value = se.genus2_hecke_trace(args.j, args.k, q)
    save_cached_ensembles(args.cache, needs)
    dim = se.dimension_of(2, (args.j, args.k))
    rec = {"j": args.j, "k": args.k, "q": q, "trace": value}
    if dim is not None:
        rec["dim"] = dim
        rec["kind"] = "eigenvalue" if dim == 1 else "trace"
    else:
        rec["kind"] = "trace"
    return rec


def cmd_siegel3(args) -> dict:
    q = args.q
    needs = [(3, q), (2, q), (1, q), (1, q * q), (1, q**3)]
    load_cached_ensembles(args.cache, needs)
    value = se.genus3_hecke_trace(args.i, args.j, args.k, q)
    save_cached_ensembles(args.cache, needs)
    dim = se.dimension_of(3, (args.i, args.j, args.k))
    rec = {"i": args.i, "j": args.j, "k": args.k, "q": q, "trace": value}
    if dim is not None:
        rec["dim"] = dim
        rec["kind"] = "eigenvalue" if dim == 1 else "trace"
    else:
        rec["kind"] = "trace"
    return rec


def cmd_harder(args) -> dict:
    u, v = (int(x) for x in args.pi.split(","))
    t = se.harder_check(args.a, args.b, args.p, args.lam_f, args.ell,
                        s=args.s, ideal_gen=(u, v), d=args.d)
    rec = {
        "a": args.a, "b": args.b, "p": args.p, "ell": args.ell, "s": args.s,
        "congruence_holds": t.ok,
        "lambda_f": f"{t.lam_f.x} + {t.lam_f.y}*sqrt({args.d})",
        "lambda_f_residue": t.lam_f_residue,
        "lhs_residue": t.lhs_residue,
        "rhs_residue": t.rhs_residue,
    }
    if t.sqrt_d_residue is not None:
        rec["sqrt_d_residue"] = t.sqrt_d_residue
    return rec


def cmd_getzler(args) -> dict:
    e = mr.getzler_ec_m1n(args.n)
    rec = {"n": args.n, "euler_characteristic": str(e)}
    if args.eval_p:
        rec["value_at_p"] = e.evaluate(args.eval_p, 1)
        rec["p"] = args.eval_p
    return rec


def cmd_hermitian(args) -> dict:
    rec = cm.hermitian_model(args.q)
    return {
        "q0": rec.q0,
        "field_size": rec.field.q,
        "points": rec.points,
        "genus": rec.genus,
        "defect_zero": rec.defect_is_zero,
        "weil_poly": list(rec.weil_poly) if rec.weil_poly else None,
    }


def cmd_tower(args) -> dict:
    t = cm.tower_count(args.q, args.level)
    return {"q0": args.q, "level": t.level, "chains": t.chains,
            "extendable_chains": t.extendable}


def cmd_tables_diff(args) -> dict:
    if args.file:
        entries = tb.parse_tables(args.file)
    elif args.p:
        entries = tb.shipped_table(args.p)
    else:
        raise ValidationError("tables diff needs --file or --p")
    methods = ("hw", "ihara", "search") if args.search else ("hw", "ihara")
    report = tb.table_diff(entries, methods=methods)
    rows = [
        {
            "g": r.entry.g, "q": r.entry.q, "kind": r.entry.kind.value,
            "table_lo": "" if r.entry.lo is None else r.entry.lo,
            "table_hi": r.entry.hi, "our_bound": r.our_bound,
            "slack": r.slack, "violation": r.violation,
        }
        for r in report.rows
    ]
    rec = {
        "entries": len(rows),
        "violations": len(report.violations),
        "columns": ["g", "q", "kind", "table_lo", "table_hi", "our_bound",
                    "slack", "violation"],
        "rows": rows,
    }
    if args.plot:
        from . import plotting

        plotting.save_table_diff_figure(args.plot, report)
        rec["plot"] = args.plot
    return rec


def cmd_ensemble_build(args) -> dict:
    ens = build_ensemble(args.genus, args.q)
    ens.save(args.out)
    return {
        "genus": args.genus, "q": args.q, "out": args.out,
        "entries": len(ens.entries), "mass": ens.mass,
        "code_version": ms.code_version_hash(),
    }


def cmd_ensemble_info(args) -> dict:
    data = json.loads(Path(args.file).read_text())
    ens = ms.ClassEnsemble.from_json(data, check_version=False)
    return {
        "file": args.file, "genus": ens.genus, "q": ens.q,
        "entries": len(ens.entries), "mass": ens.mass,
        "group_order": ens.group_order,
        "code_version": data.get("code_version"),
        "fresh": data.get("code_version") == ms.code_version_hash(),
    }


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="weilstats",
        description="exact curve statistics over small finite fields",
    )
    ap.add_argument("--format", choices=("md", "json", "csv"), default="md")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="point-count upper bounds")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--g", type=int, required=True)
    b.add_argument("--method", choices=("hw", "ihara", "ef", "search", "all"),
                   default="all")
    b.add_argument("--u", help="explicit-formula coefficients (for --method ef)")
    b.add_argument("--plot", help="write a bounds-vs-genus figure to this file")
    b.set_defaults(fn=cmd_bounds)

    z = sub.add_parser("zeta", help="Weil polynomial and zeta data")
    z.add_argument("--q", type=int, required=True)
    z.add_argument("--g", type=int, default=0)
    z.add_argument("--counts", help="comma-separated c(1..g)")
    z.add_argument("--model", help="model literal (see docs)")
    z.add_argument("--ext", type=int, help="count extensions up to this degree")
    z.set_defaults(fn=cmd_zeta)

    m = sub.add_parser("moments", help="weighted eigenvalue moments")
    m.add_argument("--q", type=int, required=True)
    m.add_argument("--a", type=int, required=True)
    m.set_defaults(fn=cmd_moments)

    t = sub.add_parser("trace", help="Hecke operator trace on cusp forms")
    t.add_argument("--k", type=int, required=True)
    t.add_argument("--n", type=int, required=True)
    t.set_defaults(fn=cmd_trace)

    c = sub.add_parser("charpoly", help="Hecke characteristic polynomial")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.set_defaults(fn=cmd_charpoly)

    s2 = sub.add_parser("siegel2", help="degree-2 Siegel Hecke trace")
    s2.add_argument("--j", type=int, required=True)
    s2.add_argument("--k", type=int, required=True)
    s2.add_argument("--q", type=int, required=True)
    s2.add_argument("--cache", help="ensemble cache directory")
    s2.set_defaults(fn=cmd_siegel2)

    s3 = sub.add_parser("siegel3", help="degree-3 Siegel Hecke trace")
    s3.add_argument("--i", type=int, required=True)
    s3.add_argument("--j", type=int, required=True)
    s3.add_argument("--k", type=int, required=True)
    s3.add_argument("--q", type=int, required=True)
    s3.add_argument("--cache", help="ensemble cache directory")
    s3.set_defaults(fn=cmd_siegel3)

    h = sub.add_parser("harder", help="congruence check between eigenvalues")
    h.add_argument("--a", type=int, required=True)
    h.add_argument("--b", type=int, required=True)
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--ell", type=int, required=True)
    h.add_argument("--pi", required=True, help="split prime generator u,v")
    h.add_argument("--d", type=int, required=True)
    h.add_argument("--lam-f", dest="lam_f", type=int, required=True,
                   help="degree-2 eigenvalue to check")
    h.add_argument("--s", type=int, default=1)
    h.set_defaults(fn=cmd_harder)

    g = sub.add_parser("getzler", help="pointed genus-1 Euler characteristics")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--eval", dest="eval_p", type=int)
    g.set_defaults(fn=cmd_getzler)

    he = sub.add_parser("hermitian", help="hermitian curve verification record")
    he.add_argument("--q", type=int, required=True, help="q0 in {2,3,4}")
    he.set_defaults(fn=cmd_hermitian)

    tw = sub.add_parser("tower", help="recursive tower solution chains")
    tw.add_argument("--q", type=int, required=True, help="q0 in {2,3}")
    tw.add_argument("--level", type=int, required=True)
    tw.set_defaults(fn=cmd_tower)

    ta = sub.add_parser("tables", help="record-table utilities")
    tasub = ta.add_subparsers(dest="table_command", required=True)
    td = tasub.add_parser("diff", help="bound-consistency diff")
    td.add_argument("--file", help="table CSV (g,q,entry)")
    td.add_argument("--p", type=int, help="use the shipped table for p in {2,3}")
    td.add_argument("--search", action="store_true",
                    help="include the explicit-formula search bound")
    td.add_argument("--plot", help="write a slack figure to this file")
    td.set_defaults(fn=cmd_tables_diff)

    en = sub.add_parser("ensemble", help="ensemble cache management")
    ensub = en.add_subparsers(dest="ensemble_command", required=True)
    eb = ensub.add_parser("build")
    eb.add_argument("--genus", type=int, required=True)
    eb.add_argument("--q", type=int, required=True)
    eb.add_argument("--out", required=True)
    eb.set_defaults(fn=cmd_ensemble_build)
    ei = ensub.add_parser("info")
    ei.add_argument("file")
    ei.set_defaults(fn=cmd_ensemble_info)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        record = args.fn(args)
    except UnsupportedRangeError as e:
        print(f"unsupported range: {e}", file=sys.stderr)
        return 3
    except (ValidationError, ZeroDivisionError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return 2
    print(emit(record, args.format))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
