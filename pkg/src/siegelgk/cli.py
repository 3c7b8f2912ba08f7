"""Command line front end.

    siegelgk gk '{"p": 2, "twiceB": [[2, 0], [0, 2]]}'
    siegelgk siegel --input forms.json --format csv
    siegelgk verify --p 2 --max-n 2 --max-ord 3 --exhaustive

Input is one form object or a list of them, inline or from ``--input``.  A
form object is {"p", "twiceB"} or a decomposition {"p", "blocks"}.  Exit
status 2 means malformed input, 1 means an oracle mismatch.
"""
import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .corpus import DEFAULT_SEED, exhaustive_forms, generate_corpus
from .decompose import Block, assemble, decompose
from .forms import HalfIntMatrix
from .gk import egk_datum, gk_invariant, naive_egk, upsilon, validate_egk, validate_naive_egk
from .oracle import gk_search, siegel_vs_density
from .preoptimal import preoptimal_form
from .siegel import f_block_recursion, siegel_series

WORKERS_ENV = "SIEGELGK_WORKERS"


class InputError(ValueError):
    def __init__(self, where, msg):
        super().__init__(f"{where}: {msg}")


def _parse_form(obj, where):
    if not isinstance(obj, dict):
        raise InputError(where, "expected an object")
    if "p" not in obj:
        raise InputError(where, "missing key 'p'")
    try:
        if "blocks" in obj:
            blocks = [Block.from_json(b) for b in obj["blocks"]]
            return assemble(blocks, int(obj["p"]))
        if "twiceB" not in obj:
            raise InputError(where, "missing key 'twiceB'")
        B = HalfIntMatrix(obj["p"], obj["twiceB"])
    except InputError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(where, str(exc)) from None
    if not B.nondegenerate:
        raise InputError(where + ".twiceB", "form is singular")
    return B


def load_forms(text, source="<inline>"):
    """Parse one form or a list of forms; errors carry a location."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
    if isinstance(data, list):
        return [_parse_form(x, f"{source}$[{i}]") for i, x in enumerate(data)]
    return [_parse_form(data, f"{source}$")]


# -- per-form commands -------------------------------------------------------

def cmd_gk(B, args):
    if args.mode == "formula":
        return {"gk": list(gk_invariant(B))}
    r = gk_search(B, mode=args.mode, seed=args.seed)
    return {"gk": list(r.gk), "mode": r.mode, "M": r.M, "certified": r.certified}


def cmd_egk(B, args):
    return {"egk": egk_datum(B).to_json()}


def cmd_naive_egk(B, args):
    return {"naive_egk": naive_egk(B, free_sign=args.sign).to_json()}


def cmd_siegel(B, args):
    return {"siegel": siegel_series(B).to_json()}


def cmd_decompose(B, args):
    dec = decompose(B)
    out = {"p": B.p, **dec.to_json()}
    if B.p == 2:
        out["preoptimal"] = preoptimal_form(B).to_json()
    return out


PER_FORM = {
    "gk": cmd_gk,
    "egk": cmd_egk,
    "naive-egk": cmd_naive_egk,
    "siegel": cmd_siegel,
    "decompose": cmd_decompose,
}


# -- verification ------------------------------------------------------------

def verify_one(job):
    """Oracle record for a single form; ``ok`` is False on any disagreement."""
    B, mode, seed, density_k, density_a = job
    rec = {"form": B.to_json()}
    ok = True
    gk = gk_invariant(B)
    found = gk_search(B, mode=mode, seed=seed)
    rec["gk"] = {"formula": list(gk), "search": list(found.gk), "M": found.M, "certified": found.certified}
    if mode == "exhaustive":
        ok &= found.certified and tuple(found.gk) == gk
    else:
        ok &= tuple(found.gk) <= gk
    G, Hn = egk_datum(B), naive_egk(B)
    rec["egk"] = str(G)
    rec["naive_egk"] = str(Hn)
    ok &= validate_egk(G) is None and validate_naive_egk(Hn) is None and upsilon(Hn) == G
    F = siegel_series(B)
    if B.p == 2:
        same = f_block_recursion(B) == F
        rec["block_recursion"] = same
        ok &= same
    if density_k is not None and B.n <= 2:
        rep = siegel_vs_density(B, density_k, density_a)
        rec["density"] = rep.to_json()
        ok &= bool(rep.match)
    rec["ok"] = bool(ok)
    return rec


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, jobs):
    n = _workers()
    if n == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, jobs, chunksize=16))


def run_verify(args, out):
    if args.input or args.form:
        forms = _read_input(args)
    else:
        forms = exhaustive_forms(args.p, args.max_n, args.max_ord)
    mode = "exhaustive" if args.exhaustive else "randomized"
    recs = _map(verify_one, [(B, mode, args.seed, args.k, args.a) for B in forms])
    bad = sum(not r["ok"] for r in recs)
    report = {"mode": mode, "forms": len(recs), "mismatches": bad, "records": recs}
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=1)
    print(json.dumps({"forms": len(recs), "mismatches": bad, "report": args.report}), file=out)
    if bad:
        print(f"oracle mismatch on {bad} form(s); see {args.report}", file=sys.stderr)
        return 1
    return 0


def run_corpus(args, out):
    forms = generate_corpus(args.seed)
    if args.format == "csv":
        w = csv.writer(out)
        w.writerow(["p", "n", "twiceB"])
        for B in forms:
            w.writerow([B.p, B.n, json.dumps([list(r) for r in B.twiceB])])
    else:
        json.dump([B.to_json() for B in forms], out)
        out.write("\n")
    return 0


# -- plumbing ----------------------------------------------------------------

def _read_input(args):
    if args.input:
        with open(args.input) as fh:
            return load_forms(fh.read(), args.input)
    if args.form is None:
        raise InputError("<args>", "no form given")
    return load_forms(args.form)


def _flat(rec, prefix=""):
    out = {}
    for key, v in rec.items():
        name = f"{prefix}{key}"
        if isinstance(v, dict):
            out.update(_flat(v, name + "."))
        elif isinstance(v, list):
            out[name] = json.dumps(v)
        else:
            out[name] = v
    return out


def _emit(records, fmt, out):
    if fmt == "csv":
        rows = [_flat(r) for r in records]
        cols = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(out, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        json.dump(records[0] if len(records) == 1 else records, out, sort_keys=True)
        out.write("\n")


def build_parser():
    ap = argparse.ArgumentParser(prog="siegelgk", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("form", nargs="?", help="inline JSON form or list of forms")
        sp.add_argument("--input", help="read the form(s) from this JSON file")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized GK search")

    helps = {
        "gk": "Gross-Keating invariant (formula or brute-force search)",
        "egk": "extended GK datum",
        "naive-egk": "naive EGK datum",
        "siegel": "Siegel series as a Laurent polynomial in X^(1/2)",
        "decompose": "block decomposition with its unimodular witness",
    }
    for name in PER_FORM:
        sp = sub.add_parser(name, help=helps.get(name))
        common(sp)
        if name == "gk":
            sp.add_argument("--mode", choices=("formula", "exhaustive", "randomized"), default="formula")
        if name == "naive-egk":
            sp.add_argument("--sign", type=int, choices=(1, -1), default=1,
                            help="value for entries the sign table leaves free")
    v = sub.add_parser("verify", help="check formulas against the brute-force oracles")
    common(v)
    v.add_argument("--p", type=int, default=2, help="prime of the generated forms when no input is given")
    v.add_argument("--max-n", type=int, default=2)
    v.add_argument("--max-ord", type=int, default=3, help="largest entry order of the generated forms")
    v.add_argument("--exhaustive", action="store_true", help="exhaustive GK search (default randomized)")
    v.add_argument("--k", "--density", type=int, dest="k", help="also compare local densities at this k (n <= 2 forms)")
    v.add_argument("--a", type=int, help="fixed density precision (default: grow until stable)")
    v.add_argument("--report", default="verify_report.json")
    c = sub.add_parser("corpus", help="write the deterministic sweep corpus")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the random part of the corpus")
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "corpus":
            return run_corpus(args, out)
        if args.command == "verify":
            if args.k is not None and args.k < 1:
                raise InputError("--k", "k must be at least 1")
            return run_verify(args, out)
        forms = _read_input(args)
    except InputError as exc:
        print(f"malformed input at {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"malformed input at {args.input}: {exc.strerror}", file=sys.stderr)
        return 2
    fn = PER_FORM[args.command]
    _emit([fn(B, args) for B in forms], args.format, out)
    return 0


def run(argv):
    """main() with output captured, for tests: returns (status, stdout text)."""
    buf = io.StringIO()
    return main(argv, buf), buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
