"""Command-line front end: construct | verify | search | ebr | optimize | export.

Exit codes are fixed for scripting: 0 success, 1 claim/witness failure,
2 parse or usage failure, 3 computational budget exceeded.  Engine imports
happen inside the handlers so that --threads (or DESIGNFORGE_THREADS) can
take effect before any kernel warms up.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from typing import List, Optional

EXIT_OK = 0
EXIT_CLAIM = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3


def _field_int(e) -> int:
    return e.to_int()


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    from . import io

    kind = args.kind
    if kind == "gabor":
        from .ffdesigns import gabor_ensemble

        ens = gabor_ensemble(args.p, args.k, args.r)
    elif kind == "singer":
        from .ffdesigns import singer_difference_set

        ens = singer_difference_set(args.r)
    elif kind == "harmonic":
        from .ffcore import build_field
        from .ffdesigns import harmonic_etf, singer_difference_set

        ctx = build_field(args.p, 2 * args.k)
        ens = harmonic_etf(ctx, singer_difference_set(args.r))
    elif kind == "mub":
        from .cdesigns import mub_ensemble

        ens = mub_ensemble(args.d)
    elif kind == "sic":
        from .cdesigns import sic_catalog

        ens = sic_catalog(args.d)
    elif kind == "q-simplex":
        from .qdesigns import simplex_design_d2

        ens = simplex_design_d2()
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(kind)
    doc = io.save_design(args.out, ens)
    if doc["setting"] == "difference-set":
        print(f"wrote {args.out}: difference set mod {doc['modulus']}, "
              f"{len(doc['elements'])} elements, lambda = {doc['lambda']}")
    else:
        print(f"wrote {args.out}: {doc['setting']} ensemble, n = {doc['n']}, d = {doc['d']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_finite(ens, claims: List[str], tol: float) -> List[dict]:
    from .ffdesigns import (
        certify_tight_2design,
        check_etf,
        check_tight_frame,
        structural_gabor_verify,
    )

    out = []
    for claim in claims:
        if claim == "etf":
            if ens.metadata.get("kind") == "gabor":
                res = structural_gabor_verify(ens)
                method = "structural-gabor"
            else:
                res = check_etf(ens)
                method = "full-gram"
            entry = {"name": claim, "method": method, "ok": bool(res), "exact": True}
            if res:
                a, b, c = res.params
                entry["values"] = {
                    "a": _field_int(a),
                    "b": _field_int(b),
                    "c": _field_int(c),
                }
            else:
                entry["counterexample"] = list(res.counterexample)
            out.append(entry)
        elif claim == "design":
            cert = certify_tight_2design(ens)
            entry = {
                "name": claim,
                "method": cert.method,
                "ok": cert.is_design,
                "exact": True,
                "cross_checks": list(cert.cross_checks),
            }
            if cert.design is not None:
                a, c1, c2 = cert.design
                entry["values"] = {
                    "a": _field_int(a),
                    "c1": _field_int(c1),
                    "c2": _field_int(c2),
                }
            if cert.failures:
                entry["failures"] = list(cert.failures)
            out.append(entry)
        elif claim == "tight":
            c = check_tight_frame(ens)
            entry = {"name": claim, "method": "frame-operator", "ok": c is not None, "exact": True}
            if c is not None:
                entry["values"] = {"c": _field_int(c)}
            out.append(entry)
        else:
            raise UsageError(f"claim {claim!r} not defined for finite ensembles")
    return out


def _verify_complex(ens, claims: List[str], tol: float) -> List[dict]:
    from .cdesigns import check_weighted_2design, frame_potential, potential_bound

    out = []
    for claim in claims:
        if claim == "weighted-2-design":
            resid = check_weighted_2design(ens)
            out.append(
                {
                    "name": claim,
                    "method": "moment-matrix",
                    "ok": resid <= tol,
                    "tolerance": tol,
                    "residuals": {"moment": resid},
                    "values": {
                        "n": ens.n,
                        "d": ens.d,
                        "frame_potential_t2": frame_potential(ens, 2),
                        "bound_t2": potential_bound(ens.d, 2),
                    },
                }
            )
        else:
            raise UsageError(f"claim {claim!r} not defined for complex ensembles")
    return out


def _verify_quaternion(ens, claims: List[str], tol: float) -> List[dict]:
    from .qdesigns import certify_fusion_frame, check_tight_q_design

    out = []
    for claim in claims:
        if claim == "q-design":
            chk = check_tight_q_design(ens, tol=tol)
            entry = {
                "name": claim,
                "method": "moments+equiangularity",
                "ok": chk.ok,
                "tolerance": tol,
                "values": {"n": chk.n, "d": chk.d, "first": chk.first, "second": chk.second},
            }
            if chk.b is not None:
                entry["values"]["b"] = chk.b
            if not chk.ok:
                entry["reason"] = chk.reason
                if chk.witness:
                    entry["witness"] = list(chk.witness)
            out.append(entry)
        elif claim == "fusion":
            cert = certify_fusion_frame(ens, tol=tol)
            entry = {
                "name": claim,
                "method": "cross-gramians",
                "ok": cert.isoclinic and cert.tight,
                "tolerance": tol,
                "values": {
                    "n": cert.n,
                    "d": cert.d,
                    "r": cert.r,
                    "ambient_dim": cert.ambient_dim,
                    "potential": cert.potential,
                    "target": cert.target,
                },
                "residuals": {
                    k: v for k, v in cert.residuals.items() if k != "tol"
                },
            }
            if cert.alpha is not None:
                entry["values"]["alpha"] = cert.alpha
            if cert.witness:
                entry["witness"] = list(cert.witness)
            out.append(entry)
        else:
            raise UsageError(f"claim {claim!r} not defined for quaternion ensembles")
    return out


def _verify_difference_set(ds, claims: List[str]) -> List[dict]:
    out = []
    for claim in claims:
        if claim == "difference-set":
            out.append(
                {
                    "name": claim,
                    "method": "exhaustive-differences",
                    "ok": True,
                    "exact": True,
                    "values": {
                        "modulus": ds.modulus,
                        "size": len(ds.elements),
                        "lambda": ds.lam,
                    },
                }
            )
        else:
            raise UsageError(f"claim {claim!r} not defined for difference sets")
    return out


def cmd_verify(args) -> int:
    from . import io
    from .cdesigns import CEnsemble
    from .ffdesigns import DifferenceSet, FFEnsemble
    from .qdesigns import QEnsemble

    started = time.time()
    ens, _doc = io.load_design(args.file)
    claims = [c.strip() for c in args.claims.split(",") if c.strip()]
    if not claims:
        raise UsageError("no claims requested")
    if isinstance(ens, FFEnsemble):
        results = _verify_finite(ens, claims, args.tol)
    elif isinstance(ens, CEnsemble):
        results = _verify_complex(ens, claims, args.tol)
    elif isinstance(ens, QEnsemble):
        results = _verify_quaternion(ens, claims, args.tol)
    elif isinstance(ens, DifferenceSet):
        results = _verify_difference_set(ens, claims)
    else:  # pragma: no cover
        raise UsageError("unsupported file contents")
    cert = io.make_certificate(args.file, results, time.time() - started)
    cert_path = args.cert or (args.file + ".cert.json")
    io.save_json(cert_path, cert)
    all_ok = all(c["ok"] for c in results)
    for c in results:
        print(f"{c['name']}: {'ok' if c['ok'] else 'FAILED'}")
    print(f"certificate written to {cert_path}")
    return EXIT_OK if all_ok else EXIT_CLAIM


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def cmd_search(args) -> int:
    from .ffdesigns import param_search

    rows = param_search(args.p_max, args.k_max, args.r_max)
    header = ["d", "p", "k", "r", "design"]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([row.d, row.p, row.k, row.r, int(row.design)])
        print(f"wrote {len(rows)} rows to {args.csv}")
    else:
        print(",".join(header))
        for row in rows:
            print(f"{row.d},{row.p},{row.k},{row.r},{int(row.design)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# ebr
# ---------------------------------------------------------------------------


def cmd_ebr(args) -> int:
    import numpy as np

    from . import io
    from .cdesigns import (
        CEnsemble,
        NotADesign,
        design_to_kraus,
        ebr_bound_table,
        mub_ensemble,
        sic_catalog,
    )

    d = args.d
    table = [
        {"bound": row.bound, "rule": row.rule, "constructive": row.constructive}
        for row in ebr_bound_table(d)
    ]
    witness_entry = None
    exit_code = EXIT_OK
    ens = None
    provenance = None
    if args.witness:
        loaded, _doc = io.load_design(args.witness)
        if not isinstance(loaded, CEnsemble):
            raise UsageError("ebr witness must be a complex design file")
        if loaded.d != d:
            print(f"witness dimension {loaded.d} != requested d = {d}")
            return EXIT_CLAIM
        ens, provenance = loaded, "witness-file"
    elif d in (2, 3):
        ens, provenance = sic_catalog(d), "sic-catalog"
    else:
        try:
            ens, provenance = mub_ensemble(d), "mub-catalog"
        except Exception:
            ens = None
    if ens is not None:
        try:
            _kraus, cert = design_to_kraus(ens, tol=args.tol, provenance=provenance)
            witness_entry = {
                "bound": cert.bound,
                "provenance": cert.provenance,
                "residuals": cert.residuals,
                "ok": cert.ok,
            }
        except NotADesign as exc:
            if args.witness:
                print(f"witness failed verification: {exc}")
                return EXIT_CLAIM
    best_recorded = min(t["bound"] for t in table) if table else None
    best_constructive = witness_entry["bound"] if witness_entry else None
    doc = {
        "format": io.FORMAT_VERSION,
        "kind": "ebr-certificate",
        "d": d,
        "best_constructive": best_constructive,
        "best_recorded": best_recorded,
        "witness": witness_entry,
        "table": table,
    }
    if args.out:
        io.save_json(args.out, doc)
        print(f"wrote {args.out}")
    if witness_entry:
        print(f"d = {d}: constructive bound {witness_entry['bound']} via {witness_entry['provenance']}")
    else:
        print(f"d = {d}: no constructive witness available")
    for t in table:
        tag = "constructive" if t["constructive"] else "recorded"
        print(f"  {t['bound']:>6}  {tag:<12} {t['rule']}")
    return exit_code


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def cmd_optimize(args) -> int:
    from . import io
    from .qdesigns import optimize_design

    best = None
    rows = []
    for seed in range(args.seeds):
        res = optimize_design(args.d, args.n, seed=seed, iters=args.iters)
        rows.extend((seed, i, p) for i, p in enumerate(res.trace))
        if best is None or res.gap < best.gap:
            best = res
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["seed", "iteration", "potential"])
            w.writerows(rows)
    if args.out:
        io.save_design(args.out, best.ensemble)
        print(f"wrote {args.out}")
    print(
        f"best of {args.seeds} seed(s): seed {best.seed}, potential {best.potential:.15g}, "
        f"bound {best.bound:.15g}, gap {best.gap:.3e}, "
        f"{'converged' if best.converged else 'not converged'}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def cmd_export(args) -> int:
    from . import io
    from .cdesigns import CEnsemble
    from .ffdesigns import DifferenceSet, FFEnsemble
    from .qdesigns import QEnsemble

    ens, doc = io.load_design(args.file)
    if args.format == "json":
        io.save_json(args.out, doc)
        print(f"wrote {args.out}")
        return EXIT_OK
    # CSV: one row per vector, flat real coordinates
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(ens, FFEnsemble):
            k = ens.ctx.deg
            w.writerow(["index"] + [f"e{i}_c{j}" for i in range(ens.d) for j in range(k)])
            for idx in range(ens.n):
                w.writerow([idx] + ens.data[idx].reshape(-1).tolist())
        elif isinstance(ens, CEnsemble):
            w.writerow(
                ["index", "weight"]
                + [f"{part}{i}" for i in range(ens.d) for part in ("re", "im")]
            )
            for idx in range(ens.n):
                flat = []
                for i in range(ens.d):
                    flat += [
                        repr(float(ens.vectors[idx, i].real)),
                        repr(float(ens.vectors[idx, i].imag)),
                    ]
                w.writerow([idx, repr(float(ens.weights[idx]))] + flat)
        elif isinstance(ens, QEnsemble):
            w.writerow(
                ["index"]
                + [f"e{i}_{c}" for i in range(ens.d) for c in ("w", "x", "y", "z")]
            )
            for idx in range(ens.n):
                w.writerow([idx] + [repr(float(v)) for v in ens.vectors[idx].reshape(-1)])
        elif isinstance(ens, DifferenceSet):
            w.writerow(["element"])
            for e in ens.elements:
                w.writerow([e])
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="designforge",
        description="Construct, verify, and export projective 2-designs "
        "over finite fields, the complex numbers, and the quaternions.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for the compiled kernels (default: DESIGNFORGE_THREADS or all cores)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a catalog design and write it to a file")
    c.add_argument("kind", choices=["gabor", "singer", "harmonic", "mub", "sic", "q-simplex"])
    c.add_argument("--p", type=int, help="field characteristic (gabor, harmonic)")
    c.add_argument("--k", type=int, help="base extension degree (gabor, harmonic)")
    c.add_argument("--r", type=int, help="difference-set order (gabor, singer, harmonic)")
    c.add_argument("--d", type=int, help="dimension (mub, sic)")
    c.add_argument("--out", required=True)
    c.set_defaults(fn=cmd_construct)

    v = sub.add_parser("verify", help="verify claims about a design file")
    v.add_argument("file")
    v.add_argument("--claims", required=True, help="comma-separated claim list")
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--cert", help="certificate output path (default: <file>.cert.json)")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("search", help="enumerate Gabor parameter triples")
    s.add_argument("--p-max", type=int, default=30, dest="p_max")
    s.add_argument("--k-max", type=int, default=600, dest="k_max")
    s.add_argument("--r-max", type=int, default=71, dest="r_max")
    s.add_argument("--csv", help="write CSV here instead of printing")
    s.set_defaults(fn=cmd_search)

    e = sub.add_parser("ebr", help="entanglement breaking rank bounds for depolarizing noise")
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--witness", help="complex design file to use as the constructive witness")
    e.add_argument("--tol", type=float, default=1e-9)
    e.add_argument("--out", help="write the ebr certificate JSON here")
    e.set_defaults(fn=cmd_ebr)

    o = sub.add_parser("optimize", help="search for quaternionic designs by gradient descent")
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--seeds", type=int, default=1)
    o.add_argument("--iters", type=int, default=2000)
    o.add_argument("--out", help="write the best ensemble here")
    o.add_argument("--trace", help="write the potential trace CSV here")
    o.set_defaults(fn=cmd_optimize)

    x = sub.add_parser("export", help="re-emit a design file as CSV or canonical JSON")
    x.add_argument("file")
    x.add_argument("--format", choices=["csv", "json"], default="csv")
    x.add_argument("--out", required=True)
    x.set_defaults(fn=cmd_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        os.environ["DESIGNFORGE_THREADS"] = str(args.threads)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:
        from . import io
        from .cdesigns import CDesignError, NotADesign
        from .ffcore import FactorizationBudgetExceeded, FieldError, SizeBudgetExceeded
        from .fflinalg import BudgetExceeded, LinalgError
        from .ffdesigns import DesignError
        from .qdesigns import QDesignError

        if isinstance(exc, (BudgetExceeded, SizeBudgetExceeded, FactorizationBudgetExceeded)):
            print(f"budget exceeded: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        if isinstance(exc, NotADesign):
            print(f"claim failed: {exc}", file=sys.stderr)
            return EXIT_CLAIM
        if isinstance(
            exc,
            (io.IoError, FieldError, LinalgError, DesignError, CDesignError, QDesignError, ValueError),
        ):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        raise


if __name__ == "__main__":
    sys.exit(main())
