"""Command-line front end.

Exit codes: 0 success (or the checked claim holds), 1 the checked property is
false, 2 usage or parse error, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import signal
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import glnf2, pds, qtransform as qt, repro, search
from .boolfun import (
    AnfSyntaxError, TruthTable, autocorrelation, from_anf, imbalance, is_bent, parse_anf,
    parse_vector, quad_classify, support, to_anf, vector_str, walsh_transform, weight,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

ENV_JOBS = "QBENT_JOBS"
ENV_CACHE = "QBENT_CACHE_DIR"


class BudgetExceeded(Exception):
    pass


class Result:
    """Payload plus optional CSV rows and plain-text rendering."""

    def __init__(self, payload: dict, code: int = EXIT_OK, rows: Optional[List[dict]] = None,
                 plain: Optional[str] = None):
        self.payload = payload
        self.code = code
        self.rows = rows
        self.plain = plain


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def render(res: Result, fmt: str) -> str:
    if fmt == "json":
        return dumps(res.payload)
    if fmt == "csv":
        rows = res.rows
        if rows is None:
            rows = [{"key": k, "value": v if not isinstance(v, (list, dict)) else dumps(v)}
                    for k, v in sorted(res.payload.items())]
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
        return buf.getvalue().rstrip("\n")
    if res.plain is not None:
        return res.plain
    return "\n".join(
        f"{k}: {v if not isinstance(v, (list, dict)) else dumps(v)}" for k, v in sorted(res.payload.items())
    )


# -- argument helpers ----------------------------------------------------------------


def _function(args, prefix: str = "") -> TruthTable:
    anf = getattr(args, f"{prefix}anf", None)
    tt = getattr(args, f"{prefix}tt", None)
    if (anf is None) == (tt is None):
        raise ValueError(f"give exactly one of --{prefix}anf or --{prefix}tt")
    if anf is not None:
        return from_anf(parse_anf(anf, args.n))
    return TruthTable.from_hex(tt, args.n)


def _add_f(p: argparse.ArgumentParser, n_required: bool = True):
    p.add_argument("--anf", help="function as ANF text, e.g. 'x1x2+x3'")
    p.add_argument("--tt", help="function as big-endian hex truth table")
    p.add_argument("--n", type=int, required=n_required)


def _add_q(p: argparse.ArgumentParser):
    p.add_argument("--q-anf", dest="q_anf", help="q as ANF text")
    p.add_argument("--q-tt", dest="q_tt", help="q as hex truth table")


def _q(args) -> TruthTable:
    return _function(args, "q_")


def _matrix(text: str, n: int) -> glnf2.BitMatrix:
    if text.strip().lower() in ("0", "zero"):
        return glnf2.BitMatrix.zero(n)
    if text.strip().lower() in ("i", "identity"):
        return glnf2.BitMatrix.identity(n)
    m = glnf2.BitMatrix.from_text(text.replace(",", "\n").replace(";", "\n"))
    if m.n != n:
        raise ValueError("matrix size does not match --n")
    return m


def _fdesc(f: TruthTable) -> dict:
    return {"n": f.n, "hex": f.to_hex(), "anf": str(to_anf(f))}


# -- fn ---------------------------------------------------------------------------


def cmd_fn(args, cfg) -> Result:
    f = _function(args)
    c = args.cmd
    if c == "eval":
        if args.point is not None:
            a = parse_vector(args.point, f.n)
            return Result({"f": _fdesc(f), "point": args.point, "value": f(a)}, plain=str(f(a)))
        rows = [{"a": vector_str(a, f.n), "f": f(a)} for a in range(f.size)]
        return Result({"f": _fdesc(f), "table": f.to_bitstring()}, rows=rows,
                      plain="\n".join(f"{r['a']} {r['f']}" for r in rows))
    if c == "weight":
        return Result({"f": _fdesc(f), "weight": weight(f)}, plain=str(weight(f)))
    if c == "support":
        sup = [vector_str(a, f.n) for a in sorted(support(f))]
        return Result({"f": _fdesc(f), "support": sup}, rows=[{"a": s} for s in sup], plain="\n".join(sup))
    if c == "imbalance":
        return Result({"f": _fdesc(f), "imbalance": imbalance(f)}, plain=str(imbalance(f)))
    if c == "anf":
        p = to_anf(f)
        return Result({"f": _fdesc(f), "anf": str(p), "degree": p.degree,
                       "monomials": sorted(sorted(m) for m in p.monomials)}, plain=str(p))
    if c == "wht":
        spec = walsh_transform(f).coeffs
        rows = [{"v": vector_str(v, f.n), "W": w} for v, w in enumerate(spec)]
        return Result({"f": _fdesc(f), "coeffs": list(spec), "bent": is_bent(f)}, rows=rows,
                      plain="\n".join(f"{r['v']} {r['W']}" for r in rows))
    if c == "is-bent":
        b = is_bent(f)
        return Result({"f": _fdesc(f), "bent": b}, EXIT_OK if b else EXIT_FALSE, plain=str(b))
    if c == "autocorr":
        ac = autocorrelation(f)
        return Result({"f": _fdesc(f), "autocorrelation": list(ac)},
                      rows=[{"e": vector_str(e, f.n), "r": r} for e, r in enumerate(ac)])
    if c == "classify-quad":
        qc = quad_classify(f)
        return Result({"f": _fdesc(f), "rank": qc.rank, "type": qc.form_type,
                       "predicted_imbalance": qc.predicted_imbalance, "imbalance": imbalance(f)},
                      plain=f"rank {qc.rank} type {qc.form_type} imbalance {qc.predicted_imbalance}")
    raise ValueError(c)


# -- gl ---------------------------------------------------------------------------


def cmd_gl(args, cfg) -> Result:
    c = args.cmd
    if c == "order":
        N = glnf2.gl_order(args.n)
        return Result({"n": args.n, "order": qt.json_int(N)}, plain=str(N))
    if c == "enumerate":
        if cfg.cache_dir:
            rows_arr = glnf2.cached_gl_rows(args.n, cfg.cache_dir)
        else:
            rows_arr = glnf2.gl_rows(args.n)
        if args.first_row is not None:
            rows_arr = rows_arr[rows_arr[:, 0] == parse_vector(args.first_row, args.n)]
        total = int(rows_arr.shape[0])
        shown = rows_arr if args.limit is None else rows_arr[: args.limit]
        mats = [[vector_str(int(r), args.n) for r in m] for m in shown]
        return Result({"n": args.n, "count": total, "matrices": mats},
                      rows=[{"index": i, "rows": " ".join(m)} for i, m in enumerate(mats)],
                      plain="\n\n".join("\n".join(m) for m in mats) + f"\n# count {total}")
    if c == "sample":
        seed = cfg.seed if cfg.seed is not None else 0
        gen = glnf2.gl_sampler(args.n, seed)
        mats = [[vector_str(r, args.n) for r in next(gen).rows] for _ in range(args.count)]
        return Result({"n": args.n, "seed": seed, "matrices": mats},
                      rows=[{"index": i, "rows": " ".join(m)} for i, m in enumerate(mats)],
                      plain="\n\n".join("\n".join(m) for m in mats))
    if c == "cache":
        if not cfg.cache_dir:
            raise ValueError("set --cache-dir or QBENT_CACHE_DIR")
        path = glnf2.save_gl_cache(Path(cfg.cache_dir) / f"gl{args.n}.glnf2", args.n)
        return Result({"n": args.n, "path": str(path), "count": glnf2.gl_order(args.n)}, plain=str(path))
    raise ValueError(c)


# -- qt ---------------------------------------------------------------------------


def cmd_qt(args, cfg) -> Result:
    c = args.cmd
    if c == "admissible":
        vals = sorted(qt.admissible_values(args.n, args.delta, args.parity))
        return Result({"n": args.n, "delta": args.delta, "parity": args.parity, "values": vals},
                      plain="{" + ",".join(map(str, vals)) + "}")
    if c == "nonexist":
        v = qt.nonexistence_by_parity(args.n, args.delta, args.parity, q_affine=args.q_affine)
        return Result({"n": args.n, "delta": args.delta, "parity": args.parity, "verdict": v.verdict,
                       "admissible": sorted(v.admissible), "reason": v.reason},
                      plain=f"{v.verdict}: {v.reason}")
    f, q = _function(args), _q(args)
    base = {"f": _fdesc(f), "q": _fdesc(q)}
    if c == "coeff":
        A = _matrix(args.matrix, args.n)
        w = qt.q_coeff(f, q, A)
        return Result({**base, "matrix": [vector_str(r, args.n) for r in A.rows], "value": w}, plain=str(w))
    if c == "spectrum":
        spec = qt.q_spectrum(f, q, cfg.jobs)
        rows = [{"value": v, "count": cnt} for v, cnt in spec.histogram]
        return Result(spec.to_json(f, q), rows=rows, plain=(
            f"|W| values: {{{','.join(map(str, sorted(spec.abs_values())))}}}\nzero_coeff: {spec.zero_coeff}\n"
            + "\n".join(f"{v} {cnt}" for v, cnt in spec.histogram)))
    if c == "bentness":
        rep = qt.q_bentness(f, q, args.abort_above)
        payload = {**base, "delta": rep.delta, "exceeded": rep.exceeded,
                   "witness_worst": [vector_str(r, args.n) for r in rep.witness_worst.rows],
                   "matrices_examined": rep.matrices_examined}
        code = EXIT_OK
        if args.delta is not None:
            payload["is_delta_almost_q_bent"] = (not rep.exceeded) and rep.delta <= args.delta
            code = EXIT_OK if payload["is_delta_almost_q_bent"] else EXIT_FALSE
        return Result(payload, code, plain=f"delta {rep.delta}" + (" (lower bound)" if rep.exceeded else ""))
    if c == "is-q-bent":
        b = qt.is_q_bent(f, q)
        return Result({**base, "q_bent": b}, EXIT_OK if b else EXIT_FALSE, plain=str(b))
    if c == "expectation":
        ep = qt.expectation_prime_sq(f, q)
        eo = qt.expectation_omega_sq(f, q)
        formula = qt.expectation_prime_formula(f)
        payload = {**base, "e_prime": str(ep), "e_omega": str(eo), "e_prime_formula": str(formula),
                   "identities_hold": ep == formula and eo == (1 << args.n)}
        return Result(payload, EXIT_OK if payload["identities_hold"] else EXIT_FALSE,
                      plain=f"E' = {ep}\nE = {eo}")
    if c == "overlap":
        lo, hi = qt.support_overlap_range(f, q)
        return Result({**base, "min_overlap": lo, "max_overlap": hi}, plain=f"{lo} {hi}")
    if c == "estimate":
        seed = cfg.seed if cfg.seed is not None else 0
        est = qt.estimate_spectrum(f, q, args.samples, seed)
        return Result({**base, "samples": est.samples, "seed": seed, "zero_coeff": est.zero_coeff,
                       "histogram": [list(h) for h in est.histogram], "mean_sq": est.mean_sq,
                       "ci95": list(est.ci95), "exact_e_prime": str(est.expected_mean_sq),
                       "estimate": True},
                      plain=f"E'[W^2] ~ {est.mean_sq:.3f} (95% CI {est.ci95[0]:.3f}..{est.ci95[1]:.3f})")
    raise ValueError(c)


# -- pds --------------------------------------------------------------------------


def _report_json(rep: pds.PdsReport, n: int) -> dict:
    out = {"is_pds": rep.is_pds, "regular": rep.regular, "trivial": rep.trivial,
           "degenerate": rep.degenerate,
           "params": list(rep.params.as_tuple()) if rep.params else None,
           "offending_element": vector_str(rep.offending_element, n) if rep.offending_element is not None else None}
    return out


def _read_set(args) -> frozenset:
    if args.set is not None:
        return pds.parse_set(args.set, args.n)
    if args.file is not None:
        return pds.parse_set(Path(args.file).read_text(), args.n)
    if getattr(args, "anf", None) or getattr(args, "tt", None):
        return support(_function(args))
    raise ValueError("give --set, --file, or a function whose support is used")


def cmd_pds(args, cfg) -> Result:
    c = args.cmd
    if c == "diff":
        D = _read_set(args)
        d = pds.difference_function(D, args.n)
        return Result({"n": args.n, "set": pds.format_set(D, args.n), "d": list(d)},
                      rows=[{"e": vector_str(e, args.n), "d": x} for e, x in enumerate(d)],
                      plain="\n".join(f"{vector_str(e, args.n)} {x}" for e, x in enumerate(d)))
    if c == "check":
        D = _read_set(args)
        rep = pds.pds_check(D, args.n)
        return Result({"n": args.n, "set": pds.format_set(D, args.n), **_report_json(rep, args.n)},
                      EXIT_OK if rep.is_pds else EXIT_FALSE,
                      plain=f"PDS {rep.params.as_tuple()}" if rep.is_pds else "not a PDS")
    if c == "closure":
        D = _read_set(args)
        out = pds.pds_closure(D, args.n)
        items = {name: {"set": pds.format_set(s, args.n), **_report_json(r, args.n)} for name, (s, r) in out.items()}
        ok = all(r.is_pds for _, r in out.values())
        return Result({"n": args.n, "closure": items, "all_pds": ok}, EXIT_OK if ok else EXIT_FALSE,
                      rows=[{"name": k, "is_pds": v["is_pds"], "params": v["params"]} for k, v in items.items()])
    if c == "feasible":
        params = pds.PdsParams(args.v, args.k, args.lam, args.mu)
        viol = pds.lemma2_check(params)
        payload = {"params": list(params.as_tuple()), "delta": params.delta_val, "violations": viol}
        if args.n is not None and args.lam != args.mu:
            r = pds.lemma_prop1_check(args.n, params)
            payload["two_group"] = {"delta_is_4power": r.delta_is_4power, "m": r.m,
                                    "valuation_ok": r.valuation_ok, "ell": r.ell, "valuation": r.valuation}
            ok = not viol and r.ok
        else:
            ok = not viol
        payload["consistent"] = ok
        return Result(payload, EXIT_OK if ok else EXIT_FALSE,
                      plain="consistent" if ok else "violated: " + ", ".join(viol or ["two-group conditions"]))
    if c == "scan-theorem3":
        signs = [args.sign] if args.sign else [pds.PLUS, pds.MINUS]
        reps = [pds.theorem3_scan(args.n, s, args.mode) for s in signs]
        ok = all(r.verdict == pds.NONEXISTENT for r in reps)
        payload = {"n": args.n, "verdict": pds.NONEXISTENT if ok else pds.SURVIVORS_FOUND,
                   "scans": [r.to_json() for r in reps]}
        plain = "\n".join(f"{r.sign} k={r.k}: {r.verdict}, survivors {len(r.survivors)}, scanned {r.scanned}"
                          for r in reps)
        return Result(payload, EXIT_OK if ok else EXIT_FALSE, plain=plain,
                      rows=[{"sign": r.sign, "k": r.k, "verdict": r.verdict, "survivors": len(r.survivors),
                             "scanned": r.scanned} for r in reps])
    if c == "certify-main":
        cert = pds.main_theorem_certificate(args.n, args.mode)
        return Result(cert, EXIT_OK if cert["verdict"] == "PROVED" else EXIT_FALSE, plain=cert["verdict"])
    raise ValueError(c)


# -- search -----------------------------------------------------------------------


def _weight_filter(args):
    if args.weights:
        return frozenset(int(w) for w in args.weights.split(","))
    return args.parity


def cmd_search(args, cfg) -> Result:
    c = args.cmd
    if c == "pds-bruteforce":
        found = search.pds_bruteforce(args.n, args.k, not args.allow_equal, args.max_subsets)
        items = [{"set": pds.format_set(p.elements, args.n), "params": list(p.report.params.as_tuple())}
                 for p in found]
        return Result({"n": args.n, "k": args.k, "require_lambda_ne_mu": not args.allow_equal,
                       "count": len(found), "found": items},
                      rows=[{"set": " ".join(i["set"]), "params": i["params"]} for i in items],
                      plain=f"{len(found)} PDS found")
    q = _q(args)
    if c == "almost":
        task = search.SearchTask(q, args.delta, _weight_filter(args), args.symmetry, cfg.jobs,
                                 args.max_witnesses, args.max_candidates)
        sink = open(args.out, "a") if args.out else None
        resume = json.loads(Path(args.checkpoint).read_text()) if args.checkpoint and Path(args.checkpoint).exists() else None

        def on_witness(f):
            if sink:
                spec = qt.q_spectrum(f, q)
                sink.write(dumps({"f": f.to_hex(), "weight": weight(f), "abs_values": sorted(spec.abs_values())}) + "\n")

        def on_checkpoint(state):
            if args.checkpoint:
                Path(args.checkpoint).write_text(dumps(state))

        try:
            out = search.find_almost_q_bent(task, on_witness if sink else None, resume, on_checkpoint)
        finally:
            if sink:
                sink.close()
        payload = {"q": _fdesc(q), "delta": args.delta, **out.to_json()}
        return Result(payload, rows=[{"f": w} for w in payload["witnesses"]],
                      plain=f"{out.witness_count} witnesses, {out.functions_scanned} scanned")
    if c == "bendability":
        res = search.bendability(q, args.max_delta, cfg.jobs)
        return Result({"q": _fdesc(q), **res.to_json()}, EXIT_FALSE if res.exceeded else EXIT_OK,
                      rows=list(res.log), plain=str(res.to_json()["bendability"]))
    if c == "quad-table":
        rows = [r.to_json() for r in search.quadratic_bentness_table(q, args.n)]
        return Result({"q": _fdesc(q), "rows": rows}, rows=rows,
                      plain="\n".join(f"r={r['rank']} {r['type']}: measured {r['measured_delta']}, "
                                      f"formula {r['formula_delta']}, rank rule {r['rank_rule_delta']}"
                                      for r in rows))
    raise ValueError(c)


# -- repro ------------------------------------------------------------------------


def cmd_repro(args, cfg) -> Result:
    fn = repro.RECIPES[args.cmd]
    if args.cmd in ("example1", "example2"):
        r = fn(cfg.jobs)
    elif args.cmd == "example3":
        r = fn(include_n5=args.n5)
    else:
        r = fn(args.max_n)
    plain = "\n".join(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: expected {c.expected}, observed {c.observed}"
                      for c in r.claims) + f"\n{'PASS' if r.passed else 'FAIL'}"
    return Result(r.to_json(), EXIT_OK if r.passed else EXIT_FALSE,
                  rows=[{"claim": c.name, "passed": c.passed} for c in r.claims], plain=plain)


# -- parser -----------------------------------------------------------------------


class Config:
    def __init__(self, args):
        jobs = args.jobs if args.jobs is not None else os.environ.get(ENV_JOBS)
        self.jobs = int(jobs) if jobs is not None else (os.cpu_count() or 1)
        if self.jobs < 1:
            raise ValueError("--jobs must be >= 1")
        self.format = args.format or "json"
        self.seed = args.seed
        self.cache_dir = args.cache_dir or os.environ.get(ENV_CACHE)
        self.budget_secs = args.budget_secs


def _global_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "csv", "plain"])
    p.add_argument("--jobs", type=int, help=f"worker count (default: ${ENV_JOBS} or logical cores)")
    p.add_argument("--seed", type=int)
    p.add_argument("--cache-dir", dest="cache_dir", help=f"GL enumeration cache (default: ${ENV_CACHE})")
    p.add_argument("--budget-secs", dest="budget_secs", type=float, help="soft time limit; exit 3 when exceeded")


# Global flags are accepted before or after the subcommand.
_COMMON = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
_global_flags(_COMMON)


def _leaf(sub, name: str) -> argparse.ArgumentParser:
    return sub.add_parser(name, parents=[_COMMON])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qbent", description="q-transforms of Boolean functions over GL_n(F_2)")
    _global_flags(p)
    groups = p.add_subparsers(dest="group", required=True)

    g = groups.add_parser("fn", help="single Boolean functions").add_subparsers(dest="cmd", required=True)
    for name in ("eval", "weight", "support", "imbalance", "anf", "wht", "is-bent", "autocorr", "classify-quad"):
        sp = _leaf(g, name)
        _add_f(sp)
        if name == "eval":
            sp.add_argument("--point", help="a_1...a_n; omit for the whole table")

    g = groups.add_parser("gl", help="GL_n(F_2)").add_subparsers(dest="cmd", required=True)
    sp = _leaf(g, "order")
    sp.add_argument("--n", type=int, required=True)
    sp = _leaf(g, "enumerate")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--first-row", dest="first_row")
    sp.add_argument("--limit", type=int)
    sp = _leaf(g, "sample")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp = _leaf(g, "cache")
    sp.add_argument("--n", type=int, required=True)

    g = groups.add_parser("qt", help="q-transform").add_subparsers(dest="cmd", required=True)
    for name in ("coeff", "spectrum", "bentness", "is-q-bent", "expectation", "overlap", "estimate"):
        sp = _leaf(g, name)
        _add_f(sp)
        _add_q(sp)
        if name == "coeff":
            sp.add_argument("--matrix", required=True, help="rows like '0110,1000,...', 'identity' or 'zero'")
        if name == "bentness":
            sp.add_argument("--abort-above", dest="abort_above", type=int)
            sp.add_argument("--delta", type=int, help="check delta-almost q-bentness")
        if name == "estimate":
            sp.add_argument("--samples", type=int, default=10000)
    for name in ("admissible", "nonexist"):
        sp = _leaf(g, name)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--delta", type=int, required=True)
        sp.add_argument("--parity", choices=[qt.EVEN, qt.ODD], required=True)
        if name == "nonexist":
            sp.add_argument("--q-affine", dest="q_affine", action="store_true")

    g = groups.add_parser("pds", help="partial difference sets").add_subparsers(dest="cmd", required=True)
    for name in ("diff", "check", "closure"):
        sp = _leaf(g, name)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--set", help="comma or newline separated vectors, or 0x-prefixed hex bitset")
        sp.add_argument("--file")
        sp.add_argument("--anf", help="use the support of this function")
        sp.add_argument("--tt")
    sp = _leaf(g, "feasible")
    for k in ("v", "k", "lam", "mu"):
        sp.add_argument(f"--{k}", type=int, required=True)
    sp.add_argument("--n", type=int, help="also apply the 2-group conditions with v = 2^n")
    sp = _leaf(g, "scan-theorem3")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--sign", choices=[pds.PLUS, pds.MINUS])
    sp.add_argument("--mode", choices=["auto", "exhaustive", "full", "reduced"], default="auto")
    sp = _leaf(g, "certify-main")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=["auto", "exhaustive", "full", "reduced"], default="auto")

    g = groups.add_parser("search", help="exhaustive searches").add_subparsers(dest="cmd", required=True)
    sp = _leaf(g, "almost")
    sp.add_argument("--n", type=int, required=True)
    _add_q(sp)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--parity", choices=[qt.EVEN, qt.ODD])
    sp.add_argument("--weights", help="comma separated weights")
    sp.add_argument("--symmetry", action="store_true", help="quotient by f <-> f+1")
    sp.add_argument("--max-witnesses", dest="max_witnesses", type=int)
    sp.add_argument("--max-candidates", dest="max_candidates", type=int, default=search.DEFAULT_BUDGET)
    sp.add_argument("--out", help="append witnesses as JSON lines")
    sp.add_argument("--checkpoint", help="resume file: combinations done per weight")
    sp = _leaf(g, "bendability")
    sp.add_argument("--n", type=int, required=True)
    _add_q(sp)
    sp.add_argument("--max-delta", dest="max_delta", type=int, default=8)
    sp = _leaf(g, "pds-bruteforce")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--allow-equal", dest="allow_equal", action="store_true", help="keep lambda = mu")
    sp.add_argument("--max-subsets", dest="max_subsets", type=int, default=1 << 20)
    sp = _leaf(g, "quad-table")
    sp.add_argument("--n", type=int, required=True)
    _add_q(sp)

    g = groups.add_parser("repro", help="reproduce worked examples and scans").add_subparsers(dest="cmd", required=True)
    _leaf(g, "example1")
    _leaf(g, "example2")
    sp = _leaf(g, "example3")
    sp.add_argument("--n5", action="store_true", help="also run n = 5 (slow)")
    sp = _leaf(g, "theorem3")
    sp.add_argument("--max-n", dest="max_n", type=int, default=20)
    return p


HANDLERS: Dict[str, Callable] = {
    "fn": cmd_fn, "gl": cmd_gl, "qt": cmd_qt, "pds": cmd_pds, "search": cmd_search, "repro": cmd_repro,
}


def _alarm(signum, frame):
    raise BudgetExceeded()


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    try:
        cfg = Config(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.budget_secs:
        signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, cfg.budget_secs)
    try:
        res = HANDLERS[args.group](args, cfg)
    except (BudgetExceeded, search.SearchTooLarge) as e:
        print(f"error: resource budget exceeded {e}".rstrip(), file=sys.stderr)
        return EXIT_BUDGET
    except (AnfSyntaxError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if cfg.budget_secs:
            signal.setitimer(signal.ITIMER_REAL, 0)
    print(render(res, cfg.format), file=out)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
