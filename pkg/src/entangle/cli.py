"""Command-line entry point: ``entangle {gen,check,witness,distill,sweep}``.

Exit status 0 means a result was computed (inconclusive verdicts included);
2 means the input could not be used.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from typing import Sequence

import numpy as np

from . import io
from .distill import DEFAULT_RESTARTS as DISTILL_RESTARTS
from .distill import werner_scan
from .product_opt import DEFAULT_RESTARTS
from .separability import (
    Verdict,
    _jsonable,
    binary_mixture_check,
    lemma1_check,
    ppt_check,
    rank_criterion_check,
    reduction_check,
)
from .states import (
    WernerParams,
    max_entangled,
    maximally_mixed,
    random_product_vector,
    random_separable_state,
    random_state,
    tiles_upb_state,
    werner_state,
)
from .tensor import BipartiteState, DimensionError, StateValidationError, ToleranceConfig
from .witness import WitnessConstructionError, build_edge_witness, build_lemma1_witness, evaluate_witness

CRITERIA = ("ppt", "reduction", "rank", "lemma1", "binary")
SWEEP_COLUMNS = ("beta", "K", "min_value", "verdict", "ppt", "restarts", "converged_fraction")


class UsageError(ValueError):
    pass


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _tolerances(args) -> ToleranceConfig:
    return ToleranceConfig(args.tol_psd, args.tol_rank, args.tol_zero)


def _provenance(args, tol: ToleranceConfig, **extra) -> dict:
    out = {"seed": args.seed, "tolerances": {"tol_psd": tol.tol_psd, "tol_rank": tol.tol_rank, "tol_zero": tol.tol_zero}}
    out.update(extra)
    return out


def parse_beta_range(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"--beta-range expects lo:hi:steps, got {text!r}") from None
    if steps < 1 or hi < lo:
        raise UsageError("--beta-range needs steps >= 1 and hi >= lo")
    return np.linspace(lo, hi, steps)


def _betas(args) -> np.ndarray:
    if (args.beta is None) == (args.beta_range is None):
        raise UsageError("give exactly one of --beta or --beta-range")
    return np.array([args.beta]) if args.beta is not None else parse_beta_range(args.beta_range)


# --- gen ---------------------------------------------------------------------

def _gen(args) -> int:
    meta = {"family": args.family, "seed": args.seed}
    fam = args.family
    if fam == "werner":
        if (args.alpha is None) == (args.beta is None):
            raise UsageError("werner needs exactly one of --alpha or --beta")
        params = WernerParams(args.n, args.alpha) if args.alpha is not None else WernerParams.from_beta(args.n, args.beta)
        state = werner_state(params)
        meta.update(n=args.n, alpha=params.alpha, beta=params.beta)
    elif fam == "tiles":
        state = tiles_upb_state()
    elif fam == "max-entangled":
        v = max_entangled(args.n)
        state = BipartiteState(np.outer(v, v.conj()), args.n, args.n)
        meta.update(n=args.n)
    elif fam == "maximally-mixed":
        state = maximally_mixed(args.m, args.n)
    elif fam == "random":
        state = random_state(args.m, args.n, args.rank, seed=args.seed)
        meta.update(rank=args.rank)
    elif fam == "product":
        state = BipartiteState(random_product_vector(args.m, args.n, seed=args.seed).projector(), args.m, args.n)
    elif fam == "random-separable":
        terms = args.rank or args.m * args.n
        state = random_separable_state(args.m, args.n, terms, seed=args.seed)[0]
        meta.update(terms=terms)
    else:  # argparse restricts choices
        raise UsageError(f"unknown family {fam}")
    _emit(io.dumps(io.state_to_json(state, meta)) + "\n", args.output)
    return 0


# --- check -------------------------------------------------------------------

def _binary(state, tol) -> Verdict:
    verdict, sols = binary_mixture_check(state, tol)
    details = dict(verdict.details)
    details["solutions"] = [
        {"branch": s.branch, "p": s.p, "scale": s.scale, "separable": s.separable,
         "reconstruction_error": s.reconstruction_error}
        for s in sols
    ]
    return Verdict(verdict.status, verdict.criterion, verdict.margin, details)


def _check(args) -> int:
    tol = _tolerances(args)
    state = io.load_state(args.state, tol)
    chosen = args.criterion or ["all"]
    names = list(CRITERIA) if "all" in chosen else list(dict.fromkeys(chosen))
    verdicts = []
    for name in names:
        if name == "ppt":
            v = ppt_check(state, tol)
        elif name == "reduction":
            v = reduction_check(state, tol)
        elif name == "rank":
            v = rank_criterion_check(state, tol)
        elif name == "lemma1":
            v = lemma1_check(state, restarts=args.restarts, seed=args.seed, tol=tol)
        else:
            v = _binary(state, tol)
        verdicts.append(v.to_dict())
    out = {
        "dims": list(state.dims),
        "verdicts": verdicts,
        "provenance": _provenance(args, tol, restarts=args.restarts),
    }
    if len(verdicts) == 1:
        out["status"] = verdicts[0]["status"]
    _emit(io.dumps(out) + "\n", args.output)
    return 0


# --- witness -----------------------------------------------------------------

def _witness(args) -> int:
    tol = _tolerances(args)
    state = io.load_state(args.state, tol)
    build = build_edge_witness if args.kind == "edge" else build_lemma1_witness
    w = build(state, restarts=args.restarts, seed=args.seed, tol=tol)
    obj = io.matrix_to_json(w.e_matrix)
    obj["dim_a"], obj["dim_b"] = w.dims
    obj["metadata"] = _jsonable({
        "construction": w.construction,
        "epsilon": w.epsilon,
        "confidence": w.confidence,
        "degenerate": w.degenerate,
        "value_on_state": evaluate_witness(w, state),
        **w.metadata,
        **_provenance(args, tol, restarts=args.restarts),
    })
    _emit(io.dumps(obj) + "\n", args.output)
    return 0


# --- distill / sweep -----------------------------------------------------------

def _label(point) -> str:
    return f"{point.k}-distillable" if point.distillable else "no negative value found"


def _scan(args, copies: Sequence[int]):
    betas = _betas(args)
    rows = []
    for k in copies:
        restarts = args.restarts or DISTILL_RESTARTS.get(k, 64)
        rows.extend(werner_scan(args.n, betas, k, restarts=restarts, seed=args.seed))
    return rows


def _csv(points) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for p in points:
        if p.beta <= 1:
            verdict = "ppt"
        elif p.distillable:
            verdict = "distillable"
        else:
            verdict = "no_negative_found"
        writer.writerow([repr(p.beta), p.k, repr(p.min_value), verdict, p.beta <= 1,
                         p.restarts, repr(p.converged_fraction)])
    return buf.getvalue()


def _distill(args) -> int:
    points = _scan(args, [args.copies])
    records = []
    for p in points:
        rec = p.to_dict()
        pair = p.minimizer
        rec.update(n=args.n, label=_label(p), seed=args.seed,
                   schmidt=[[float(np.real(z)), float(np.imag(z))] for z in (pair.a, pair.b)])
        records.append(_jsonable(rec))
    _emit(io.dumps(records if len(records) > 1 else records[0]) + "\n", args.output)
    if args.csv:
        _emit(_csv(points), args.csv)
    return 0


def _sweep(args) -> int:
    try:
        copies = [int(k) for k in args.copies.split(",") if k.strip()]
    except ValueError:
        raise UsageError(f"--copies expects a comma-separated list, got {args.copies!r}") from None
    if not copies:
        raise UsageError("empty --copies list")
    _emit(_csv(_scan(args, copies)), args.output)
    return 0


# --- parser ------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, restarts_default) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=restarts_default)
    p.add_argument("--tol-psd", type=float, default=1e-9)
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--tol-zero", type=float, default=1e-9)
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entangle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a state JSON")
    g.add_argument("--family", required=True,
                   choices=["werner", "tiles", "max-entangled", "maximally-mixed", "random", "product", "random-separable"])
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--m", type=int, default=3)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--rank", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=_gen)

    c = sub.add_parser("check", help="run separability criteria on a state JSON")
    c.add_argument("state")
    c.add_argument("--criterion", action="append", choices=[*CRITERIA, "all"])
    _add_common(c, DEFAULT_RESTARTS)
    c.set_defaults(func=_check)

    w = sub.add_parser("witness", help="build a witness for a state JSON")
    w.add_argument("state")
    w.add_argument("--kind", choices=["edge", "lemma1"], default="edge")
    _add_common(w, DEFAULT_RESTARTS)
    w.set_defaults(func=_witness)

    d = sub.add_parser("distill", help="K-copy minimization for the Werner family")
    d.add_argument("--n", type=int, default=3)
    d.add_argument("--beta", type=float)
    d.add_argument("--beta-range")
    d.add_argument("--copies", type=int, default=1)
    d.add_argument("--csv", help="also write a CSV table here")
    _add_common(d, None)
    d.set_defaults(func=_distill)

    s = sub.add_parser("sweep", help="CSV table over beta and K")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--beta", type=float)
    s.add_argument("--beta-range")
    s.add_argument("--copies", default="1", help="comma-separated list of K")
    _add_common(s, None)
    s.set_defaults(func=_sweep)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StateValidationError as exc:
        print(f"error: invalid state ({exc.invariant}): {exc}", file=sys.stderr)
    except io.MatrixFormatError as exc:
        print(f"error: malformed matrix: {exc}", file=sys.stderr)
    except WitnessConstructionError as exc:
        print(f"error: witness not constructed: {exc}", file=sys.stderr)
    except (UsageError, DimensionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
