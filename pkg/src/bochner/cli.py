"""Command-line entry point.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input,
3 curvature symmetry validation failed, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import curvature, hodge, pinching, stochastic, weitzenbock
from .errors import DomainError, NumericError, SymmetryError
from .multiindex import overlap_matrix, perron_eigenvalue

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3, 4


class CheckFailed(Exception):
    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


# ---------------------------------------------------------------------------
# fixed-format JSON
# ---------------------------------------------------------------------------


def _fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(payload, output):
    text = dumps(payload) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path):
    if path is None:
        raise DomainError("--input is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {path}: {exc}") from exc


def _load_tensor(path):
    R = curvature.from_json_dict(_read_json(path))
    return curvature.require_valid(R)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_rp(args):
    R = _load_tensor(args.input)
    p = args.p
    if p is None or not 0 <= p <= R.n:
        raise DomainError(f"--p must lie in [0, {R.n}]")
    op = weitzenbock.assemble(R, p)
    w = weitzenbock.eigenvalues(op)
    lemma = None
    if 2 <= p <= R.n - 2:
        rep = weitzenbock.check_lemma31(R, p, op)
        lemma = {
            "sparsity_max": rep.sparsity_max,
            "sparsity_ok": rep.sparsity_ok,
            "identity_max_defect": rep.identity_max_defect,
            "identity_ok": rep.identity_ok,
            "identity_cases": rep.identity_cases,
        }
    payload = {
        "command": "rp",
        "parameters": {"input": str(args.input), "p": p},
        "operator": op.to_json_dict(),
        "min_eigenvalue": float(w[0]),
        "max_eigenvalue": float(w[-1]),
        "spectrum": w,
        "lemma31": lemma,
    }
    if lemma is not None and not (lemma["sparsity_ok"] and lemma["identity_ok"]):
        raise CheckFailed(payload)
    return payload


def cmd_pinch(args):
    R = _load_tensor(args.input)
    p = args.p
    if p is None or not 2 <= p <= R.n - 2:
        raise DomainError(f"--p must lie in [2, {R.n - 2}] for n={R.n}")
    rep = pinching.is_pinched(R, p, restarts=args.restarts, seed=args.seed)
    lam = weitzenbock.min_eigenvalue(weitzenbock.assemble(R, p))
    out = rep.to_dict()
    out["C_exact"] = str(pinching.pinch_constant(R.n, p, exact=True))
    out["min_eigenvalue"] = lam
    payload = {
        "command": "pinch",
        "parameters": {"input": str(args.input), "p": p, "restarts": args.restarts, "seed": args.seed},
        "report": out,
    }
    bound = rep.corollary_bound()
    if rep.pinched and (lam <= 0 or lam < bound - 1e-8):
        raise CheckFailed(payload)
    return payload


def cmd_example(args):
    a = 1.0 if args.a is None else args.a
    if a <= 0:
        raise DomainError("--a must be positive")
    rep = pinching.product_example(a, restarts=args.restarts, seed=args.seed)
    payload = {
        "command": "example",
        "parameters": {"a": a, "restarts": args.restarts, "seed": args.seed},
        "report": rep.to_dict(),
    }
    if not rep.ok:
        raise CheckFailed(payload)
    return payload


def _stochastic_config(args):
    cfg = _read_json(args.input) if args.input else {}
    if not isinstance(cfg, dict):
        raise DomainError("config must be a JSON object")
    params = {
        "model": cfg.get("model", "sphere2"),
        "f": cfg.get("f", 1.0),
        "T": args.T if args.T is not None else cfg.get("T", stochastic.DEFAULT_T),
        "dt": args.dt if args.dt is not None else cfg.get("dt", stochastic.DEFAULT_DT),
        "N": args.N if args.N is not None else cfg.get("N", stochastic.DEFAULT_N),
        "seed": args.seed_given if args.seed_given is not None else cfg.get("seed"),
        "x0": cfg.get("x0"),
        "p": args.p if args.p is not None else cfg.get("p"),
        "workers": args.workers,
    }
    if params["seed"] is None:
        raise DomainError("a seed is required (config 'seed' or --seed)")
    try:
        params["T"], params["dt"] = float(params["T"]), float(params["dt"])
        params["N"], params["seed"] = int(params["N"]), int(params["seed"])
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad numeric parameter: {exc}") from exc
    model = stochastic.model_from_spec(params["model"])
    f = stochastic.field_from_spec(params["f"], model)
    return params, model, f


def _echo(params):
    return {k: v for k, v in params.items() if k != "workers"}


def _write_curve(args, text):
    path = args.curve
    if path is None and args.output:
        path = str(Path(args.output).with_suffix(".csv"))
    if path:
        Path(path).write_text(text)
    return path


def cmd_ssp(args):
    params, model, f = _stochastic_config(args)
    est = stochastic.ssp_rate(
        model, f, x0=params["x0"], T=params["T"], dt=params["dt"], N=params["N"],
        seed=params["seed"], workers=params["workers"], curve_points=args.curve_points,
    )
    bound, bound_se = stochastic.lambda0_lower_bound(est)
    curve_path = _write_curve(args, est.curve_csv())
    return {
        "command": "ssp",
        "parameters": _echo(params),
        "rate": est.to_dict(),
        "lambda0_lower_bound": bound,
        "lambda0_lower_bound_stderr": bound_se,
        "curve_csv": curve_path,
    }


def cmd_fk(args):
    params, model, f = _stochastic_config(args)
    x0 = params["x0"]
    res = stochastic.feynman_kac(
        model, f, x0=x0, T=params["T"], dt=params["dt"], N=params["N"], seed=params["seed"],
        workers=params["workers"], curve_points=args.curve_points,
    )
    curve_path = _write_curve(args, res.curve_csv())
    return {"command": "fk", "parameters": _echo(params), "result": res.to_dict(), "curve_csv": curve_path}


def cmd_wflow(args):
    params, model, _ = _stochastic_config(args)
    p = params["p"]
    if p is None or not 0 <= int(p) <= model.dim:
        raise DomainError(f"--p must lie in [0, {model.dim}]")
    rep = stochastic.domination_check(
        model, int(p), T=params["T"], dt=params["dt"], n_paths=params["N"], seed=params["seed"],
        x0=params["x0"],
    )
    payload = {"command": "wflow", "parameters": _echo(params), "report": rep}
    if rep["max_ratio"] > 1.0 + 10.0 * params["dt"]:
        raise CheckFailed(payload)
    return payload


def cmd_hodge(args):
    if args.input:
        K = hodge.SimplicialComplex.from_json_dict(_read_json(args.input))
        params = {"input": str(args.input)}
    elif args.vertices:
        if args.seed_given is None:
            raise DomainError("a random complex needs --seed")
        K = hodge.random_clique_complex(args.vertices, args.edge_prob, args.seed_given)
        params = {"vertices": args.vertices, "edge_prob": args.edge_prob, "seed": args.seed_given}
    else:
        raise DomainError("give --input or --vertices")
    rep = hodge.check_interlacing(K)
    payload = {
        "command": "hodge",
        "parameters": params,
        "f_vector": [len(K.simplices(q)) for q in range(K.dimension + 1)],
        "report": rep.to_dict(),
    }
    if not rep.ok:
        raise CheckFailed(payload)
    return payload


def cmd_lemma32(args):
    n = args.n
    if n is None:
        raise DomainError("--n is required")
    ps = [args.p] if args.p is not None else list(range(n + 1))
    rows = []
    for p in ps:
        ks = [args.k] if args.k is not None else list(range(p + 1))
        for k in ks:
            A = overlap_matrix(n, p, k)
            lam = perron_eigenvalue(A)
            rows.append({
                "n": n, "p": p, "k": k, "perron": lam, "closed_form": A.closed_form,
                "ok": abs(lam - A.closed_form) <= 1e-8 * max(1.0, A.closed_form),
            })
    payload = {"command": "lemma32", "parameters": {"n": n, "p": args.p, "k": args.k}, "rows": rows}
    if not all(r["ok"] for r in rows):
        raise CheckFailed(payload)
    return payload


COMMANDS = {
    "rp": cmd_rp,
    "pinch": cmd_pinch,
    "example": cmd_example,
    "ssp": cmd_ssp,
    "fk": cmd_fk,
    "wflow": cmd_wflow,
    "hodge": cmd_hodge,
    "lemma32": cmd_lemma32,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="bochner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--input")
        sp.add_argument("--output")
        sp.add_argument("--p", type=int)
        sp.add_argument("--workers", type=int, default=1)
        if name in ("pinch", "example"):
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--restarts", type=int, default=pinching.DEFAULT_RESTARTS)
        else:
            sp.add_argument("--seed", type=int, dest="seed_given")
        if name == "example":
            sp.add_argument("--a", type=float)
        if name in ("ssp", "fk", "wflow"):
            sp.add_argument("--T", type=float)
            sp.add_argument("--dt", type=float)
            sp.add_argument("--N", type=int)
            sp.add_argument("--curve")
            sp.add_argument("--curve-points", type=int, default=200)
        if name == "hodge":
            sp.add_argument("--vertices", type=int)
            sp.add_argument("--edge-prob", type=float, default=0.5)
        if name == "lemma32":
            sp.add_argument("--n", type=int)
            sp.add_argument("--k", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        payload = COMMANDS[args.command](args)
    except CheckFailed as exc:
        _emit(exc.payload, args.output)
        return EXIT_CHECK
    except SymmetryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(payload, args.output)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
