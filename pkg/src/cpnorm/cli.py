"""``cpnorm`` command line: output-purity norms, q->p norms, the positivity
condition, multiplicativity checks and p-sweeps for channels given as zoo
specs or JSON files.

Exit codes: 0 success, 2 input error, 3 map not completely positive,
4 dimension cap exceeded.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .channels import NotCompletelyPositiveError, channel_from_dict, channel_to_dict
from .conditions import check_postr, search_basis
from .experiments import SWEEP_FIELDS, format_float, rows_to_csv, sweep
from .norms import OptimizerConfig, mult_ratio, norm_2_to_2_exact, norm_q_to_p, nu_p
from .zoo import ZooSpec, parse_zoo_spec

EXIT_INPUT = 2
EXIT_NOT_CP = 3
EXIT_CAP = 4
DIM_CAP = 81
SEED_ENV = "CPNORM_SEED"


class DimensionCapError(Exception):
    pass


# --------------------------------------------------------------------------- #
#                               serialization                                  #
# --------------------------------------------------------------------------- #


def _to_json(obj, indent=0):
    """JSON text with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "null" if not math.isfinite(obj) else format_float(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _complex_list(a):
    """Complex array as nested lists of ``[re, im]`` pairs."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


# --------------------------------------------------------------------------- #
#                                  loading                                     #
# --------------------------------------------------------------------------- #


def load_channel(zoo=None, path=None):
    if (zoo is None) == (path is None):
        raise ValueError("give exactly one of a zoo spec or a channel file")
    if zoo is not None:
        return parse_zoo_spec(zoo).build()
    with open(path) as fh:
        data = json.load(fh)
    if "family" in data:
        return ZooSpec.from_dict(data).build()
    return channel_from_dict(data)


def _config(args):
    return OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters,
                           value_tol=args.tol, seed=args.seed)


def _metadata(args, cfg):
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    return {
        "tool": "cpnorm",
        "version": __version__,
        "seed": cfg.seed,
        "config": echo,
        "tolerances": {"value_tol": cfg.value_tol, "step_tol": cfg.step_tol, "grad_tol": cfg.grad_tol},
    }


def _norm_fields(res):
    return {
        "value": res.value,
        "converged": res.converged,
        "restarts_agreeing": res.restarts_agreeing,
    }


# --------------------------------------------------------------------------- #
#                                 commands                                     #
# --------------------------------------------------------------------------- #


def cmd_nu(args, cfg):
    ch = load_channel(args.zoo, args.file)
    res = nu_p(ch, args.p, cfg)
    row = {"p": args.p, **_norm_fields(res), "witness": _complex_list(res.argmax), "tol": cfg.value_tol}
    return [row]


def cmd_norm(args, cfg):
    ch = load_channel(args.zoo, args.file)
    res = norm_q_to_p(ch, args.q, args.p, args.restrict.replace("-", "_"), cfg)
    row = {"q": args.q, "p": args.p, "restrict": args.restrict, **_norm_fields(res)}
    if args.q == 2 and args.p == 2:
        row["exact"] = norm_2_to_2_exact(ch)
    row["witness"] = _complex_list(res.argmax)
    row["tol"] = cfg.value_tol
    return [row]


def cmd_check_condition(args, cfg):
    ch = load_channel(args.zoo, args.file)
    chk = check_postr(ch, tol=args.condition_tol)
    row = {"basis": "identity", "holds": chk.holds, "min_entry": chk.min_entry,
           "max_imag": chk.max_imag, "tol": args.condition_tol}
    rows = [row]
    if args.search:
        res = search_basis(ch, restarts=args.search_restarts, seed=cfg.seed, tol=args.condition_tol)
        rows.append({"basis": "search", "holds": res.holds, "min_entry": res.min_entry,
                     "max_imag": res.max_imag, "penalty": res.penalty,
                     "unitary": _complex_list(res.best_U), "tol": args.condition_tol})
    return rows


def _load_pair(args):
    a = load_channel(args.zoo_a, args.file_a)
    b = load_channel(args.zoo_b, args.file_b)
    dim = a.dim_in * b.dim_in
    if dim > DIM_CAP or a.dim_out * b.dim_out > DIM_CAP:
        raise DimensionCapError(f"tensor dimension {dim} exceeds the cap of {DIM_CAP}")
    return a, b


def cmd_mult(args, cfg):
    a, b = _load_pair(args)
    m = mult_ratio(a, b, args.p, cfg)
    return [{
        "p": args.p,
        "nu_A": m.nu_a.value,
        "nu_B": m.nu_b.value,
        "nu_AB": m.nu_ab.value,
        "ratio": m.ratio,
        "converged": m.converged,
        "witness": _complex_list(m.witness),
        "tol": cfg.value_tol,
    }]


def _grid(args):
    if args.grid:
        return [float(x) for x in args.grid.split(",")]
    n = int(round((args.p_max - args.p_min) / args.p_step)) + 1
    return [round(args.p_min + i * args.p_step, 12) for i in range(n)]


def cmd_sweep(args, cfg):
    a, b = _load_pair(args)
    grid = _grid(args)
    if any(p < 1 for p in grid):
        raise ValueError("every p in the grid must be >= 1")
    rows = sweep(a, b, grid, cfg, joint=not args.bell_only)
    return [{**asdict(r), "tol": cfg.value_tol} for r in rows]


def cmd_zoo(args, cfg):
    return channel_to_dict(parse_zoo_spec(args.spec).build())


# --------------------------------------------------------------------------- #
#                                   parser                                     #
# --------------------------------------------------------------------------- #


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _add_common(sp, csv_ok=False):
    d = OptimizerConfig()
    sp.add_argument("--restarts", type=int, default=d.restarts, help="random restarts (default %(default)s)")
    sp.add_argument("--max-iters", type=int, default=d.max_iters)
    sp.add_argument("--tol", type=float, default=d.value_tol, help="value tolerance of the optimizer")
    sp.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    sp.add_argument("--format", choices=("json", "csv") if csv_ok else ("json",), default="json")
    sp.add_argument("--output", "-o", help="write the report here instead of stdout")


def _add_source(sp, suffix=""):
    g = sp.add_mutually_exclusive_group(required=True)
    flag = f"-{suffix}" if suffix else ""
    dest = f"_{suffix}" if suffix else ""
    g.add_argument(f"--zoo{flag}", dest=f"zoo{dest}", metavar="SPEC", help="zoo spec, e.g. werner-holevo:3")
    g.add_argument(f"--file{flag}", dest=f"file{dest}", metavar="PATH", help="channel JSON file")


def build_parser():
    ap = argparse.ArgumentParser(prog="cpnorm", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"cpnorm {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("nu", help="maximal output p-norm over pure inputs")
    _add_source(sp)
    sp.add_argument("--p", type=float, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_nu)

    sp = sub.add_parser("norm", help="q -> p norm (exact value also reported for q = p = 2)")
    _add_source(sp)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--restrict", choices=("unrestricted", "self-adjoint"), default="unrestricted")
    _add_common(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("check-condition", help="entrywise positivity of Tr Phi(E_ik)^H Phi(E_jl)")
    _add_source(sp)
    sp.add_argument("--search", action="store_true", help="also search for a rotated basis")
    sp.add_argument("--search-restarts", type=int, default=8)
    sp.add_argument("--condition-tol", type=float, default=1e-9)
    _add_common(sp)
    sp.set_defaults(func=cmd_check_condition)

    for name, func, helptext in (
        ("mult", cmd_mult, "nu_p(A (x) B) / (nu_p(A) nu_p(B))"),
        ("sweep", cmd_sweep, "multiplicativity ratio over a grid of p"),
    ):
        sp = sub.add_parser(name, help=helptext)
        _add_source(sp, "a")
        _add_source(sp, "b")
        if name == "mult":
            sp.add_argument("--p", type=float, required=True)
        else:
            sp.add_argument("--grid", help="comma-separated p values")
            sp.add_argument("--p-min", type=float, default=1.0)
            sp.add_argument("--p-max", type=float, default=5.0)
            sp.add_argument("--p-step", type=float, default=0.5)
            sp.add_argument("--bell-only", action="store_true",
                            help="skip the joint optimization; report only the entangled-input bound")
        _add_common(sp, csv_ok=name == "sweep")
        sp.set_defaults(func=func)

    sp = sub.add_parser("zoo", help="emit the channel JSON for a zoo spec")
    sp.add_argument("spec")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_zoo)
    return ap


def _render(args, cfg, result):
    if args.command == "zoo":
        return _to_json(result) + "\n"
    if getattr(args, "format", "json") == "csv":
        return rows_to_csv(result, SWEEP_FIELDS)
    return _to_json({"metadata": _metadata(args, cfg), "rows": result}) + "\n"


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        cfg = _config(args) if args.command != "zoo" else OptimizerConfig()
        result = args.func(args, cfg)
    except NotCompletelyPositiveError as exc:
        print(f"cpnorm: map is not completely positive: {exc}", file=sys.stderr)
        return EXIT_NOT_CP
    except DimensionCapError as exc:
        print(f"cpnorm: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"cpnorm: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = _render(args, cfg, result)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
