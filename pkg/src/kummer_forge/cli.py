"""Command-line entry point: ``kummer-forge <command> ...``.

Exit codes: 0 success (or all gating checks passed), 1 a suite or
characterization failed, 2 usage, input or domain error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import characterize as ch
from . import distributions as dist
from . import verify as vf
from .errors import DomainError, KummerForgeError
from .rng import DEFAULT_SEED
from .specfun import log_tricomi_u, tricomi_u
from .transforms import hv_forward, hv_inverse, kv_forward, kv_inverse
from .trees import TreeSpec, phi_forward, phi_inverse, tree_joint_sample

__all__ = ["main", "run_cli", "resolve_seed", "read_csv_columns", "write_csv_columns"]

SEED_ENV = "KUMMER_FORGE_SEED"


class InputError(DomainError):
    """Malformed user input (file contents, JSON, CSV)."""


def resolve_seed(explicit):
    """``--seed`` if given, else ``$KUMMER_FORGE_SEED``, else 0xC0FFEE."""
    if explicit is not None:
        return explicit
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError as exc:
            raise InputError(f"{SEED_ENV}={env!r} is not an integer") from exc
    return DEFAULT_SEED


def _int(text):
    try:
        return int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from exc


def _fmt(x):
    return f"{x:.15g}"


def _load_json(text_or_path, what):
    """Inline JSON, or a path to a JSON file."""
    text = text_or_path
    path = Path(text_or_path)
    if not text_or_path.lstrip().startswith(("{", "[")) and path.is_file():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc})") from exc


# CSV


def read_csv_columns(path, columns, positive=True, upper=None):
    """Read named float columns; errors carry the file line number.

    Line 1 is the header; data starts on line 2. With ``positive`` every
    value must be finite and > 0; ``upper`` adds a strict upper bound for
    the first column.
    """
    name = "<stdin>" if path == "-" else str(path)
    handle = sys.stdin if path == "-" else open(path, newline="")
    try:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{name}: empty file, expected header {','.join(columns)}") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise InputError(f"{name}:1: header must contain {', '.join(columns)}; "
                             f"missing {', '.join(missing)}")
        pos = [header.index(c) for c in columns]
        data = [[] for _ in columns]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{name}:{lineno}: expected {len(header)} fields, got {len(row)}")
            for k, (col, idx) in enumerate(zip(columns, pos)):
                try:
                    val = float(row[idx])
                except ValueError:
                    raise InputError(f"{name}:{lineno}: {col}={row[idx]!r} is not a number") from None
                if positive and not (math.isfinite(val) and val > 0):
                    raise InputError(f"{name}:{lineno}: {col}={row[idx]} must be finite and positive")
                if upper is not None and k == 0 and not val < upper:
                    raise InputError(f"{name}:{lineno}: {col}={row[idx]} must be < {upper:g}")
                data[k].append(val)
    finally:
        if handle is not sys.stdin:
            handle.close()
    if not data[0]:
        raise InputError(f"{name}: no data rows")
    return [np.asarray(d) for d in data]


def write_csv_columns(path, columns, arrays):
    """Write columns with 17 significant digits (lossless for doubles)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in zip(*(np.atleast_1d(a) for a in arrays)):
        writer.writerow([f"{v:.17g}" for v in row])
    _emit(path, buf.getvalue())


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_report(report, path):
    _emit(path, report.to_json() + "\n")
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{report.suite}: {verdict}", file=sys.stderr)
    return 0 if report.passed else 1


# Commands


def cmd_specfun(args):
    if args.log:
        print(_fmt(log_tricomi_u(args.a, args.b, args.z)))
    else:
        print(_fmt(tricomi_u(args.a, args.b, args.z)))
    return 0


def cmd_dist(args):
    spec = dist.spec_from_dict(_load_json(args.spec, "--spec"))
    op = args.op
    if op in ("pdf", "cdf"):
        if args.x is None:
            raise InputError(f"dist {op} needs --x")
        fn = dist.pdf if op == "pdf" else dist.cdf
        print(_fmt(fn(spec, args.x)))
    elif op == "moment":
        if args.s is None:
            raise InputError("dist moment needs --s")
        print(_fmt(dist.moment(spec, args.s)))
    else:
        if args.n is None:
            raise InputError("dist sample needs --n")
        values = dist.sample(spec, args.n, resolve_seed(args.seed)).values
        write_csv_columns(args.out, ["value"], [values])
    return 0


def cmd_transform(args):
    if args.inverse:
        cols, out_cols = ["u", "v"], ["x", "y"]
        upper = 1.0 if args.map == "kv" else None
        fn = hv_inverse if args.map == "hv" else kv_inverse
    else:
        cols, out_cols, upper = ["x", "y"], ["u", "v"], None
        fn = hv_forward if args.map == "hv" else kv_forward
    first, second = read_csv_columns(args.input, cols, upper=upper)
    res = fn(first, second)
    write_csv_columns(args.out, out_cols, [res.first, res.second])
    return 0


def _tree_from_arg(text):
    return TreeSpec.from_dict(_load_json(text, "--tree"))


def _node_map(text, tree, what):
    """Per-node values: JSON object ``{"1": 4, ...}`` or a comma list in node order."""
    text = text.strip()
    if text.startswith("{") or Path(text).is_file():
        raw = _load_json(text, what)
        try:
            out = {int(k): float(v) for k, v in raw.items()}
        except (AttributeError, ValueError) as exc:
            raise InputError(f"{what}: expected an object of node id -> number") from exc
    else:
        try:
            vals = [float(t) for t in text.split(",")]
        except ValueError as exc:
            raise InputError(f"{what}: expected comma-separated numbers") from exc
        if len(vals) != len(tree.nodes):
            raise InputError(f"{what}: {len(vals)} values for {len(tree.nodes)} nodes")
        out = dict(zip(tree.nodes, vals))
    if set(out) != set(tree.nodes):
        raise InputError(f"{what}: keys {sorted(out)} do not match nodes {tree.nodes}")
    return out


def cmd_tree(args):
    tree = _tree_from_arg(args.tree)
    cols = [str(i) for i in tree.nodes]
    if args.op == "transform":
        if args.root is None:
            raise InputError("tree transform needs --root")
        arrays = read_csv_columns(args.input, cols)
        vec = dict(zip(tree.nodes, arrays))
        fn = phi_inverse if args.inverse else phi_forward
        res = fn(tree, args.root, vec)
        write_csv_columns(args.out, cols, [res[i] for i in tree.nodes])
        return 0
    if args.a is None:
        raise InputError(f"tree {args.op} needs --a")
    a = _node_map(args.a, tree, "--a")
    seed = resolve_seed(args.seed)
    if args.op == "sample":
        ref = args.root if args.root is not None else min(tree.leaves())
        xs = tree_joint_sample(tree, ref, a, args.c, args.n or 1000, seed)
        write_csv_columns(args.out, cols, [xs[i] for i in tree.nodes])
        return 0
    report = vf.run_tree_suite(tree, a, args.c, n=args.n or 100_000, seed=seed,
                               ref_leaf=args.root, workers=args.workers)
    return _emit_report(report, args.report)


def _pair_json(pair):
    return {"x": dist.spec_to_dict(pair.x), "y": dist.spec_to_dict(pair.y)}


def cmd_recover(args):
    m = args.map
    if m in ("hv-reg", "kv-reg"):
        k = ch.RegressionConstants(args.alpha, args.beta, args.c)
        if m == "hv-reg":
            out = _pair_json(ch.recover_hv_regression(k))
        else:
            out = _pair_json(ch.recover_kv_regression(k))
            out["forward_consistency"] = ch.kv_forward_consistency(k)
    else:
        k = ch.RatioConstants(args.r, args.alpha, args.beta, args.c)
        if m == "hv-ratio":
            out = _pair_json(ch.recover_hv_ratio(k))
        else:
            out = _pair_json(ch.recover_kv_ratio(k))
            try:
                out["consistent"] = _pair_json(ch.recover_kv_ratio_consistent(k))
            except KummerForgeError as exc:
                out["consistent"] = {"error": str(exc)}
    print(json.dumps(out, indent=2, ensure_ascii=False))
    return 0


def cmd_characterize(args):
    x, y = read_csv_columns(args.input, ["x", "y"])
    report = ch.characterize_from_samples(x, y, family=args.family,
                                          seed=resolve_seed(args.seed), workers=args.workers)
    return _emit_report(report, args.report)


_SUITE_KEYS = {
    "hv": {"a", "b", "c", "n", "significance", "n_perm"},
    "kv": {"a", "b", "c", "n", "significance", "n_perm"},
    "recurrences": {"A", "c_param", "p", "k_max", "n", "h_k_max"},
    "genfn": {"A", "c_param", "p", "z_grid"},
    "koudou": {"a", "b", "c", "grid", "s_values", "n"},
    "tree": {"tree", "a", "c", "n", "ref_leaf", "significance", "n_perm"},
    "tilts": {"n"},
}
_SUITE_DEFAULTS = {
    "hv": {"a": 2.0, "b": 3.0, "c": 1.0},
    "kv": {"a": 2.0, "b": 1.0, "c": 1.0},
    "koudou": {"a": 2.0, "b": 1.0, "c": 1.0},
    "tree": {"c": 1.0},
}


def cmd_verify(args):
    suite = args.suite
    cfg = dict(_SUITE_DEFAULTS.get(suite, {}))
    if args.config:
        loaded = _load_json(args.config, "--config")
        if not isinstance(loaded, dict):
            raise InputError("--config must hold a JSON object")
        cfg.update(loaded)
    for key in ("a", "b", "c", "n"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    unknown = set(cfg) - _SUITE_KEYS[suite]
    if unknown:
        raise InputError(f"verify {suite}: unknown settings {', '.join(sorted(unknown))}")
    seed = resolve_seed(args.seed)
    w = args.workers
    if suite in ("hv", "kv"):
        report = vf.run_property_suite(suite, seed=seed, workers=w, **cfg)
    elif suite == "recurrences":
        report = vf.check_moment_recurrences(seed=seed, workers=w, **cfg)
    elif suite == "genfn":
        cfg.pop("n", None)
        report = vf.check_generating_function(seed=seed, workers=w, **cfg)
    elif suite == "koudou":
        report = vf.check_koudou_identities(seed=seed, workers=w, **cfg)
    elif suite == "tilts":
        report = vf.check_tilts(seed=seed, workers=w, **cfg)
    else:
        if "tree" not in cfg or "a" not in cfg:
            raise InputError("verify tree needs 'tree' and 'a' in --config")
        tree = cfg.pop("tree")
        tree = TreeSpec.from_dict(tree if isinstance(tree, dict) else _load_json(tree, "tree"))
        a = cfg.pop("a")
        if isinstance(a, dict):
            a = json.dumps(a)
        elif isinstance(a, list):
            a = ",".join(str(v) for v in a)
        a = _node_map(str(a), tree, "a")
        report = vf.run_tree_suite(tree, a, seed=seed, workers=w, **cfg)
    return _emit_report(report, args.report)


# Parser


def _positive_int(text):
    v = _int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def build_parser():
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_int, default=None,
                        help=f"master seed (default: ${SEED_ENV} or 0xC0FFEE)")
    seeded.add_argument("--workers", type=_positive_int, default=1,
                        help="worker threads; never changes results")

    p = argparse.ArgumentParser(
        prog="kummer-forge",
        description="Kummer and gamma laws, their independence-preserving maps, "
                    "characterization recovery and verification suites.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("specfun", help="Tricomi confluent hypergeometric function U")
    s.add_argument("function", choices=["u"])
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--z", type=float, required=True)
    s.add_argument("--log", action="store_true", help="print log U instead")
    s.set_defaults(func=cmd_specfun)

    s = sub.add_parser("dist", parents=[seeded],
                       help="pdf, cdf, real-order moment or samples of a law")
    s.add_argument("op", choices=["pdf", "cdf", "moment", "sample"])
    s.add_argument("--spec", required=True,
                   help='JSON such as {"family":"kummer","a":2,"b":1,"c":1}, or a file')
    s.add_argument("--x", type=float)
    s.add_argument("--s", type=float)
    s.add_argument("--n", type=_positive_int)
    s.add_argument("--out", default="-", help="CSV output for samples (default stdout)")
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("transform", help="apply the HV or KV map to a CSV of pairs")
    s.add_argument("map", choices=["hv", "kv"])
    s.add_argument("--inverse", action="store_true", help="read u,v and write x,y")
    s.add_argument("--in", dest="input", required=True, help="CSV with header x,y (or u,v)")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("tree", parents=[seeded],
                       help="tree transformation, joint sampling and the tree suite")
    s.add_argument("op", choices=["transform", "sample", "verify"])
    s.add_argument("--tree", required=True, help="tree JSON (inline or file)")
    s.add_argument("--root", type=int,
                   help="root node (transform) or reference leaf (sample, verify)")
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--in", dest="input", default="-", help="CSV with one column per node id")
    s.add_argument("--out", default="-")
    s.add_argument("--a", help='per-node shapes: "4,3,2" in node order or JSON object')
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--n", type=_positive_int)
    s.add_argument("--report", default="-")
    s.set_defaults(func=cmd_tree)

    s = sub.add_parser("recover", help="input laws from regression or moment-ratio constants")
    s.add_argument("map", choices=["hv-reg", "hv-ratio", "kv-reg", "kv-ratio"])
    s.add_argument("--alpha", type=float, required=True,
                   help="alpha (regression maps) or alpha_r (ratio maps)")
    s.add_argument("--beta", type=float, required=True,
                   help="beta (regression maps) or alpha_(r+1) (ratio maps)")
    s.add_argument("--r", type=int, default=1, help="ratio order (ratio maps)")
    s.add_argument("--c", type=float, required=True)
    s.set_defaults(func=cmd_recover)

    s = sub.add_parser("characterize", parents=[seeded],
                       help="test and fit a CSV of (x, y) pairs")
    s.add_argument("--family", choices=["hv", "kv"], required=True)
    s.add_argument("--in", dest="input", required=True, help="CSV with header x,y")
    s.add_argument("--report", default="-")
    s.set_defaults(func=cmd_characterize)

    s = sub.add_parser("verify", parents=[seeded], help="run a verification suite")
    s.add_argument("suite", choices=sorted(_SUITE_KEYS))
    s.add_argument("--config", help="JSON object of suite settings (inline or file)")
    s.add_argument("--n", type=_positive_int)
    s.add_argument("--a", type=float, help="shape a (hv, kv, koudou)")
    s.add_argument("--b", type=float, help="shape b (hv, kv, koudou)")
    s.add_argument("--c", type=float, help="rate c (hv, kv, koudou, tree)")
    s.add_argument("--report", default="-", help="report path; '-' for stdout")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (KummerForgeError, ValueError, OSError) as exc:
        print(f"kummer-forge {args.command}: error: {exc}", file=sys.stderr)
        return 2


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
