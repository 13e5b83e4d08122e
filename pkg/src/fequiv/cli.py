"""``fequiv`` command line: tree listings, series checks, modified fields, diagram checks, witnesses.

Exit codes: 0 when every check passes, 1 when violations are found, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .catalog import load_catalog, splitting_to_json
from .config import limits
from .fields import differentiate, elementary_differential, witness_pair
from .integrate import (
    ExactFlow,
    PartitionedMethod,
    SplittingScheme,
    fe_diagram_residual,
    fe_diagram_residual_additive,
)
from .numbers import format_scalar, parse_scalar, scalar_str
from .poly import poly_from_json, poly_to_json, random_field, random_map, random_point, to_field
from .series import (
    ButcherTableau,
    check_affine_root_condition,
    check_partitioned_qfe,
    check_quadratic_fe,
    identity_series,
    modified_field_series,
    series_from_json,
    series_to_json,
    tableau_series,
)
from .trees import parse_tree, symmetry, to_bracket, tree_factorial, trees_upto

log = logging.getLogger("fequiv")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str | None
    order: int = 4
    colors: int = 1
    seed: int = 0
    format: str = "text"
    budget: int | None = None
    catalog: str | None = None
    args: dict = field(default_factory=dict)


class InputError(Exception):
    pass


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


# ------------------------------------------------------------------ commands


def cmd_trees(cfg: RunConfig) -> tuple[int, dict, str]:
    trees = trees_upto(cfg.order, cfg.colors)
    colored = cfg.colors > 1
    rows = [
        {"tree": to_bracket(t, colored), "order": t.order, "sigma": symmetry(t), "gamma": tree_factorial(t)}
        for t in trees
    ]
    lines = [f"{r['order']:>3}  sigma={r['sigma']:<4} gamma={r['gamma']:<6} {r['tree']}" for r in rows]
    lines.append(f"{len(rows)} trees up to order {cfg.order} with {cfg.colors} color(s)")
    return EXIT_OK, {"max_order": cfg.order, "colors": cfg.colors, "count": len(rows), "trees": rows}, "\n".join(lines)


def cmd_check(cfg: RunConfig) -> tuple[int, dict, str]:
    a = cfg.args
    phi = series_from_json(_read_json(a["series"]))
    which = a["which"]
    if which == "qfe":
        if phi.colors != 1:
            raise InputError("qfe needs a 1-color series; use p-qfe for colored series")
        rep = check_quadratic_fe(phi)
    elif which == "nb-affine":
        rep = check_affine_root_condition(phi)
    else:
        rep = check_partitioned_qfe(phi, bilinear_only=a["bilinear_only"])
    out = {"series": a["series"], "check": which, **rep.to_json()}
    return (EXIT_OK if rep.holds else EXIT_FAIL), out, str(rep)


def _resolve_method(cfg: RunConfig, spec: str, block_sizes=None):
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        obj = _read_json(spec)
        if "A" in obj:
            return ButcherTableau.from_json(obj)
        if "stages" in obj:
            stages = tuple((int(nu), parse_scalar(c)) for nu, c in obj["stages"])
            return SplittingScheme(stages, int(obj["parts"]), obj.get("name", p.stem))
        raise InputError(f"{spec}: neither a tableau nor a splitting")
    cat = load_catalog(cfg.catalog)
    try:
        return cat.get(spec, block_sizes)
    except KeyError as e:
        raise InputError(e.args[0])


def cmd_modified(cfg: RunConfig) -> tuple[int, dict, str]:
    method = _resolve_method(cfg, cfg.args["method"])
    if isinstance(method, ExactFlow):
        b = identity_series(cfg.order)
    elif isinstance(method, ButcherTableau):
        b = modified_field_series(tableau_series(method, cfg.order))
    else:
        raise InputError("modified expects a Runge-Kutta tableau or the exact flow")
    weights = {to_bracket(t): format_scalar(w) for t, w in b.differential_coefficients().items() if w}
    out = {"method": cfg.args["method"], "series": series_to_json(b), "differentials": weights}
    if cfg.args.get("output"):
        Path(cfg.args["output"]).write_text(_dump(series_to_json(b)) + "\n")
    lines = [f"modified field of {cfg.args['method']} through order {cfg.order}"]
    lines += [f"  {to_bracket(t):<16} b = {scalar_str(v):<10} b/sigma = {scalar_str(v / symmetry(t))}" for t, v in b.nonzero().items()]
    return EXIT_OK, out, "\n".join(lines)


def _hseries_json(s):
    return [format_scalar(c) for c in s.coeffs]


def _point(text: str | None, rng: random.Random, d: int) -> list[Fraction]:
    if text is None:
        return random_point(rng, d)
    pt = [parse_scalar(x.strip()) for x in text.split(",")]
    if len(pt) != d:
        raise InputError(f"point has {len(pt)} entries, field dimension is {d}")
    return pt


def cmd_verify(cfg: RunConfig) -> tuple[int, dict, str]:
    a = cfg.args
    rng = random.Random(cfg.seed)
    blocks = [int(x) for x in a["blocks"].split(",")] if a.get("blocks") else None
    method = _resolve_method(cfg, a["method"], blocks)
    nparts = method.parts if isinstance(method, SplittingScheme) else 1
    if a.get("field"):
        fields = [to_field(poly_from_json(_read_json(p))) for p in a["field"]]
    else:
        fields = [random_field(rng, a["dim"], a["field_degree"]) for _ in range(nparts)]
    if len(fields) != nparts:
        raise InputError(f"method needs {nparts} field part(s), got {len(fields)}")
    d = fields[0].dim
    if blocks is None and isinstance(method, PartitionedMethod):
        raise InputError("partitioned methods need --blocks")
    if a.get("observable"):
        F = poly_from_json(_read_json(a["observable"]))
    else:
        F = random_map(rng, d, 1, a["observable_degree"])
    if F.dim_in != d:
        raise InputError("observable and field dimensions differ")
    if a["mode"] == "numeric":
        if isinstance(method, (SplittingScheme, ExactFlow)):
            raise InputError("numeric mode supports Runge-Kutta and partitioned methods only")
        y0 = [float(x) for x in _point(a.get("point"), rng, d)]
        res = fe_diagram_residual(method, fields[0], F, y0, h=a["h"], mode="numeric", tol=a["tol"])
        residual = [float(r) for r in res.residual]
    else:
        y0 = _point(a.get("point"), rng, d)
        if isinstance(method, SplittingScheme):
            res = fe_diagram_residual_additive(method, fields, F, y0, cfg.order)
        else:
            res = fe_diagram_residual(method, fields[0], F, y0, N=cfg.order)
        residual = [_hseries_json(r) for r in res.residual]
    ok = res.is_zero
    out = {
        "method": a["method"],
        "mode": res.mode,
        "order": cfg.order if res.mode == "formal" else None,
        "h": a["h"] if res.mode == "numeric" else None,
        "seed": cfg.seed,
        "point": [format_scalar(x) if res.mode == "formal" else x for x in y0],
        "fields": [poly_to_json(f) for f in fields],
        "observable": poly_to_json(F),
        "commutes": ok,
        "first_nonzero_order": res.first_nonzero,
        "residual": residual,
    }
    if res.mode == "formal":
        verdict = "commutes exactly" if ok else f"fails, first nonzero order h^{res.first_nonzero}"
    else:
        verdict = f"max residual {res.magnitude():.3e} ({'within' if ok else 'above'} tolerance)"
    lines = [f"{a['method']} ({res.mode}): {verdict}"]
    for k, r in enumerate(residual):
        lines.append(f"  z{k}: {r}")
    return (EXIT_OK if ok else EXIT_FAIL), out, "\n".join(lines)


def cmd_witness(cfg: RunConfig) -> tuple[int, dict, str]:
    a = cfg.args
    u, v = parse_tree(a["u"]), parse_tree(a["v"])
    f, F = witness_pair(u, v)
    n = f.dim
    zero = [0] * n
    hess = differentiate(F, 2)
    du = elementary_differential(u, f, zero)
    dv = elementary_differential(v, f, zero)
    value = hess(zero, du, dv)[0]
    expected = (2 if u == v else 1) * symmetry(u) * symmetry(v)
    out = {
        "u": to_bracket(u),
        "v": to_bracket(v),
        "dimension": n,
        "hessian": format_scalar(value),
        "expected": format_scalar(expected),
        "field": poly_to_json(f),
        "observable": poly_to_json(F),
    }
    if a.get("out_dir"):
        d = Path(a["out_dir"])
        d.mkdir(parents=True, exist_ok=True)
        (d / "field.json").write_text(_dump(out["field"]) + "\n")
        (d / "observable.json").write_text(_dump(out["observable"]) + "\n")
    ok = value == expected
    text = (
        f"witness pair ({out['u']}, {out['v']}) on R^{n}\n"
        f"  F''(u(f), v(f)) at 0 = {value} (expected {expected})"
    )
    return (EXIT_OK if ok else EXIT_FAIL), out, text


COMMANDS = {
    "trees": cmd_trees,
    "check": cmd_check,
    "modified": cmd_modified,
    "verify": cmd_verify,
    "witness": cmd_witness,
}


# ------------------------------------------------------------------ parsing


def _global_options(p: argparse.ArgumentParser, defaults: bool) -> None:
    # subcommands repeat the global options with suppressed defaults, so
    # "fequiv verify euler --order 3" and "fequiv --order 3 verify euler" agree
    d = (lambda x: x) if defaults else (lambda x: argparse.SUPPRESS)
    p.add_argument("--order", type=int, default=d(4), help="truncation / maximal tree order (default 4)")
    p.add_argument("--colors", type=int, default=d(1), help="number of tree colors (default 1)")
    p.add_argument("--seed", type=int, default=d(0), help="seed for random instances (default 0)")
    p.add_argument("--format", choices=("text", "json"), default=d("text"))
    p.add_argument("--budget", type=int, default=d(None), help="monomial budget for polynomial products")
    p.add_argument("--catalog", default=d(None), help="extra method catalog JSON")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fequiv", description=__doc__.splitlines()[0])
    _global_options(p, True)
    p.add_argument("--list", action="store_true", help="list catalog methods and exit")
    shared = argparse.ArgumentParser(add_help=False)
    _global_options(shared, False)
    sub = p.add_subparsers(dest="command")
    add = lambda name, **kw: sub.add_parser(name, parents=[shared], **kw)  # noqa: E731

    add("trees", help="list rooted trees with sigma and gamma")

    c = add("check", help="check a series file against a structural condition")
    c.add_argument("series")
    c.add_argument("--which", choices=("qfe", "nb-affine", "p-qfe"), default="qfe")
    c.add_argument("--bilinear-only", action="store_true")

    m = add("modified", help="modified-field series of a tableau")
    m.add_argument("method", help="catalog name, 'exact' or tableau JSON file")
    m.add_argument("--output", default=None, help="also write the series file here")

    v = add("verify", help="functional-equivariance diagram residual")
    v.add_argument("method")
    v.add_argument("--field", action="append", help="field JSON (repeat once per splitting part)")
    v.add_argument("--observable", default=None, help="observable map JSON")
    v.add_argument("--point", default=None, help="start point, e.g. 1/3,1/2")
    v.add_argument("--mode", choices=("formal", "numeric"), default="formal")
    v.add_argument("--h", type=float, default=0.01)
    v.add_argument("--tol", type=float, default=1e-12)
    v.add_argument("--blocks", default=None, help="block sizes for partitioned methods, e.g. 1,1")
    v.add_argument("--dim", type=int, default=2, help="dimension of random fields")
    v.add_argument("--field-degree", type=int, default=2)
    v.add_argument("--observable-degree", type=int, default=2)

    w = add("witness", help="witness field and observable for a tree pair")
    w.add_argument("u")
    w.add_argument("v")
    w.add_argument("--out-dir", default=None)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    glob = {"command", "order", "colors", "seed", "format", "budget", "catalog", "list", "verbose"}
    return RunConfig(
        command=ns.command,
        order=ns.order,
        colors=ns.colors,
        seed=ns.seed,
        format=ns.format,
        budget=ns.budget,
        catalog=ns.catalog,
        args={k: val for k, val in vars(ns).items() if k not in glob},
    )


def _list_methods(cfg: RunConfig) -> tuple[int, dict, str]:
    cat = load_catalog(cfg.catalog)
    out = {
        "tableaux": {n: t.to_json() for n, t in sorted(cat.tableaux.items())},
        "splittings": {n: splitting_to_json(s) for n, s in sorted(cat.splittings.items())},
        "partitioned": dict(sorted(cat.partitioned.items())),
        "pseudo": ["exact"],
    }
    return EXIT_OK, out, "\n".join(cat.names())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = _config(ns)
    if not ns.list and cfg.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        if cfg.order < 1 or cfg.colors < 1:
            raise InputError("--order and --colors must be positive")
        budget = {} if cfg.budget is None else {"monomial_budget": cfg.budget}
        with limits(**budget):
            code, obj, text = _list_methods(cfg) if ns.list else COMMANDS[cfg.command](cfg)
    except (InputError, ValueError, KeyError, TypeError) as e:
        print(f"fequiv: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(_dump(obj) if cfg.format == "json" else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
