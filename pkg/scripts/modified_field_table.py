"""Print the modified-field weights b(t)/sigma(t) of catalog methods, tree by tree."""
import argparse

from fequiv.catalog import load_catalog
from fequiv.numbers import format_scalar
from fequiv.series import check_quadratic_fe, modified_field_series, per_order_terms, tableau_series
from fequiv.trees import to_bracket, trees_upto


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=5)
    ap.add_argument("methods", nargs="*", default=["euler", "implicit-midpoint", "heun", "rk4", "gauss2"])
    args = ap.parse_args()

    cat = load_catalog()
    table = {}
    qfe = {}
    for name in args.methods:
        b = modified_field_series(tableau_series(cat.get(name), args.order))
        table[name] = b.differential_coefficients()
        qfe[name] = [k for k, term in enumerate(per_order_terms(b), start=1) if not check_quadratic_fe(term).holds]

    width = max(len(m) for m in args.methods) + 2
    print("tree".ljust(14) + "".join(m.rjust(width) for m in args.methods))
    for t in trees_upto(args.order):
        row = [format_scalar(table[m].get(t, 0)) for m in args.methods]
        print(to_bracket(t).ljust(14) + "".join(x.rjust(width) for x in row))
    print()
    for name in args.methods:
        bad = qfe[name]
        print(f"{name}: quadratic condition fails at orders {bad}" if bad else f"{name}: every order passes the quadratic condition")


if __name__ == "__main__":
    main()
