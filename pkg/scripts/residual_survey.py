"""Survey the formal diagram residual over methods and observable degrees.

For each (method, degree) pair, random polynomial fields and observables are
drawn and the lowest order of h at which the residual is nonzero is tallied.
"""
import argparse
import random
from collections import Counter

from fequiv.catalog import load_catalog
from fequiv.integrate import SplittingScheme, fe_diagram_residual, fe_diagram_residual_additive
from fequiv.poly import random_field, random_map, random_point


def first_nonzero(method, rng, dim, degree, N):
    F = random_map(rng, dim, 1, degree)
    y0 = random_point(rng, dim)
    if isinstance(method, SplittingScheme):
        parts = [random_field(rng, dim, 2) for _ in range(method.parts)]
        return fe_diagram_residual_additive(method, parts, F, y0, N).first_nonzero
    return fe_diagram_residual(method, random_field(rng, dim, 2), F, y0, N=N).first_nonzero


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dim", type=int, default=2)
    args = ap.parse_args()

    cat = load_catalog()
    rng = random.Random(args.seed)
    print(f"first nonzero order of the residual, N = {args.order}, {args.samples} samples ('-' means zero)")
    print("method".ljust(20) + "".join(f"deg {d}".rjust(14) for d in (1, 2, 3)))
    for name in cat.names():
        method = cat.get(name, block_sizes=[args.dim // 2, args.dim - args.dim // 2])
        cells = []
        for degree in (1, 2, 3):
            tally = Counter(first_nonzero(method, rng, args.dim, degree, args.order) for _ in range(args.samples))
            cells.append(",".join(f"{'-' if k is None else k}x{v}" for k, v in sorted(tally.items(), key=lambda kv: kv[0] or 0)))
        print(name.ljust(20) + "".join(c.rjust(14) for c in cells))


if __name__ == "__main__":
    main()
