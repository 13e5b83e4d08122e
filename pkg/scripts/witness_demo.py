"""Show how witness fields isolate single trees and single tree pairs."""
import argparse

from fequiv.fields import differentiate, elementary_differential, witness_field, witness_pair
from fequiv.trees import parse_tree, symmetry, to_bracket, trees_upto


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("tree", nargs="?", default="[[][[]]]")
    ap.add_argument("--pair", nargs=2, default=["[]", "[[]]"], metavar=("U", "V"))
    args = ap.parse_args()

    tau = parse_tree(args.tree)
    f = witness_field(tau)
    n = tau.order
    print(f"witness field for {to_bracket(tau)} on R^{n}, sigma = {symmetry(tau)}")
    for i, comp in enumerate(f.components):
        print(f"  f_{i + 1} = {comp}")
    print(f"last component of theta(f)(0) for every theta of order {n}:")
    for theta in trees_upto(n):
        if theta.order == n:
            print(f"  {to_bracket(theta):<14}{elementary_differential(theta, f, [0] * n)[n - 1]}")

    u, v = (parse_tree(s) for s in args.pair)
    g, F = witness_pair(u, v)
    zero = [0] * g.dim
    hess = differentiate(F, 2)
    bound = max(u.order, v.order) + 1
    print(f"\nnonzero Hessian pairings F''(0)(tau(f), theta(f)) for the pair ({to_bracket(u)}, {to_bracket(v)}):")
    vals = {t: elementary_differential(t, g, zero) for t in trees_upto(bound)}
    for a, va in vals.items():
        for b, vb in vals.items():
            x = hess(zero, va, vb)[0]
            if x:
                print(f"  ({to_bracket(a)}, {to_bracket(b)}): {x}")


if __name__ == "__main__":
    main()
