"""Maximal product overlap of the tiles state with a large restart budget.

The printed value is the regression constant used in the product-opt tests.
"""

import argparse
import json

from entangle.product_opt import extremize_product_overlap
from entangle.states import tiles_upb_state


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--restarts", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    res = extremize_product_overlap(tiles_upb_state().rho, (3, 3), "max", restarts=args.restarts, seed=args.seed)
    print(json.dumps({
        "r": res.value,
        "restarts": res.restarts_used,
        "converged_fraction": res.converged_fraction,
        "lambda_max": res.certified_bound,
        "e": [[z.real, z.imag] for z in res.vector.e],
        "f": [[z.real, z.imag] for z in res.vector.f],
    }, indent=2))


if __name__ == "__main__":
    main()
