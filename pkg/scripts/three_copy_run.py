"""Extended three-copy run on the 3x3 Werner family (reduced restarts).

Same contract as the two-copy evidence: no value below -1e-6 for
1 < beta <= 3/2 counts as evidence of non-distillability, never as proof.
"""

import argparse
import time

from entangle.distill import beta_k_bound, werner_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--betas", default="1.1,1.2,1.3,1.4,1.5,1.6")
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    betas = [float(b) for b in args.betas.split(",")]
    print(f"beta_K bound for K=3: {beta_k_bound(3):.6f}")
    start = time.time()
    for p in werner_scan(3, betas, 3, restarts=args.restarts, seed=args.seed):
        verdict = "negative value found" if p.min_value < -1e-6 else "no value below -1e-6"
        print(f"beta={p.beta:.3f}  min={p.min_value:+.6e}  converged={p.converged_fraction:.3f}  {verdict}")
    print(f"elapsed {time.time() - start:.1f}s")


if __name__ == "__main__":
    main()
