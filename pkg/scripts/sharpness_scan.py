"""Search for near-tight inputs of each inequality law over a few exponents.

Prints the smallest slack found per (law, p); inputs are normalized, so slacks are comparable.
"""

import argparse

from schattenrad.harness import sharpness_search
from schattenrad.laws import list_laws
from schattenrad.spectral import PNorm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", nargs="+", default=["1", "2", "3", "inf"])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--restarts", type=int, default=2)
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for law in list_laws():
        if law.is_equality:
            continue
        for text in args.p:
            p = PNorm.parse(text)
            if p not in law.p_domain:
                continue
            res = sharpness_search(law.id, p, args.dim, args.restarts, args.steps, args.seed)
            print(f"{law.id:10} p={str(p):5} min slack {res.objective: .3e}  verdict {res.check.verdict}")


if __name__ == "__main__":
    main()
