#!/usr/bin/env python3
"""Measure how the gate-product trace converges to the true partition
function as the period count r doubles.

Prints one CSV row per (model, beta, r): the log-trace error and the bound
diagnostics from one period.  The error should fall off as 1/r.
"""

import argparse
import math

import numpy as np

from ferroz.hamiltonian import exact_partition, validate
from ferroz.trotter import build_sequence, sequence_log_trace, verify_magnus


def models():
    yield "single-site-field", validate(1, [], [1.0])
    yield "xy-pair", validate(2, [(1, 2, 1.0, -1.0)], [0.0, 0.0])
    yield "tilted-pair", validate(2, [(1, 2, 0.9, 0.3)], [0.4, -0.2])
    rng = np.random.default_rng(5)
    b = float(rng.uniform(0.3, 1.0))
    yield "random-triple", validate(
        3,
        [(1, 2, b, float(rng.uniform(-b, b))), (2, 3, 0.7, 0.1), (1, 3, 0.5, -0.5)],
        [0.2, 0.0, -0.6],
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--r0", type=int, default=24)
    parser.add_argument("--doublings", type=int, default=5)
    args = parser.parse_args()

    print("model,beta,r,gates,log_error,magnus_delta,magnus_bound")
    for name, ham in models():
        log_z = math.log(exact_partition(ham, args.beta))
        r = args.r0
        for _ in range(args.doublings + 1):
            seq = build_sequence(ham, args.beta, r=r)
            err = abs(sequence_log_trace(seq) - log_z)
            diag = verify_magnus(seq, args.beta, ham)
            print(
                f"{name},{args.beta},{r},{len(seq)},{err:.3e},"
                f"{diag.magnus_delta_norm:.3e},{diag.magnus_bound:.3e}"
            )
            r *= 2


if __name__ == "__main__":
    main()
