"""Compare the compiled collection kernel against the pure-Python one.

Runs the same randomized workload (products, inverses, powers,
commutators and a consistency sweep) through both backends on a few
catalog groups, checks the results agree, and prints the timings.

Usage: python benchmarks/bench_kernel.py [--reps N]
"""

import argparse
import random
import time

from pearlforge.catalog import build_named, make_standard
from pearlforge.kernel import kernel_backend, make_kernel


def _kernels(pres):
    # flat[j*n + i] = [g_j, g_i]
    flat = [
        pres.comms.get((j, i), (0,) * pres.n)
        for j in range(pres.n)
        for i in range(pres.n)
    ]
    fast = make_kernel(pres.p, pres.n, pres.powers, flat)
    pure = make_kernel(pres.p, pres.n, pres.powers, flat,
                       force_pure=True)
    return fast, pure


def _workload(kern, elems, reps):
    t0 = time.perf_counter()
    out = []
    for _ in range(reps):
        for i in range(len(elems) - 1):
            u, v = elems[i], elems[i + 1]
            out.append(kern.mult(u, v))
            out.append(kern.inv(u))
            out.append(kern.pow(u, 5))
            out.append(kern.comm(u, v))
    ok = kern.consistency_ok()
    return time.perf_counter() - t0, out, ok


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20)
    args = ap.parse_args()

    groups = [
        ("sp4_sylow(p=3)", build_named("sp4_sylow", 3).pres),
        ("sp4_sylow(p=5)", build_named("sp4_sylow", 5).pres),
        ("7^5 host", make_standard(7, 5, {(2, 1): {4: 1}}, {})),
    ]
    rng = random.Random(20260825)
    print(f"default backend: {kernel_backend()}")
    print(f"{'group':>16} {'compiled':>10} {'pure':>10} {'speedup':>8}")
    for name, pres in groups:
        fast, pure = _kernels(pres)
        elems = [
            tuple(rng.randrange(pres.p) for _ in range(pres.n))
            for _ in range(200)
        ]
        tf, outf, okf = _workload(fast, elems, args.reps)
        tp, outp, okp = _workload(pure, elems, args.reps)
        assert outf == outp and okf == okp, f"backend mismatch on {name}"
        tag = "" if fast.is_compiled else "  (compiled unavailable)"
        print(f"{name:>16} {tf:>9.3f}s {tp:>9.3f}s "
              f"{tp / tf:>7.1f}x{tag}")


if __name__ == "__main__":
    main()
