"""Compare the compiled VM core against the pure-Python fallback.

Runs bubble sort on reverse-sorted lists of growing size with both
backends, checks the reports match byte for byte, and prints throughput.

    python3 benchmarks/vm_backends.py [--sizes 128,256,512,1024]
"""

import argparse
import time

from emoc.corpus import bundled_manifest_path, load_manifest
from emoc.lang import lower
from emoc.vm import BACKEND, evaluate, evaluate_pure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="128,256,512,1024")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    man = load_manifest(bundled_manifest_path("sorting"))
    prog = next(p for p in man.programs if p.id == "bubble_baseline.alg")
    stream = lower(prog.tree)

    print(f"active backend: {BACKEND}")
    print(f"{'size':>6} {'steps':>12} {'compiled s':>11} {'pure s':>9} "
          f"{'compiled M/s':>13} {'pure M/s':>9} {'speedup':>8}")
    for n in sizes:
        data = list(range(n, 0, -1))
        t0 = time.perf_counter()
        rc = evaluate(stream, prog.entry, [list(data)])
        tc = time.perf_counter() - t0
        t0 = time.perf_counter()
        rp = evaluate_pure(stream, prog.entry, [list(data)])
        tp = time.perf_counter() - t0
        assert rc == rp, "backends disagree"
        print(f"{n:>6} {rc.steps:>12} {tc:>11.3f} {tp:>9.3f} "
              f"{rc.steps / tc / 1e6:>13.1f} {rc.steps / tp / 1e6:>9.2f} "
              f"{tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
