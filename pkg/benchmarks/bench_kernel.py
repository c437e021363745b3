"""Throughput comparison of the compiled Gauss kernel vs the numpy one.

Both backends consume the identical sample stream and are written to
produce bit-identical per-sample values, so the only difference worth
measuring is wall-clock throughput.

    python benchmarks/bench_kernel.py [--samples N]
"""

import argparse
import time

from homlink.accept import BORROMEAN_WORD, TRIPOD_KEY
from homlink.csintegral import from_braid, integrate_diagram
from homlink.diagrams import enumerate_chord, key_from_str


def bench(name, diagram, link, samples, backend, seed=7):
    t0 = time.perf_counter()
    est = integrate_diagram(diagram, link, samples, seed=seed, backend=backend)
    dt = time.perf_counter() - t0
    rate = samples / dt
    print(f"  {name:24s} {backend:7s} {dt:8.3f}s  {rate:12.0f} samples/s")
    return est, dt


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200_000)
    args = ap.parse_args()

    clasp = from_braid("A(1,2)", 2)
    borr = from_braid(BORROMEAN_WORD, 3)
    cases = [
        ("clasp single chord", enumerate_chord(1, 2)[0], clasp),
        ("borromean two-chord", key_from_str("q1,1,2|f0|e1-3,2-4"), borr),
        ("borromean tripod", key_from_str(TRIPOD_KEY), borr),
    ]

    try:
        from homlink.csintegral import _gauss_cy  # noqa: F401

        backends = ["python", "cython"]
    except ImportError:
        print("compiled kernel unavailable; timing the numpy backend only")
        backends = ["python"]

    for name, diagram, link in cases:
        print(name)
        results = {}
        for backend in backends:
            est, dt = bench(name, diagram, link, args.samples, backend)
            results[backend] = (est, dt)
        if len(results) == 2:
            py_est, py_dt = results["python"]
            cy_est, cy_dt = results["cython"]
            match = py_est.value == cy_est.value and py_est.std_error == cy_est.std_error
            print(f"  speedup {py_dt / cy_dt:4.1f}x  bit-identical: {match}")
        print()


if __name__ == "__main__":
    main()
