"""Time the compiled kernels against the numpy fallback on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bsmertens.exactmath import cached_spf, primes_upto
from bsmertens.ffield import extension_field
from bsmertens.kernels import BACKENDS


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    primes = primes_upto(10**6)
    spf = cached_spf(1 << 17)
    F = extension_field(3, 9)  # 19683 elements
    # x^3 + 2x + 1, coefficients high degree first
    cubic = np.array([F.code_log(1), -1, F.code_log(2), F.code_log(1)], dtype=np.int64)
    G = extension_field(2, 7)  # 128 elements, plane grid of 16384 points
    one = G.code_log(1)
    # y^2 z + y z^2 + x^3 dehomogenised at z = 1; F[i, j] holds log coeff of x^i y^j
    Fp = np.full((4, 3), -1, dtype=np.int64)
    Fp[0, 2] = Fp[0, 1] = Fp[3, 0] = one
    Fx = np.full((4, 3), -1, dtype=np.int64)
    Fx[2, 0] = G.code_log(1)  # 3x^2 = x^2 in characteristic 2
    Fy = np.full((4, 3), -1, dtype=np.int64)
    Fy[0, 0] = one  # 2y + 1 = 1
    return {
        "kronecker_primes(D=-104723, pi(10^6) primes)": lambda k: k.kronecker_primes(-104723, primes),
        "imag_char_moment(D=-99995)": lambda k: k.imag_char_moment(-99995, spf),
        "real_char_logsin(D=99997)": lambda k: k.real_char_logsin(99997, spf),
        "build_exp_table(F_{3^9})": lambda k: k.build_exp_table(3, 9, np.asarray(F.modulus[:9], dtype=np.int64)),
        "hyperelliptic_affine_count(F_{3^9})": lambda k: k.hyperelliptic_affine_count(cubic, F.zech, F.q),
        "plane_affine_count(F_{2^7})": lambda k: k.plane_affine_count(Fp, Fx, Fy, G.zech, G.q),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "compiled" not in BACKENDS:
        print("compiled kernels are not built; only the Python backend is available")
    names = sorted(BACKENDS)
    print(f"{'kernel':48s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}")
    for label, fn in cases().items():
        results = [fn(BACKENDS[n]) for n in names]
        if len(results) == 2 and not np.array_equal(np.asarray(results[0]), np.asarray(results[1])):
            if not np.allclose(np.asarray(results[0], dtype=float), np.asarray(results[1], dtype=float), rtol=1e-12):
                raise SystemExit(f"backends disagree on {label}")
        times = {n: _best(lambda n=n: fn(BACKENDS[n]), args.repeat) for n in names}
        speed = f"{times['python'] / times['compiled']:9.1f}x" if "compiled" in times else ""
        print(f"{label:48s}" + "".join(f"{times[n]:11.4f}s" for n in names) + speed)


if __name__ == "__main__":
    main()
