"""Compare the compiled and numpy jet kernels.

    python benchmarks/bench_kernels.py [--repeat 200]

Times the raw ``mul``/``compose`` kernels on the (1, 3) jet spaces used by
the tensor code, then a full point-frame evaluation under each backend
(the frame run uses a subprocess per backend, since selection happens at
import time).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from betafinsler.jets import _pykernels
from betafinsler.jets.space import jet_space

try:
    from betafinsler.jets import _ckernels
except ImportError:
    _ckernels = None

FRAME_SNIPPET = """
import time
from betafinsler.scenarios import get_scenario
from betafinsler.beta_change import ChangePair
from betafinsler.jets import kernels
sc = get_scenario("randers-base-matsumoto")
pts = sc.points(40)
t = time.perf_counter()
for p in pts:
    cp = ChangePair(sc.space, sc.change, p, sc.bar_space)
    cp.differences
print(kernels.BACKEND, (time.perf_counter() - t) / len(pts))
"""


def bench_kernels(repeat: int):
    rows = []
    for n in (2, 3, 4):
        s = jet_space(n, n, 1, 3)
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal(s.size), rng.standard_normal(s.size)
        a[0] = 2.0
        coeffs = rng.standard_normal(s.max_degree + 1)
        args = (s.mul_i, s.mul_j, s.mul_k)
        backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
        for name, mod in backends:
            tm = min(timeit.repeat(lambda: mod.mul(a, b, *args), number=repeat, repeat=3))
            tc = min(timeit.repeat(lambda: mod.compose(a, coeffs, *args), number=repeat,
                                   repeat=3))
            rows.append((n, s.size, name, tm / repeat * 1e6, tc / repeat * 1e6))
    print(f"{'n':>2} {'size':>5} {'backend':>8} {'mul [us]':>10} {'compose [us]':>13}")
    for n, size, name, tm, tc in rows:
        print(f"{n:>2} {size:>5} {name:>8} {tm:>10.2f} {tc:>13.2f}")


def bench_frames():
    print("\nper-point ChangePair with difference tensors:")
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("BETAFINSLER_PURE_PYTHON", None)
        if pure:
            env["BETAFINSLER_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", FRAME_SNIPPET], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        print(f"  {out[0]:>8}: {float(out[1]) * 1e3:.2f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    bench_kernels(args.repeat)
    bench_frames()


if __name__ == "__main__":
    main()
