"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter, selected through DWPURITY_NO_NUMBA,
so the comparison exercises the same dispatch path as normal use.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from dwpurity import kernels
from dwpurity.qpt import gp_vs_x, uniform_grid
from dwpurity.spectral import eig_symmetric

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
d, e = rng.normal(size=(200, 201)), rng.uniform(0, 1, size=(200, 200))
a = rng.normal(size=(201, 201)); a = a + a.T
x = uniform_grid(0.0, 1.0, 0.005)

cases = {
    "top_eigenpairs 200 x n=201": lambda: kernels.top_eigenpairs(d, e),
    "eig_symmetric n=201": lambda: eig_symmetric(a),
    "sweep N=400, 201 nodes": lambda: gp_vs_x(400, x),
}
out = {"backend": kernels.backend_name()}
for name, fn in cases.items():
    fn()  # warm-up, includes JIT compilation
    out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
print(json.dumps(out))
"""


def run(flag, repeat):
    env = dict(os.environ, DWPURITY_NO_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    jit, ref = run("0", args.repeat), run("1", args.repeat)
    cases = [k for k in jit if k != "backend"]
    width = max(map(len, cases))
    print(f"{'case':<{width}}  {jit['backend']:>10}  {ref['backend']:>10}  speedup")
    for k in cases:
        print(f"{k:<{width}}  {jit[k] * 1e3:>8.2f}ms  {ref[k] * 1e3:>8.2f}ms  {ref[k] / jit[k]:>6.1f}x")


if __name__ == "__main__":
    main()
