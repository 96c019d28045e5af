"""Time the compiled kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the switch is read at
import time. The first call of every workload is reported separately as
warm-up (it includes JIT compilation or cache loading for numba).

    python benchmarks/bench_backends.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
import loqcsim
from loqcsim import fock, fusion, walk

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
A = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
strategy = fusion.FusionStrategy("random", 16)
live = walk.coin_field(60, 0.8, np.random.default_rng(1))
psi0 = walk.initial_state(60)


def permanent():
    fock.permanent_ryser(A)


def chain():
    fusion.run_strategy(strategy, 200000, np.random.default_rng(2))


def walk_steps():
    psi = psi0
    for _ in range(60):
        psi = walk.step(psi, live)


out = {"backend": loqcsim.backend_name()}
for name, fn in (("permanent n=16", permanent), ("fusion chain 2e5 steps", chain),
                 ("walk 60 steps on 121x121", walk_steps)):
    t0 = time.perf_counter()
    fn()
    warm = time.perf_counter() - t0
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = (warm, best)
print(json.dumps(out))
"""


def run(backend_off, repeat):
    env = dict(os.environ)
    env.pop("LOQCSIM_NO_NUMBA", None)
    if backend_off:
        env["LOQCSIM_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'workload':28s} {fast['backend']:>10s} {slow['backend']:>10s} {'speed-up':>9s}  (warm-up {fast['backend']})")
    for name in fast:
        if name == "backend":
            continue
        (fw, fb), (_, sb) = fast[name], slow[name]
        print(f"{name:28s} {fb:9.4f}s {sb:9.4f}s {sb / fb:8.1f}x  ({fw:.3f}s)")


if __name__ == "__main__":
    main()
