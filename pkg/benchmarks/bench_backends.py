"""Time the compiled kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made at import
time from ``CHUASYNC_DISABLE_NUMBA``. The compiled run reports its first call
(compile or cache load) separately from the steady-state timings.

    python3 benchmarks/bench_backends.py [--repeat 3] [--t-end 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from chuasync import _accel
from chuasync.certificate import build_m
from chuasync.config import load_scenario
from chuasync.simulate import initial_states, simulate_network
from chuasync.spectral import eigenvalues

repeat, t_end = int(sys.argv[1]), float(sys.argv[2])
sc = load_scenario("example1")
x0 = initial_states(sc.topology.n, sc.sim.seed)
m = build_m(sc.params, sc.topology, 0, sc.coupling.k1, sc.coupling.k2)

def run_sim():
    return simulate_network(sc.params, sc.topology, sc.coupling, x0, 1e-3, t_end, 10)

def run_eig():
    return eigenvalues(m)

def best(fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out

t0 = time.perf_counter()
run_eig()
simulate_network(sc.params, sc.topology, sc.coupling, x0, 1e-3, 0.01, 1)
first = time.perf_counter() - t0
sim_t, traj = best(run_sim)
eig_t, spec = best(run_eig)
print(json.dumps({
    "backend": _accel.backend(),
    "first_call_s": first,
    "simulate_s": sim_t,
    "eigensolve_s": eig_t,
    "final_state_sum": float(traj.states[-1].sum()),
    "abscissa": spec.abscissa,
}))
"""


def run(disable, repeat, t_end):
    env = dict(os.environ)
    env.pop("CHUASYNC_DISABLE_NUMBA", None)
    if disable:
        env["CHUASYNC_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat), str(t_end)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--t-end", type=float, default=5.0, help="simulated time for the 20-node network")
    args = ap.parse_args(argv)

    fast = run(False, args.repeat, args.t_end)
    slow = run(True, args.repeat, args.t_end)
    print(f"20-node network, t_end={args.t_end:g}, dt=1e-3; 38x38 eigensolve; best of {args.repeat}")
    print(f"{'':12}{'first call':>12}{'simulate':>12}{'eigensolve':>12}")
    for r in (fast, slow):
        print(f"{r['backend']:12}{r['first_call_s']:12.3f}{r['simulate_s']:12.3f}{r['eigensolve_s']:12.4f}")
    print(f"speedup     {'':12}{slow['simulate_s'] / fast['simulate_s']:12.1f}"
          f"{slow['eigensolve_s'] / fast['eigensolve_s']:12.1f}")
    drift = abs(fast["final_state_sum"] - slow["final_state_sum"])
    print(f"backend agreement: final-state sum differs by {drift:.2e}, "
          f"abscissa by {abs(fast['abscissa'] - slow['abscissa']):.2e}")


if __name__ == "__main__":
    main()
