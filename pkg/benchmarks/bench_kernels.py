"""Time one excited-channel propagation under each stepping backend.

    python3 benchmarks/bench_kernels.py [--steps N] [--r-max BOHR]

Each backend runs in its own interpreter because the backend is chosen from
PHOTOCOHERENCE_BACKEND at import time.  The final wave packets of the two
runs are compared as well.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

WORKER = r"""
import json, sys, time
import numpy as np
from photocoherence import _kernels
from photocoherence.core import RadialGrid, TimeGrid, fs_to_au
from photocoherence.eigensolver import bound_states
from photocoherence.field import EnvelopeSpec, FieldSpec, synthesize
from photocoherence.potentials import ChannelSpec, PesSpec
from photocoherence.propagator import AbsorberSpec, PropagationRun, propagate

steps, r_max, out = int(sys.argv[1]), float(sys.argv[2]), sys.argv[3]
grid = RadialGrid.from_spacing(0.1, r_max, 0.02)
ground = ChannelSpec(PesSpec("morse", 0.1026, 2.0, 1.39, -0.10063063716885144), 0, 918.0)
gs = bound_states(ground, grid.truncated(14.0), 6)[5]
tg = TimeGrid(0.0, steps * fs_to_au(0.003), fs_to_au(0.003))
light = synthesize(FieldSpec(EnvelopeSpec.gaussian(tg.t_end / 2, tg.t_end / 8, 1e-4), 0.1), tg)
run = PropagationRun(grid, ChannelSpec(PesSpec("repulsive_exp", 0.1, 3.3, 1.0, 0.0), 1, 918.0),
                     light, gs, stride=steps, absorber=AbsorberSpec(0.9 * r_max))
warm_grid = TimeGrid(0.0, 10 * fs_to_au(0.003), fs_to_au(0.003))
warm_light = synthesize(FieldSpec(EnvelopeSpec.gaussian(warm_grid.t_end / 2, warm_grid.dt, 1e-4), 0.1), warm_grid)
short = PropagationRun(run.grid, run.channel, warm_light, gs, stride=10)
propagate(short)  # compile / warm up
t0 = time.perf_counter()
series = propagate(run)
elapsed = time.perf_counter() - t0
np.save(out, series.amplitudes[-1])
print(json.dumps({"backend": _kernels.BACKEND, "seconds": elapsed,
                  "us_per_step": 1e6 * elapsed / steps, "points": grid.n_points}))
"""


def run_backend(backend: str, steps: int, r_max: float, out: Path) -> dict:
    env = dict(os.environ, PHOTOCOHERENCE_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(steps), str(r_max), str(out)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=5000)
    parser.add_argument("--r-max", type=float, default=160.0)
    args = parser.parse_args(argv)

    import numpy as np

    with tempfile.TemporaryDirectory() as tmp:
        results = {}
        for backend in ("numba", "numpy"):
            path = Path(tmp) / f"{backend}.npy"
            results[backend] = run_backend(backend, args.steps, args.r_max, path)
            results[backend]["final"] = np.load(path)
    a, b = results["numba"].pop("final"), results["numpy"].pop("final")
    diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
    for name, r in results.items():
        print(f"{name:6s} backend={r['backend']:6s} points={r['points']} "
              f"{r['us_per_step']:9.1f} us/step  ({r['seconds']:.2f} s for {args.steps} steps)")
    speedup = results["numpy"]["seconds"] / results["numba"]["seconds"]
    print(f"speedup numba/numpy: {speedup:.2f}x   max relative difference of final packets: {diff:.2e}")


if __name__ == "__main__":
    main()
