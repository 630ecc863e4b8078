"""Compare the compiled and pure-Python kernels.

Run from the repository root::

    python3 benchmarks/bench_kernels.py

Each workload runs in a fresh subprocess, once with the default backend and
once with ``CMKISIN_PURE=1``.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, random, time
from cmkisin import kernels
from cmkisin.lubin_tate import preset_module
from cmkisin.kisin_core import wedge_power
from cmkisin.line_solver import enumerate_lines

rng = random.Random(0)
p, n = 5, 2000
a = [rng.randrange(p) for _ in range(n)]
b = [rng.randrange(p) for _ in range(n)]
t0 = time.perf_counter()
for _ in range(5):
    kernels.mul_trunc(a, b, p, n)
mul = (time.perf_counter() - t0) / 5

m = preset_module("h4-cyclic", 5)
t0 = time.perf_counter()
for corank in (3, 2, 1):
    enumerate_lines(wedge_power(m, m.rank - corank))
lines = time.perf_counter() - t0
print(json.dumps({"backend": kernels.BACKEND, "mul_trunc_2000": mul, "lines_p5": lines}))
"""


def run(pure: bool) -> dict:
    env = dict(os.environ)
    if pure:
        env["CMKISIN_PURE"] = "1"
    else:
        env.pop("CMKISIN_PURE", None)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main() -> None:
    fast, slow = run(False), run(True)
    print(f"{'workload':<18}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in ("mul_trunc_2000", "lines_p5"):
        ratio = slow[key] / fast[key] if fast[key] else float("inf")
        print(f"{key:<18}{fast[key]:>11.4f}s{slow[key]:>11.4f}s{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
