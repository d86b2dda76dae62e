"""Compare the compiled kernels with the pure-Python fallback.

Each backend runs in its own interpreter (the choice is made at import time
from SDSPEC_PURE_PYTHON), timing the raw kernels and one oracle spectrum.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from sdspec import kernels
from sdspec import oracle
from sdspec.quantize import SpectralParams
from sdspec.surface import SurfaceProfile

repeat = int(sys.argv[1])
tilted = SurfaceProfile.from_coefficients(-1.0, 1.0, [1.0, 0.3])
ode = oracle.RadialODE(tilted)
a2, a1, a0 = ode.local(-0.3, 1.0, 400.0)
c = kernels.series_coefficients(a2, a1, a0, 0.0, 1.0, 0.5, 64)
xs = np.geomspace(1e-3, 50.0, 2000)
params = SpectralParams.from_ratio(0.1, 1.0, (0.05, 1.0))
cases = {
    "poly_shift (deg 12)": lambda: kernels.poly_shift(a2, 0.37, -1.0),
    "series_coefficients (64 terms)": lambda: kernels.series_coefficients(a2, a1, a0, 0.0, 1.0,
                                                                           0.5, 64),
    "series_eval (64 terms)": lambda: kernels.series_eval(c, 0.0, 0.4),
    "bessel01_array (2000 pts)": lambda: kernels.bessel01_array(xs),
    "oracle_spectrum (h=0.1)": lambda: oracle.oracle_spectrum(tilted, params),
}
out = {"backend": kernels.BACKEND, "times": {}}
for name, fn in cases.items():
    n = 1 if name.startswith("oracle") else 200
    t = min(timeit.repeat(fn, number=n, repeat=repeat)) / n
    out["times"][name] = t
print(json.dumps(out))
"""


def run(pure, repeat):
    env = dict(os.environ)
    if pure:
        env["SDSPEC_PURE_PYTHON"] = "1"
    else:
        env.pop("SDSPEC_PURE_PYTHON", None)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    if fast["backend"] != "compiled":
        print("compiled extension not importable; both columns are pure Python", file=sys.stderr)
    print(f"{'kernel':34s} {'compiled':>12s} {'python':>12s} {'speedup':>8s}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:34s} {t_fast * 1e6:10.1f}us {t_slow * 1e6:10.1f}us {t_slow / t_fast:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
