"""Compare the compiled star-action kernels with their pure-numpy twins.

Two measurements:

* kernel level: ``_star_jit`` against ``_star_numpy`` on random integer
  tensors of the shapes the filtration and comodule code produce;
* end to end: ``ahs filtration`` and ``ahs spencer`` on bundled Meusers
  fixtures, once normally and once with ``AHS_DISABLE_JIT=1``.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--json PATH]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from ahs import kernels
from ahs.cli import bundled_fixtures

CASES = [
    # (label, n, batch, arity, value rank)
    ("connection n=6", 6, 9, 1, 2),
    ("curvature n=6", 6, 9, 2, 2),
    ("nabla R n=6", 6, 9, 3, 2),
    ("nabla^2 R n=7", 7, 16, 4, 2),
    ("nabla^3 R n=8", 8, 25, 5, 2),
    ("torsion-like n=8", 8, 25, 2, 1),
]


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def kernel_rows(repeat: int, rng: np.random.Generator) -> list[dict]:
    rows = []
    for label, n, batch, arity, rank in CASES:
        X = rng.integers(-3, 4, size=(batch, n, n)).astype(np.int64)
        X[rng.random(X.shape) < 0.7] = 0
        t = rng.integers(-3, 4, size=(n,) * (arity + rank)).astype(np.int64)
        kernels._star_jit(X[:1], t, arity, rank)  # compile outside the timing
        jit = _best(lambda: kernels._star_jit(X, t, arity, rank), repeat)
        ref = _best(lambda: kernels._star_numpy(X, t, arity, rank), repeat)
        assert np.array_equal(kernels._star_jit(X, t, arity, rank), kernels._star_numpy(X, t, arity, rank))
        rows.append({"case": label, "entries": int(t.size), "batch": batch, "numba_s": jit, "numpy_s": ref,
                     "speedup": ref / jit if jit else float("inf")})
    return rows


def cli_rows(repeat: int) -> list[dict]:
    fixtures = bundled_fixtures()
    commands = [
        ["filtration", str(fixtures / "meusers_m8.json"), "--joint"],
        ["spencer", str(fixtures / "meusers_m7.json")],
        ["check", str(fixtures / "meusers_m8.json"), "--direct"],
    ]
    rows = []
    for cmd in commands:
        timings = {}
        outputs = {}
        for mode, flag in (("numba", "0"), ("numpy", "1")):
            env = dict(os.environ, AHS_DISABLE_JIT=flag)
            argv = [sys.executable, "-m", "ahs.cli", *cmd, "--quiet"]
            best = float("inf")
            for _ in range(repeat):
                start = time.perf_counter()
                proc = subprocess.run(argv, env=env, capture_output=True, text=True)
                best = min(best, time.perf_counter() - start)
            timings[mode] = best
            outputs[mode] = proc.stdout
        rows.append({"command": " ".join([cmd[0], Path(cmd[1]).name] + cmd[2:]),
                     "numba_s": timings["numba"], "numpy_s": timings["numpy"],
                     "identical_reports": outputs["numba"] == outputs["numpy"]})
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--json", help="also write the results here")
    parser.add_argument("--skip-cli", action="store_true")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    result = {"kernels": kernel_rows(args.repeat, rng)}
    print(f"{'kernel case':<20}{'entries':>10}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for r in result["kernels"]:
        print(f"{r['case']:<20}{r['entries']:>10}{r['numba_s']:>12.5f}{r['numpy_s']:>12.5f}{r['speedup']:>9.1f}x")
    if not args.skip_cli:
        result["cli"] = cli_rows(max(1, args.repeat - 1))
        print()
        print(f"{'end to end (incl. startup)':<40}{'numba s':>10}{'numpy s':>10}  same report")
        for r in result["cli"]:
            print(f"{r['command']:<40}{r['numba_s']:>10.2f}{r['numpy_s']:>10.2f}  {r['identical_reports']}")
    if args.json:
        Path(args.json).write_text(json.dumps(result, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
