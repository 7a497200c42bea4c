#!/usr/bin/env python3
"""Step-kernel benchmark: pure Python fallback vs compiled extension.

Runs the same workloads on both backends, checks the trajectories agree
bit for bit, and reports steps/second.

    python benchmarks/bench_step.py [--steps N]
"""

import argparse
import sys
import time

from geosim import kernels
from geosim.dsl import compile_doc, parse
from geosim.gas import step
from geosim.rng import SeededRng
from geosim.sim import trajectory

SEGREGATION = """
env {{
  param threshold = 0.35
}}
georef lattice {side} {side} torus
rule satisfaction transition {{
  unsatisfied := count(within(1) where other.group == self.group) < threshold * count(within(1))
}}
rule relocate movement {{
  if self.unsatisfied then random_vacant(move) else stay
}}
automaton person {{
  state group : symbol = red
  state unsatisfied : bool = false
  neighborhood moore 1
  transition satisfaction
  movement relocate
}}
place person {count} {{
  group := choose(coin; "red", "blue")
}}
run {{
  seed 3
  ticks 1
}}
"""

SOUP = """
georef lattice {side} {side} torus
rule evolve transition {{
  alive := if self.alive == 1 then (if count(within(1) where other.alive == 1) == 2 or count(within(1) where other.alive == 1) == 3 then 1 else 0) else (if count(within(1) where other.alive == 1) == 3 then 1 else 0)
}}
automaton cell {{
  state alive : number = 0
  neighborhood moore 1
  transition evolve
}}
place cell {count} {{
  alive := choose(soup; 0, 1)
}}
run {{
  seed 3
  ticks 1
}}
"""

WORKLOADS = [
    ("segregation 48x48, 85% occupied",
     SEGREGATION.format(side=48, count=int(48 * 48 * 0.85))),
    ("two-state soup 64x64, full lattice",
     SOUP.format(side=64, count=64 * 64)),
]


def run(compiled, steps, backend):
    kernels.use(backend)
    snap = compiled.snapshot
    rng = SeededRng(17)
    start = time.perf_counter()
    for _ in range(steps):
        snap = step(compiled.model, snap, rng)
    elapsed = time.perf_counter() - start
    return elapsed, trajectory.digest(
        trajectory.snapshot_lines(compiled.model, snap))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=30)
    args = ap.parse_args()

    names = list(kernels.backends())
    if "compiled" not in names:
        print("note: compiled kernel not built; benchmarking pure only",
              file=sys.stderr)
    print(f"{'workload':40} {'backend':9} {'steps/s':>10} {'total':>8}")
    for label, source in WORKLOADS:
        compiled = compile_doc(parse(source))
        digests = {}
        for backend in names:
            elapsed, digest = run(compiled, args.steps, backend)
            digests[backend] = digest
            print(f"{label:40} {backend:9} {args.steps / elapsed:10.1f} "
                  f"{elapsed:7.2f}s")
        if len(digests) == 2:
            agree = digests["pure"] == digests["compiled"]
            print(f"{'':40} results identical: {agree}")
            if not agree:
                sys.exit(1)
    kernels.use(names[-1])


if __name__ == "__main__":
    main()
