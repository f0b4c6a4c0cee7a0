"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

from __future__ import annotations

import argparse
import random
import timeit

from celx import _kernels_py

try:
    from celx import _kernels
except ImportError:
    _kernels = None


def hilbert_cases(seed: int, count: int) -> list[tuple[list[list[int]], int]]:
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        rows, cols = rng.randint(1, 4), rng.randint(2, 4)
        cases.append(([[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)], cols))
    return cases


def horn_cases(seed: int, count: int) -> list[tuple]:
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        dims, n = rng.randint(3, 6), rng.randint(2, 5)
        sources = [[rng.randint(0, 1) for _ in range(dims)] for _ in range(n)]
        for s in sources:
            if not any(s):
                s[rng.randrange(dims)] = 1
        nets = [[rng.randint(-1, 1) for _ in range(dims)] for _ in range(n)]
        budget = [rng.randint(1, 4) for _ in range(dims)]
        target = [rng.randint(-2, 2) for _ in range(dims)]
        cases.append((sources, nets, budget, target))
    return cases


def bench(label: str, fn, cases, repeat: int) -> float:
    best = min(timeit.repeat(lambda: [fn(*c) for c in cases], number=1, repeat=repeat))
    print(f"  {label:<8} {best * 1000:9.2f} ms")
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--cases", type=int, default=100)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("compiled", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled extension not built; timing the Python fallback only")
    for name, make, attr in (
        ("hilbert_basis", hilbert_cases, "hilbert_basis"),
        ("horn_search", horn_cases, "horn_search"),
    ):
        cases = make(0, args.cases)
        print(f"{name} ({len(cases)} cases)")
        times = {label: bench(label, getattr(mod, attr), cases, args.repeat) for label, mod in backends}
        if len(times) == 2:
            results = [[getattr(mod, attr)(*c) for c in cases] for _, mod in backends]
            assert results[0] == results[1], f"{name}: backends disagree"
            print(f"  speedup  {times['python'] / times['compiled']:9.1f}x")


if __name__ == "__main__":
    main()
