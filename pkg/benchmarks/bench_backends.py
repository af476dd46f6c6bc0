"""Benchmark the compiled kernel backend against the NumPy fallback.

Times the three Q-network kernels at the shipped layer sizes plus a short
end-to-end training run per backend.  Run from the repository root:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --batch 64 --episodes 30
"""

import argparse
import time

import numpy as np

from submask import NetworkConfig, QNetwork, Scenario, TrainConfig, train
from submask.backends import available_backends, get_backend


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(backend_name, sizes, batch, repeats):
    backend = get_backend(backend_name)
    rng = np.random.default_rng(0)
    net = QNetwork.initialize(sizes, rng, backend=backend)
    x = rng.normal(size=sizes[0])
    xs = rng.normal(size=(batch, sizes[0]))
    acts = rng.integers(0, sizes[-1], size=batch)
    targets = rng.normal(size=batch)

    def step():
        work = net.copy()
        work.train_step(xs, acts, targets, 1e-4)

    return {
        "forward": time_call(lambda: net.forward(x), repeats),
        "forward_batch": time_call(lambda: net.forward_batch(xs), repeats),
        "train_step": time_call(step, repeats),
    }


def bench_training(backend_name, episodes):
    backend = get_backend(backend_name)
    cfg = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1,
                        r_min=7.2e6)
    tconf = TrainConfig(episodes=episodes, rng_seed=0)
    t0 = time.perf_counter()
    train(cfg, tconf, Scenario.ALL_EDGE, backend=backend)
    elapsed = time.perf_counter() - t0
    return episodes / elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--episodes", type=int, default=20,
                        help="episodes for the end-to-end timing")
    parser.add_argument("--obs", type=int, default=18,
                        help="observation size (default: 2 cells, 8 sub-bands)")
    parser.add_argument("--actions", type=int, default=17)
    args = parser.parse_args()

    sizes = [args.obs, 128, 128, args.actions]
    names = available_backends()
    if len(names) < 2:
        print("compiled backend not built; benchmarking NumPy only")

    results = {n: bench_kernels(n, sizes, args.batch, args.repeats)
               for n in names}
    print(f"\nkernel timings, layer sizes {sizes}, batch {args.batch} "
          f"(best of {args.repeats}):")
    header = f"{'kernel':<16}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{names[1] + '/' + names[0]:>15}"
    print(header)
    for kernel in ["forward", "forward_batch", "train_step"]:
        row = f"{kernel:<16}"
        for n in names:
            row += f"{results[n][kernel] * 1e6:>12.1f}us"
        if len(names) == 2:
            ratio = results[names[1]][kernel] / results[names[0]][kernel]
            row += f"{ratio:>14.2f}x"
        print(row)

    print(f"\nend-to-end training, {args.episodes} episodes:")
    for n in names:
        eps = bench_training(n, args.episodes)
        print(f"{n:<16}{eps:>10.2f} episodes/s")


if __name__ == "__main__":
    main()
