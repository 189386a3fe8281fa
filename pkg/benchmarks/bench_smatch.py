"""Compare the numba and numpy hill-climbing kernels on random graph pairs.

    python3 benchmarks/bench_smatch.py --pairs 200 --nodes 40 --restarts 4
"""
import argparse
import random
import time

from pseudoamr import _kernels
from pseudoamr.smatch import smatch
from pseudoamr.testing import perturb, random_graph, CONCEPTS, LABELS


def make_pairs(n, nodes, seed):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        g = random_graph(rng, max_nodes=nodes, min_nodes=nodes // 2)
        pairs.append((g, perturb(rng, g, CONCEPTS, LABELS)))
    return pairs


def run(pairs, restarts, backend):
    start = time.perf_counter()
    matched = [smatch(g, p, restarts, k, backend).smatch.matched for k, (g, p) in enumerate(pairs)]
    return time.perf_counter() - start, matched


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=200)
    parser.add_argument("--nodes", type=int, default=40)
    parser.add_argument("--restarts", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.nodes, args.seed)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    if "numba" in backends:
        run(pairs[:1], 1, "numba")  # JIT warm-up, excluded from timing
    results = {}
    for backend in backends:
        seconds, matched = run(pairs, args.restarts, backend)
        results[backend] = matched
        print(f"{backend:6s} {seconds:8.3f}s  {1000 * seconds / len(pairs):7.2f} ms/pair  matched={sum(matched)}")
    if len(results) == 2:
        same = results["numba"] == results["numpy"]
        print("backends agree" if same else "BACKENDS DISAGREE")


if __name__ == "__main__":
    main()
