"""Time the compiled SMO kernel against the NumPy fallback.

Two workloads: many tiny dense problems (per-call overhead dominates) and
one sparse n-gram problem built from a synthetic review corpus (the shape
cross-validation sees). Both kernels must reach the same objective.

    python3 benchmarks/bench_solver.py --reviews 6 --repeat 3
"""

import argparse
import logging
import statistics
import tempfile
import time

import numpy as np

import revex._smo_py as pure
import revex.linsvm as linsvm
from revex.corpusgen import POSITIVE, build_gold_standard, load_queries
from revex.featurize import fit_feature_space
from revex.synth import SynthSpec, write_synthetic
from revex.textcore import load_documents

try:
    import revex._smo as compiled
except ImportError:
    compiled = None


def tiny_problems(seed, count):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 21))
        X = rng.normal(size=(n, int(rng.integers(1, 6))))
        y = rng.choice([-1.0, 1.0], size=n)
        y[0], y[1] = 1.0, -1.0
        out.append((X, y, float(10 ** rng.uniform(-2, 2))))
    return out


def corpus_problem(seed, reviews):
    spec = SynthSpec(n_reviews=reviews, seed=seed)
    with tempfile.TemporaryDirectory() as tmp:
        write_synthetic(spec, tmp)
        corpus = build_gold_standard(load_queries(f"{tmp}/reviews.json"), load_documents(f"{tmp}/articles"))
    sentences = [i.sentence for i in corpus.instances]
    space = fit_feature_space(sentences)
    y = np.array([1.0 if i.label == POSITIVE else -1.0 for i in corpus.instances])
    return space.transform(sentences), y


def timed(kernel, problems, repeat):
    linsvm.smo_run = kernel
    times, objectives = [], []
    for _ in range(repeat):
        start = time.perf_counter()
        objectives = [linsvm.train(X, y, C=C)[1].objective for X, y, C in problems]
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times), objectives


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tiny", type=int, default=100, help="number of tiny dense problems")
    ap.add_argument("--reviews", type=int, default=6, help="synthetic reviews for the sparse problem")
    ap.add_argument("--C", type=float, default=0.01, help="C for the sparse problem")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    logging.disable(logging.WARNING)

    kernels = [("python", pure.smo_run)]
    if compiled is not None:
        kernels.insert(0, ("cython", compiled.smo_run))
    else:
        print("compiled extension not built; timing the fallback only")

    X, y = corpus_problem(args.seed, args.reviews)
    workloads = [
        (f"{args.tiny} tiny dense problems", tiny_problems(args.seed, args.tiny)),
        (f"sparse corpus {X.shape[0]}x{X.shape[1]}, {int((y > 0).sum())} positive", [(X, y, args.C)]),
    ]
    for title, problems in workloads:
        print(title)
        results = {}
        for name, kernel in kernels:
            best, median, objectives = timed(kernel, problems, args.repeat)
            results[name] = (best, objectives)
            print(f"  {name:<7} best {best:8.3f}s  median {median:8.3f}s")
        if len(results) == 2:
            (fast, obj_c), (slow, obj_p) = results["cython"], results["python"]
            drift = max(abs(a - b) for a, b in zip(obj_c, obj_p))
            print(f"  speedup {slow / fast:6.1f}x   max objective difference {drift:.2e}")


if __name__ == "__main__":
    main()
