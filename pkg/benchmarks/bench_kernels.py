"""Compare the compiled and numpy kernel backends.

Times each hot kernel on MNIST-sized tensors, then one full training step
(forward + backward + Adam) of the depth-9 MNIST forest on a batch of 64.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]
"""

import argparse
import json
import timeit

import numpy as np

from ndfviz import autodiff as ad
from ndfviz import kernels
from ndfviz.forest import CLASSIFICATION, build_forest, forest_predict
from ndfviz.nets import Extractor, mnist_layers
from ndfviz.training import Adam, nll_loss


def kernel_cases(rng):
    # shapes of the first and second conv layers on a batch of 64
    x1 = np.ascontiguousarray(np.pad(rng.normal(size=(64, 1, 28, 28)), ((0, 0), (0, 0), (1, 1), (1, 1))))
    x2 = np.ascontiguousarray(np.pad(rng.normal(size=(64, 8, 14, 14)), ((0, 0), (0, 0), (1, 1), (1, 1))))
    cols2 = kernels.backends()["python"].im2col(x2, 3, 3, 1)
    pool_in = np.ascontiguousarray(rng.normal(size=(64, 8, 28, 28)))
    _, idx = kernels.backends()["python"].maxpool_forward(pool_in, 2)
    g = rng.normal(size=(64, 8, 14, 14))
    return {
        "im2col 64x1x30x30": lambda m: m.im2col(x1, 3, 3, 1),
        "im2col 64x8x16x16": lambda m: m.im2col(x2, 3, 3, 1),
        "col2im 64x8x16x16": lambda m: m.col2im(cols2, 64, 8, 16, 16, 3, 3, 1),
        "maxpool fwd 64x8x28x28": lambda m: m.maxpool_forward(pool_in, 2),
        "maxpool bwd 64x8x14x14": lambda m: m.maxpool_backward(g, idx, 2),
    }


def train_step_case(rng):
    ext = Extractor(mnist_layers(511), (1, 28, 28), seed=0)
    forest = build_forest(ext, 1, 9, 10, CLASSIFICATION)
    opt = Adam(ext.params)
    x = rng.normal(size=(64, 1, 28, 28)) * 0.5
    y = rng.integers(0, 10, size=64)

    def step():
        opt.zero_grad()
        ad.backward(nll_loss(forest_predict(forest, x), y))
        opt.step()

    return step


def best_ms(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat)) * 1e3


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--json", action="store_true", help="print results as one JSON object")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    available = kernels.backends()
    results = {}
    for name, case in kernel_cases(rng).items():
        results[name] = {b: best_ms(lambda m=m: case(m), args.repeat) for b, m in available.items()}
    step = train_step_case(rng)
    original = kernels.BACKEND
    results["train step (batch 64, depth 9)"] = {}
    for b in available:
        kernels.use_backend(b)
        results["train step (batch 64, depth 9)"][b] = best_ms(step, max(3, args.repeat // 2))
    kernels.use_backend(original)

    if args.json:
        print(json.dumps(results, indent=2))
        return
    names = list(available)
    print(f"{'case':34s}" + "".join(f"{n + ' ms':>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for case, times in results.items():
        row = f"{case:34s}" + "".join(f"{times[n]:14.3f}" for n in names)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:11.2f}x"
        print(row)


if __name__ == "__main__":
    main()
