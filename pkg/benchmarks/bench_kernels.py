"""Time each kernel on its numba and numpy paths at corpus scale.

    python benchmarks/bench_kernels.py [--sentences 2000000] [--docs 20000] [--repeat 5]

Both paths are called directly, so NETZERO_DISABLE_NUMBA does not matter
here. Results are checked for agreement before timing.
"""

import argparse
import time

import numpy as np

from netzero import _kernels as K
from netzero.classifier.hashed import featurize
from netzero.synthetic import synthetic_dataset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(args, rng):
    n, docs = args.sentences, args.docs
    rows = rng.integers(0, docs, n)
    cols = rng.integers(0, 3, n)
    yield "pair_counts", (rows, cols, docs, 3), K.pair_counts_numpy, K.pair_counts_numba

    keys = rng.integers(0, 40, docs)
    vals = rng.random((docs, 2))
    yield "group_sums", (keys, vals, 40), K.group_sums_numpy, K.group_sums_numba

    texts = [s.text for s in synthetic_dataset(seed=1)] * 4
    nf = 2 ** 18
    indptr, indices, data = featurize(texts, nf)
    W = rng.normal(size=(nf, 3)) * 0.01
    b = np.zeros(3)
    yield "sparse_logits", (indptr, indices, data, nf, W, b), K.sparse_logits_numpy, K.sparse_logits_numba

    y = rng.integers(0, 3, len(texts))
    order = rng.permutation(len(texts))
    lrs = np.full(-(-len(texts) // 32), 0.5)

    def sgd(fn):
        # fresh weights per call so every timing does the same work
        return lambda: fn(indptr, indices, data, nf, y, order, 32, np.zeros((nf, 3)), np.zeros(3), lrs)

    yield "sgd_epoch", None, sgd(K.sgd_epoch_numpy), sgd(K.sgd_epoch_numba)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sentences", type=int, default=2_000_000)
    ap.add_argument("--docs", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if K.pair_counts_numba is None:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<14} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for name, call_args, np_fn, nb_fn in cases(args, rng):
        if call_args is not None:
            a, b = np_fn(*call_args), nb_fn(*call_args)
            for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
                np.testing.assert_allclose(x, y, rtol=1e-9, atol=1e-12)
            run_np, run_nb = (lambda f=np_fn: f(*call_args)), (lambda f=nb_fn: f(*call_args))
        else:
            run_np, run_nb = np_fn, nb_fn
        run_nb()  # compile outside the timing
        t_np, t_nb = best_of(run_np, args.repeat), best_of(run_nb, args.repeat)
        print(f"{name:<14} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
