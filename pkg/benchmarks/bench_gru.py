"""Compare the compiled GRU kernels with the numpy fallback.

Usage: python3 benchmarks/bench_gru.py [--repeat N]

Times forward and backward recurrences at a few sequence lengths and hidden
sizes, then one optimizer step of the full model under each backend.
"""

import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from dagn.harness import ExperimentConfig, generate_synthetic
from dagn.harness.optim import AdamW
from dagn.encoder import Vocabulary
from dagn.numerics import _gru_py, kernels
from dagn.numerics.tensor import Tape, backward
from dagn.predictor import DAGN

try:
    from dagn.numerics import _gru_ext
except ImportError:
    _gru_ext = None

SHAPES = [(32, 8), (128, 16), (256, 32), (256, 64)]


def case(length, h, seed=0):
    r = np.random.default_rng(seed)
    return (r.normal(size=(length, 3 * h)), r.normal(size=(h, 3 * h)) * 0.3,
            r.normal(size=3 * h) * 0.1, r.normal(size=(length, h)))


def best_of(fn, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench_kernels(impls, repeat):
    print(f"{'L':>5} {'h':>4} " + " ".join(f"{name + ' fwd':>12} {name + ' bwd':>12}"
                                             for name in impls) + "   speedup")
    for length, h in SHAPES:
        gx, w_h, b_h, dout = case(length, h)
        row, totals = [], []
        for impl in impls.values():
            saved = impl.gru_forward(gx, w_h, b_h)
            fwd = best_of(lambda: impl.gru_forward(gx, w_h, b_h), repeat)
            bwd = best_of(lambda: impl.gru_backward(dout, *saved, w_h), repeat)
            row += [fwd, bwd]
            totals.append(fwd + bwd)
        cells = " ".join(f"{t * 1e6:10.1f}us" for t in row)
        speed = f"{totals[0] / totals[-1]:8.1f}x" if len(totals) > 1 else ""
        print(f"{length:5d} {h:4d} {cells} {speed}")


@contextmanager
def backend(impl):
    saved = kernels._impl
    kernels._impl = impl
    try:
        yield
    finally:
        kernels._impl = saved


def bench_train_step(impls, repeat):
    cfg = ExperimentConfig(hidden=32)
    samples = generate_synthetic(16, seed=0)
    model = DAGN(cfg.model_config(), Vocabulary.from_samples(samples), seed=0)
    prepared = [model.prepare(s) for s in samples]
    opt = AdamW(model.parameters(), lr=0.0)  # lr 0 keeps every timed step identical

    def step():
        for p in model.parameters():
            p.zero_grad()
        for s, prep in zip(samples, prepared):
            with Tape():
                loss = model.loss(prep, s.label)
            backward(loss)
        opt.step()

    print(f"\ntrain step, batch of {len(samples)}, hidden {cfg.hidden}:")
    for name, impl in impls.items():
        with backend(impl):
            print(f"  {name:>7}: {best_of(step, repeat) * 1e3:8.1f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    impls = {"python": _gru_py}
    if _gru_ext is None:
        print("compiled extension not built; timing the numpy fallback only")
    else:
        impls["cython"] = _gru_ext
    bench_kernels(impls, args.repeat)
    bench_train_step(impls, args.repeat)


if __name__ == "__main__":
    main()
