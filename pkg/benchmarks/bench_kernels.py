"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the environment switch
MAYEKTTS_PURE_PYTHON has no effect here.
"""
import argparse
import timeit

import numpy as np

from mayektts._ext import pykernels
from mayektts.audio import resample_phases

try:
    from mayektts._ext import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, 44100 * 5)
    phases, half, up, down = resample_phases(44100, 22050)
    n_out = len(x) * up // down
    yield "resample 5 s 44.1k->22.05k", "polyphase_resample", (x, phases, half, up, down, n_out)

    x = rng.uniform(-1, 1, 16000 * 3)
    phases, half, up, down = resample_phases(16000, 22050)
    yield "resample 3 s 16k->22.05k", "polyphase_resample", (x, phases, half, up, down, len(x) * up // down)

    xc, w, b = rng.normal(size=(128, 200)), rng.normal(size=(128, 128, 5)), rng.normal(size=128)
    yield "conv1d 128ch k=5 T=200 (encoder)", "conv1d_same", (xc, w, b)

    alpha, w, b = rng.dirichlet(np.ones(40))[None, :], rng.normal(size=(8, 1, 15)), np.zeros(8)
    yield "conv1d 1->8ch k=15 L=40 (location)", "conv1d_same", (alpha, w, b)

    frames = rng.normal(size=(87, 1024))
    yield "overlap-add 87x1024 hop 256", "overlap_add", (frames, 256, 1024 + 86 * 256)


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat, loops)) / loops


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the numpy backend is available")
    print(f"{'workload':<38}{'numpy':>12}{'cython':>12}{'speedup':>10}{'max diff':>11}")
    for label, name, fargs in workloads():
        t_py = best_time(getattr(pykernels, name), fargs, args.repeat)
        if _ckernels is None:
            print(f"{label:<38}{t_py * 1e3:>10.3f}ms")
            continue
        t_c = best_time(getattr(_ckernels, name), fargs, args.repeat)
        diff = np.max(np.abs(np.asarray(getattr(_ckernels, name)(*fargs))
                             - np.asarray(getattr(pykernels, name)(*fargs))))
        print(f"{label:<38}{t_py * 1e3:>10.3f}ms{t_c * 1e3:>10.3f}ms{t_py / t_c:>9.2f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
