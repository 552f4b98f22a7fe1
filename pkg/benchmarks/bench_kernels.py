"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly so one process can compare them. The
compiled module is skipped with a note if it has not been built.
"""
import argparse
import time

import numpy as np

from grf_toolkit import _kernels_py
from grf_toolkit.rng import bit_generator

try:
    from grf_toolkit import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def edt_case(h, w, density, seed=0):
    rng = np.random.default_rng(seed)
    mask = rng.random((h, w)) < density
    return np.ascontiguousarray(mask, dtype=np.uint8)


def normals_case(n, seed=76539635):
    return bit_generator(seed).random_raw(int(n * 1.3) + 64)


def run(repeat):
    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled kernels not built, timing the fallback only")

    cases = []
    for h, w, d in [(120, 160, 0.3), (480, 640, 0.05), (480, 640, 0.5)]:
        mask = edt_case(h, w, d)
        cases.append((f"edt_sq {w}x{h} p={d}", lambda k, m=mask: k.edt_sq(m)))
    raw = normals_case(640 * 480)

    def normals(k, r=raw):
        out = np.empty(640 * 480)
        k.polar_normals(r, out, 0)
        return out

    cases.append(("polar_normals 307200", normals))

    # results must agree before timings mean anything
    for name, fn in cases:
        outs = [fn(k) for k in backends.values()]
        if len(outs) > 1:
            assert outs[0].tobytes() == outs[1].tobytes(), name

    print(f"{'case':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases:
        t = {b: best_of(lambda: fn(k), repeat) for b, k in backends.items()}
        row = f"{name:<28}" + "".join(f"{t[b] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in t:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    run(ap.parse_args().repeat)
