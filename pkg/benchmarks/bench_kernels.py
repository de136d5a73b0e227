"""Compare the compiled and pure-Python grid kernels on the default search grid.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from nhqfi import pt
from nhqfi.kernels import _pykernels

try:
    from nhqfi.kernels import _ckernels
except ImportError:
    _ckernels = None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    ms, phis = pt._grid(pt.DEFAULT_M_GRID), pt._grid(pt.DEFAULT_PHI_GRID)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the fallback only")

    for label, params in (("unbroken", pt.UNBROKEN_DEMO), ("broken", pt.BROKEN_DEMOS[0])):
        inputs = pt._grid_inputs(params, 1.0)
        print(f"{label}: {ms.size} x {phis.size} grid")
        results, best = {}, {}
        for name, mod in backends.items():
            results[name] = mod.generator_qfi_grid(*inputs, ms, phis)[0]
            t = min(timeit.repeat(lambda: mod.generator_qfi_grid(*inputs, ms, phis), number=1, repeat=args.repeat))
            best[name] = t
            print(f"  {name:7s} {t * 1e3:9.2f} ms")
        if "cython" in best:
            diff = float(np.max(np.abs(results["cython"] - results["python"])))
            print(f"  speedup {best['python'] / best['cython']:.1f}x, max abs difference {diff:.1e}")


if __name__ == "__main__":
    main()
