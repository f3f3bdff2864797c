"""Timing comparison of the compiled objective/gradient kernel against the
pure-numpy reference, on a representative 3-qubit template.

Run: python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from pamc.kernels import COMPILED, reference
from pamc.synthesis import SynthesisConfig, root_template
from pamc.library import qft

if COMPILED:
    from pamc.kernels import _core
else:
    _core = None


def build_case():
    tpl = root_template(3)
    for edge in [(0, 1), (1, 2), (0, 1)]:
        tpl = tpl.extended(edge)
    target = qft(3).unitary()
    rng = np.random.default_rng(0)
    theta = rng.uniform(-np.pi, np.pi, tpl.num_params)
    return tpl, theta, target


def time_fn(fn, tpl, theta, target, reps=2000):
    fn(tpl._kind, tpl._a, tpl._b, theta, target, 3)  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(tpl._kind, tpl._a, tpl._b, theta, target, 3)
    return (time.perf_counter() - t0) / reps


def main():
    tpl, theta, target = build_case()
    t_ref = time_fn(reference.objective_and_grad, tpl, theta, target)
    print(f"reference (numpy):  {t_ref * 1e6:9.1f} us/call")
    if _core is None:
        print("compiled kernel unavailable (install built without Cython)")
        return
    t_c = time_fn(_core.objective_and_grad, tpl, theta, target)
    print(f"compiled  (cython): {t_c * 1e6:9.1f} us/call")
    print(f"speedup: {t_ref / t_c:.1f}x")
    c0, g0 = reference.objective_and_grad(tpl._kind, tpl._a,
                                          tpl._b, theta, target, 3)
    c1, g1 = _core.objective_and_grad(tpl._kind, tpl._a,
                                      tpl._b, theta, target, 3)
    print(f"agreement: |dcost|={abs(c0 - c1):.2e} "
          f"|dgrad|={np.abs(g0 - g1).max():.2e}")


if __name__ == "__main__":
    main()
