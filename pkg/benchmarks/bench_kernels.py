"""Timing comparison of the compiled and pure time-stepping kernels.

Runs the same RK4 workloads through both backends in one process and
prints the best-of-N wall time for each, the speedup, and the maximum
amplitude difference between the final states as a cross-check.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np
import scipy.sparse

from mfelens import _kernels_py

try:
    from mfelens import _kernels
except ImportError:
    _kernels = None


def unit_state(rng, dim):
    c = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return np.ascontiguousarray(c / np.linalg.norm(c))


def arrowhead_case(rng, n_atoms, n_modes):
    delta = rng.uniform(-0.2, 0.2, size=n_modes)
    alpha = 0.05 * (
        rng.normal(size=(n_atoms, n_modes)) + 1j * rng.normal(size=(n_atoms, n_modes))
    )
    return ("make_arrowhead_stepper", (delta, alpha)), unit_state(rng, n_atoms + n_modes)


def csr_case(rng, dim, density):
    upper = scipy.sparse.random(dim, dim, density=density, format="coo", rng=rng)
    upper.data = upper.data + 1j * rng.normal(size=upper.nnz)
    h = (upper + upper.conj().T + scipy.sparse.diags(rng.uniform(-1.0, 1.0, dim))).tocsr()
    args = (h.indptr, h.indices, h.data.astype(complex), dim)
    return ("make_csr_stepper", args), unit_state(rng, dim)


def run_backend(module, factory, args, c0, dt, n_steps, repeats):
    best = np.inf
    final = None
    for _ in range(repeats):
        c = c0.copy()
        stepper = getattr(module, factory)(*args)
        start = time.perf_counter()
        stepper.step(c, dt, n_steps)
        best = min(best, time.perf_counter() - start)
        final = c
    return best, final


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats per case")
    opts = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; showing pure backend only")

    rng = np.random.default_rng(2024)
    cases = [
        ("arrowhead 2x270 (two-atom run)", *arrowhead_case(rng, 2, 270), 0.0125, 4000),
        ("arrowhead 200x270 (ensembles)", *arrowhead_case(rng, 200, 270), 0.0125, 800),
        ("csr 8000, 6/row (full dipole)", *csr_case(rng, 8000, 6.0 / 8000), 0.0125, 200),
    ]
    header = f"{'case':<32}{'steps':>6}{'pure':>10}{'compiled':>10}{'speedup':>9}{'max diff':>10}"
    print(header)
    print("-" * len(header))
    for label, (factory, args), c0, dt, n_steps in cases:
        t_pure, c_pure = run_backend(_kernels_py, factory, args, c0, dt, n_steps, opts.repeats)
        if _kernels is None:
            print(f"{label:<32}{n_steps:>6}{t_pure:>9.3f}s{'-':>10}{'-':>9}{'-':>10}")
            continue
        t_ext, c_ext = run_backend(_kernels, factory, args, c0, dt, n_steps, opts.repeats)
        diff = np.abs(c_ext - c_pure).max()
        print(
            f"{label:<32}{n_steps:>6}{t_pure:>9.3f}s{t_ext:>9.3f}s"
            f"{t_pure / t_ext:>8.1f}x{diff:>10.1e}"
        )


if __name__ == "__main__":
    main()
