"""Compare the numpy and numba curvature kernels on random batches.

    python3 benchmarks/bench_kernels.py [--batch 2000] [--dim 4] [--repeat 5]

Prints the best-of-N wall time per kernel for both paths, the speedup, and
the largest disagreement between them.
"""
import argparse
import time

import numpy as np

from warpform import _kernels as K


def random_batch(N, D, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(N, D, D))
    g = np.einsum("nij,nkj->nik", A, A) + D * np.eye(D)
    dg = rng.normal(size=(N, D, D, D))
    dg = dg + np.swapaxes(dg, 1, 2)
    d2g = rng.normal(size=(N, D, D, D, D))
    d2g = d2g + np.swapaxes(d2g, 1, 2)
    d2g = d2g + np.swapaxes(d2g, 3, 4)
    alpha = rng.normal(size=(N, 3, D, D))
    alpha = alpha + np.swapaxes(alpha, 2, 3)
    return g, dg, d2g, alpha


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--batch", type=int, default=2000)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        print("numba is not importable; only the numpy path can run")
        return
    g, dg, d2g, alpha = random_batch(args.batch, args.dim)
    gam, dgam = K.christoffel_np(g, dg, d2g)
    R = K.riemann_np(gam, dgam)
    cases = [
        ("christoffel", K.christoffel_np, K.christoffel_nb, (g, dg, d2g)),
        ("riemann", K.riemann_np, K.riemann_nb, (gam, dgam)),
        ("lower", K.lower_np, K.lower_nb, (g, R)),
        ("extrinsic_c", K.extrinsic_c_np, K.extrinsic_c_nb, (alpha,)),
    ]
    print(f"batch={args.batch} dim={args.dim} repeat={args.repeat}")
    print(f"{'kernel':14s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for name, f_np, f_nb, a in cases:
        f_nb(*[x[:2] for x in a])          # compile outside the timing
        t_np, o_np = best_of(f_np, a, args.repeat)
        t_nb, o_nb = best_of(f_nb, a, args.repeat)
        if not isinstance(o_np, tuple):
            o_np, o_nb = (o_np,), (o_nb,)
        diff = max(float(np.max(np.abs(x - y))) for x, y in zip(o_np, o_nb))
        print(f"{name:14s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
