"""Numba inner loops for the Monte Carlo backend.

Each helper averages the log-likelihood-ratio term of one expectation over a
noise vector, using a running max so that exponents scaling like -P|dx|^2
never overflow.  Loops are strictly serial so results are bit-reproducible.
"""

import numpy as np
from numba import njit

_LOG2E = 1.4426950408889634


@njit(cache=True)
def single_pair_stats(diffs, noise, weights):
    """Weighted mean and second moment of the single-input log ratio.

    diffs: (M,) complex, gain-scaled differences x_k - x_j for one fixed k.
    noise: (n,) complex draws; weights: (n,) float summing to one.
    """
    n = noise.shape[0]
    m = diffs.shape[0]
    acc1 = 0.0
    acc2 = 0.0
    for s in range(n):
        zr = noise[s].real
        zi = noise[s].imag
        top = -np.inf
        total = 0.0
        for j in range(m):
            wr = diffs[j].real + zr
            wi = diffs[j].imag + zi
            e = -(wr * wr + wi * wi)
            if e <= top:
                total += np.exp(e - top)
            else:
                total = total * np.exp(top - e) + 1.0
                top = e
        val = (top + np.log(total) + (zr * zr + zi * zi)) * _LOG2E
        acc1 += weights[s] * val
        acc2 += weights[s] * val * val
    return acc1, acc2


@njit(cache=True)
def cross_pair_stats(diffs_a, diffs_b, noise, weights):
    """Weighted stats of the cross log ratio for one (k, l) symbol pair.

    The denominator marginalises the a-branch only (its symbol is unknown but
    the interferer is fixed); the numerator marginalises both branches.
    """
    n = noise.shape[0]
    ma = diffs_a.shape[0]
    mb = diffs_b.shape[0]
    acc1 = 0.0
    acc2 = 0.0
    for s in range(n):
        zr = noise[s].real
        zi = noise[s].imag

        top_d = -np.inf
        tot_d = 0.0
        for j in range(ma):
            wr = diffs_a[j].real + zr
            wi = diffs_a[j].imag + zi
            e = -(wr * wr + wi * wi)
            if e <= top_d:
                tot_d += np.exp(e - top_d)
            else:
                tot_d = tot_d * np.exp(top_d - e) + 1.0
                top_d = e

        top_n = -np.inf
        tot_n = 0.0
        for j in range(ma):
            ar = diffs_a[j].real + zr
            ai = diffs_a[j].imag + zi
            for k in range(mb):
                wr = ar + diffs_b[k].real
                wi = ai + diffs_b[k].imag
                e = -(wr * wr + wi * wi)
                if e <= top_n:
                    tot_n += np.exp(e - top_n)
                else:
                    tot_n = tot_n * np.exp(top_n - e) + 1.0
                    top_n = e

        val = (top_n + np.log(tot_n) - top_d - np.log(tot_d)) * _LOG2E
        acc1 += weights[s] * val
        acc2 += weights[s] * val * val
    return acc1, acc2
