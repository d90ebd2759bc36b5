"""Numpy implementations of the jet kernels (fallback backend)."""
import numpy as np


def mul(a, b, I, J, K):
    return np.bincount(K, weights=a[I] * b[J], minlength=a.shape[0])


def compose(a, coeffs, I, J, K):
    # Horner in the nilpotent part h = a - a[0]; coeffs[k] = f^(k)(a0) / k!
    h = a.copy()
    h[0] = 0.0
    r = np.zeros_like(a)
    r[0] = coeffs[-1]
    for c in coeffs[-2::-1]:
        r = np.bincount(K, weights=r[I] * h[J], minlength=a.shape[0])
        r[0] += c
    return r
