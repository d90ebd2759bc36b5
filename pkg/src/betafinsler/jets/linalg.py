"""Matrices of jets: products and inversion by a terminating Neumann series."""
from __future__ import annotations

import numpy as np

from . import kernels
from .jet import Jet


def _stack(M):
    space = M[0][0].space
    return space, np.array([[m.c for m in row] for row in M])


def _matmul(space, A, B):
    n, m, p = A.shape[0], A.shape[1], B.shape[1]
    out = np.zeros((n, p, space.size))
    I, J, K = space.mul_i, space.mul_j, space.mul_k
    for i in range(n):
        for j in range(p):
            acc = out[i, j]
            for k in range(m):
                acc += kernels.mul(A[i, k], B[k, j], I, J, K)
    return out


def inverse(M) -> list[list[Jet]]:
    """Inverse of a square matrix of jets sharing one space.

    With M = M0 + H (H nilpotent), M^-1 = sum_k (-M0^-1 H)^k M0^-1, and the
    sum terminates after ``max_degree`` terms.
    """
    space, A = _stack(M)
    n = A.shape[0]
    M0 = A[:, :, 0]
    inv0 = np.linalg.inv(M0)
    H = A.copy()
    H[:, :, 0] = 0.0
    inv0_j = np.zeros((n, n, space.size))
    inv0_j[:, :, 0] = inv0
    step = -np.einsum("ik,kjc->ijc", inv0, H)  # -M0^-1 H as a jet matrix
    term = inv0_j
    total = inv0_j.copy()
    for _ in range(space.max_degree):
        term = _matmul(space, step, term)
        total += term
    return [[Jet(space, total[i, j]) for j in range(n)] for i in range(n)]
