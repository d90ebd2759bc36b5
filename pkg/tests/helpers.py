"""Shared test utilities: random polynomials and small numeric helpers."""
from __future__ import annotations

import itertools

import numpy as np

from betafinsler.jets.space import jet_space


def random_polynomial(rng, nvars: int, degree: int = 4, terms: int = 12):
    """A random polynomial as a list of (coefficient, exponent tuple)."""
    monos = [e for d in range(degree + 1)
             for e in itertools.product(range(d + 1), repeat=nvars) if sum(e) == d]
    picks = rng.choice(len(monos), size=min(terms, len(monos)), replace=False)
    return [(float(rng.uniform(-1, 1)), monos[k]) for k in picks]


def evaluate(poly, args):
    """Evaluate with + and * only, so floats, mpmath numbers and jets all work."""
    total = 0.0
    for coef, exps in poly:
        term = coef
        for a, e in zip(args, exps):
            for _ in range(e):
                term = term * a
        total = total + term
    return total


def multi_indices(nx: int, ny: int, ox: int = 1, oy: int = 3):
    """Slot lists (xslots, yslots) for every mixed partial up to the orders."""
    out = []
    for kx in range(ox + 1):
        for xs in itertools.combinations_with_replacement(range(nx), kx):
            for ky in range(oy + 1):
                for ys in itertools.combinations_with_replacement(range(ny), ky):
                    out.append((xs, ys))
    return out


def rel_err(a, ref, floor: float = 1e-12):
    a, ref = np.asarray(a, float), np.asarray(ref, float)
    return float(np.max(np.abs(a - ref)) / max(float(np.max(np.abs(ref))), floor))


__all__ = ["random_polynomial", "evaluate", "multi_indices", "rel_err", "jet_space"]


def jet_vs_fd(poly, n: int, x, y, h: float = 1e-4) -> float:
    """Worst relative error between jet partials and central differences."""
    from betafinsler.finsler import TangentPoint
    from betafinsler.jets import lift
    from betafinsler.jets.fd import central_partial

    xs, ys = lift(TangentPoint(x, y))
    jet = evaluate(poly, xs + ys)
    args = list(x) + list(y)
    worst = 0.0
    for xslots, yslots in multi_indices(n, n):
        slots = list(xslots) + [n + s for s in yslots]
        ref = central_partial(lambda *a: evaluate(poly, a), args, slots, h=h)
        got = jet.partial(x=xslots, y=yslots)
        worst = max(worst, abs(got - ref) / max(abs(ref), 1e-12))
    return worst


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    return line
