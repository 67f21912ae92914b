"""Deterministic golden-section maximization on a bracket."""

from __future__ import annotations

import math

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_max(f, a: float, b: float, tol: float):
    """Maximize f on [a, b]; returns (x*, f(x*), n_evals).

    Shrinks the bracket until its width is below ``tol``; deterministic for
    identical inputs.
    """
    if b < a:
        a, b = b, a
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x), 1
    c = a + INVPHI2 * h
    d = a + INVPHI * h
    fc = f(c)
    fd = f(d)
    n_evals = 2
    while h > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INVPHI * h
            fd = f(d)
        n_evals += 1
    if fc > fd:
        return c, fc, n_evals
    return d, fd, n_evals
