"""Numpy fallback for the end-site probability kernel (same API as the
compiled module)."""

from __future__ import annotations

import numpy as np


def end_probability(eigvals: np.ndarray, coef: np.ndarray, t: float) -> float:
    phase = eigvals * t
    re = float(coef @ np.cos(phase))
    im = float(coef @ np.sin(phase))
    return re * re + im * im


def end_probability_curve(
    eigvals: np.ndarray, coef: np.ndarray, times: np.ndarray
) -> np.ndarray:
    phases = np.outer(times, eigvals)
    re = np.cos(phases) @ coef
    im = np.sin(phases) @ coef
    return re * re + im * im
