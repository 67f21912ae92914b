"""Exact time evolution of the one-excitation amplitudes.

The Hamiltonian is time independent, so propagation is spectral:
A(t) = sum_k exp(-i lam_k t) v_k <v_k, A(0)> with A(0) = e_1.  There is no
step-size error; accuracy is set by the eigensolver residual alone.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chain import Hamiltonian
from .kernels import end_probability, end_probability_curve
from .search import golden_max

DEFAULT_N_STEPS = 4096

# Local maxima below this are roundoff ripple in |A_N|^2 (cancellation of
# O(1) spectral terms leaves ~1e-24 noise), not physical arrivals.
NOISE_FLOOR = 1e-16

__all__ = [
    "AmplitudeTrace",
    "FirstMaximum",
    "evolve",
    "end_probability_at",
    "end_probability_on_grid",
    "first_maximum",
    "dump_trace_csv",
]


@dataclass(frozen=True)
class AmplitudeTrace:
    """Site amplitudes A_j(t) on a uniform time grid, excitation on site 1
    at t=0.  ``p_end[i]`` is |A_N(times[i])|^2."""

    times: np.ndarray
    amplitudes: np.ndarray  # shape (n_times, N), complex
    p_end: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[1]

    def norms(self) -> np.ndarray:
        """Total occupation probability per time point (should be 1)."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)


@dataclass(frozen=True)
class FirstMaximum:
    """First local maximum of the end-site occupation within the window."""

    t_star: float
    p_star: float


def _end_coef(ham: Hamiltonian) -> np.ndarray:
    # spectral weights of the 1 -> N transfer amplitude
    return np.ascontiguousarray(ham.eigenvectors[0, :] * ham.eigenvectors[-1, :])


def evolve(ham: Hamiltonian, t_end: float, n_steps: int = DEFAULT_N_STEPS) -> AmplitudeTrace:
    """Propagate A(0) = e_1 on a uniform grid of ``n_steps`` points in
    [0, t_end] (endpoints included)."""
    if not math.isfinite(t_end) or t_end <= 0:
        raise ValueError(f"t_end must be finite and > 0, got {t_end}")
    if n_steps < 100:
        raise ValueError(f"n_steps must be >= 100, got {n_steps}")
    times = np.linspace(0.0, t_end, n_steps)
    weights = ham.eigenvectors[0, :]  # <v_k, e_1>
    phases = np.exp(-1j * np.outer(times, ham.eigenvalues))
    amplitudes = (phases * weights) @ ham.eigenvectors.T
    p_end = np.abs(amplitudes[:, -1]) ** 2
    return AmplitudeTrace(times=times, amplitudes=amplitudes, p_end=p_end)


def end_probability_at(ham: Hamiltonian, t: float) -> float:
    """Exact |A_N(t)|^2 at a single time."""
    return end_probability(np.ascontiguousarray(ham.eigenvalues), _end_coef(ham), t)


def end_probability_on_grid(
    ham: Hamiltonian, t_end: float, n_steps: int = DEFAULT_N_STEPS
) -> tuple[np.ndarray, np.ndarray]:
    """(times, |A_N|^2) on a uniform grid; cheaper than a full trace."""
    times = np.linspace(0.0, t_end, n_steps)
    p = end_probability_curve(
        np.ascontiguousarray(ham.eigenvalues), _end_coef(ham), times
    )
    return times, p


def first_maximum(
    trace: AmplitudeTrace, ham: Hamiltonian, rel_tol: float = 1e-9
) -> FirstMaximum:
    """Locate the first local maximum of the end-site probability.

    Scans the grid for the first point where p_end stops increasing, then
    refines by golden-section maximization of the exactly evaluated
    |A_N(t)|^2 on the bracketing interval.  If p_end is still increasing at
    the window end, the endpoint is reported (transfer not yet peaked).
    """
    return _first_maximum(trace.times, trace.p_end, ham, rel_tol)


def _first_maximum(
    times: np.ndarray, p_end: np.ndarray, ham: Hamiltonian, rel_tol: float = 1e-9
) -> FirstMaximum:
    if len(times) < 3:
        raise ValueError("trace needs at least 3 grid points")
    n = len(times)
    peak = None
    for i in range(1, n - 1):
        if (
            p_end[i] >= p_end[i - 1]
            and p_end[i] >= p_end[i + 1]
            and p_end[i] > NOISE_FLOOR
        ):
            peak = i
            break
    if peak is None:
        return FirstMaximum(t_star=float(times[-1]), p_star=float(p_end[-1]))
    eigvals = np.ascontiguousarray(ham.eigenvalues)
    coef = _end_coef(ham)
    a, b = float(times[peak - 1]), float(times[peak + 1])
    tol = rel_tol * max(b, times[-1] - times[0])
    t_star, p_star, _ = golden_max(
        lambda t: end_probability(eigvals, coef, t), a, b, tol
    )
    return FirstMaximum(t_star=float(t_star), p_star=float(p_star))


def dump_trace_csv(trace: AmplitudeTrace, path: str | Path) -> None:
    """CSV with columns t, Re A_j, Im A_j (j = 1..N), p_end."""
    n = trace.n_sites
    header = ["t"]
    for j in range(1, n + 1):
        header += [f"re_A{j}", f"im_A{j}"]
    header.append("p_end")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, t in enumerate(trace.times):
            row = [repr(float(t))]
            for j in range(n):
                a = trace.amplitudes[i, j]
                row += [repr(float(a.real)), repr(float(a.imag))]
            row.append(repr(float(trace.p_end[i])))
            writer.writerow(row)
