"""Bend sweeps, normalized transfer metrics, and the empirical fits.

Metrics are reported relative to the unbent chain: q = p / p0 and
s = t / t0, where (p, t) is the first maximum of the end-site occupation
within the unbent window [0, t0].
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chain import BendSpec, ChainSpec, build_hamiltonian, spec_to_dict
from .optimize import OptimizationResult, detuning_curve, optimize_detuning
from .propagate import DEFAULT_N_STEPS, end_probability_on_grid, _first_maximum
from .reference import ReferencePoint, reference

__all__ = [
    "TransferResult",
    "SweepRow",
    "SweepTable",
    "FitReport",
    "FitDivergedError",
    "transfer_metrics",
    "sweep_kappa",
    "sweep_alpha",
    "fit_gaussian",
    "fit_linear",
]


@dataclass(frozen=True)
class TransferResult:
    p: float  # first-maximum probability
    t: float  # arrival time
    q: float  # p / p0
    s: float  # t / t0


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    result: TransferResult
    optimized: OptimizationResult | None = None


@dataclass(frozen=True)
class SweepTable:
    axis: str  # "kappa", "alpha" or "n_sites"
    rows: list[SweepRow]
    metadata: dict = field(default_factory=dict)

    CSV_HEADER = ["axis", "p", "t", "q", "s", "delta_opt", "q_opt", "s_opt"]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.CSV_HEADER)
            for row in self.rows:
                rec = [
                    repr(row.axis_value),
                    repr(row.result.p),
                    repr(row.result.t),
                    repr(row.result.q),
                    repr(row.result.s),
                ]
                if row.optimized is not None:
                    rec += [
                        repr(row.optimized.delta_star),
                        repr(row.optimized.q_opt),
                        repr(row.optimized.s_opt),
                    ]
                else:
                    rec += ["", "", ""]
                writer.writerow(rec)

    def to_json(self, path: str | Path) -> None:
        payload = {
            "axis": self.axis,
            "metadata": self.metadata,
            "rows": [
                {
                    "axis_value": row.axis_value,
                    "p": row.result.p,
                    "t": row.result.t,
                    "q": row.result.q,
                    "s": row.result.s,
                    "delta_opt": row.optimized.delta_star if row.optimized else None,
                    "q_opt": row.optimized.q_opt if row.optimized else None,
                    "s_opt": row.optimized.s_opt if row.optimized else None,
                }
                for row in self.rows
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


@dataclass(frozen=True)
class FitReport:
    kind: str  # "gaussian" or "linear"
    params: tuple[float, float]  # (amplitude, sigma) or (slope, intercept)
    residual_rms: float
    domain: tuple[float, float]


class FitDivergedError(RuntimeError):
    """Gauss-Newton did not converge; carries the best iterate seen."""

    def __init__(self, message: str, best: FitReport):
        super().__init__(message)
        self.best = best


def transfer_metrics(
    spec: ChainSpec,
    bend: BendSpec,
    ref: ReferencePoint,
    n_steps: int = DEFAULT_N_STEPS,
) -> TransferResult:
    """First-maximum metrics of the bent chain within [0, ref.t0]."""
    if ref.protocol is not spec.protocol or ref.n_sites != spec.n_sites:
        raise ValueError("reference point does not match the chain spec")
    ham = build_hamiltonian(spec, bend)
    times, p_end = end_probability_on_grid(ham, ref.t0, n_steps)
    fm = _first_maximum(times, p_end, ham)
    return TransferResult(
        p=fm.p_star, t=fm.t_star, q=fm.p_star / ref.p0, s=fm.t_star / ref.t0
    )


def _base_metadata(spec: ChainSpec, ref: ReferencePoint) -> dict:
    meta = spec_to_dict(spec)
    meta["p0"] = ref.p0
    meta["t0"] = ref.t0
    meta["delta_units"] = "omega_max"
    return meta


def sweep_kappa(
    spec: ChainSpec,
    alpha: int,
    kappa_grid,
    optimize: bool = False,
    ref: ReferencePoint | None = None,
    n_steps: int = DEFAULT_N_STEPS,
) -> SweepTable:
    """One TransferResult per kappa at a fixed corner; optionally also the
    optimal detuning and optimized metrics per row."""
    kappa_grid = np.sort(np.asarray(kappa_grid, dtype=float))
    ref = ref or reference(spec)
    optima: dict[float, OptimizationResult] = {}
    if optimize:
        optima = dict(detuning_curve(spec, alpha, kappa_grid, ref, n_steps=n_steps))
    rows = []
    for kappa in kappa_grid:
        bend = BendSpec(alpha=alpha, kappa=float(kappa))
        result = transfer_metrics(spec, bend, ref, n_steps)
        rows.append(
            SweepRow(
                axis_value=float(kappa),
                result=result,
                optimized=optima.get(float(kappa)),
            )
        )
    meta = _base_metadata(spec, ref)
    meta["alpha"] = alpha
    return SweepTable(axis="kappa", rows=rows, metadata=meta)


def sweep_alpha(
    spec: ChainSpec,
    kappa: float,
    alpha_range,
    optimize: bool = True,
    ref: ReferencePoint | None = None,
    n_steps: int = DEFAULT_N_STEPS,
) -> SweepTable:
    """Metrics (and optimal detunings) per corner position at fixed kappa."""
    ref = ref or reference(spec)
    rows = []
    for alpha in sorted(int(a) for a in alpha_range):
        bend = BendSpec(alpha=alpha, kappa=kappa)
        result = transfer_metrics(spec, bend, ref, n_steps)
        opt = (
            optimize_detuning(spec, bend, ref, n_steps=n_steps) if optimize else None
        )
        rows.append(SweepRow(axis_value=float(alpha), result=result, optimized=opt))
    meta = _base_metadata(spec, ref)
    meta["kappa"] = kappa
    return SweepTable(axis="alpha", rows=rows, metadata=meta)


def fit_gaussian(
    table: SweepTable, max_iter: int = 200, tol: float = 1e-12
) -> FitReport:
    """Gauss-Newton fit of q(kappa) ~ A exp(-kappa^2 / (2 sigma^2)).

    Starts from (A, sigma) = (1, 0.5).  Raises FitDivergedError (carrying
    the best iterate) on non-convergence or a degenerate flat profile.
    """
    if table.axis != "kappa":
        raise ValueError("gaussian fit expects a kappa sweep")
    x = np.array([row.axis_value for row in table.rows])
    y = np.array([row.result.q for row in table.rows])
    if x.size < 5:
        raise ValueError("gaussian fit needs at least 5 rows")
    domain = (float(x.min()), float(x.max()))

    amp, sigma = 1.0, 0.5
    best = None
    for _ in range(max_iter):
        shape = np.exp(-(x**2) / (2.0 * sigma**2))
        model = amp * shape
        r = y - model
        rms = float(np.sqrt(np.mean(r**2)))
        if best is None or rms < best[0]:
            best = (rms, amp, sigma)
        jac = np.column_stack([shape, model * x**2 / sigma**3])
        step, *_ = np.linalg.lstsq(jac, r, rcond=None)
        amp += step[0]
        sigma += step[1]
        # sigma far beyond the fitted domain means the profile is flat on
        # this window and the width is unidentifiable
        sigma_cap = 50.0 * max(domain[1] - domain[0], abs(domain[1]))
        if sigma <= 0 or not np.isfinite(sigma) or sigma > sigma_cap:
            raise FitDivergedError(
                "gaussian fit degenerate (sigma escaped); profile may be flat",
                FitReport("gaussian", (best[1], best[2]), best[0], domain),
            )
        if float(np.hypot(*step)) < tol:
            model = amp * np.exp(-(x**2) / (2.0 * sigma**2))
            rms = float(np.sqrt(np.mean((y - model) ** 2)))
            return FitReport("gaussian", (float(amp), float(sigma)), rms, domain)
    raise FitDivergedError(
        f"gaussian fit did not converge in {max_iter} iterations",
        FitReport("gaussian", (best[1], best[2]), best[0], domain),
    )


def fit_linear(pairs, kappa_cut: float = 0.7) -> FitReport:
    """Ordinary least squares on (kappa, delta*) pairs with kappa <= cut.

    ``delta*`` values are expected in units of Omega_max, matching the
    optimizer's output.
    """
    pts = [(float(k), float(d)) for k, d in pairs if float(k) <= kappa_cut]
    if len(pts) < 3:
        raise ValueError(f"linear fit needs >= 3 points with kappa <= {kappa_cut}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return FitReport(
        "linear",
        (float(slope), float(intercept)),
        rms,
        (float(x.min()), float(x.max())),
    )
