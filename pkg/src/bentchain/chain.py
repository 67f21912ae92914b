"""Chain, bend and defect definitions, and one-excitation Hamiltonian assembly.

Two coupling protocols are supported:

* Protocol 1: uniform bulk couplings with weakened boundary couplings
  (near-perfect transfer once the boundary ratio is calibrated).
* Protocol 2: fully engineered couplings sqrt((N-j) j) with exactly perfect
  transfer at pi/(2*omega0).

A bend at corner site alpha adds a direct coupling g = kappa * Omega_max
between the corner's two neighbours, and optionally an energy defect
(detuning) on the corner site itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

__all__ = [
    "Protocol",
    "ChainSpec",
    "BendSpec",
    "Hamiltonian",
    "build_couplings",
    "omega_max",
    "build_hamiltonian",
    "spec_to_dict",
    "spec_from_dict",
    "load_specs",
    "dump_specs",
]


class Protocol(Enum):
    PROTOCOL_1 = 1
    PROTOCOL_2 = 2


@dataclass(frozen=True)
class ChainSpec:
    """An unbent N-site chain: protocol, size, energy scale, site energy.

    ``boundary_ratio`` is the end-coupling ratio Omega/omega0 and is required
    for (and only allowed with) Protocol 1.  All couplings and energies are
    expressed in units where ``omega0`` sets the scale; ``epsilon`` is the
    uniform on-site energy (a global phase, kept for completeness).
    """

    protocol: Protocol
    n_sites: int
    omega0: float = 1.0
    boundary_ratio: float | None = None
    epsilon: float = 0.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.protocol is Protocol.PROTOCOL_1:
            if self.boundary_ratio is None:
                raise ValueError("Protocol 1 requires boundary_ratio")
            if self.boundary_ratio <= 0:
                raise ValueError("boundary_ratio must be > 0")
        elif self.boundary_ratio is not None:
            raise ValueError("boundary_ratio is only meaningful for Protocol 1")


@dataclass(frozen=True)
class BendSpec:
    """A bend at corner site ``alpha`` (1-based, interior: 2 <= alpha <= N-1).

    ``kappa`` is the bend strength g / Omega_max in [0, 1]; ``delta_alpha``
    is the corner-site detuning in the same energy units as omega0.
    """

    alpha: int
    kappa: float
    delta_alpha: float = 0.0

    def __post_init__(self):
        if self.alpha < 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must be in [0, 1], got {self.kappa}")


@dataclass(frozen=True)
class Hamiltonian:
    """Real symmetric one-excitation Hamiltonian with its eigensystem.

    ``eigenvalues`` are sorted ascending; ``eigenvectors[:, k]`` is the
    orthonormal eigenvector for ``eigenvalues[k]``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigen_residual(self) -> float:
        """Max-norm residual of H v = lambda v over all eigenpairs."""
        r = self.matrix @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.abs(r).max())


def build_couplings(spec: ChainSpec) -> np.ndarray:
    """Nearest-neighbour coupling list, N-1 entries, centrosymmetric."""
    n = spec.n_sites
    if spec.protocol is Protocol.PROTOCOL_1:
        if n < 3:
            raise ValueError("Protocol 1 needs n_sites >= 3 (boundary + bulk)")
        couplings = np.full(n - 1, spec.omega0)
        couplings[0] = couplings[-1] = spec.boundary_ratio * spec.omega0
    else:
        j = np.arange(1, n)
        couplings = spec.omega0 * np.sqrt((n - j) * j)
    return couplings


def omega_max(spec: ChainSpec) -> float:
    """Largest nearest-neighbour coupling of the unbent chain."""
    return float(build_couplings(spec).max())


def build_hamiltonian(spec: ChainSpec, bend: BendSpec | None = None) -> Hamiltonian:
    """Assemble the one-excitation matrix and diagonalize it.

    Without a bend the matrix is tridiagonal: ``epsilon`` on the diagonal
    and the protocol couplings on the off-diagonals.  A bend adds
    g = kappa * Omega_max at the (alpha-1, alpha+1) site pair and the
    detuning delta_alpha on the corner diagonal entry.
    """
    n = spec.n_sites
    couplings = build_couplings(spec)
    h = np.zeros((n, n))
    np.fill_diagonal(h, spec.epsilon)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = couplings
    h[idx + 1, idx] = couplings
    if bend is not None:
        if not 2 <= bend.alpha <= n - 1:
            raise ValueError(
                f"corner index alpha={bend.alpha} out of range [2, {n - 1}]"
            )
        g = bend.kappa * omega_max(spec)
        a = bend.alpha - 1  # 0-based corner index
        h[a - 1, a + 1] += g
        h[a + 1, a - 1] += g
        h[a, a] += bend.delta_alpha
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return Hamiltonian(matrix=h, eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def with_detuning(bend: BendSpec, delta_alpha: float) -> BendSpec:
    """Copy of ``bend`` with a different corner detuning."""
    return replace(bend, delta_alpha=delta_alpha)


# --- JSON config (keys: protocol, n_sites, omega0, boundary_ratio, epsilon,
#     alpha, kappa, delta_alpha) ---


def spec_to_dict(spec: ChainSpec, bend: BendSpec | None = None) -> dict:
    d = {
        "protocol": spec.protocol.value,
        "n_sites": spec.n_sites,
        "omega0": spec.omega0,
        "epsilon": spec.epsilon,
    }
    if spec.boundary_ratio is not None:
        d["boundary_ratio"] = spec.boundary_ratio
    if bend is not None:
        d["alpha"] = bend.alpha
        d["kappa"] = bend.kappa
        d["delta_alpha"] = bend.delta_alpha
    return d


def spec_from_dict(d: dict) -> tuple[ChainSpec, BendSpec | None]:
    spec = ChainSpec(
        protocol=Protocol(int(d["protocol"])),
        n_sites=int(d["n_sites"]),
        omega0=float(d.get("omega0", 1.0)),
        boundary_ratio=(
            float(d["boundary_ratio"]) if d.get("boundary_ratio") is not None else None
        ),
        epsilon=float(d.get("epsilon", 0.0)),
    )
    bend = None
    if "alpha" in d:
        bend = BendSpec(
            alpha=int(d["alpha"]),
            kappa=float(d.get("kappa", 0.0)),
            delta_alpha=float(d.get("delta_alpha", 0.0)),
        )
    return spec, bend


def load_specs(path: str | Path) -> tuple[ChainSpec, BendSpec | None]:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def dump_specs(spec: ChainSpec, bend: BendSpec | None, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_dict(spec, bend), fh, indent=2)
        fh.write("\n")


def is_centrosymmetric(couplings: np.ndarray, tol: float = 0.0) -> bool:
    return bool(np.all(np.abs(couplings - couplings[::-1]) <= tol))


def perfect_transfer_time(spec: ChainSpec) -> float:
    """Protocol 2's analytic arrival time pi/(2*omega0)."""
    if spec.protocol is not Protocol.PROTOCOL_2:
        raise ValueError("analytic arrival time exists only for Protocol 2")
    return math.pi / (2.0 * spec.omega0)
