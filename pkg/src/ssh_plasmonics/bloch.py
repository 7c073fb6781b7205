"""Bulk (Bloch) analysis of the SSH chain.

H(k) = 2 Jpp cos(ka) 1 + d(k) . sigma with d(k) = (J + Jp cos ka, Jp sin ka, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, ParameterError, UnsupportedParameterError
from .lattice import CouplingSpec

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DVector:
    dx: float
    dy: float
    dz: float = 0.0

    @property
    def norm(self) -> float:
        return math.sqrt(self.dx**2 + self.dy**2 + self.dz**2)


@dataclass(frozen=True)
class BandPoint:
    k: float
    e_lower: float
    e_upper: float
    with_nnn: bool


def d_vector(k: float, spec: CouplingSpec) -> DVector:
    ka = k * spec.a
    return DVector(spec.J + spec.Jp * math.cos(ka), spec.Jp * math.sin(ka), 0.0)


def d_components(k, spec: CouplingSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``(dx, dy)`` over an array of quasimomenta."""
    ka = np.asarray(k, dtype=float) * spec.a
    return spec.J + spec.Jp * np.cos(ka), spec.Jp * np.sin(ka)


def bands(k, spec: CouplingSpec, include_nnn: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``(lower, upper)`` band energies (rad/µm)."""
    dx, dy = d_components(k, spec)
    mod = np.hypot(dx, dy)
    shift = 2.0 * spec.Jpp * np.cos(np.asarray(k, dtype=float) * spec.a) if include_nnn else 0.0
    return shift - mod, shift + mod


def band_energies(k: float, spec: CouplingSpec, include_nnn: bool = False) -> BandPoint:
    lo, hi = bands(k, spec, include_nnn)
    return BandPoint(float(k), float(lo), float(hi), include_nnn)


def bloch_hamiltonian(k: float, spec: CouplingSpec, include_nnn: bool = True) -> np.ndarray:
    d = d_vector(k, spec)
    h = d.dx * SIGMA_X + d.dy * SIGMA_Y + d.dz * SIGMA_Z
    if include_nnn:
        h = h + 2.0 * spec.Jpp * math.cos(k * spec.a) * np.eye(2)
    return h


def band_gap(spec: CouplingSpec) -> float:
    """Direct gap ``2|J - Jp|`` of the chiral (Jpp = 0) model."""
    if spec.Jpp != 0:
        raise UnsupportedParameterError(
            "closed-form gap needs Jpp = 0; use scan_gap for the NNN model"
        )
    return 2.0 * abs(spec.J - spec.Jp)


def brillouin_grid(spec: CouplingSpec, nk: int) -> np.ndarray:
    """``nk`` points covering [-pi/a, pi/a), both zone edges represented."""
    return -math.pi / spec.a + (2.0 * math.pi / spec.a) * np.arange(nk) / nk


def scan_gap(spec: CouplingSpec, nk: int = 4096, include_nnn: bool = True) -> tuple[float, float]:
    """Indirect gap and gap centre from a dense scan of the bands.

    Returns ``(min(upper) - max(lower), (min(upper) + max(lower)) / 2)``.
    A negative gap means the bands overlap in energy.
    """
    lo, hi = bands(brillouin_grid(spec, nk), spec, include_nnn)
    top, bottom = lo.max(), hi.min()
    return float(bottom - top), float(0.5 * (bottom + top))


def winding_number(spec: CouplingSpec, nk: int = 256) -> int:
    """Number of turns of (dx, dy) around the origin across the zone.

    0 for J > Jp and 1 for J < Jp with the intra-cell bond on the short gap.
    """
    if nk < 16:
        raise ParameterError("nk must be >= 16")
    scale = max(spec.J, spec.Jp)
    dx, dy = d_components(brillouin_grid(spec, nk), spec)
    if scale == 0 or abs(spec.J - spec.Jp) <= 1e-9 * scale or np.hypot(dx, dy).min() <= 1e-9 * scale:
        raise DegenerateSpectrumError("gap is closed; winding number undefined")
    phi = np.arctan2(dy, dx)
    steps = np.diff(np.append(phi, phi[0]))
    steps = (steps + math.pi) % (2.0 * math.pi) - math.pi
    return int(round(steps.sum() / (2.0 * math.pi)))


def chiral_symmetry_defect(spec: CouplingSpec, nk: int = 256) -> float:
    """max_k || sz H(k) sz + H(k) ||_2; zero iff the model is chiral."""
    if nk < 2:
        raise ParameterError("nk must be >= 2")
    worst = 0.0
    for k in brillouin_grid(spec, nk):
        h = bloch_hamiltonian(k, spec, include_nnn=True)
        worst = max(worst, np.linalg.norm(SIGMA_Z @ h @ SIGMA_Z.conj().T + h, 2))
    return float(worst)
