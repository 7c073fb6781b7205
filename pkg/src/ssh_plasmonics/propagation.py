"""Modal propagation of waveguide-array excitations along z."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ContractError, MissingDefectError, ParameterError
from .lattice import ChainSpec
from .realspace import ModeSet, solve_chain

DEFAULT_Z_MAX = 130.0
DEFAULT_NZ = 512


class SiteLabel(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"


_LABEL_OFFSET = {SiteLabel.I: 0, SiteLabel.II: 1, SiteLabel.III: 2}


@dataclass(frozen=True)
class Excitation:
    amplitudes: np.ndarray
    label: Optional[SiteLabel] = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ParameterError(f"excitation must have unit norm, got {norm!r}")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class FieldMap:
    x_sites: np.ndarray
    z_grid: np.ndarray
    amplitudes: np.ndarray  # [z, site]

    def intensity(self) -> "IntensityMap":
        return IntensityMap(self.x_sites, self.z_grid, np.abs(self.amplitudes) ** 2)


@dataclass(frozen=True)
class IntensityMap:
    x_sites: np.ndarray
    z_grid: np.ndarray
    intensity: np.ndarray  # [z, site]


def default_z_grid(z_max: float = DEFAULT_Z_MAX, nz: int = DEFAULT_NZ) -> np.ndarray:
    return np.linspace(0.0, z_max, nz)


def _as_label(site) -> Optional[SiteLabel]:
    if isinstance(site, SiteLabel):
        return site
    if isinstance(site, str) and not site.lstrip("-").isdigit():
        try:
            return SiteLabel(site)
        except ValueError:
            raise ParameterError(f"unknown excitation label {site!r}") from None
    return None


def resolve_site(chain: ChainSpec, site: Union[int, str, SiteLabel]) -> int:
    """Site index for an integer index or an I/II/III label relative to the defect."""
    label = _as_label(site)
    if label is not None:
        if chain.defect_index is None:
            raise MissingDefectError(f"label {label.value} needs a chain with a defect")
        index = chain.defect_index + _LABEL_OFFSET[label]
    else:
        index = int(site)
    if not 0 <= index < chain.n_sites:
        raise ParameterError(f"site index {index} outside chain of {chain.n_sites} sites")
    return index


def single_site_excitation(chain: ChainSpec, site: Union[int, str, SiteLabel]) -> Excitation:
    index = resolve_site(chain, site)
    amps = np.zeros(chain.n_sites, dtype=complex)
    amps[index] = 1.0
    return Excitation(amps, _as_label(site))


def propagate(chain: ChainSpec, exc: Excitation, z_grid: Sequence[float],
              modes: Optional[ModeSet] = None) -> FieldMap:
    """psi(z) = exp(-gamma z) sum_m <v_m|psi0> exp(i beta_m z) v_m."""
    z = np.asarray(z_grid, dtype=float)
    if z.ndim != 1 or (z.size and z.min() < 0):
        raise ParameterError("z_grid must be a 1-D array of values >= 0")
    if modes is None:
        modes = solve_chain(chain)
    v = modes.eigenvectors
    coeffs = v.conj().T @ exc.amplitudes
    phases = np.exp(1j * np.outer(z, modes.eigenvalues)) * np.exp(-modes.gamma * z)[:, None]
    amps = (phases * coeffs[None, :]) @ v.T
    return FieldMap(chain.positions.copy(), z, amps)


def total_intensity(imap: IntensityMap) -> np.ndarray:
    return imap.intensity.sum(axis=1)


def rms_width(imap: IntensityMap) -> list[tuple[float, float]]:
    """Intensity-weighted rms width sigma(z) in µm at every z sample."""
    w = imap.intensity
    tot = w.sum(axis=1)
    if np.any(tot <= 0):
        raise ContractError("rms width undefined for an all-zero intensity slice")
    x = imap.x_sites
    mean = (w @ x) / tot
    var = (w * (x[None, :] - mean[:, None]) ** 2).sum(axis=1) / tot
    return list(zip(imap.z_grid.tolist(), np.sqrt(np.maximum(var, 0.0)).tolist()))


def integrated_profile(imap: IntensityMap, z_min: float, z_max: float) -> np.ndarray:
    """Per-site trapezoidal integral of intensity over [z_min, z_max].

    Window ends falling between samples are linearly interpolated.
    """
    z = imap.z_grid
    if not z_min < z_max:
        raise ParameterError("z_min must be < z_max")
    lo, hi = max(z_min, z[0]), min(z_max, z[-1])
    if not lo < hi:
        raise ParameterError(f"window [{z_min}, {z_max}] does not overlap the z grid")
    inner = (z > lo) & (z < hi)
    zs = np.concatenate([[lo], z[inner], [hi]])
    cols = np.array([np.interp(zs, z, imap.intensity[:, i]) for i in range(imap.intensity.shape[1])])
    return np.trapezoid(cols, zs, axis=1)
