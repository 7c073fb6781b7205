"""Finite SSH chains of coupled waveguides.

Distances are in µm and couplings in rad/µm throughout. The unit cell is the
pair (A, B) joined by the short separation, so the intra-cell hopping ``J``
belongs to the short gap and the inter-cell hopping ``Jp`` to the long gap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ContractError, ParameterError

# Coupling(long) / coupling(short) = 1/2 with the 0.4 µm separation difference.
DEFAULT_D0 = 0.4 / math.log(2.0)

DEFAULT_J = 0.318
DEFAULT_LOSS = 1.0 / (2.0 * 16.0)


class CouplingModel(str, enum.Enum):
    DIRECT = "direct"
    EXPONENTIAL = "exponential"


class Sublattice(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class CouplingSpec:
    """Parameter vector of the waveguide-array tight-binding model.

    Attributes
    ----------
    J, Jp, Jpp : float
        Intra-cell, inter-cell and next-nearest-neighbour hopping (rad/µm).
    a : float
        Lattice constant (µm); must equal ``d_short + d_long``.
    d_short, d_long : float
        Centre-to-centre waveguide separations (µm).
    loss : float
        Uniform amplitude attenuation rate (1/µm).
    coupling_model : CouplingModel
        ``direct`` uses J/Jp/Jpp as given; ``exponential`` derives every
        coupling from the separation, normalised to ``J`` at ``d_short``.
    d0 : float
        Evanescent decay length (µm) of the exponential model.
    """

    J: float = DEFAULT_J
    Jp: float = 0.5 * DEFAULT_J
    Jpp: float = 0.1 * DEFAULT_J
    a: float = 1.6
    d_short: float = 0.6
    d_long: float = 1.0
    loss: float = DEFAULT_LOSS
    coupling_model: CouplingModel = CouplingModel.DIRECT
    d0: float = DEFAULT_D0

    def __post_init__(self):
        object.__setattr__(self, "coupling_model", CouplingModel(self.coupling_model))
        for name in ("J", "Jp", "Jpp", "loss"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ParameterError(f"{name} must be finite and >= 0, got {value!r}")
        if not (self.a > 0 and self.d_short > 0 and self.d_long > 0):
            raise ParameterError("a, d_short and d_long must be > 0")
        if abs(self.a - (self.d_short + self.d_long)) > 1e-9 * self.a:
            raise ParameterError(
                f"a ({self.a}) must equal d_short + d_long ({self.d_short + self.d_long})"
            )
        if self.coupling_model is CouplingModel.EXPONENTIAL and not self.d0 > 0:
            raise ParameterError("d0 must be > 0 for the exponential coupling model")

    def with_(self, **changes) -> "CouplingSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class Site:
    index: int
    x: float
    sublattice: Sublattice


@dataclass(frozen=True)
class ChainSpec:
    """A concrete finite chain. ``bonds`` holds nearest-neighbour bonds only."""

    sites: tuple[Site, ...]
    bonds: tuple[tuple[int, int, float], ...]
    spec: CouplingSpec
    defect_index: Optional[int] = None
    _positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        xs = np.array([s.x for s in self.sites], dtype=float)
        xs.setflags(write=False)
        object.__setattr__(self, "_positions", xs)
        if [s.index for s in self.sites] != list(range(len(self.sites))):
            raise ParameterError("site indices must be contiguous from 0")
        if len(xs) > 1 and not np.all(np.diff(xs) > 0):
            raise ParameterError("site positions must be strictly increasing")
        n = len(self.sites)
        for i, j, _ in self.bonds:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ParameterError(f"bond ({i}, {j}) references an invalid site")
        if self.defect_index is not None and not 0 <= self.defect_index < n:
            raise ParameterError("defect_index out of range")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def sublattices(self) -> np.ndarray:
        """Boolean mask, True on sublattice A."""
        return np.array([s.sublattice is Sublattice.A for s in self.sites])

    @property
    def bond_couplings(self) -> list[float]:
        return [c for _, _, c in self.bonds]


def coupling_from_distance(d: float, spec: CouplingSpec) -> float:
    """Evanescent coupling ``J * exp(-(d - d_short) / d0)`` for separation ``d``."""
    if spec.coupling_model is not CouplingModel.EXPONENTIAL:
        raise ContractError("coupling_from_distance requires coupling_model='exponential'")
    if not d > 0:
        raise ParameterError(f"separation must be > 0, got {d!r}")
    return spec.J * math.exp(-(d - spec.d_short) / spec.d0)


def _bond_value(gap: float, is_short: bool, spec: CouplingSpec) -> float:
    if spec.coupling_model is CouplingModel.EXPONENTIAL:
        return coupling_from_distance(gap, spec)
    return spec.J if is_short else spec.Jp


def _assemble(gaps_short: list[bool], x0: float, spec: CouplingSpec,
              defect_index: Optional[int]) -> ChainSpec:
    gaps = [spec.d_short if s else spec.d_long for s in gaps_short]
    xs = x0 + np.concatenate([[0.0], np.cumsum(gaps)])
    sites = tuple(
        Site(i, float(x), Sublattice.A if i % 2 == 0 else Sublattice.B)
        for i, x in enumerate(xs)
    )
    bonds = tuple(
        (i, i + 1, _bond_value(g, s, spec))
        for i, (g, s) in enumerate(zip(gaps, gaps_short))
    )
    return ChainSpec(sites=sites, bonds=bonds, spec=spec, defect_index=defect_index)


def build_chain(n_sites: int, spec: CouplingSpec) -> ChainSpec:
    """Open chain of ``n_sites`` starting at x=0 with a short (J) bond.

    Even ``n_sites`` terminates on a strong bond at both ends; odd ``n_sites``
    leaves a weak bond at the right end.
    """
    if n_sites < 1:
        raise ParameterError("n_sites must be >= 1")
    return _assemble([i % 2 == 0 for i in range(n_sites - 1)], 0.0, spec, None)


def build_bulk_chain(n_cells: int, spec: CouplingSpec) -> ChainSpec:
    """``n_cells`` unit cells, positions 0, d_short, a, a + d_short, ..."""
    if n_cells < 1:
        raise ParameterError("n_cells must be >= 1")
    return build_chain(2 * n_cells, spec)


def build_interface_chain(n_cells_per_side: int, spec: CouplingSpec,
                          centered: bool = True) -> ChainSpec:
    """Two domains of opposite dimerization meeting at a doubled long gap.

    The chain has ``4 * n_cells_per_side + 1`` sites; the central (defect)
    site is on sublattice A and sits at x = 0 when ``centered``.
    """
    if n_cells_per_side < 1:
        raise ParameterError("n_cells_per_side must be >= 1")
    n = n_cells_per_side
    left = [i % 2 == 0 for i in range(2 * n)]
    pattern = left + left[::-1]
    center = 2 * n
    x0 = -(n * spec.a) if centered else 0.0
    return _assemble(pattern, x0, spec, center)


def reverse_chain(chain: ChainSpec) -> ChainSpec:
    """Mirror image ``x -> -x`` with site order reversed; labels travel with sites."""
    n = chain.n_sites
    sites = tuple(
        Site(n - 1 - s.index, -s.x, s.sublattice) for s in reversed(chain.sites)
    )
    sites = tuple(Site(k, s.x, s.sublattice) for k, s in enumerate(sites))
    bonds = tuple((n - 1 - j, n - 1 - i, c) for i, j, c in reversed(chain.bonds))
    defect = None if chain.defect_index is None else n - 1 - chain.defect_index
    return ChainSpec(sites=sites, bonds=bonds, spec=chain.spec, defect_index=defect)
