"""Finite-chain Hamiltonian, eigenmodes and midgap edge states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bloch
from .errors import ContractError, InsufficientDataError, NumericalError
from .lattice import ChainSpec, CouplingModel, coupling_from_distance

HERMITIAN_TOL = 1e-14
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    gamma: float
    chain: ChainSpec

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ModeSet:
    """Eigenpairs of a chain; ``eigenvectors[:, m]`` belongs to ``eigenvalues[m]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gamma: float
    chain: ChainSpec

    def __len__(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class EdgeStateReport:
    energy: float
    sublattice_polarization: float
    localization_length: float
    center_weight: float

    def as_dict(self) -> dict:
        return {
            "energy": self.energy,
            "sublattice_polarization": self.sublattice_polarization,
            "localization_length": self.localization_length,
            "center_weight": self.center_weight,
        }


def assemble_hamiltonian(chain: ChainSpec) -> HamiltonianMatrix:
    """Dense real-symmetric coupling matrix with NN bonds and NNN (|i-j| = 2) terms."""
    spec = chain.spec
    n = chain.n_sites
    h = np.zeros((n, n))
    for i, j, c in chain.bonds:
        h[i, j] = h[j, i] = c
    x = chain.positions
    for i in range(n - 2):
        if spec.coupling_model is CouplingModel.EXPONENTIAL:
            c = coupling_from_distance(x[i + 2] - x[i], spec)
        else:
            c = spec.Jpp
        h[i, i + 2] = h[i + 2, i] = c
    h.setflags(write=False)
    return HamiltonianMatrix(entries=h, gamma=spec.loss, chain=chain)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # Largest-magnitude component made real-positive; first index wins ties.
    idx = np.argmax(np.abs(vecs) - 1e-12 * np.arange(vecs.shape[0])[:, None], axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)[None, :]


def eigenmodes(h: HamiltonianMatrix) -> ModeSet:
    m = np.asarray(h.entries)
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.conj().T).max() > HERMITIAN_TOL * scale:
        raise ContractError("Hamiltonian is not Hermitian")
    vals, vecs = np.linalg.eigh(m)
    vecs = _fix_signs(vecs)
    if np.isrealobj(m):
        vecs = vecs.real
    norm = np.linalg.norm(m, 2) if m.size else 0.0
    residual = np.abs(m @ vecs - vecs * vals[None, :]).max() if m.size else 0.0
    if residual > RESIDUAL_TOL * max(norm, 1e-300):
        raise NumericalError(f"eigensolver residual {residual:.3e} exceeds tolerance")
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return ModeSet(eigenvalues=vals, eigenvectors=vecs, gamma=h.gamma, chain=h.chain)


def solve_chain(chain: ChainSpec) -> ModeSet:
    return eigenmodes(assemble_hamiltonian(chain))


def gap_reference(spec) -> tuple[float, float]:
    """``(gap, centre)`` of the bulk spectrum used for midgap classification."""
    if spec.Jpp == 0 and spec.coupling_model is CouplingModel.DIRECT:
        return bloch.band_gap(spec), 0.0
    if spec.coupling_model is CouplingModel.EXPONENTIAL:
        spec = spec.with_(
            coupling_model=CouplingModel.DIRECT,
            Jp=coupling_from_distance(spec.d_long, spec),
            Jpp=coupling_from_distance(spec.a, spec),
        )
    return bloch.scan_gap(spec)


def sublattice_polarization(state: np.ndarray, chain: ChainSpec) -> float:
    """(I_A - I_B) / (I_A + I_B)."""
    w = np.abs(np.asarray(state)) ** 2
    total = w.sum()
    if not total > 0:
        raise ContractError("state has zero norm")
    mask = chain.sublattices
    return float((w[mask].sum() - w[~mask].sum()) / total)


def localization_length(state: np.ndarray, chain: ChainSpec,
                        center: Optional[int] = None) -> float:
    """Decay length xi of |psi| ~ exp(-|x - x_c| / xi) on the occupied sublattice.

    The centre is the chain's defect site, else the site of largest amplitude.
    Returns ``inf`` when the fitted amplitude does not decay.
    """
    amp = np.abs(np.asarray(state))
    if center is None:
        center = chain.defect_index if chain.defect_index is not None else int(np.argmax(amp))
    mask = chain.sublattices
    occupied = mask if (amp[mask] ** 2).sum() >= (amp[~mask] ** 2).sum() else ~mask
    use = occupied & (amp > 1e-8)
    if use.sum() < 3:
        raise InsufficientDataError("fewer than 3 sites with |psi| > 1e-8 on the occupied sublattice")
    dist = np.abs(chain.positions[use] - chain.positions[center])
    slope = np.polyfit(dist, np.log(amp[use]), 1)[0]
    return math.inf if slope >= 0 else float(-1.0 / slope)


def edge_report(modes: ModeSet, m: int, energy_offset: float = 0.0) -> EdgeStateReport:
    chain = modes.chain
    v = modes.eigenvectors[:, m]
    if chain.defect_index is not None:
        center = chain.defect_index
    else:
        center = int(np.argmax(np.abs(v)))
    try:
        xi = localization_length(v, chain, center)
    except InsufficientDataError:
        xi = 0.0
    return EdgeStateReport(
        energy=float(modes.eigenvalues[m] - energy_offset),
        sublattice_polarization=sublattice_polarization(v, chain),
        localization_length=xi,
        center_weight=float(abs(v[center]) ** 2 / np.sum(np.abs(v) ** 2)),
    )


def find_midgap_states(modes: ModeSet, spec=None,
                       tol: Optional[float] = None) -> list[tuple[int, EdgeStateReport]]:
    """Modes with |beta_rel - gap_centre| < tol, default tol = 0.2 * gap.

    Report energies are measured from the bulk gap centre (0 for the chiral
    model). Degenerate midgap modes are all returned.
    """
    spec = modes.chain.spec if spec is None else spec
    gap, centre = gap_reference(spec)
    if tol is None:
        tol = 0.2 * gap
    if not tol > 0:
        raise ContractError("tol must be > 0")
    hits = np.flatnonzero(np.abs(modes.eigenvalues - centre) < tol)
    return [(int(m), edge_report(modes, int(m), centre)) for m in hits]
