"""Tight-binding simulator of SSH plasmonic waveguide arrays."""

from .lattice import (
    ChainSpec,
    CouplingModel,
    CouplingSpec,
    Site,
    Sublattice,
    build_bulk_chain,
    build_chain,
    build_interface_chain,
    coupling_from_distance,
)

__version__ = "0.1.0"
