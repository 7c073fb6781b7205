import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ssh_plasmonics.errors import ContractError, ParameterError
from ssh_plasmonics.lattice import (
    DEFAULT_D0,
    CouplingModel,
    CouplingSpec,
    Sublattice,
    build_bulk_chain,
    build_interface_chain,
    coupling_from_distance,
    reverse_chain,
)

J1 = CouplingSpec(J=1.0, Jp=0.5, Jpp=0.0)


def test_defaults():
    s = CouplingSpec()
    assert (s.J, s.Jp, s.Jpp, s.a) == (0.318, 0.159, pytest.approx(0.0318), 1.6)
    assert s.loss == 0.03125
    assert s.coupling_model is CouplingModel.DIRECT


@pytest.mark.parametrize("bad", [
    dict(J=-1.0), dict(Jp=-0.1), dict(Jpp=-0.1), dict(loss=-1e-3),
    dict(a=2.0), dict(d_short=0.0, a=1.0), dict(J=math.nan),
])
def test_spec_rejects_invalid(bad):
    with pytest.raises(ParameterError):
        CouplingSpec(**bad)


def test_bulk_positions_two_cells():
    c = build_bulk_chain(2, J1)
    np.testing.assert_allclose(c.positions, [0.0, 0.6, 1.6, 2.2], atol=1e-12)
    assert c.defect_index is None


def test_bulk_single_cell():
    c = build_bulk_chain(1, J1)
    assert c.n_sites == 2 and c.bond_couplings == [1.0]


def test_bulk_25_cells_alternates():
    c = build_bulk_chain(25, J1)
    assert c.n_sites == 50 and len(c.bonds) == 49
    assert c.bond_couplings == [1.0 if i % 2 == 0 else 0.5 for i in range(49)]


def test_bulk_rejects_zero_cells():
    with pytest.raises(ParameterError):
        build_bulk_chain(0, J1)


def test_interface_smallest():
    c = build_interface_chain(1, J1)
    assert c.n_sites == 5
    assert c.bond_couplings == [1.0, 0.5, 0.5, 1.0]
    assert c.defect_index == 2


def test_interface_41_sites_geometry():
    c = build_interface_chain(10, J1)
    assert c.n_sites == 41 and c.defect_index == 20
    gaps = np.diff(c.positions)
    np.testing.assert_allclose(gaps[17:23], [1.0, 0.6, 1.0, 1.0, 0.6, 1.0], atol=1e-12)
    assert c.sites[20].sublattice is Sublattice.A
    assert c.sites[18].sublattice is Sublattice.A and c.sites[22].sublattice is Sublattice.A


def test_interface_centered_antisymmetric():
    c = build_interface_chain(7, J1)
    assert c.positions[c.defect_index] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(c.positions, -c.positions[::-1], atol=1e-12)


def test_interface_uncentered_starts_at_zero():
    c = build_interface_chain(3, J1, centered=False)
    assert c.positions[0] == 0.0


def test_coupling_from_distance_examples(oracle):
    spec = J1.with_(coupling_model="exponential")
    assert DEFAULT_D0 == pytest.approx(oracle["coupling"]["d0"], rel=1e-14)
    assert coupling_from_distance(0.6, spec) == pytest.approx(1.0, rel=1e-15)
    assert coupling_from_distance(1.0, spec) == pytest.approx(oracle["coupling"]["ratio_1p0"], rel=1e-12)
    assert coupling_from_distance(1.6, spec) == pytest.approx(oracle["coupling"]["ratio_1p6"], rel=1e-12)
    assert coupling_from_distance(1.6, spec) == pytest.approx(0.1768, abs=1e-4)


def test_coupling_from_distance_needs_exponential():
    with pytest.raises(ContractError):
        coupling_from_distance(1.0, J1)


def test_coupling_from_distance_rejects_nonpositive():
    with pytest.raises(ParameterError):
        coupling_from_distance(0.0, J1.with_(coupling_model="exponential"))


def test_exponential_chain_bonds():
    spec = CouplingSpec(J=1.0, coupling_model="exponential")
    c = build_bulk_chain(3, spec)
    np.testing.assert_allclose(c.bond_couplings, [1.0, 0.5, 1.0, 0.5, 1.0], rtol=1e-12)


@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.3, 3.0))
def test_coupling_monotone(d1, d2, d0):
    spec = CouplingSpec(J=1.0, coupling_model="exponential", d0=d0)
    lo, hi = sorted((d1, d2))
    assert coupling_from_distance(lo, spec) >= coupling_from_distance(hi, spec)


cells = st.integers(1, 40)
spacings = st.tuples(st.floats(0.1, 2.0), st.floats(0.1, 2.0))


@given(cells, spacings)
def test_reverse_bulk_reverses_bonds(n, gaps):
    ds, dl = gaps
    c = build_bulk_chain(n, CouplingSpec(J=1.0, Jp=0.3, d_short=ds, d_long=dl, a=ds + dl))
    r = reverse_chain(c)
    assert r.bond_couplings == c.bond_couplings[::-1]
    np.testing.assert_allclose(np.diff(r.positions), np.diff(c.positions)[::-1], atol=1e-12)


@given(cells)
def test_interface_counts(n):
    c = build_interface_chain(n, J1)
    mask = c.sublattices
    assert c.n_sites % 2 == 1
    assert abs(int(mask.sum()) - int((~mask).sum())) == 1
    assert c.bond_couplings == c.bond_couplings[::-1]


@given(cells, spacings)
def test_position_differences_telescoping(n, gaps):
    ds, dl = gaps
    c = build_interface_chain(n, CouplingSpec(d_short=ds, d_long=dl, a=ds + dl))
    x = c.positions
    assert abs(np.diff(x).sum() - (x[-1] - x[0])) <= 1e-12
    assert np.all(np.diff(x) > 0)


@given(cells)
def test_direct_bonds_are_j_or_jp(n):
    c = build_interface_chain(n, CouplingSpec())
    assert set(c.bond_couplings) <= {0.318, 0.159}


def test_positions_read_only():
    c = build_bulk_chain(2, J1)
    with pytest.raises(ValueError):
        c.positions[0] = 5.0
