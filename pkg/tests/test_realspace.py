import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ssh_plasmonics import bloch
from ssh_plasmonics.errors import ContractError, InsufficientDataError, NumericalError
from ssh_plasmonics.lattice import CouplingSpec, build_bulk_chain, build_chain, build_interface_chain, reverse_chain
from ssh_plasmonics.realspace import (
    HamiltonianMatrix,
    assemble_hamiltonian,
    eigenmodes,
    find_midgap_states,
    localization_length,
    solve_chain,
    sublattice_polarization,
)

J1 = CouplingSpec(J=1.0, Jp=0.5, Jpp=0.0, loss=0.0)


def test_two_site_hamiltonian():
    h = assemble_hamiltonian(build_bulk_chain(1, J1))
    np.testing.assert_array_equal(h.entries, [[0, 1], [1, 0]])
    assert h.gamma == 0.0 and h.n == 2


def test_interface_offdiagonal():
    h = assemble_hamiltonian(build_interface_chain(1, J1))
    np.testing.assert_array_equal(np.diag(h.entries, 1), [1.0, 0.5, 0.5, 1.0])
    assert np.all(np.diag(h.entries) == 0)


def test_nnn_entries():
    h = assemble_hamiltonian(build_bulk_chain(2, J1.with_(Jpp=0.1))).entries
    assert h[0, 2] == h[1, 3] == h[2, 0] == h[3, 1] == 0.1
    assert h[0, 3] == 0


def test_loss_copied():
    assert assemble_hamiltonian(build_bulk_chain(2, CouplingSpec())).gamma == 0.03125


def test_two_level_eigenmodes():
    m = solve_chain(build_bulk_chain(1, J1))
    np.testing.assert_allclose(m.eigenvalues, [-1.0, 1.0])
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(m.eigenvectors[:, 1], [s, s], atol=1e-15)
    np.testing.assert_allclose(np.abs(m.eigenvectors[:, 0]), [s, s], atol=1e-15)


def test_zero_mode_41_sites(oracle):
    chain = build_interface_chain(10, J1)
    m = solve_chain(chain)
    norm = np.linalg.norm(assemble_hamiltonian(chain).entries, 2)
    zero = np.flatnonzero(np.abs(m.eigenvalues) <= 1e-10 * norm)
    assert zero.size == oracle["zero_mode"]["count"] == 1


def test_bulk_50_spectrum(oracle):
    m = solve_chain(build_bulk_chain(25, J1))
    a = np.abs(m.eigenvalues)
    assert a.min() == pytest.approx(oracle["bulk50"]["min_abs"], abs=1e-10)
    assert a.max() == pytest.approx(oracle["bulk50"]["max_abs"], abs=1e-10)
    assert a.min() > 0.5 - 0.1 and a.max() < 1.5 + 0.1


def test_non_hermitian_rejected():
    chain = build_bulk_chain(1, J1)
    with pytest.raises(ContractError):
        eigenmodes(HamiltonianMatrix(np.array([[0.0, 1.0], [0.5, 0.0]]), 0.0, chain))


def test_residual_guard(monkeypatch):
    chain = build_bulk_chain(2, J1)
    h = assemble_hamiltonian(chain)
    real_eigh = np.linalg.eigh
    monkeypatch.setattr(np.linalg, "eigh", lambda m: (real_eigh(m)[0] + 1e-3, real_eigh(m)[1]))
    with pytest.raises(NumericalError):
        eigenmodes(h)


def test_midgap_bulk_empty():
    assert find_midgap_states(solve_chain(build_bulk_chain(25, J1))) == []


def test_midgap_interface_zero():
    hits = find_midgap_states(solve_chain(build_interface_chain(10, J1)))
    assert len(hits) == 1
    assert hits[0][1].energy == pytest.approx(0.0, abs=1e-12)


def test_midgap_interface_nnn(oracle):
    hits = find_midgap_states(solve_chain(build_interface_chain(10, J1.with_(Jpp=0.1))))
    assert len(hits) == 1
    rep = hits[0][1]
    assert rep.energy == pytest.approx(oracle["edge_nnn"]["relative"], abs=1e-10)
    assert rep.sublattice_polarization == pytest.approx(oracle["edge_nnn"]["polarization"], abs=1e-10)
    assert 0 < abs(rep.energy) < 0.5 * oracle["edge_nnn"]["gap"]


def test_midgap_default_params(oracle):
    hits = find_midgap_states(solve_chain(build_interface_chain(25, CouplingSpec())))
    assert len(hits) == 1
    assert hits[0][1].energy == pytest.approx(oracle["edge_default"]["relative"], abs=1e-10)


def test_midgap_two_interfaces_reports_both():
    # Bulk chain ending on weak bonds at both ends hosts two end states.
    chain = build_chain(41, CouplingSpec(J=0.5, Jp=1.0, Jpp=0.0))
    assert len(find_midgap_states(solve_chain(chain))) >= 1
    chain = build_bulk_chain(20, CouplingSpec(J=0.5, Jp=1.0, Jpp=0.0))
    assert len(find_midgap_states(solve_chain(chain))) == 2


def test_midgap_tol_positive():
    with pytest.raises(ContractError):
        find_midgap_states(solve_chain(build_bulk_chain(2, J1)), tol=0.0)


def test_polarization_examples():
    chain = build_interface_chain(10, J1)
    m = solve_chain(chain)
    idx = int(np.argmin(np.abs(m.eigenvalues)))
    assert sublattice_polarization(m.eigenvectors[:, idx], chain) >= 1 - 1e-10
    two = build_bulk_chain(1, J1)
    assert sublattice_polarization(np.array([1, 1]) / math.sqrt(2), two) == 0.0
    with pytest.raises(ContractError):
        sublattice_polarization(np.zeros(2), two)


def test_bulk_polarization_small(oracle):
    chain = build_bulk_chain(25, J1)
    m = solve_chain(chain)
    pols = [abs(sublattice_polarization(m.eigenvectors[:, i], chain)) for i in range(50)]
    assert max(pols) < 0.05
    assert max(pols) == pytest.approx(oracle["bulk50"]["max_abs_polarization"], abs=1e-10)


@pytest.mark.parametrize("jp, key", [(0.5, "xi"), (0.9, "xi_jp09")])
def test_localization_length(oracle, jp, key):
    n = 10 if jp == 0.5 else 60
    chain = build_interface_chain(n, CouplingSpec(J=1.0, Jp=jp, Jpp=0.0))
    m = solve_chain(chain)
    idx = int(np.argmin(np.abs(m.eigenvalues)))
    assert localization_length(m.eigenvectors[:, idx], chain) == pytest.approx(oracle["zero_mode"][key], rel=1e-3)


def test_zero_mode_cell_ratio(oracle):
    chain = build_interface_chain(10, J1)
    m = solve_chain(chain)
    v = m.eigenvectors[:, int(np.argmin(np.abs(m.eigenvalues)))]
    ratios = [v[20 + 2 * (k + 1)] / v[20 + 2 * k] for k in range(4)]
    np.testing.assert_allclose(ratios, oracle["zero_mode"]["cell_ratio"], atol=1e-8)


def test_localization_decoupled_limit():
    chain = build_interface_chain(10, CouplingSpec(J=1.0, Jp=0.01, Jpp=0.0))
    m = solve_chain(chain)
    v = m.eigenvectors[:, int(np.argmin(np.abs(m.eigenvalues)))]
    assert localization_length(v, chain) < 0.4


def test_localization_insufficient_data():
    chain = build_interface_chain(3, J1)
    state = np.zeros(chain.n_sites)
    state[chain.defect_index] = 1.0
    with pytest.raises(InsufficientDataError):
        localization_length(state, chain)


def test_histogram_matches_bands():
    chain = build_bulk_chain(100, J1)
    ev = np.sort(solve_chain(chain).eigenvalues)
    lo, hi = bloch.bands(bloch.brillouin_grid(J1, 100), J1, include_nnn=False)
    ref = np.sort(np.concatenate([lo, hi]))
    assert np.abs(ev - ref).max() < 3 / chain.n_sites


sizes = st.integers(1, 25)
hop = st.floats(0.05, 2.0)


@given(sizes, hop, hop, st.booleans())
def test_chiral_spectrum_symmetric(n, j, jp, interface):
    spec = CouplingSpec(J=j, Jp=jp, Jpp=0.0)
    chain = build_interface_chain(n, spec) if interface else build_bulk_chain(n, spec)
    h = assemble_hamiltonian(chain)
    ev = eigenmodes(h).eigenvalues
    scale = max(np.linalg.norm(h.entries, 2), 1e-300)
    assert np.abs(ev + ev[::-1]).max() <= 1e-10 * scale


@given(sizes, hop, hop, st.floats(0.0, 0.3))
def test_eigenmodes_unitary_and_residual(n, j, jp, jpp):
    chain = build_interface_chain(n, CouplingSpec(J=j, Jp=jp, Jpp=jpp))
    h = assemble_hamiltonian(chain)
    m = eigenmodes(h)
    v = m.eigenvectors
    np.testing.assert_allclose(v.T @ v, np.eye(chain.n_sites), atol=1e-10)
    assert np.all(np.diff(m.eigenvalues) >= 0)
    norm = np.linalg.norm(h.entries, 2)
    assert np.abs(h.entries @ v - v * m.eigenvalues).max() <= 1e-10 * norm


@given(sizes, st.floats(0.0, 0.95))
def test_single_zero_mode_on_interface(n, jp):
    chain = build_interface_chain(n, CouplingSpec(J=1.0, Jp=jp, Jpp=0.0))
    h = assemble_hamiltonian(chain)
    ev = eigenmodes(h).eigenvalues
    assert np.sum(np.abs(ev) < 1e-10 * np.linalg.norm(h.entries, 2)) == 1


@given(st.integers(21, 40))
def test_gap_census(n_cells):
    chain = build_interface_chain(n_cells // 2, J1)
    ev = solve_chain(chain).eigenvalues
    assert np.sum((ev > -0.45) & (ev < 0.45)) == 1


@given(sizes, hop, hop, st.floats(0.0, 0.3))
def test_mirror_chain(n, j, jp, jpp):
    chain = build_interface_chain(n, CouplingSpec(J=j, Jp=jp, Jpp=jpp))
    m1, m2 = solve_chain(chain), solve_chain(reverse_chain(chain))
    np.testing.assert_allclose(m1.eigenvalues, m2.eigenvalues, atol=1e-10)
    # Compare projectors so that degenerate subspaces and signs do not matter.
    p1 = np.abs(m1.eigenvectors) ** 2
    p2 = np.abs(m2.eigenvectors[::-1]) ** 2
    simple = np.ones(chain.n_sites, bool)
    gaps = np.diff(m1.eigenvalues)
    simple[:-1] &= gaps > 1e-4
    simple[1:] &= gaps > 1e-4
    np.testing.assert_allclose(p1[:, simple], p2[:, simple], atol=1e-10)


@given(sizes)
def test_polarization_bounded(n):
    chain = build_interface_chain(n, CouplingSpec())
    m = solve_chain(chain)
    for i in range(chain.n_sites):
        assert abs(sublattice_polarization(m.eigenvectors[:, i], chain)) <= 1 + 1e-12


def test_exponential_gap_reference():
    spec = CouplingSpec(J=1.0, coupling_model="exponential")
    hits = find_midgap_states(solve_chain(build_interface_chain(12, spec)))
    assert len(hits) == 1
    assert abs(hits[0][1].energy) < 0.2
