"""Momentum-resolved spectra: bulk, interface (site I) and the metallic J = Jp chain.

    python3 scripts/fig_spectra.py [--out out/figures] [--lossless]
"""

import argparse
from pathlib import Path

import numpy as np

from ssh_plasmonics import artifacts
from ssh_plasmonics.imaging import (
    OpticalSystem,
    apply_na_mask,
    brillouin_boundaries,
    crop_spectrum,
    detect_midgap_peak,
    momentum_spectrum,
    synthesize_continuous_field,
)
from ssh_plasmonics.lattice import CouplingSpec, build_bulk_chain, build_interface_chain
from ssh_plasmonics.propagation import default_z_grid, propagate, single_site_excitation
from ssh_plasmonics.realspace import find_midgap_states, solve_chain


def spectrum(chain, site, opt):
    fm = propagate(chain, single_site_excitation(chain, site), default_z_grid())
    return apply_na_mask(momentum_spectrum(synthesize_continuous_field(fm, chain, opt)), opt)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/figures"))
    ap.add_argument("--lossless", action="store_true")
    args = ap.parse_args()

    opt = OpticalSystem()
    spec = CouplingSpec(loss=0.0) if args.lossless else CouplingSpec()
    metallic = spec.with_(Jp=spec.J, d_short=0.8, d_long=0.8)
    cases = {
        "bulk": (build_bulk_chain(50, spec), 50),
        "interface": (build_interface_chain(25, spec), "I"),
        "metallic": (build_bulk_chain(50, metallic), 50),
    }
    print("zone boundaries", np.round(brillouin_boundaries(spec.a, 2), 4))
    for name, (chain, site) in cases.items():
        sm = spectrum(chain, site, opt)
        view = crop_spectrum(sm, (-opt.k_max, opt.k_max), (opt.beta0 - 1.0, opt.beta0 + 1.0))
        artifacts.write_pgm(args.out / f"spectrum_{name}.pgm", view.intensity,
                            {"kx0": view.kx_grid[0], "dkx": view.dkx, "kz0": view.kz_grid[0], "dkz": view.dkz})
        if name == "metallic":
            continue
        peak = detect_midgap_peak(sm, chain.spec.a)
        if peak is None:
            print(f"{name:10s} no midgap line")
            continue
        energy = find_midgap_states(solve_chain(chain))[0][1].energy
        print(f"{name:10s} midgap offset {peak.offset:+.4f} rad/um "
              f"(edge eigenvalue {energy:+.4f}, bin {sm.dkz:.4f})")


if __name__ == "__main__":
    main()
