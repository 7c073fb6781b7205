"""Band structure with and without next-nearest-neighbour coupling, both dimerizations.

    python3 scripts/fig_bands.py [--out out/figures]
"""

import argparse
import math
from pathlib import Path

import numpy as np

from ssh_plasmonics import artifacts, bloch
from ssh_plasmonics.lattice import CouplingSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/figures"))
    ap.add_argument("--nk", type=int, default=201)
    args = ap.parse_args()

    base = CouplingSpec()
    for name, spec in (("trivial", base), ("topological", base.with_(J=base.Jp, Jp=base.J))):
        k = np.linspace(-math.pi / spec.a, math.pi / spec.a, args.nk)
        lo, hi = bloch.bands(k, spec, include_nnn=False)
        lo_n, hi_n = bloch.bands(k, spec, include_nnn=True)
        dx, dy = bloch.d_components(k, spec)
        artifacts.write_csv(args.out / f"bands_{name}.csv",
                            ["k", "E_minus", "E_plus", "E_minus_nnn", "E_plus_nnn", "dx", "dy"],
                            zip(k, lo, hi, lo_n, hi_n, dx, dy),
                            {"J": spec.J, "Jp": spec.Jp, "Jpp": spec.Jpp, "a": spec.a})
        gap, centre = bloch.scan_gap(spec)
        print(f"{name:12s} winding={bloch.winding_number(spec)} gap={gap:.4f} "
              f"centre={centre:+.4f} chiral_defect={bloch.chiral_symmetry_defect(spec):.4f}")


if __name__ == "__main__":
    main()
