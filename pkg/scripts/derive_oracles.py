"""Recompute the frozen reference values in tests/data/oracles.json.

Everything here is built from first principles with mpmath and scipy and
shares no code with the ssh_plasmonics package, so the test suite compares
the package against an independent implementation.

    python3 scripts/derive_oracles.py [--check]
"""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy.linalg import expm

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"
mp.mp.dps = 30

DEF_J = 0.318
A = 1.6


def chain_matrix(bonds, jpp):
    n = len(bonds) + 1
    h = mp.zeros(n, n)
    for i, c in enumerate(bonds):
        h[i, i + 1] = h[i + 1, i] = mp.mpf(c)
    for i in range(n - 2):
        h[i, i + 2] = h[i + 2, i] = mp.mpf(jpp)
    return h


def interface_bonds(n, j, jp):
    left = [j if i % 2 == 0 else jp for i in range(2 * n)]
    return left + left[::-1]


def bulk_bonds(n_sites, j, jp):
    return [j if i % 2 == 0 else jp for i in range(n_sites - 1)]


def eig(h):
    vals, vecs = mp.eigsy(h)
    order = sorted(range(len(vals)), key=lambda i: vals[i])
    return [vals[i] for i in order], [vecs[:, i] for i in order]


def winding_integral(j, jp):
    # (1/2 pi) * closed integral of d(phi) with phi = atan2(dy, dx)
    def integrand(k):
        dx, dy = j + jp * mp.cos(k * A), jp * mp.sin(k * A)
        ddx, ddy = -jp * A * mp.sin(k * A), jp * A * mp.cos(k * A)
        return (dx * ddy - dy * ddx) / (dx**2 + dy**2)
    total = mp.quad(integrand, [-mp.pi / A, 0, mp.pi / A])
    return float(total / (2 * mp.pi))


def bulk_gap_center(j, jp, jpp, nk=20000):
    top, bottom = -mp.inf, mp.inf
    for m in range(nk + 1):
        k = -mp.pi / A + 2 * mp.pi / A * m / nk
        mod = mp.sqrt((j + jp * mp.cos(k * A)) ** 2 + (jp * mp.sin(k * A)) ** 2)
        shift = 2 * jpp * mp.cos(k * A)
        top, bottom = max(top, shift - mod), min(bottom, shift + mod)
    return float(bottom - top), float((bottom + top) / 2)


def edge_energy(n, j, jp, jpp):
    vals, vecs = eig(chain_matrix(interface_bonds(n, j, jp), jpp))
    gap, centre = bulk_gap_center(j, jp, jpp)
    m = min(range(len(vals)), key=lambda i: abs(vals[i] - centre))
    v = vecs[m]
    wa = sum(v[i] ** 2 for i in range(0, len(vals), 2))
    wb = sum(v[i] ** 2 for i in range(1, len(vals), 2))
    return {
        "absolute": float(vals[m]),
        "relative": float(vals[m] - centre),
        "gap": gap,
        "gap_center": centre,
        "polarization": float((wa - wb) / (wa + wb)),
    }


def dense_chain(bonds, jpp):
    n = len(bonds) + 1
    h = np.zeros((n, n))
    for i, c in enumerate(bonds):
        h[i, i + 1] = h[i + 1, i] = c
    for i in range(n - 2):
        h[i, i + 2] = h[i + 2, i] = jpp
    return h


def rms_series(h, x, start, z):
    psi0 = np.zeros(len(x), complex)
    psi0[start] = 1
    out = []
    for zz in z:
        p = np.abs(expm(1j * h * zz) @ psi0) ** 2
        mean = p @ x / p.sum()
        out.append(math.sqrt(p @ (x - mean) ** 2 / p.sum()))
    return np.array(out)


def positions(bonds_short, x0=0.0):
    gaps = [0.6 if s else 1.0 for s in bonds_short]
    return x0 + np.concatenate([[0.0], np.cumsum(gaps)])


def linear_residual(z, s):
    coef = np.polyfit(z, s, 1)
    r = s - np.polyval(coef, z)
    return float(np.sqrt(np.mean(r**2)) / np.sqrt(np.mean(s**2))), float(np.max(np.abs(r) / s))


def integrated_defect_weight(n, j, jp, jpp, start_offset, lo=50.0, hi=130.0, nz=2001):
    bonds = interface_bonds(n, j, jp)
    h = dense_chain(bonds, jpp)
    centre = 2 * n
    psi0 = np.zeros(len(bonds) + 1, complex)
    psi0[centre + start_offset] = 1
    vals, vecs = np.linalg.eigh(h)
    c = vecs.T @ psi0
    z = np.linspace(lo, hi, nz)
    amp = (np.exp(1j * np.outer(z, vals)) * c) @ vecs.T
    inten = np.abs(amp) ** 2
    prof = np.trapezoid(inten, z, axis=0)
    return prof


def derive() -> dict:
    d0 = mp.findroot(lambda d: mp.exp(-mp.mpf("0.4") / d) - mp.mpf("0.5"), 0.5)
    out = {
        "coupling": {
            "d0": float(d0),
            "ratio_1p0": float(mp.exp(-mp.mpf("0.4") / d0)),
            "ratio_1p6": float(mp.exp(-mp.mpf("1.0") / d0)),
        },
        "winding": {
            f"{j}_{jp}": round(winding_integral(j, jp), 9)
            for j, jp in [(1, 0.5), (0.5, 1), (1, 0.999), (0.999, 1)]
        },
        "chiral_defect": {},
    }
    for jpp in (0.1, 0.05):
        worst = max(abs(4 * jpp * mp.cos(mp.mpf(k) / 4000 * 2 * mp.pi)) for k in range(4001))
        out["chiral_defect"][str(jpp)] = float(worst)

    # Zero mode of the 41-site interface chain.
    vals, vecs = eig(chain_matrix(interface_bonds(10, 1, 0.5), 0))
    zero = [i for i, v in enumerate(vals) if abs(v) <= mp.mpf("1e-10") * 3]
    v = vecs[zero[0]]
    ratios = [float(v[20 + 2 * (m + 1)] / v[20 + 2 * m]) for m in range(4)]
    out["zero_mode"] = {
        "count": len(zero),
        "abs_eigenvalue": float(abs(vals[zero[0]])),
        "cell_ratio": ratios,
        "xi": float(mp.mpf(A) / mp.log(2)),
        "xi_jp09": float(mp.mpf(A) / mp.log(1 / mp.mpf("0.9"))),
        "in_gap_count": sum(1 for x in vals if -0.45 < x < 0.45),
    }

    # Bulk 50-site chain, J=1, Jp=0.5.
    vals, vecs = eig(chain_matrix(bulk_bonds(50, 1, 0.5), 0))
    pols = []
    for vec in vecs:
        wa = sum(vec[i] ** 2 for i in range(0, 50, 2))
        wb = sum(vec[i] ** 2 for i in range(1, 50, 2))
        pols.append(abs(float((wa - wb) / (wa + wb))))
    out["bulk50"] = {
        "min_abs": float(min(abs(x) for x in vals)),
        "max_abs": float(max(abs(x) for x in vals)),
        "max_abs_polarization": max(pols),
    }

    out["edge_nnn"] = edge_energy(10, 1, 0.5, 0.1)
    out["edge_default"] = edge_energy(25, DEF_J, 0.5 * DEF_J, 0.1 * DEF_J)

    # Ballistic spreading: default couplings, 101 sites, centre start.
    z = np.linspace(20, 100, 41)
    bonds = bulk_bonds(101, DEF_J, 0.5 * DEF_J)
    x = positions([i % 2 == 0 for i in range(100)])
    s = rms_series(dense_chain(bonds, 0.1 * DEF_J), x, 50, z)
    rms_rel, max_rel = linear_residual(z, s)
    bonds1 = bulk_bonds(101, 1, 0.5)
    s1 = rms_series(dense_chain(bonds1, 0), x, 50, z)
    rms1, max1 = linear_residual(z, s1)
    out["ballistic"] = {
        "default_rms_residual": rms_rel,
        "default_max_residual": max_rel,
        "default_slope": float(np.polyfit(z, s, 1)[0]),
        "j1_rms_residual": rms1,
        "j1_max_residual": max1,
    }

    prof_i = integrated_defect_weight(25, DEF_J, 0.5 * DEF_J, 0.1 * DEF_J, 0)
    prof_ii = integrated_defect_weight(25, DEF_J, 0.5 * DEF_J, 0.1 * DEF_J, 1)
    out["profile"] = {
        "site_I_defect": float(prof_i[50]),
        "site_II_defect": float(prof_ii[50]),
        "ratio_II_over_I": float(prof_ii[50] / prof_i[50]),
    }

    sigma = mp.findroot(lambda s: mp.exp(-2 * mp.pi**2 * s**2 * 4) - mp.mpf("0.2"), 0.14)
    out["optics"] = {
        "k_max": float(2 * mp.pi / mp.mpf("0.98") * mp.mpf("1.49")),
        "beta0": float(mp.mpf("1.0105") * 2 * mp.pi / mp.mpf("0.98")),
        "psf_sigma": float(sigma),
        # Two equal Gaussians are unimodal iff their separation is <= 2 sigma.
        "two_point_limit": float(2 * sigma),
        "zone_1": float(mp.pi / A),
        "zone_2": float(3 * mp.pi / A),
    }
    out["loss"] = {"intensity_z16": float(mp.exp(-2 * mp.mpf(16) / 32))}
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare against the frozen file")
    args = ap.parse_args()
    values = derive()
    if args.check:
        frozen = json.loads(OUT.read_text())
        print("match" if frozen == values else "MISMATCH")
        return
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(values, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
