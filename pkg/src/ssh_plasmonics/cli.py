"""Command-line front end: ``ssh-sim <command> --config <path> [--out DIR] [--set k=v ...]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import artifacts, bloch, imaging, propagation, realspace
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError, SSHError

COMMANDS = ("bands", "winding", "modes", "evolve", "spectrum", "report")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
REPORT_POWER_FLOOR = 1e-6


@dataclass(frozen=True)
class ArtifactEntry:
    path: str
    kind: str
    meta: dict = field(default_factory=dict)


@dataclass
class ArtifactManifest:
    command: str
    config_hash: str
    entries: list[ArtifactEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "files": [{"path": e.path, "type": e.kind, "meta": e.meta} for e in self.entries],
        }


class _Writer:
    def __init__(self, out: Path, cfg: RunConfig, manifest: ArtifactManifest):
        self.out = out
        self.cfg = cfg
        self.manifest = manifest

    def _meta(self, extra: dict) -> dict:
        return {"config_hash": self.cfg.config_hash(), **extra}

    def csv(self, name: str, header, rows, meta: Optional[dict] = None) -> None:
        if "csv" not in self.cfg.output.formats:
            return
        meta = meta or {}
        artifacts.write_csv(self.out / name, header, rows, self._meta(meta))
        self.manifest.entries.append(ArtifactEntry(name, "csv", _plain(meta)))

    def pgm(self, name: str, data: np.ndarray, meta: dict) -> None:
        if "pgm" not in self.cfg.output.formats:
            return
        scale = artifacts.write_pgm(self.out / name, data, meta)
        self.manifest.entries.append(ArtifactEntry(name, "pgm", _plain({**meta, "scale_max": scale})))

    def json(self, name: str, obj) -> None:
        artifacts.write_json(self.out / name, obj)
        self.manifest.entries.append(ArtifactEntry(name, "json"))

    def text(self, name: str, line: str) -> None:
        artifacts.write_text(self.out / name, line + "\n")
        self.manifest.entries.append(ArtifactEntry(name, "txt"))


def _plain(meta: dict) -> dict:
    return {k: artifacts.format_value(v) for k, v in meta.items()}


def _grid_meta(prefix: str, grid: np.ndarray) -> dict:
    step = float(grid[1] - grid[0]) if grid.size > 1 else 0.0
    return {f"{prefix}0": float(grid[0]), f"d{prefix}": step, f"n{prefix}": int(grid.size)}


def winding_line(cfg: RunConfig) -> str:
    spec = cfg.spec
    gap, _ = bloch.scan_gap(spec)
    w = bloch.winding_number(spec, cfg.nk)
    defect = bloch.chiral_symmetry_defect(spec, cfg.nk)
    return f"winding={w} gap={float(f'{gap:.12g}')!r} chiral_defect={float(f'{defect:.12g}')!r}"


def _cmd_bands(cfg: RunConfig, w: _Writer) -> None:
    spec = cfg.spec
    k = -math.pi / spec.a + (2.0 * math.pi / spec.a) * np.arange(cfg.nk + 1) / cfg.nk
    lo, hi = bloch.bands(k, spec, include_nnn=False)
    lo_n, hi_n = bloch.bands(k, spec, include_nnn=True)
    w.csv("bands.csv", ["k", "E_minus", "E_plus", "E_minus_nnn", "E_plus_nnn"],
          zip(k, lo, hi, lo_n, hi_n), {"units": "k rad/um, E rad/um", "a": spec.a})


def _cmd_winding(cfg: RunConfig, w: _Writer) -> str:
    line = winding_line(cfg)
    w.text("winding.txt", line)
    return line


def _edge_dict(index: int, rep: realspace.EdgeStateReport) -> dict:
    d = {"index": index, **rep.as_dict()}
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def _cmd_modes(cfg: RunConfig, w: _Writer, chain, modes) -> None:
    pol = [realspace.sublattice_polarization(modes.eigenvectors[:, m], chain) for m in range(len(modes))]
    w.csv("modes.csv", ["index", "beta_rel", "sublattice_polarization"],
          zip(range(len(modes)), modes.eigenvalues, pol),
          {"n_sites": chain.n_sites, "gamma": modes.gamma})
    gap, centre = realspace.gap_reference(cfg.spec)
    edges = realspace.find_midgap_states(modes)
    w.json("edge_states.json", {
        "gap": gap,
        "gap_center": centre,
        "states": [_edge_dict(m, rep) for m, rep in edges],
    })


def _evolution(cfg: RunConfig, chain, modes):
    evo = cfg.evolution
    if evo is None:
        raise ConfigError("this command needs an 'evolution' section in the configuration")
    exc = propagation.single_site_excitation(chain, cfg.excitation_site())
    z = propagation.default_z_grid(evo.z_max, evo.nz)
    return propagation.propagate(chain, exc, z, modes)


def _cmd_evolve(cfg: RunConfig, w: _Writer, chain, fm) -> None:
    evo = cfg.evolution
    imap = fm.intensity()
    w.pgm("intensity.pgm", imap.intensity,
          {"rows": "z", "cols": "site", **_grid_meta("z", imap.z_grid), "nsite": chain.n_sites})
    image = imaging.apply_psf(imaging.synthesize_continuous_field(fm, chain, cfg.optics).intensity(), cfg.optics)
    w.pgm("image.pgm", np.maximum(image.intensity, 0.0),
          {"rows": "z", "cols": "x", **_grid_meta("z", image.z_grid), **_grid_meta("x", image.x_grid)})
    w.csv("rms_width.csv", ["z", "sigma"], propagation.rms_width(imap), {"units": "um"})
    lo, hi = evo.window
    prof = propagation.integrated_profile(imap, lo, hi)
    sub = ["A" if s else "B" for s in chain.sublattices]
    w.csv("profile.csv", ["index", "x", "sublattice", "integrated_intensity"],
          zip(range(chain.n_sites), chain.positions, sub, prof),
          {"z_min": lo, "z_max": min(hi, evo.z_max), "units": "x um, intensity um"})


def _cmd_spectrum(cfg: RunConfig, w: _Writer, chain, modes, fm) -> None:
    opt = cfg.optics
    field_ = imaging.synthesize_continuous_field(fm, chain, opt)
    sm = imaging.apply_na_mask(imaging.momentum_spectrum(field_), opt)
    half = 1.25 * float(np.abs(modes.eigenvalues).max()) + 0.2
    view = imaging.crop_spectrum(sm, (-opt.k_max, opt.k_max), (opt.beta0 - half, opt.beta0 + half))
    w.pgm("spectrum.pgm", view.intensity,
          {"rows": "kz", "cols": "kx", **_grid_meta("kz", view.kz_grid), **_grid_meta("kx", view.kx_grid)})
    a = cfg.spec.a
    j, freqs, power = imaging.zone_boundary_lines(sm, a, REPORT_POWER_FLOOR)
    kx = float(sm.kx_grid[j])
    rows = [("band", kx, opt.beta0 + f, f, p) for f, p in zip(freqs, power)]
    peak = imaging.detect_midgap_peak(sm, a)
    meta = {"kx_column": kx, "dkz": sm.dkz, "beta0": opt.beta0}
    if peak is not None:
        rows = [r for r in rows if abs(r[2] - peak.kz_peak) > sm.dkz]
        col = sm.intensity[:, j]
        kb = int(np.argmin(np.abs(sm.kz_grid - peak.kz_peak)))
        rows.append(("midgap", kx, peak.kz_peak, peak.kz_peak - opt.beta0, float(col[kb] / col.max())))
        rows.sort(key=lambda r: r[2])
        meta.update(midgap_offset=peak.offset, gap_center=peak.kz_center)
    else:
        meta["midgap"] = "none"
    w.csv("peaks.csv", ["kind", "kx", "kz", "kz_rel", "relative_power"], rows, meta)


def run_command(cmd: str, cfg: RunConfig, out_dir: Optional[Path] = None) -> ArtifactManifest:
    """Run one command, write its artifacts and ``manifest.json`` into ``out_dir``."""
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}")
    out = Path(cfg.output.directory if out_dir is None else out_dir)
    manifest = ArtifactManifest(cmd, cfg.config_hash())
    w = _Writer(out, cfg, manifest)
    if cmd in ("bands", "report"):
        _cmd_bands(cfg, w)
    if cmd in ("winding", "report"):
        _cmd_winding(cfg, w)
    if cmd in ("modes", "evolve", "spectrum", "report"):
        if cmd in ("evolve", "spectrum") and cfg.evolution is None:
            raise ConfigError(f"'{cmd}' needs an 'evolution' section in the configuration")
        chain = cfg.build_chain()
        modes = realspace.solve_chain(chain)
        if cmd in ("modes", "report"):
            _cmd_modes(cfg, w, chain, modes)
        if cmd != "modes" and cfg.evolution is not None:
            fm = _evolution(cfg, chain, modes)
            if cmd in ("evolve", "report"):
                _cmd_evolve(cfg, w, chain, fm)
            if cmd in ("spectrum", "report"):
                _cmd_spectrum(cfg, w, chain, modes, fm)
    artifacts.write_json(out / "manifest.json", manifest.to_dict())
    return manifest


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ssh-sim", description="SSH waveguide-array simulator")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, type=Path, help="JSON configuration file")
    p.add_argument("--out", type=Path, default=None, help="output directory (overrides output.directory)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config value by dotted path, e.g. lattice.Jp=0.2")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = load_config(text, args.overrides)
        manifest = run_command(args.command, cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except SSHError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "winding":
        print(winding_line(cfg))
    out = args.out or Path(cfg.output.directory)
    print(f"wrote {len(manifest.entries)} files to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
