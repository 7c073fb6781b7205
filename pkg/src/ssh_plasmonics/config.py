"""Run configuration: JSON documents with four sections.

Schema (every key optional unless noted, defaults in brackets)::

    lattice    (required)  J [0.318], Jp [0.159], Jpp [0.0318], a [1.6],
                           d_short [0.6], d_long [1.0], loss [0.03125],
                           coupling_model ["direct"], d0 [0.577],
                           n_cells [25], defect [true], nk [256]
    optics                 wavelength [0.98], na [1.49], n_eff0 [1.0105],
                           psf_sigma [0.1428], mode_sigma [0.125], dx [0.1]
    evolution  (optional)  z_max [130], nz [512], excitation ["I" or centre site],
                           window [[50, 130]]
    output                 directory ["out"], formats [["csv", "pgm"]]

``n_cells`` counts unit cells per side for an interface chain and in total
for a bulk chain.
"""

from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
from dataclasses import dataclass
from typing import Optional, Union

from .errors import ConfigError, SSHError
from .imaging import OpticalSystem
from .lattice import ChainSpec, CouplingModel, CouplingSpec, build_bulk_chain, build_interface_chain
from .propagation import DEFAULT_NZ, DEFAULT_Z_MAX, SiteLabel, resolve_site

FORMATS = ("csv", "pgm")
MAX_NZ = 1 << 16


@dataclass(frozen=True)
class EvolutionConfig:
    z_max: float = DEFAULT_Z_MAX
    nz: int = DEFAULT_NZ
    excitation: Union[int, str, None] = None
    window: tuple[float, float] = (50.0, 130.0)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = FORMATS


@dataclass(frozen=True)
class RunConfig:
    spec: CouplingSpec
    n_cells: int = 25
    defect: bool = True
    nk: int = 256
    optics: OpticalSystem = OpticalSystem()
    evolution: Optional[EvolutionConfig] = None
    output: OutputConfig = OutputConfig()

    def build_chain(self) -> ChainSpec:
        if self.defect:
            return build_interface_chain(self.n_cells, self.spec)
        return build_bulk_chain(self.n_cells, self.spec)

    def excitation_site(self) -> Union[int, str]:
        if self.evolution is None:
            raise ConfigError("command needs an 'evolution' section")
        exc = self.evolution.excitation
        if exc is None:
            return SiteLabel.I.value if self.defect else self.n_cells
        return exc

    def semantic_dict(self) -> dict:
        """Every field that influences results; the output section is excluded."""
        spec = dataclasses.asdict(self.spec)
        spec["coupling_model"] = self.spec.coupling_model.value
        return {
            "lattice": {**spec, "n_cells": self.n_cells, "defect": self.defect, "nk": self.nk},
            "optics": dataclasses.asdict(self.optics),
            "evolution": None if self.evolution is None else {
                "z_max": self.evolution.z_max,
                "nz": self.evolution.nz,
                "excitation": self.excitation_site(),
                "window": list(self.evolution.window),
            },
        }

    def config_hash(self) -> str:
        text = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _integer(value, key: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {value}")
    return value


def _boolean(value, key: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{key}: expected true or false, got {value!r}")
    return value


def _section(doc: dict, name: str, allowed: set[str]) -> Optional[dict]:
    sec = doc.get(name)
    if sec is None:
        return None
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected an object")
    unknown = sorted(set(sec) - allowed)
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown key (allowed: {', '.join(sorted(allowed))})")
    return sec


_SPEC_FLOATS = ("J", "Jp", "Jpp", "a", "d_short", "d_long", "loss", "d0")
_OPTICS_FLOATS = tuple(f.name for f in dataclasses.fields(OpticalSystem))


def _build(ctor, kwargs: dict, section: str):
    try:
        return ctor(**kwargs)
    except (SSHError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from None


def config_from_dict(doc: dict) -> RunConfig:
    """Validate a decoded configuration document and apply defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be an object")
    unknown = sorted(set(doc) - {"lattice", "optics", "evolution", "output"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown section")
    if "lattice" not in doc:
        raise ConfigError("lattice: section is required")

    lat = _section(doc, "lattice", set(_SPEC_FLOATS) | {"coupling_model", "n_cells", "defect", "nk"}) or {}
    kwargs = {k: _number(lat[k], f"lattice.{k}") for k in _SPEC_FLOATS if k in lat}
    if "coupling_model" in lat:
        try:
            kwargs["coupling_model"] = CouplingModel(lat["coupling_model"])
        except ValueError:
            raise ConfigError(f"lattice.coupling_model: expected 'direct' or 'exponential', "
                              f"got {lat['coupling_model']!r}") from None
    if "a" not in lat and ("d_short" in lat or "d_long" in lat):
        # Only the separations given: the lattice constant follows from them.
        kwargs["a"] = kwargs.get("d_short", 0.6) + kwargs.get("d_long", 1.0)
    spec = _build(CouplingSpec, kwargs, "lattice")
    n_cells = _integer(lat.get("n_cells", 25), "lattice.n_cells", 1)
    defect = _boolean(lat.get("defect", True), "lattice.defect")
    nk = _integer(lat.get("nk", 256), "lattice.nk", 16)

    opt = _section(doc, "optics", set(_OPTICS_FLOATS)) or {}
    optics = _build(OpticalSystem, {k: _number(v, f"optics.{k}") for k, v in opt.items()}, "optics")

    evo = _section(doc, "evolution", {"z_max", "nz", "excitation", "window"})
    evolution = None
    if evo is not None:
        z_max = _number(evo.get("z_max", DEFAULT_Z_MAX), "evolution.z_max")
        if not z_max > 0:
            raise ConfigError("evolution.z_max: must be > 0")
        nz = _integer(evo.get("nz", DEFAULT_NZ), "evolution.nz", 2)
        if nz > MAX_NZ:
            raise ConfigError(f"evolution.nz: must be <= {MAX_NZ}")
        window = evo.get("window", [50.0, 130.0])
        if not isinstance(window, list) or len(window) != 2:
            raise ConfigError("evolution.window: expected [z_min, z_max]")
        lo, hi = (_number(w, "evolution.window") for w in window)
        if not (0 <= lo < hi and lo < z_max):
            raise ConfigError(f"evolution.window: need 0 <= z_min < z_max and z_min < {z_max}")
        excitation = evo.get("excitation")
        if isinstance(excitation, bool) or not isinstance(excitation, (int, str, type(None))):
            raise ConfigError(f"evolution.excitation: expected a label or site index, got {excitation!r}")
        evolution = EvolutionConfig(z_max, nz, excitation, (lo, hi))

    out = _section(doc, "output", {"directory", "formats"}) or {}
    directory = out.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory: expected a non-empty string")
    formats = out.get("formats", list(FORMATS))
    if not isinstance(formats, list) or any(f not in FORMATS for f in formats):
        raise ConfigError(f"output.formats: expected a list drawn from {list(FORMATS)}")
    output = OutputConfig(directory, tuple(f for f in FORMATS if f in formats))

    cfg = RunConfig(spec, n_cells, defect, nk, optics, evolution, output)
    if evolution is not None:
        site = cfg.excitation_site()
        if isinstance(site, str) and not site.lstrip("-").isdigit() and not defect:
            raise ConfigError(f"evolution.excitation: label {site!r} needs lattice.defect = true")
        try:
            resolve_site(cfg.build_chain(), site)
        except SSHError as exc:
            raise ConfigError(f"evolution.excitation: {exc}") from None
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc)


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    """Apply ``key=value`` overrides with dotted keys; values parse as JSON, else as strings."""
    doc = copy.deepcopy(doc)
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set {item!r}: expected key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"--set {key}: {part} is not a section")
            node = child
        node[parts[-1]] = value
    return doc


def load_config(text: str, overrides: Optional[list[str]] = None) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(apply_overrides(doc, overrides or []))
