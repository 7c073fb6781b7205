"""Virtual leakage-radiation microscope.

Real-space images come from dressing each waveguide amplitude with a Gaussian
transverse mode profile. Momentum-resolved (back-focal-plane) spectra are the
squared 2-D DFT of that field; the k_z axis is absolute, offset by the carrier
propagation constant beta0 = n_eff0 * 2 pi / lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, ParameterError
from .lattice import ChainSpec
from .propagation import FieldMap

PAD_FACTOR = 4


def psf_sigma_for_mtf(mtf_value: float, frequency: float) -> float:
    """Gaussian PSF width (µm) whose MTF equals ``mtf_value`` at ``frequency`` (1/µm)."""
    if not 0 < mtf_value < 1 or not frequency > 0:
        raise ParameterError("need 0 < mtf_value < 1 and frequency > 0")
    return math.sqrt(-math.log(mtf_value) / (2.0 * math.pi**2 * frequency**2))


def mtf(frequency, psf_sigma: float):
    f = np.asarray(frequency, dtype=float)
    return np.exp(-2.0 * math.pi**2 * psf_sigma**2 * f**2)


# MTF = 0.2 at 1/(500 nm).
DEFAULT_PSF_SIGMA = psf_sigma_for_mtf(0.2, 1.0 / 0.5)


@dataclass(frozen=True)
class OpticalSystem:
    wavelength: float = 0.98
    na: float = 1.49
    n_eff0: float = 1.0105
    psf_sigma: float = DEFAULT_PSF_SIGMA
    mode_sigma: float = 0.125
    dx: float = 0.1

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ParameterError("wavelength must be > 0")
        if not self.na > 0:
            raise ParameterError("na must be > 0")
        if not self.n_eff0 > 0:
            raise ParameterError("n_eff0 must be > 0")
        if self.psf_sigma < 0 or self.mode_sigma < 0:
            raise ParameterError("psf_sigma and mode_sigma must be >= 0")
        if not self.dx > 0:
            raise ParameterError("dx must be > 0")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def beta0(self) -> float:
        return self.n_eff0 * self.k0

    @property
    def k_max(self) -> float:
        """Radius k0 * NA of the collected momentum disc (rad/µm)."""
        return self.k0 * self.na


@dataclass(frozen=True)
class ContinuousField:
    """Complex field E(x, z) on uniform grids, carrier exp(i beta0 z) included."""

    x_grid: np.ndarray
    z_grid: np.ndarray
    values: np.ndarray  # [z, x]
    beta0: float

    def envelope(self) -> np.ndarray:
        return self.values * np.exp(-1j * self.beta0 * self.z_grid)[:, None]

    def intensity(self) -> "IntensityImage":
        return IntensityImage(self.x_grid, self.z_grid, np.abs(self.values) ** 2)


@dataclass(frozen=True)
class IntensityImage:
    """Real-space intensity on a uniform x grid (the simulated camera image)."""

    x_grid: np.ndarray
    z_grid: np.ndarray
    intensity: np.ndarray  # [z, x]


@dataclass(frozen=True)
class SpectrumMap:
    kx_grid: np.ndarray
    kz_grid: np.ndarray
    intensity: np.ndarray  # [kz, kx]
    kz_resolution: float  # 2 pi / (z window), before zero padding
    source: Optional[ContinuousField] = field(default=None, repr=False, compare=False)

    def _with(self, intensity, kx=None, kz=None) -> "SpectrumMap":
        return SpectrumMap(self.kx_grid if kx is None else kx,
                           self.kz_grid if kz is None else kz,
                           intensity, self.kz_resolution, self.source)

    @property
    def dkx(self) -> float:
        return float(self.kx_grid[1] - self.kx_grid[0])

    @property
    def dkz(self) -> float:
        return float(self.kz_grid[1] - self.kz_grid[0])

    def column(self, kx: float) -> tuple[int, np.ndarray]:
        j = int(np.argmin(np.abs(self.kx_grid - kx)))
        return j, self.intensity[:, j]

    def normalized(self) -> "SpectrumMap":
        peak = self.intensity.max()
        scale = 1.0 / peak if peak > 0 else 1.0
        return self._with(self.intensity * scale)


def _check_uniform(grid: np.ndarray, name: str) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ParameterError(f"{name} grid needs at least two samples")
    steps = np.diff(grid)
    step = (grid[-1] - grid[0]) / (grid.size - 1)
    if not step > 0 or np.abs(steps - step).max() > 1e-9 * max(abs(step), 1.0):
        raise ParameterError(f"{name} grid must be uniform and increasing")
    return float(step)


def default_x_grid(chain: ChainSpec, opt: OpticalSystem) -> np.ndarray:
    """Grid of pitch ``opt.dx`` anchored at x = 0, spanning all sites +- 5 mode widths."""
    margin = 5.0 * opt.mode_sigma + opt.dx
    lo = math.floor((chain.positions[0] - margin) / opt.dx)
    hi = math.ceil((chain.positions[-1] + margin) / opt.dx)
    return opt.dx * np.arange(lo, hi + 1)


def synthesize_continuous_field(fm: FieldMap, chain: ChainSpec, opt: OpticalSystem,
                                x_grid: Optional[np.ndarray] = None) -> ContinuousField:
    """E(x, z) = exp(i beta0 z) sum_i psi_i(z) g(x - x_i), g a unit-peak Gaussian.

    With ``mode_sigma == 0`` every site must fall on a grid point and g is a
    Kronecker delta.
    """
    x_grid = default_x_grid(chain, opt) if x_grid is None else np.asarray(x_grid, dtype=float)
    dx = _check_uniform(x_grid, "x")
    xs = chain.positions
    if len(xs) != fm.amplitudes.shape[1]:
        raise ParameterError("field map and chain disagree on the number of sites")
    sigma = opt.mode_sigma
    if sigma > 0:
        if dx > sigma * (1 + 1e-12):
            raise ParameterError(f"x grid spacing {dx} exceeds mode_sigma {sigma}")
        if x_grid[0] > xs[0] - 5 * sigma + 1e-9 or x_grid[-1] < xs[-1] + 5 * sigma - 1e-9:
            raise ParameterError("x grid must span all sites +- 5 mode_sigma")
        profiles = np.exp(-0.5 * ((x_grid[None, :] - xs[:, None]) / sigma) ** 2)
    else:
        idx = np.rint((xs - x_grid[0]) / dx).astype(int)
        if idx.min() < 0 or idx.max() >= x_grid.size or np.abs(x_grid[idx] - xs).max() > 1e-9:
            raise ParameterError("with mode_sigma = 0 every site must lie on an x grid point")
        profiles = np.zeros((xs.size, x_grid.size))
        profiles[np.arange(xs.size), idx] = 1.0
    carrier = np.exp(1j * opt.beta0 * fm.z_grid)
    values = (fm.amplitudes @ profiles) * carrier[:, None]
    return ContinuousField(x_grid, np.asarray(fm.z_grid, dtype=float), values, opt.beta0)


def momentum_spectrum(field: ContinuousField, pad: int = PAD_FACTOR,
                      window: str = "rect") -> SpectrumMap:
    """|2-D DFT|^2 of the field with unitary normalisation and ``pad``-fold zero padding.

    The rectangular window keeps Parseval exact; ``window="hann"`` tapers both
    axes for display only.
    """
    dx = _check_uniform(field.x_grid, "x")
    dz = _check_uniform(field.z_grid, "z")
    data = field.envelope()
    nz, nx = data.shape
    if window == "hann":
        data = data * np.outer(np.hanning(nz), np.hanning(nx))
    elif window != "rect":
        raise ParameterError(f"unknown window {window!r}")
    # Unitary on the padded array, so total power equals the real-space power.
    spec = np.fft.fft2(data, s=(pad * nz, pad * nx), norm="ortho")
    power = spec.real**2 + spec.imag**2
    del spec
    power = np.fft.fftshift(power)
    kx = np.fft.fftshift(2.0 * math.pi * np.fft.fftfreq(pad * nx, dx))
    kz = field.beta0 + np.fft.fftshift(2.0 * math.pi * np.fft.fftfreq(pad * nz, dz))
    return SpectrumMap(kx, kz, power, 2.0 * math.pi / (nz * dz), field)


def apply_na_mask(sm: SpectrumMap, opt: OpticalSystem) -> SpectrumMap:
    """Zero all components outside the disc kx^2 + kz^2 <= (k0 NA)^2."""
    kx, kz = np.meshgrid(sm.kx_grid, sm.kz_grid)
    keep = kx**2 + kz**2 <= opt.k_max**2
    return sm._with(np.where(keep, sm.intensity, 0.0))


def crop_spectrum(sm: SpectrumMap, kx_range: tuple[float, float],
                  kz_range: tuple[float, float]) -> SpectrumMap:
    cx = (sm.kx_grid >= kx_range[0]) & (sm.kx_grid <= kx_range[1])
    cz = (sm.kz_grid >= kz_range[0]) & (sm.kz_grid <= kz_range[1])
    return sm._with(sm.intensity[np.ix_(cz, cx)], sm.kx_grid[cx], sm.kz_grid[cz])


def _gaussian_blur_x(data: np.ndarray, dx: float, sigma: float) -> np.ndarray:
    # Linear (not circular) convolution: pad by 8 sigma before the FFT product.
    npad = int(math.ceil(8.0 * sigma / dx)) + 1
    n = data.shape[-1]
    total = n + 2 * npad
    f = np.fft.fftfreq(total, dx)
    spec = np.fft.fft(np.pad(data, [(0, 0)] * (data.ndim - 1) + [(npad, npad)]), axis=-1)
    out = np.fft.ifft(spec * mtf(f, sigma), axis=-1)[..., npad:npad + n]
    return out if np.iscomplexobj(data) else out.real


def apply_psf(obj, opt: OpticalSystem):
    """Transverse Gaussian blur of standard deviation ``opt.psf_sigma``.

    Accepts an :class:`IntensityImage` (incoherent imaging) or a
    :class:`ContinuousField` (applied to the complex amplitude).
    """
    sigma = opt.psf_sigma
    if isinstance(obj, IntensityImage):
        if sigma == 0:
            return obj
        dx = _check_uniform(obj.x_grid, "x")
        return IntensityImage(obj.x_grid, obj.z_grid, _gaussian_blur_x(obj.intensity, dx, sigma))
    if isinstance(obj, ContinuousField):
        if sigma == 0:
            return obj
        dx = _check_uniform(obj.x_grid, "x")
        return ContinuousField(obj.x_grid, obj.z_grid, _gaussian_blur_x(obj.values, dx, sigma), obj.beta0)
    raise TypeError(f"apply_psf needs an IntensityImage or ContinuousField, got {type(obj).__name__}")


def brillouin_boundaries(a: float, count: int = 1) -> np.ndarray:
    """Zone boundaries +-(2m - 1) pi / a, m = 1..count, ascending."""
    if not a > 0:
        raise ParameterError("a must be > 0")
    pos = (2.0 * np.arange(1, count + 1) - 1.0) * math.pi / a
    return np.concatenate([-pos[::-1], pos])


def ridge_positions(sm: SpectrumMap) -> np.ndarray:
    """k_z of the strongest component in every k_x column (NaN for empty columns)."""
    out = sm.kz_grid[np.argmax(sm.intensity, axis=0)].astype(float)
    out[sm.intensity.max(axis=0) <= 0] = np.nan
    return out


def off_band_weight(field: ContinuousField, band: Callable[[np.ndarray], np.ndarray]) -> float:
    """Fraction of power not carried by exp(i band(kx) z) in each k_x column.

    Each column of the transverse DFT is projected onto the single propagation
    constant ``band(kx)`` (relative to beta0); the residual is spectral weight
    off that band, free of the finite-window leakage of a z-DFT.
    """
    dx = _check_uniform(field.x_grid, "x")
    _check_uniform(field.z_grid, "z")
    data = np.fft.fft(field.envelope(), axis=1, norm="ortho")
    kx = 2.0 * math.pi * np.fft.fftfreq(field.x_grid.size, dx)
    basis = np.exp(1j * np.outer(field.z_grid, band(kx)))
    coef = (basis.conj() * data).sum(axis=0) / field.z_grid.size
    resid = data - basis * coef[None, :]
    total = np.sum(np.abs(data) ** 2)
    return float(np.sum(np.abs(resid) ** 2) / total)


def line_spectrum(signal: np.ndarray, dz: float, rtol: float = 1e-10):
    """Matrix-pencil decomposition of ``signal`` into damped exponentials.

    Returns ``(frequencies, damping, amplitudes)`` such that
    ``signal[n] ~ sum_m amplitudes[m] * exp((1j * frequencies[m] - damping[m]) * n * dz)``.
    The model order is the number of Hankel singular values above ``rtol``
    times the largest.
    """
    s = np.asarray(signal, dtype=complex)
    n = s.size
    pencil = n // 2
    hankel = np.lib.stride_tricks.sliding_window_view(s, pencil + 1)
    _, sv, vh = np.linalg.svd(hankel, full_matrices=False)
    order = int(np.sum(sv > rtol * sv[0])) if sv.size and sv[0] > 0 else 0
    if order == 0:
        return np.array([]), np.array([]), np.array([], dtype=complex)
    v = vh[:order].T
    poles = np.linalg.eigvals(np.linalg.pinv(v[:-1]) @ v[1:])
    vander = poles[None, :] ** np.arange(n)[:, None]
    amps = np.linalg.lstsq(vander, s, rcond=None)[0]
    return np.angle(poles) / dz, -np.log(np.abs(poles)) / dz, amps


@dataclass(frozen=True)
class MidgapPeak:
    kz_peak: float
    kz_center: float
    offset: float
    kz_lower: float
    kz_upper: float
    kx: float


def column_signal(sm: SpectrumMap, kx: float) -> tuple[int, np.ndarray]:
    """z-signal whose DFT is the spectrum column nearest ``kx`` (needs ``sm.source``)."""
    if sm.source is None:
        raise ContractError("spectrum carries no source field; build it with momentum_spectrum")
    j = int(np.argmin(np.abs(sm.kx_grid - kx)))
    f = sm.source
    phase = np.exp(-1j * sm.kx_grid[j] * (f.x_grid - f.x_grid[0]))
    return j, f.envelope() @ phase


def zone_boundary_lines(sm: SpectrumMap, a: float,
                        power_floor: float = 1e-8) -> tuple[int, np.ndarray, np.ndarray]:
    """Spectral lines of the k_x = pi/a column.

    Returns ``(column index, k_z relative to beta0, relative power)`` sorted by
    k_z, keeping lines whose power is at least ``power_floor`` of the strongest.
    """
    kx = math.pi / a
    if not sm.kx_grid[0] <= kx <= sm.kx_grid[-1]:
        raise ParameterError("spectrum does not contain the k_x = pi/a column")
    j, sig = column_signal(sm, kx)
    dz = _check_uniform(sm.source.z_grid, "z")
    freqs, _, amps = line_spectrum(sig, dz)
    power = np.abs(amps) ** 2
    if not power.size or not power.max() > 0:
        return j, np.array([]), np.array([])
    keep = power >= power_floor * power.max()
    order = np.argsort(freqs[keep])
    return j, freqs[keep][order], (power[keep] / power.max())[order]


def detect_midgap_peak(sm: SpectrumMap, a: float, threshold: float = 0.05,
                       power_floor: float = 1e-8) -> Optional[MidgapPeak]:
    """Locate a spectral line inside the band gap at the zone boundary k_x = pi/a.

    The column signal is split into its spectral lines. A line is midgap when
    it splits the widest void of the column into two parts, each wider than
    two resolution widths and within a factor of three of each other, and its
    column intensity reaches ``threshold`` of the column maximum. Its
    neighbouring lines are the band edges. All positions are reported on the
    k_z bins of ``sm``. Returns ``None`` when no such line exists.
    """
    j, freqs, _ = zone_boundary_lines(sm, a, power_floor)
    col = sm.intensity[:, j]
    if freqs.size < 3 or not col.max() > 0:
        return None
    kz = sm.kz_grid

    def bin_of(freq: float) -> int:
        return int(np.argmin(np.abs(kz - (sm.source.beta0 + freq))))

    gaps = np.diff(freqs)
    best = None
    for p in range(1, freqs.size - 1):
        left, right = gaps[p - 1], gaps[p]
        others = np.delete(gaps, [p - 1, p])
        if min(left, right) <= 2.0 * sm.kz_resolution:
            continue
        if others.size and left + right <= others.max():
            continue
        if min(left, right) < max(left, right) / 3.0:
            continue
        b = bin_of(freqs[p])
        if col[b] >= threshold * col.max() and (best is None or col[b] > col[best[1]]):
            best = (p, b)
    if best is None:
        return None
    p, b = best
    lower, upper = kz[bin_of(freqs[p - 1])], kz[bin_of(freqs[p + 1])]
    center = 0.5 * (lower + upper)
    return MidgapPeak(float(kz[b]), float(center), float(kz[b] - center),
                      float(lower), float(upper), float(sm.kx_grid[j]))
