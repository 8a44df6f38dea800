"""Synthetic point-target range profiles and the unitary DFT.

Signals are 1D complex range profiles. The spectrum of a rendered scene is
nonzero only on the in-band bins ``0 .. n_band_bins - 1``; bin ``k`` stands
for the frequency ``f_low + k * freq_resolution``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError, DomainError, PersistenceError
from .seeding import as_generator


class Domain(str, enum.Enum):
    TIME = "time"
    FREQUENCY = "frequency"


@dataclass(frozen=True)
class RawSignal:
    """Complex samples of fixed length tagged with their domain.

    The sample buffer is copied on construction and made read-only.
    """

    samples: np.ndarray
    domain: Domain = Domain.TIME

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.complex128, copy=True)
        if s.ndim != 1 or s.size == 0:
            raise DimensionError(f"signal must be a nonempty 1D array, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("signal contains non-finite samples")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "domain", Domain(self.domain))

    def __len__(self):
        return self.samples.size

    @property
    def n(self) -> int:
        return self.samples.size

    def scaled(self, a) -> "RawSignal":
        return RawSignal(a * self.samples, self.domain)


def samples_of(x) -> np.ndarray:
    """Complex sample array of a RawSignal or array-like."""
    if isinstance(x, RawSignal):
        return x.samples
    return np.asarray(x, dtype=np.complex128)


@dataclass(frozen=True)
class BandParams:
    f_low: float = 380e6
    f_high: float = 2.08e9
    freq_resolution: float = 9.15e6

    def __post_init__(self):
        if not (np.isfinite(self.f_low) and np.isfinite(self.f_high)):
            raise ConfigurationError("band edges must be finite")
        if self.f_low >= self.f_high:
            raise ConfigurationError(f"f_low ({self.f_low}) must be below f_high ({self.f_high})")
        if not self.freq_resolution > 0:
            raise ConfigurationError("freq_resolution must be positive")
        if self.n_band_bins < 2:
            raise ConfigurationError("band must span at least 2 frequency bins")

    @property
    def n_band_bins(self) -> int:
        return int(round((self.f_high - self.f_low) / self.freq_resolution))

    def bin_frequencies(self) -> np.ndarray:
        return self.f_low + np.arange(self.n_band_bins) * self.freq_resolution


@dataclass(frozen=True)
class PointTarget:
    position: float
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class Scene:
    targets: tuple[PointTarget, ...]
    n_samples: int
    band: BandParams = field(default_factory=BandParams)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ConfigurationError("a scene needs at least one target")
        if self.n_samples < 1:
            raise ConfigurationError("n_samples must be positive")
        if self.band.n_band_bins > self.n_samples:
            raise ConfigurationError(
                f"band needs {self.band.n_band_bins} bins but the signal only has {self.n_samples}"
            )
        for t in self.targets:
            if not 0 <= t.position < self.n_samples:
                raise ConfigurationError(f"target position {t.position} outside [0, {self.n_samples})")
            if not np.isfinite(t.amplitude) or t.amplitude == 0:
                raise ConfigurationError("target amplitude must be finite and nonzero")


def synth_scene(n_targets: int, n_samples: int, band: BandParams, seed) -> Scene:
    """Draw a random scene: uniform positions, amplitudes in [0.5, 1.5], uniform phases."""
    if n_targets < 1:
        raise ConfigurationError("n_targets must be >= 1")
    if n_samples < 8:
        raise ConfigurationError("n_samples must be >= 8")
    if not isinstance(band, BandParams):
        raise ConfigurationError("band must be a BandParams")
    rng = as_generator(seed)
    positions = rng.uniform(0.0, n_samples, size=n_targets)
    amplitudes = rng.uniform(0.5, 1.5, size=n_targets)
    phases = rng.uniform(0.0, 2 * math.pi, size=n_targets)
    # uniform() is half-open but rounding can land exactly on the upper edge
    positions = np.where(positions >= n_samples, 0.0, positions)
    targets = tuple(
        PointTarget(float(p), float(a), float(ph)) for p, a, ph in zip(positions, amplitudes, phases)
    )
    return Scene(targets, n_samples, band)


def scene_spectrum(scene: Scene) -> np.ndarray:
    """Unitary-DFT spectrum of the rendered scene (length ``n_samples``)."""
    n = scene.n_samples
    k = np.arange(scene.band.n_band_bins)
    spec = np.zeros(n, dtype=np.complex128)
    for t in scene.targets:
        # delay by a linear phase ramp, exact for band-limited pulses
        spec[: k.size] += t.amplitude * np.exp(1j * t.phase) * np.exp(-2j * np.pi * k * t.position / n)
    return spec


def render_raw(scene: Scene) -> RawSignal:
    """Sum of delayed, scaled band-limited impulses as a time-domain signal."""
    return RawSignal(np.fft.ifft(scene_spectrum(scene), norm="ortho"), Domain.TIME)


def require_domain(x, expected: Domain) -> np.ndarray:
    if isinstance(x, RawSignal):
        if x.domain != expected:
            raise DomainError(f"expected a {expected.value}-domain signal, got {x.domain.value}")
        return x.samples
    return np.asarray(x, dtype=np.complex128)


def dft_forward(x) -> RawSignal:
    """Unitary DFT, ``1/sqrt(N)`` scaling."""
    return RawSignal(np.fft.fft(require_domain(x, Domain.TIME), norm="ortho"), Domain.FREQUENCY)


def dft_inverse(s) -> RawSignal:
    return RawSignal(np.fft.ifft(require_domain(s, Domain.FREQUENCY), norm="ortho"), Domain.TIME)


def write_signal_csv(path, x) -> None:
    s = samples_of(x)
    rows = ["index,real,imag"] + [f"{i},{float(v.real)!r},{float(v.imag)!r}" for i, v in enumerate(s)]
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    except OSError as exc:
        raise PersistenceError(f"cannot write {path}: {exc}") from exc


def read_signal_csv(path, domain: Domain = Domain.TIME) -> RawSignal:
    try:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise PersistenceError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise PersistenceError(f"{path}: malformed signal CSV ({exc})") from exc
    if rows.shape[1] != 3:
        raise DimensionError(f"{path}: expected columns index,real,imag")
    if not np.array_equal(rows[:, 0], np.arange(rows.shape[0])):
        raise DimensionError(f"{path}: sample indices must run 0..N-1 in order")
    return RawSignal(rows[:, 1] + 1j * rows[:, 2], domain)
