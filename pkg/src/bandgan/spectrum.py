"""Random notch masks and their application in the frequency domain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError
from .seeding import as_generator
from .signal import Domain, RawSignal, require_domain


@dataclass(frozen=True)
class NotchMask:
    """Binary availability mask over DFT bins (1 = available, 0 = notched).

    ``band`` optionally marks the half-open bin range ``[start, stop)`` that
    carries signal; bins outside it are ignored by :func:`missing_fraction`.
    """

    bits: np.ndarray
    band_width_bins: int = 1
    target_missing_fraction: float = 0.5
    band: tuple[int, int] | None = None

    def __post_init__(self):
        b = np.array(self.bits, copy=True)
        if b.ndim != 1 or b.size == 0:
            raise DimensionError("mask must be a nonempty 1D array")
        if not np.all((b == 0) | (b == 1)):
            raise ValueError("mask entries must be exactly 0 or 1")
        b = b.astype(np.uint8)
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)
        if self.band is not None:
            lo, hi = (int(v) for v in self.band)
            if not 0 <= lo < hi <= b.size:
                raise DimensionError(f"band {self.band} outside mask of length {b.size}")
            object.__setattr__(self, "band", (lo, hi))

    def __len__(self):
        return self.bits.size

    @property
    def n(self) -> int:
        return self.bits.size

    def as_float(self) -> np.ndarray:
        return self.bits.astype(np.float64)


def gen_notch_mask(n_bins: int, band_width_bins: int, target_missing_fraction: float, seed) -> NotchMask:
    """Drop ``band_width_bins``-wide notches at random starts until the target is reached.

    Notches may overlap. A notch starting near the top edge is truncated rather
    than wrapped. Placement stops at the first notch that brings the zeroed
    fraction to or above the target.
    """
    if not 0 < target_missing_fraction < 1:
        raise ConfigurationError("target_missing_fraction must lie in (0, 1)")
    if band_width_bins < 1:
        raise ConfigurationError("band_width_bins must be >= 1")
    if n_bins < 2 * band_width_bins:
        raise ConfigurationError(
            f"n_bins ({n_bins}) must be at least twice band_width_bins ({band_width_bins})"
        )
    rng = as_generator(seed)
    bits = np.ones(n_bins, dtype=np.uint8)
    zeros = 0
    while zeros / n_bins < target_missing_fraction:
        start = int(rng.integers(0, n_bins))
        bits[start : start + band_width_bins] = 0
        zeros = n_bins - int(bits.sum())
    return NotchMask(bits, band_width_bins, target_missing_fraction)


def embed_mask(mask: NotchMask, n_samples: int, start: int = 0) -> NotchMask:
    """Place an in-band mask into a full ``n_samples``-bin mask.

    Out-of-band bins are marked available: rendered signals are exactly zero
    there, so the content loss should keep them zero too.
    """
    stop = start + mask.n
    if start < 0 or stop > n_samples:
        raise DimensionError(f"mask of {mask.n} bins does not fit at offset {start} in {n_samples}")
    bits = np.ones(n_samples, dtype=np.uint8)
    bits[start:stop] = mask.bits
    return NotchMask(bits, mask.band_width_bins, mask.target_missing_fraction, (start, stop))


def missing_fraction(m: NotchMask) -> float:
    bits = m.bits if m.band is None else m.bits[m.band[0] : m.band[1]]
    return float(np.count_nonzero(bits == 0)) / bits.size


def apply_mask(x, m: NotchMask) -> RawSignal:
    """Zero the notched bins of ``x``'s spectrum and return to the time domain."""
    s = require_domain(x, Domain.TIME)
    if s.size != m.n:
        raise DimensionError(f"signal length {s.size} != mask length {m.n}")
    spec = np.fft.fft(s, norm="ortho") * m.bits
    return RawSignal(np.fft.ifft(spec, norm="ortho"), Domain.TIME)


def zerofill_baseline(z):
    """The conventional fix: notched bins stay zero, so the notched data is the answer."""
    return z


def write_mask_csv(path, m: NotchMask) -> None:
    with open(path, "w") as fh:
        fh.write("bin,bit\n")
        for i, b in enumerate(m.bits):
            fh.write(f"{i},{int(b)}\n")


def read_mask_csv(path) -> NotchMask:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    if not np.array_equal(rows[:, 0], np.arange(rows.shape[0])):
        raise DimensionError(f"{path}: bin indices must run 0..N-1 in order")
    return NotchMask(rows[:, 1])
