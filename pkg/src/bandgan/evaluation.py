"""RMS, SNR in dB, recovery gain and normalized down-range profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, UndefinedMetricError
from .signal import samples_of

PROFILE_FLOOR_DB = -120.0


def rms(x) -> float:
    s = samples_of(x)
    if s.size == 0:
        raise DimensionError("rms of an empty signal")
    return float(np.linalg.norm(s.ravel()) / math.sqrt(s.size))


def snr_db(x, xhat) -> float:
    """``20 log10(rms(x) / rms(xhat - x))``; ``inf`` when the error is exactly zero."""
    a, b = samples_of(x), samples_of(xhat)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    ref = rms(a)
    if ref == 0:
        raise UndefinedMetricError("SNR against an all-zero reference is undefined")
    err = rms(b - a)
    if err == 0:
        return math.inf
    return 20.0 * math.log10(ref / err)


@dataclass(frozen=True)
class PairScore:
    snr_corrupted_db: float
    snr_recovered_db: float
    gain_db: float


def _gain(corrupted: float, recovered: float) -> float:
    if math.isinf(corrupted) and math.isinf(recovered):
        return 0.0
    return recovered - corrupted


@dataclass(frozen=True)
class EvalReport:
    """Dataset-level SNRs over all pairs concatenated, plus per-pair scores."""

    snr_corrupted_db: float
    snr_recovered_db: float
    gain_db: float
    pairs: tuple[PairScore, ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        lines = ["pair,snr_corrupted_db,snr_recovered_db,gain_db"]
        for i, p in enumerate(self.pairs):
            lines.append(f"{i},{p.snr_corrupted_db!r},{p.snr_recovered_db!r},{p.gain_db!r}")
        lines.append(f"all,{self.snr_corrupted_db!r},{self.snr_recovered_db!r},{self.gain_db!r}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        per = [p.gain_db for p in self.pairs]
        out = [
            f"pairs evaluated      : {len(self.pairs)}",
            f"corrupted SNR  (dB)  : {self.snr_corrupted_db:.2f}",
            f"recovered SNR  (dB)  : {self.snr_recovered_db:.2f}",
            f"recovery gain  (dB)  : {self.gain_db:.2f}",
        ]
        if per:
            finite = [g for g in per if math.isfinite(g)]
            if finite:
                out.append(f"per-pair gain (dB)   : min {min(finite):.2f}  median {float(np.median(finite)):.2f}  max {max(finite):.2f}")
        return "\n".join(out) + "\n"


def recovery_gain(x, z, zhat) -> EvalReport:
    """SNR of the corrupted and recovered data against ``x`` and their difference.

    Each argument is one signal or a sequence of signals (one per pair).
    """
    xs, zs, hs = (_rows(v) for v in (x, z, zhat))
    if not (xs.shape == zs.shape == hs.shape):
        raise DimensionError("x, z and zhat must have matching shapes")
    pairs = []
    for a, b, c in zip(xs, zs, hs):
        sc, sr = snr_db(a, b), snr_db(a, c)
        pairs.append(PairScore(sc, sr, _gain(sc, sr)))
    sc, sr = snr_db(xs.ravel(), zs.ravel()), snr_db(xs.ravel(), hs.ravel())
    return EvalReport(sc, sr, _gain(sc, sr), tuple(pairs))


def _rows(v) -> np.ndarray:
    if isinstance(v, (list, tuple)):
        return np.stack([samples_of(s) for s in v])
    s = samples_of(v)
    return s[None, :] if s.ndim == 1 else s


def downrange_profile_db(x) -> np.ndarray:
    """Magnitude in dB relative to the peak; exact zeros map to -120 dB."""
    mag = np.abs(samples_of(x))
    if mag.size == 0:
        raise DimensionError("profile of an empty signal")
    peak = mag.max()
    if peak == 0:
        raise UndefinedMetricError("down-range profile of an all-zero signal is undefined")
    out = np.full(mag.shape, PROFILE_FLOOR_DB)
    nz = mag > 0
    out[nz] = np.maximum(20.0 * np.log10(mag[nz] / peak), PROFILE_FLOOR_DB)
    out[mag == peak] = 0.0
    return out


def write_profiles_csv(path, profiles: dict[str, np.ndarray]) -> None:
    names = list(profiles)
    cols = [np.asarray(profiles[k]) for k in names]
    with open(path, "w") as fh:
        fh.write("bin," + ",".join(names) + "\n")
        for i in range(cols[0].size):
            fh.write(f"{i}," + ",".join(repr(float(c[i])) for c in cols) + "\n")


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def profiles_svg(profiles: dict[str, np.ndarray], title: str = "", width: int = 640, height: int = 320,
                 db_min: float = -60.0) -> str:
    """A self-contained SVG line plot of one or more dB profiles."""
    left, right, top, bottom = 48, 12, 24, 28
    pw, ph = width - left - right, height - top - bottom
    n = max(len(v) for v in profiles.values())
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="16" font-family="sans-serif" font-size="12">{title}</text>',
    ]
    for db in range(0, int(db_min) - 1, -20):
        y = top + ph * (db / db_min)
        parts.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        parts.append(f'<text x="{left - 4}" y="{y + 4:.1f}" font-family="sans-serif" font-size="10" text-anchor="end">{db}</text>')
    for j, (name, prof) in enumerate(profiles.items()):
        p = np.clip(np.asarray(prof, dtype=float), db_min, 0.0)
        xs = left + pw * np.arange(p.size) / max(n - 1, 1)
        ys = top + ph * (p / db_min)
        pts = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(xs, ys))
        color = _COLORS[j % len(_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        parts.append(f'<text x="{left + pw - 4}" y="{top + 12 + 12 * j}" font-family="sans-serif" font-size="10" text-anchor="end" fill="{color}">{name}</text>')
    parts.append(f'<text x="{left + pw / 2:.0f}" y="{height - 6}" font-family="sans-serif" font-size="10" text-anchor="middle">range bin</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
