"""Experiment configuration and its ``key = value`` text format.

Grammar, one entry per line::

    line    := blank | comment | entry
    comment := "#" anything
    entry   := key "=" value [comment]

Keys are the field names of :class:`ExperimentConfig` (``lambda`` for the
adversarial weight). Unknown or repeated keys are errors.
``freq_resolution = auto`` spreads the band over all ``n_samples`` bins.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import ConfigurationError, PersistenceError
from .gan import MODES, TrainConfig
from .signal import BandParams

MODE_ALIASES = {"standard": "standard_gan", "standard_gan": "standard_gan", "wgan": "wgan"}


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    n_samples: int = 256
    f_low: float = 380e6
    f_high: float = 2.08e9
    freq_resolution: float | None = None
    n_targets_min: int = 1
    n_targets_max: int = 1
    n_scenes: int = 1
    band_width_bins: int = 10
    missing_fraction: float = 0.9
    n_train: int = 200
    n_val: int = 20
    n_test: int = 20
    train: TrainConfig = field(default_factory=TrainConfig)
    checkpoint_every: int = 0
    out_dir: str = "run"

    def __post_init__(self):
        if self.seed is None:
            raise ConfigurationError("seed is mandatory")
        if self.train.seed != self.seed:
            object.__setattr__(self, "train", dataclasses.replace(self.train, seed=self.seed))
        if self.n_samples < 8:
            raise ConfigurationError("n_samples must be >= 8")
        if not 1 <= self.n_targets_min <= self.n_targets_max:
            raise ConfigurationError("need 1 <= n_targets_min <= n_targets_max")
        if self.n_scenes < 1:
            raise ConfigurationError("n_scenes must be >= 1")
        if self.n_train < 1 or self.n_val < 0 or self.n_test < 0:
            raise ConfigurationError("need n_train >= 1 and nonnegative n_val, n_test")
        if self.checkpoint_every < 0:
            raise ConfigurationError("checkpoint_every must be >= 0")
        band = self.band
        if band.n_band_bins > self.n_samples:
            raise ConfigurationError(f"band spans {band.n_band_bins} bins, more than n_samples={self.n_samples}")
        if band.n_band_bins < 2 * self.band_width_bins:
            raise ConfigurationError("band must span at least two notch widths")
        if not 0 < self.missing_fraction < 1:
            raise ConfigurationError("missing_fraction must lie in (0, 1)")

    @property
    def band(self) -> BandParams:
        res = self.freq_resolution
        if res is None:
            res = (self.f_high - self.f_low) / self.n_samples
        return BandParams(self.f_low, self.f_high, res)


_INT_KEYS = {
    "seed", "n_samples", "n_targets_min", "n_targets_max", "n_scenes", "band_width_bins",
    "n_train", "n_val", "n_test", "checkpoint_every",
}
_FLOAT_KEYS = {"f_low", "f_high", "missing_fraction"}
_TRAIN_KEYS = {
    "lambda": ("lam", float), "epochs": ("epochs", int), "batch_size": ("batch_size", int),
    "critic_steps": ("critic_steps", int), "mode": ("mode", str), "clip_c": ("clip_c", float),
    "lr": ("lr", float), "critic_lr": ("critic_lr", float), "decay": ("decay", float), "eps": ("eps", float),
    "hidden": ("hidden", int),
}


def _convert(key, raw, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse config text; ``overrides`` (same keys) win over the file."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        values[key] = raw
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = str(v)

    top, train = {}, {}
    for key, raw in values.items():
        if key in _INT_KEYS:
            top[key] = _convert(key, raw, int)
        elif key in _FLOAT_KEYS:
            top[key] = _convert(key, raw, float)
        elif key == "freq_resolution":
            top[key] = None if raw == "auto" else _convert(key, raw, float)
        elif key == "out_dir":
            top[key] = raw
        elif key in _TRAIN_KEYS:
            name, kind = _TRAIN_KEYS[key]
            if key == "mode":
                if raw not in MODE_ALIASES:
                    raise ConfigurationError(f"mode must be one of {sorted(MODE_ALIASES)}")
                raw = MODE_ALIASES[raw]
            train[name] = _convert(key, raw, kind)
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    if "seed" not in top:
        raise ConfigurationError("seed is mandatory (set 'seed = ...' or pass --seed)")
    train["seed"] = top["seed"]
    return ExperimentConfig(train=TrainConfig(**train), **top)


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise PersistenceError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)


def format_config(cfg: ExperimentConfig) -> str:
    """Render ``cfg`` so that ``parse_config(format_config(cfg)) == cfg``."""
    t = cfg.train
    res = "auto" if cfg.freq_resolution is None else repr(cfg.freq_resolution)
    rows = [
        ("seed", cfg.seed), ("n_samples", cfg.n_samples), ("f_low", repr(cfg.f_low)),
        ("f_high", repr(cfg.f_high)), ("freq_resolution", res),
        ("n_targets_min", cfg.n_targets_min), ("n_targets_max", cfg.n_targets_max),
        ("n_scenes", cfg.n_scenes), ("band_width_bins", cfg.band_width_bins),
        ("missing_fraction", repr(cfg.missing_fraction)), ("n_train", cfg.n_train),
        ("n_val", cfg.n_val), ("n_test", cfg.n_test), ("lambda", repr(t.lam)),
        ("epochs", t.epochs), ("batch_size", t.batch_size), ("critic_steps", t.critic_steps),
        ("mode", t.mode), ("clip_c", repr(t.clip_c)), ("lr", repr(t.lr)),
        ("critic_lr", repr(t.critic_lr)), ("decay", repr(t.decay)),
        ("eps", repr(t.eps)), ("hidden", t.hidden), ("checkpoint_every", cfg.checkpoint_every),
        ("out_dir", cfg.out_dir),
    ]
    return "".join(f"{k} = {v}\n" for k, v in rows)
