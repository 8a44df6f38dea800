"""End-to-end runs: synthesize datasets, train, recover and evaluate.

These are the functions behind the command-line subcommands; they are also
the convenient entry points from Python.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
from pathlib import Path
from typing import Callable

import numpy as np

from . import gan, nn
from .config import ExperimentConfig, format_config
from .errors import ConfigurationError, DimensionError
from .evaluation import EvalReport, downrange_profile_db, profiles_svg, recovery_gain, snr_db, write_profiles_csv
from .persistence import (
    atomic_write,
    file_digest,
    read_checkpoint,
    read_dataset,
    write_checkpoint,
    write_dataset,
)
from .seeding import stream
from .signal import RawSignal, read_signal_csv, render_raw, synth_scene, write_signal_csv
from .spectrum import apply_mask, embed_mask, gen_notch_mask, zerofill_baseline

log = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")
METRICS_HEADER = "epoch,content_loss,adv_loss,disc_loss,val_snr_db,generator_loss"


def make_scenes(cfg: ExperimentConfig) -> list[RawSignal]:
    out = []
    for i in range(cfg.n_scenes):
        rng = stream(cfg.seed, "scene", i)
        n_targets = int(rng.integers(cfg.n_targets_min, cfg.n_targets_max + 1))
        out.append(render_raw(synth_scene(n_targets, cfg.n_samples, cfg.band, rng)))
    return out


def _draw_mask(cfg: ExperimentConfig, split: str, index: int, attempt: int):
    rng = stream(cfg.seed, f"mask-{split}", index, attempt)
    inner = gen_notch_mask(cfg.band.n_band_bins, cfg.band_width_bins, cfg.missing_fraction, rng)
    return embed_mask(inner, cfg.n_samples)


def synthesize(cfg: ExperimentConfig) -> dict[str, list[gan.TrainingPair]]:
    """Build the train/val/test splits.

    Pair ``j`` of every split uses scene ``j % n_scenes``. Validation and test
    masks are redrawn until they differ from every training mask.
    """
    scenes = make_scenes(cfg)
    counts = {"train": cfg.n_train, "val": cfg.n_val, "test": cfg.n_test}
    seen: set[bytes] = set()
    splits = {}
    for split in SPLITS:
        pairs = []
        for j in range(counts[split]):
            attempt = 0
            mask = _draw_mask(cfg, split, j, attempt)
            while split != "train" and mask.bits.tobytes() in seen:
                attempt += 1
                mask = _draw_mask(cfg, split, j, attempt)
            if split == "train":
                seen.add(mask.bits.tobytes())
            x = scenes[j % cfg.n_scenes]
            pairs.append(gan.TrainingPair(x, apply_mask(x, mask), mask))
        splits[split] = pairs
    return splits


def cmd_synth(cfg: ExperimentConfig, out_dir=None) -> dict[str, Path]:
    out = Path(out_dir or cfg.out_dir)
    splits = synthesize(cfg)
    paths = {}
    for split, pairs in splits.items():
        if pairs:
            paths[split] = out / f"{split}.sgds"
            write_dataset(paths[split], pairs)
    atomic_write(out / "config.txt", format_config(cfg))
    log.info("wrote %s", ", ".join(f"{k}: {len(v)} pairs" for k, v in splits.items()))
    return paths


def config_hash(cfg: gan.TrainConfig, n_samples: int, dataset_digest: str = "") -> bytes:
    """Identity of a training run; ``epochs`` is excluded so runs can be extended."""
    fields = dataclasses.asdict(dataclasses.replace(cfg, epochs=0))
    text = f"{sorted(fields.items())!r}|n_samples={n_samples}|data={dataset_digest}"
    return hashlib.sha256(text.encode()).digest()


def _metrics_csv(history) -> str:
    rows = [METRICS_HEADER]
    for m in history:
        rows.append(f"{m.epoch},{m.content!r},{m.adversarial!r},{m.discriminator!r},{m.val_snr_db!r},{m.generator!r}")
    return "\n".join(rows) + "\n"


def validation_snr(gen: nn.MlpParams, pairs: list[gan.TrainingPair]) -> float:
    if not pairs:
        return math.nan
    x = np.stack([p.x.samples for p in pairs])
    z = np.stack([p.z.samples for p in pairs])
    return snr_db(x.ravel(), gan.recover_batch(gen, z).ravel())


def cmd_train(cfg: ExperimentConfig, data_dir=None, out_dir=None, resume=None) -> gan.TrainerState:
    """Train for ``cfg.train.epochs`` epochs in total, writing metrics and checkpoints."""
    out = Path(out_dir or cfg.out_dir)
    data = Path(data_dir or out)
    tcfg = cfg.train
    train_path = data / "train.sgds"
    train_pairs = read_dataset(train_path)
    val_pairs = read_dataset(data / "val.sgds") if (data / "val.sgds").exists() else []
    n = train_pairs[0].x.n
    if n != cfg.n_samples:
        raise ConfigurationError(f"dataset has N={n} but the config says n_samples={cfg.n_samples}")
    chash = config_hash(tcfg, n, file_digest(train_path))
    if resume is not None:
        state, mode, saved_hash = read_checkpoint(resume)
        if saved_hash != chash or mode != tcfg.mode:
            raise ConfigurationError(f"checkpoint {resume} was written by a different configuration")
        if state.epoch > tcfg.epochs:
            raise ConfigurationError(f"checkpoint is at epoch {state.epoch}, beyond the requested {tcfg.epochs}")
    else:
        state = gan.create_trainer(n, tcfg)
    data_arrays = gan.PairArrays.from_pairs(train_pairs)

    def on_epoch(st, metrics):
        val = validation_snr(st.gen, val_pairs)
        st.loss_history[-1] = dataclasses.replace(metrics, val_snr_db=val)
        log.info("epoch %d  gen %.4f  content %.4f  adv %.4g  disc %.4g  val SNR %.2f dB",
                 metrics.epoch, metrics.generator, metrics.content, metrics.adversarial, metrics.discriminator, val)
        if cfg.checkpoint_every and st.epoch % cfg.checkpoint_every == 0:
            write_checkpoint(out / f"checkpoint_e{st.epoch:04d}.sgck", st, tcfg.mode, chash)

    state = gan.train(state, data_arrays, tcfg, callback=on_epoch)
    write_checkpoint(out / "checkpoint.sgck", state, tcfg.mode, chash)
    atomic_write(out / "metrics.csv", _metrics_csv(state.loss_history))
    return state


def cmd_recover(checkpoint, input_csv, output_csv) -> RawSignal:
    state, _, _ = read_checkpoint(checkpoint)
    z = read_signal_csv(input_csv)
    if 2 * z.n != state.gen.dims[0]:
        raise DimensionError(f"model expects {state.gen.dims[0] // 2} samples, input has {z.n}")
    zhat = gan.recover(state.gen, z)
    Path(output_csv).parent.mkdir(parents=True, exist_ok=True)
    write_signal_csv(output_csv, zhat)
    return zhat


def evaluate(recover_fn: Callable[[np.ndarray], np.ndarray], pairs: list[gan.TrainingPair], out_dir=None,
             svg: bool = False) -> EvalReport:
    """Score ``recover_fn`` (rows of notched signals in, rows of estimates out) on ``pairs``.

    With ``out_dir`` set, writes the report, a baseline comparison and
    per-pair down-range profiles.
    """
    x = np.stack([p.x.samples for p in pairs])
    z = np.stack([p.z.samples for p in pairs])
    zhat = np.asarray(recover_fn(z))
    report = recovery_gain(x, z, zhat)
    if out_dir is None:
        return report
    out = Path(out_dir)
    baseline = recovery_gain(x, z, np.stack([zerofill_baseline(r) for r in z]))
    atomic_write(out / "eval_report.csv", report.to_csv())
    atomic_write(out / "eval_report.txt", report.to_text())
    summary = ["method,snr_db", f"corrupted,{report.snr_corrupted_db!r}",
               f"zerofill_baseline,{baseline.snr_recovered_db!r}", f"recovered,{report.snr_recovered_db!r}"]
    atomic_write(out / "eval_summary.csv", "\n".join(summary) + "\n")
    prof_dir = out / "profiles"
    prof_dir.mkdir(parents=True, exist_ok=True)
    for i in range(len(pairs)):
        profiles = {name: downrange_profile_db(sig) for name, sig in
                    (("original", x[i]), ("corrupted", z[i]), ("recovered", zhat[i]))
                    if np.any(sig != 0)}
        write_profiles_csv(prof_dir / f"pair_{i:03d}.csv", profiles)
        if svg:
            atomic_write(prof_dir / f"pair_{i:03d}.svg", profiles_svg(profiles, title=f"test pair {i}"))
    return report


def cmd_eval(checkpoint, data_dir, out_dir, svg: bool = False) -> EvalReport:
    state, _, _ = read_checkpoint(checkpoint)
    pairs = read_dataset(Path(data_dir) / "test.sgds")
    if 2 * pairs[0].x.n != state.gen.dims[0]:
        raise DimensionError("test data length does not match the model")
    return evaluate(lambda z: gan.recover_batch(state.gen, z), pairs, out_dir, svg)
