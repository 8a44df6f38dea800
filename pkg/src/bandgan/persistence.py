"""Binary dataset and checkpoint files.

All integers are little-endian ``uint32``, all reals little-endian
``float64``; complex samples are stored as interleaved (real, imag) pairs.

Dataset (``.sgds``)::

    b"SGDS" | version | N | pair_count | band_start | band_stop
    | band_width_bins | target_missing_fraction (f64)
    then per pair: x (N complex) | z (N complex) | mask (N uint8)

Checkpoint (``.sgck``)::

    b"SGCK" | version | mode code | config hash (32 bytes) | epoch
    | generator net | discriminator net | generator optimizer
    | discriminator optimizer | loss history

    net       := n_layers | dims (n_layers + 1) | activation codes (n_layers)
                 | W0, b0, W1, b1, ... row-major
    optimizer := lr | decay | eps | accumulators in parameter order
    history   := count | per epoch: epoch | generator | content
                 | adversarial | discriminator | val_snr_db | clamped
"""

from __future__ import annotations

import hashlib
import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from . import nn
from .errors import DimensionError, PersistenceError
from .gan import EpochMetrics, TrainerState, TrainingPair
from .signal import Domain, RawSignal
from .spectrum import NotchMask

DATASET_MAGIC = b"SGDS"
CHECKPOINT_MAGIC = b"SGCK"
VERSION = 1
MODE_CODES = {"wgan": 0, "standard_gan": 1}
ACT_CODES = {"relu": 0, "tanh": 1, "sigmoid": 2, "identity": 3}


def atomic_write(path, data: bytes | str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise PersistenceError(f"cannot write {path}: {exc}") from exc


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise PersistenceError(f"cannot read {path}: {exc}") from exc


class _Reader:
    def __init__(self, data: bytes, what: str):
        self.buf = io.BytesIO(data)
        self.what = what

    def take(self, n: int) -> bytes:
        b = self.buf.read(n)
        if len(b) != n:
            raise PersistenceError(f"{self.what}: truncated file")
        return b

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.take(8))[0]

    def array(self, dtype: str, count: int) -> np.ndarray:
        dt = np.dtype(dtype)
        return np.frombuffer(self.take(dt.itemsize * count), dtype=dt).copy()

    def done(self):
        if self.buf.read(1):
            raise PersistenceError(f"{self.what}: trailing bytes")


def _u32(*vals) -> bytes:
    return struct.pack(f"<{len(vals)}I", *vals)


# -- datasets ----------------------------------------------------------------

def dataset_bytes(pairs: list[TrainingPair]) -> bytes:
    if not pairs:
        raise DimensionError("a dataset needs at least one pair")
    n = pairs[0].x.n
    m0 = pairs[0].mask
    lo, hi = m0.band if m0.band is not None else (0, n)
    out = [DATASET_MAGIC, _u32(VERSION, n, len(pairs), lo, hi, m0.band_width_bins),
           struct.pack("<d", m0.target_missing_fraction)]
    for p in pairs:
        if p.x.n != n:
            raise DimensionError("all pairs in a dataset must share one length")
        out.append(p.x.samples.astype("<c16").tobytes())
        out.append(p.z.samples.astype("<c16").tobytes())
        out.append(p.mask.bits.astype("u1").tobytes())
    return b"".join(out)


def parse_dataset(data: bytes, validate: bool = True) -> list[TrainingPair]:
    r = _Reader(data, "dataset")
    if r.take(4) != DATASET_MAGIC:
        raise PersistenceError("not a dataset file (bad magic)")
    version = r.u32()
    if version != VERSION:
        raise PersistenceError(f"unsupported dataset version {version}")
    n, count, lo, hi, width = (r.u32() for _ in range(5))
    target = r.f64()
    band = None if (lo, hi) == (0, n) else (lo, hi)
    pairs = []
    for _ in range(count):
        x = RawSignal(r.array("<c16", n), Domain.TIME)
        z = RawSignal(r.array("<c16", n), Domain.TIME)
        mask = NotchMask(r.array("u1", n), width, target, band)
        pair = TrainingPair(x, z, mask)
        if validate:
            pair.validate()
        pairs.append(pair)
    r.done()
    return pairs


def write_dataset(path, pairs: list[TrainingPair]) -> None:
    atomic_write(path, dataset_bytes(pairs))


def read_dataset(path, validate: bool = True) -> list[TrainingPair]:
    return parse_dataset(_read(path), validate)


def file_digest(path) -> str:
    return hashlib.sha256(_read(path)).hexdigest()


# -- checkpoints -------------------------------------------------------------

def _net_bytes(p: nn.MlpParams) -> bytes:
    dims = p.dims
    out = [_u32(len(p.weights), *dims), bytes(ACT_CODES[a] for a in p.activations)]
    out += [a.astype("<f8").tobytes() for a in p.arrays()]
    return b"".join(out)


def _read_net(r: _Reader) -> nn.MlpParams:
    n_layers = r.u32()
    dims = [r.u32() for _ in range(n_layers + 1)]
    codes = r.take(n_layers)
    inv = {v: k for k, v in ACT_CODES.items()}
    try:
        acts = [inv[c] for c in codes]
    except KeyError:
        raise PersistenceError("checkpoint: unknown activation code") from None
    arrays = []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        arrays.append(r.array("<f8", d_out * d_in).reshape(d_out, d_in))
        arrays.append(r.array("<f8", d_out))
    return nn.MlpParams.from_arrays(arrays, acts)


def _opt_bytes(s: nn.OptimizerState) -> bytes:
    return struct.pack("<3d", s.lr, s.decay, s.eps) + b"".join(a.astype("<f8").tobytes() for a in s.accumulators)


def _read_opt(r: _Reader, like: nn.MlpParams) -> nn.OptimizerState:
    lr, decay, eps = r.f64(), r.f64(), r.f64()
    accs = tuple(r.array("<f8", a.size).reshape(a.shape) for a in like.arrays())
    return nn.OptimizerState(accs, lr, decay, eps)


def checkpoint_bytes(state: TrainerState, mode: str, config_hash: bytes) -> bytes:
    if len(config_hash) != 32:
        raise DimensionError("config hash must be 32 bytes")
    out = [CHECKPOINT_MAGIC, _u32(VERSION, MODE_CODES[mode]), config_hash, _u32(state.epoch),
           _net_bytes(state.gen), _net_bytes(state.disc), _opt_bytes(state.gen_opt), _opt_bytes(state.disc_opt),
           _u32(len(state.loss_history))]
    for m in state.loss_history:
        out.append(_u32(m.epoch) + struct.pack("<5d", m.generator, m.content, m.adversarial, m.discriminator,
                                               m.val_snr_db) + _u32(m.clamped))
    return b"".join(out)


def parse_checkpoint(data: bytes) -> tuple[TrainerState, str, bytes]:
    """Return ``(state, mode, config_hash)``."""
    r = _Reader(data, "checkpoint")
    if r.take(4) != CHECKPOINT_MAGIC:
        raise PersistenceError("not a checkpoint file (bad magic)")
    version = r.u32()
    if version != VERSION:
        raise PersistenceError(f"unsupported checkpoint version {version}")
    code = r.u32()
    modes = {v: k for k, v in MODE_CODES.items()}
    if code not in modes:
        raise PersistenceError("checkpoint: unknown mode code")
    config_hash = r.take(32)
    epoch = r.u32()
    gen = _read_net(r)
    disc = _read_net(r)
    gen_opt = _read_opt(r, gen)
    disc_opt = _read_opt(r, disc)
    history = []
    for _ in range(r.u32()):
        ep = r.u32()
        vals = [r.f64() for _ in range(5)]
        history.append(EpochMetrics(ep, *vals[:4], clamped=r.u32(), val_snr_db=vals[4]))
    r.done()
    return TrainerState(gen, disc, gen_opt, disc_opt, epoch, history), modes[code], config_hash


def write_checkpoint(path, state: TrainerState, mode: str, config_hash: bytes) -> None:
    atomic_write(path, checkpoint_bytes(state, mode, config_hash))


def read_checkpoint(path) -> tuple[TrainerState, str, bytes]:
    return parse_checkpoint(_read(path))
