"""Fully connected networks with hand-written backprop, RMSProp and clipping.

Everything runs in float64 so that finite-difference checks are meaningful.
Inputs may be a single vector or a batch of row vectors; parameter gradients
are summed over the batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, TrainingError, UsageError
from .seeding import as_generator

ACTIVATIONS = ("relu", "tanh", "sigmoid", "identity")


def _sigmoid(a):
    # split by sign so exp never overflows
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    e = np.exp(a[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _activate(tag, a):
    if tag == "relu":
        return np.maximum(a, 0.0)
    if tag == "tanh":
        return np.tanh(a)
    if tag == "sigmoid":
        return _sigmoid(a)
    return a


def _activation_grad(tag, a, h, g):
    """Pull ``g`` back through the activation (pre-activation ``a``, output ``h``)."""
    if tag == "relu":
        return g * (a > 0)
    if tag == "tanh":
        return g * (1.0 - h * h)
    if tag == "sigmoid":
        return g * h * (1.0 - h)
    return g


@dataclass(frozen=True)
class MlpParams:
    """Weights ``(out, in)`` and biases ``(out,)`` per layer, plus activation tags."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    activations: tuple[str, ...]

    def __post_init__(self):
        ws = tuple(np.asarray(w, dtype=np.float64) for w in self.weights)
        bs = tuple(np.asarray(b, dtype=np.float64) for b in self.biases)
        acts = tuple(self.activations)
        if not (len(ws) == len(bs) == len(acts)) or not ws:
            raise DimensionError("weights, biases and activations must have equal nonzero length")
        for k, (w, b, act) in enumerate(zip(ws, bs, acts)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise DimensionError(f"layer {k}: weight {w.shape} and bias {b.shape} do not match")
            if k and w.shape[1] != ws[k - 1].shape[0]:
                raise DimensionError(f"layer {k} input {w.shape[1]} != layer {k - 1} output {ws[k - 1].shape[0]}")
            if act not in ACTIVATIONS:
                raise ConfigurationError(f"unknown activation {act!r}")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)
        object.__setattr__(self, "activations", acts)

    @property
    def dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def arrays(self) -> list[np.ndarray]:
        """Parameter arrays in canonical order W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray], activations) -> "MlpParams":
        return cls(tuple(arrays[0::2]), tuple(arrays[1::2]), tuple(activations))

    def map(self, fn) -> "MlpParams":
        return MlpParams.from_arrays([fn(a) for a in self.arrays()], self.activations)

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def with_flat(self, vec: np.ndarray) -> "MlpParams":
        out, i = [], 0
        for a in self.arrays():
            out.append(np.asarray(vec[i : i + a.size], dtype=np.float64).reshape(a.shape))
            i += a.size
        return MlpParams.from_arrays(out, self.activations)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(a))) for a in self.arrays())


@dataclass(frozen=True)
class GradBundle:
    """Parameter gradients shaped like an :class:`MlpParams`, plus the input gradient."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    input_grad: np.ndarray | None = None

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def scaled(self, a: float) -> "GradBundle":
        ig = None if self.input_grad is None else a * self.input_grad
        return GradBundle(tuple(a * w for w in self.weights), tuple(a * b for b in self.biases), ig)


@dataclass
class Tape:
    params: MlpParams
    inputs: list[np.ndarray] = field(default_factory=list)
    preacts: list[np.ndarray] = field(default_factory=list)
    outputs: list[np.ndarray] = field(default_factory=list)
    batched: bool = False


def init_params(layer_dims: Sequence[int], activations: Sequence[str], seed) -> MlpParams:
    """Uniform weights in ``+-1/sqrt(in_dim)``, zero biases."""
    layer_dims = [int(d) for d in layer_dims]
    if len(layer_dims) < 2:
        raise ConfigurationError("need at least an input and an output dimension")
    if len(activations) != len(layer_dims) - 1:
        raise ConfigurationError("need exactly one activation per layer")
    if any(d < 1 for d in layer_dims):
        raise ConfigurationError("layer dimensions must be positive")
    rng = as_generator(seed)
    ws, bs = [], []
    for d_in, d_out in zip(layer_dims[:-1], layer_dims[1:]):
        lim = 1.0 / np.sqrt(d_in)
        ws.append(rng.uniform(-lim, lim, size=(d_out, d_in)))
        bs.append(np.zeros(d_out))
    return MlpParams(tuple(ws), tuple(bs), tuple(activations))


def forward(p: MlpParams, x) -> tuple[np.ndarray, Tape]:
    x = np.asarray(x, dtype=np.float64)
    batched = x.ndim == 2
    h = x if batched else x[None, :]
    if h.ndim != 2 or h.shape[1] != p.weights[0].shape[1]:
        raise DimensionError(f"input of shape {x.shape} does not match input dim {p.weights[0].shape[1]}")
    tape = Tape(p, batched=batched)
    for w, b, act in zip(p.weights, p.biases, p.activations):
        tape.inputs.append(h)
        a = h @ w.T + b
        h = _activate(act, a)
        tape.preacts.append(a)
        tape.outputs.append(h)
    return (h if batched else h[0]), tape


def backward(p: MlpParams, tape: Tape, output_grad) -> GradBundle:
    if tape.params is not p:
        raise UsageError("tape was recorded with different parameters")
    g = np.asarray(output_grad, dtype=np.float64)
    if not tape.batched:
        g = g[None, :]
    if g.shape != tape.outputs[-1].shape:
        raise DimensionError(f"output gradient {g.shape} does not match output {tape.outputs[-1].shape}")
    n = len(p.weights)
    dws, dbs = [None] * n, [None] * n
    for k in reversed(range(n)):
        da = _activation_grad(p.activations[k], tape.preacts[k], tape.outputs[k], g)
        dws[k] = da.T @ tape.inputs[k]
        dbs[k] = da.sum(axis=0)
        g = da @ p.weights[k]
    return GradBundle(tuple(dws), tuple(dbs), g if tape.batched else g[0])


def zero_grads(p: MlpParams) -> GradBundle:
    return GradBundle(tuple(np.zeros_like(w) for w in p.weights), tuple(np.zeros_like(b) for b in p.biases))


@dataclass(frozen=True)
class OptimizerState:
    """RMSProp accumulators (squared-gradient moving averages) and settings."""

    accumulators: tuple[np.ndarray, ...]
    lr: float = 5e-4
    decay: float = 0.9
    eps: float = 1e-8


def init_optimizer(p: MlpParams, lr=5e-4, decay=0.9, eps=1e-8) -> OptimizerState:
    if lr < 0 or not 0 <= decay < 1 or eps <= 0:
        raise ConfigurationError("need lr >= 0, 0 <= decay < 1, eps > 0")
    return OptimizerState(tuple(np.zeros_like(a) for a in p.arrays()), float(lr), float(decay), float(eps))


def optimizer_step(p: MlpParams, g: GradBundle, s: OptimizerState) -> tuple[MlpParams, OptimizerState]:
    grads = g.arrays()
    params = p.arrays()
    if len(grads) != len(params) or len(s.accumulators) != len(params):
        raise DimensionError("gradient, optimizer state and parameters are not congruent")
    for gi, pi in zip(grads, params):
        if gi.shape != pi.shape:
            raise DimensionError(f"gradient shape {gi.shape} != parameter shape {pi.shape}")
        if not np.all(np.isfinite(gi)):
            raise TrainingError("non-finite gradient; optimizer step refused")
    new_p, new_acc = [], []
    for pi, gi, acc in zip(params, grads, s.accumulators):
        acc = s.decay * acc + (1.0 - s.decay) * gi * gi
        new_p.append(pi - s.lr * gi / (np.sqrt(acc) + s.eps))
        new_acc.append(acc)
    return (
        MlpParams.from_arrays(new_p, p.activations),
        OptimizerState(tuple(new_acc), s.lr, s.decay, s.eps),
    )


def clip_weights(p: MlpParams, c: float) -> MlpParams:
    if not c > 0:
        raise ConfigurationError("clip constant must be positive")
    return p.map(lambda a: np.clip(a, -c, c))


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    passed: bool
    rel_errors: np.ndarray
    analytic: np.ndarray
    numeric: np.ndarray

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}: max relative error {self.max_rel_error:.3e} over {self.rel_errors.size} parameters"


def relative_error(analytic, numeric, floor=1e-5):
    """``|a - n| / max(|a|, |n|, floor)``; the floor keeps near-zero entries from dominating."""
    a = np.asarray(analytic)
    n = np.asarray(numeric)
    return np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)


def grad_check(
    loss_fn: Callable[[MlpParams], tuple[float, GradBundle]],
    p: MlpParams,
    step: float = 1e-6,
    tol: float = 1e-4,
    floor: float = 1e-5,
) -> GradCheckReport:
    """Compare ``loss_fn``'s analytic gradient with central differences.

    ``loss_fn(p)`` returns ``(value, GradBundle)``; only the value is used for
    the finite differences.
    """
    _, grads = loss_fn(p)
    analytic = grads.flat()
    base = p.flat()
    numeric = np.empty_like(base)
    for i in range(base.size):
        v = base.copy()
        v[i] = base[i] + step
        up = loss_fn(p.with_flat(v))[0]
        v[i] = base[i] - step
        down = loss_fn(p.with_flat(v))[0]
        numeric[i] = (up - down) / (2 * step)
    rel = relative_error(analytic, numeric, floor)
    worst = float(rel.max()) if rel.size else 0.0
    return GradCheckReport(worst, worst < tol, rel, analytic, numeric)
