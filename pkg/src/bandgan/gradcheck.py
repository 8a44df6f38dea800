"""Finite-difference checks of every training loss on tiny networks."""

from __future__ import annotations

import numpy as np

from . import gan, nn
from .seeding import as_generator
from .spectrum import NotchMask


def _problem(n: int, seed, hidden: int = 6, critic_hidden: int = 4):
    rng = as_generator(seed)
    gen = nn.init_params([2 * n, hidden, 2 * n], ["relu", "identity"], rng)
    # larger biases keep ReLU pre-activations away from their kink
    gen = nn.MlpParams(gen.weights, tuple(rng.uniform(-0.5, 0.5, b.shape) for b in gen.biases), gen.activations)
    critics = {}
    for mode, out_act in (("wgan", "identity"), ("standard_gan", "sigmoid")):
        c = nn.init_params([2 * n, critic_hidden, 1], ["relu", out_act], rng)
        critics[mode] = nn.MlpParams(c.weights, tuple(rng.uniform(-0.5, 0.5, b.shape) for b in c.biases), c.activations)
    batch = 3
    x = rng.normal(size=(batch, n)) + 1j * rng.normal(size=(batch, n))
    bits = rng.integers(0, 2, size=(batch, n))
    bits[:, 0] = 1
    masks = [NotchMask(b) for b in bits]
    z = np.fft.ifft(np.fft.fft(x, norm="ortho") * bits, norm="ortho")
    return gen, critics, x, z, masks


def oracle_suite(n: int = 4, seed=0, step: float = 1e-6, tol: float = 1e-4) -> list[tuple[str, nn.GradCheckReport]]:
    """Run the checks and return ``(name, report)`` pairs.

    Generator [2n, 6, 2n] and critic [2n, 4, 1] nets; at ``n = 4`` both stay
    under 200 parameters.
    """
    gen, critics, x, z, masks = _problem(n, seed)
    fx = np.fft.fft(x, norm="ortho")
    m = np.stack([mk.as_float() for mk in masks])
    zero_mask = np.zeros_like(m)
    results = []

    def gen_loss(lam, mode, mask, weight=1.0):
        def fn(p):
            total, _, _, grads, _ = gan.generator_batch(p, critics[mode], z, fx, mask, lam, mode)
            return weight * total, grads.scaled(weight)
        return fn

    results.append(("content loss", nn.grad_check(gen_loss(0.0, "wgan", m), gen, step, tol)))
    # an all-zero mask silences the content term, leaving lam * adversarial
    results.append(("adversarial loss (wgan)", nn.grad_check(gen_loss(1.0, "wgan", zero_mask), gen, step, tol)))
    results.append(("adversarial loss (standard)", nn.grad_check(gen_loss(1.0, "standard_gan", zero_mask), gen, step, tol)))
    results.append(("generator loss (wgan, lambda=0.5)", nn.grad_check(gen_loss(0.5, "wgan", m), gen, step, tol)))
    results.append(("generator loss (standard, lambda=0.5)", nn.grad_check(gen_loss(0.5, "standard_gan", m), gen, step, tol)))

    fake = gan.recover_batch(gen, z)
    for mode in ("wgan", "standard_gan"):
        def disc_loss(p, mode=mode):
            loss, grads, _ = gan.discriminator_batch(p, x, fake, mode)
            return loss, grads
        results.append((f"discriminator loss ({mode})", nn.grad_check(disc_loss, critics[mode], step, tol)))
    return results
