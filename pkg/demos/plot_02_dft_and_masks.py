"""
The unitary DFT and what a mask does
====================================

All transforms are unitary, so energy is the same in both domains and
``dft_inverse(dft_forward(x))`` returns ``x``. Applying a mask is a product
in the frequency domain: available bins are kept, notched bins become zero.
"""

import numpy as np

from bandgan import NotchMask, RawSignal, apply_mask, dft_forward, dft_inverse

rng = np.random.default_rng(0)
x = RawSignal(rng.normal(size=8) + 1j * rng.normal(size=8))

fx = dft_forward(x)
print("energy in time     :", np.sum(np.abs(x.samples) ** 2))
print("energy in frequency:", np.sum(np.abs(fx.samples) ** 2))
print("round trip error   :", np.max(np.abs(dft_inverse(fx).samples - x.samples)))

# bins 2..4 are notched
mask = NotchMask(np.array([1, 1, 0, 0, 0, 1, 1, 1]))
z = apply_mask(x, mask)
fz = dft_forward(z).samples
print("notched bins after masking:", np.abs(fz[2:5]))
print("kept bins unchanged       :", np.allclose(fz[mask.bits == 1], fx.samples[mask.bits == 1]))

# Masking twice changes nothing.
print("idempotent:", np.allclose(apply_mask(z, mask).samples, z.samples))
