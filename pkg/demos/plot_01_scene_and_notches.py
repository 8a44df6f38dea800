"""
Synthetic scenes and spectral notches
=====================================

A scene is a handful of point reflectors. Rendering it gives the complex
raw signal that a stepped-frequency radar would record, one sample per
frequency step after an inverse DFT. Notching removes random groups of
adjacent frequency bins; what is left is the corrupted input the generator
has to repair.
"""

import numpy as np

from bandgan import BandParams, apply_mask, embed_mask, gen_notch_mask, missing_fraction, render_raw, synth_scene
from bandgan.evaluation import downrange_profile_db, snr_db

# 256 samples, with the 380 MHz - 2.08 GHz band spread over all of them
n = 256
band = BandParams(380e6, 2.08e9, 1.7e9 / n)
scene = synth_scene(n_targets=3, n_samples=n, band=band, seed=1)
for t in scene.targets:
    print(f"target at range bin {t.position:7.2f}, amplitude {t.amplitude:.3f}")

x = render_raw(scene)
print("peak bins of the down-range profile:", np.sort(np.argsort(np.abs(x.samples))[-3:]))

# Remove 90% of the band in notches ten bins wide.
mask = gen_notch_mask(n_bins=band.n_band_bins, band_width_bins=10, target_missing_fraction=0.9, seed=1)
print(f"missing fraction {missing_fraction(mask):.3f} in {band.n_band_bins} bins")
mask = embed_mask(mask, n)
z = apply_mask(x, mask)

# The notched signal keeps only a tenth of the spectrum, so it is a poor
# copy of the original.
print(f"SNR of the notched signal: {snr_db(x, z):.2f} dB")

# Notching smears each reflector across range: the strongest bins of the
# notched profile no longer line up with the targets.
for name, sig in (("original", x), ("notched", z)):
    prof = downrange_profile_db(sig)
    top = np.argsort(prof)[-3:]
    print(f"{name:8s} strongest bins {np.sort(top)}, median level {np.median(prof):6.1f} dB")
