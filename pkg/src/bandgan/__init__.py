"""Recovery of spectrally notched radar range profiles with a small adversarial network."""

from .evaluation import EvalReport, downrange_profile_db, recovery_gain, rms, snr_db
from .gan import TrainConfig, TrainerState, TrainingPair, create_trainer, recover, train, train_epoch
from .signal import BandParams, Domain, PointTarget, RawSignal, Scene, dft_forward, dft_inverse, render_raw, synth_scene
from .spectrum import NotchMask, apply_mask, embed_mask, gen_notch_mask, missing_fraction, zerofill_baseline

__version__ = "0.1.0"
