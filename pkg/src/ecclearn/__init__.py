"""Learning error-correction-code constructions via a constructor-evaluator loop."""

__version__ = "0.1.0"

from .channel import ChannelSpec, derive_seed, esn0_to_sigma, modulate_bpsk, transmit_awgn
from .evaluate import BlerEstimate, DecoderSpec, EvalBudget, estimate_bler, fitness_product, required_esn0, reward
from .genetic import GeneticConfig, run_genetic
from .linear import LinearCode, ebch_generator, osd_decode, rm_generator
from .polar import PolarCode, polar_encode, sc_decode, scl_decode
from .rl import A2cConfig, PgConfig, run_a2c, run_pg

__all__ = [
    "ChannelSpec", "derive_seed", "esn0_to_sigma", "modulate_bpsk", "transmit_awgn",
    "BlerEstimate", "DecoderSpec", "EvalBudget", "estimate_bler", "fitness_product",
    "required_esn0", "reward", "GeneticConfig", "run_genetic", "LinearCode",
    "ebch_generator", "osd_decode", "rm_generator", "PolarCode", "polar_encode",
    "sc_decode", "scl_decode", "A2cConfig", "PgConfig", "run_a2c", "run_pg",
    "__version__",
]
