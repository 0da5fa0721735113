"""Simultaneous over-the-air computation and communication toolkit.

Zero-sum plane maps, wrapped digital MAC codes, the hybrid analog/digital
scheme, channel models, rate bounds and reproducible Monte Carlo sweeps.
"""
from .bounds import (achievable_sumrate, approx_convert, constrained_region_outer,
                     gaussian_capacity, inner_bound_membership, nomographic_tail,
                     outer_bound_sumrate, socc_mse, timeshare_mse, trivial_converse)
from .capacity import ba_constrained_capacity, constrained_region_inner
from .channel import (GaussianNoise, MiddletonClassA, fading_mac_output, mac_output,
                      middleton_sample, substream)
from .codes import (BlockPartition, LdpcCode, LdpcQamCode, MacCode, WrappedCode, ZeroSumEncoder,
                    beta_prime, make_partition, qam_demodulate_llr, qam_modulate, unwrap_receive,
                    wrap_encode)
from .scheme import (AnalogBlockEncoder, InvariantViolation, NomographicFunction, SoccConfig,
                     analog_decode, analog_encode, fading_transmit_transform,
                     nomographic_postprocess, nomographic_preprocess, p_norm_function,
                     socc_round, sum_function, weighted_sum_function)
from .zerosum import PlaneMap, adjoint, build_planemap, forward, max_row_abs_sum

__version__ = "0.1.0"
