"""Digital MAC codes and the zero-sum wrapper."""
from .base import LdpcQamCode, MacCode, RandomCodebookCode
from .ldpc import LdpcCode, read_alist, regular_parity_matrix, write_alist
from .qam import (CONSTELLATION, PEAK_COMPONENT, complex_to_real, qam_demodulate_llr,
                  qam_hard_decision, qam_modulate, real_to_complex)
from .wrapping import (BlockPartition, WrappedCode, ZeroSumEncoder, beta_prime, make_partition,
                       partition_for_base_length, unwrap, unwrap_receive, wrap, wrap_encode)
