"""Short polar codes concatenated with binary BCH outer codes.

FEC-assisted parallel SC decoding of multi-codeword frames, Gaussian
approximation analysis, and exhaustive throughput-optimal design search.
"""

__version__ = "0.1.0"

from .analysis import (Scenario, analyze_scheme, fsr_fec_assisted, fsr_lower_bound,
                       fsr_sc_baseline, info_eps, p_x, throughput, throughput_fading)
from .bch import OuterCode, UsageError, bch_codes, bch_construct, bch_correct, bch_encode
from .channel import AwgnSpec, RayleighSpec, discretize_rayleigh, transmit
from .frame import (ConcatenatedScheme, frame_decode_fec_assisted, frame_decode_sc_baseline,
                    frame_encode)
from .galois import ConfigurationError, GaloisField
from .optimize import (DesignResult, SearchOptions, design_constrained_mac, design_constrained_phy,
                       design_fading, design_fixed_polar, design_sc_baseline, design_target_fsr,
                       find_optimal)
from .polar import PolarCode, ga_analyze, polar_construct, polar_encode, sc_decode
from .simulate import SimPlan, SimResult, run_sim, sweep, wilson_interval
