"""Synchronization certificates for nonlinearly coupled Chua oscillator networks."""
from .certificate import (Certificate, assess, best_pivot, build_m, certify, min_linear_gain,
                          routh_hurwitz_2x2, two_node_threshold)
from .coupling import (SectorCoupling, check_pair_bound, from_spec, make_linear,
                       make_linear_plus_arctan, make_saturated, verify_sector)
from .model import EXAMPLE1, EXAMPLE2, ChuaParams, chua_nonlinearity, mu0
from .simulate import error_series, fit_decay_rate, initial_states, simulate_network
from .spectral import eigenvalues, spectral_abscissa
from .topology import Topology

__version__ = "0.1.0"
