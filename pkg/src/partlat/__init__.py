"""Generating sets of partition lattices: closure, counting, sampling and
explicit four-element generating families."""

__version__ = "0.1.0"

from .errors import CapacityError, DimensionError, IntegrityError
from .core import (
    Partition, FullEquivalence, ProductLattice, ExplicitLattice, bell, choose4,
    kequ, atom, graph_equivalence, join_all, rgs_rank, rgs_unrank,
    enumerate_partitions, encode_canonical, decode_canonical, format_vector, parse_vector,
)
from .closure import ClosureOptions, OrderType, close, closure_size, generates, order_type
from .enumeration import count_generating_quadruples, list_generating_quadruples, verify_all_antichain
from .montecarlo import StamSampler, confidence_interval, estimate_rho
from .zadori import IdQuadruple, ZConfig, build_configuration, gets_through, lower_bound
from .products import PhiFamily, build_phi, product_generators, verify_product_generation
