"""Circular-shift linear network coding over GF(p) and Vandermonde circulant MDS array codes."""

from .arraycode import (
    ArrayCode,
    decode,
    encode,
    is_mds,
    make_eq42,
    make_evenodd,
    make_evenodd_like,
    make_gen_evenodd,
    make_gen_rdp,
    make_rdp,
    make_rdp_like,
    make_xi_6_3,
    max_k_bound,
)
from .field import ExtField, build_ext_field, field_for, mult_order
from .kernels import IndexSetJ, KernelSpec, build_from_U, build_standard, canonical_J, verify_spec
from .netcode import CirculantCode, Multicast, combination_network, induce, is_solution_rate_JL
from .ringmat import PolyMatrix, RingPoly, poly_adjugate, poly_det
from .sched import encode_evenodd_like_scheduled, encode_rdp_like_scheduled, naive_encode, predicted_xor_per_bit

__version__ = "0.1.0"
