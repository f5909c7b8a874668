"""Erasure coding, repair-bandwidth accounting and failure simulation for
clustered storage: two constructions that repair with zero cross-cluster
traffic, one that repairs at the minimum cross-traffic ratio 1/(n-k), the
exact-rational parameter calculus behind both operating points, and a
deterministic simulator with a CLI front end."""

from . import blob, cli, errors, gf, lrc, msr, params, sim
from .gf import GF, Matrix, all_square_submatrices_invertible, cauchy_matrix
from .lrc import NodeContent, build_rs_code, build_xor_code, decode_any_k
from .msr import MsrHalfCode, RepairPlan
from .params import (
    MsrPoint,
    SystemConfig,
    derivation_check,
    min_storage_regime,
    msr_point_inv,
    msr_point_zero,
    quot_rem,
)
from .sim import Scenario, SimReport, run_scenario

__version__ = "0.1.0"

__all__ = [
    "GF",
    "Matrix",
    "MsrHalfCode",
    "MsrPoint",
    "NodeContent",
    "RepairPlan",
    "Scenario",
    "SimReport",
    "SystemConfig",
    "all_square_submatrices_invertible",
    "blob",
    "build_rs_code",
    "build_xor_code",
    "cauchy_matrix",
    "cli",
    "decode_any_k",
    "derivation_check",
    "errors",
    "gf",
    "lrc",
    "min_storage_regime",
    "msr",
    "msr_point_inv",
    "msr_point_zero",
    "params",
    "quot_rem",
    "run_scenario",
    "sim",
    "__version__",
]
