"""Maximal reachability submodules of linear systems over polynomial rings."""

from .field_oracle import Subspace, rstar_classical, vstar_isa
from .freemod import (
    ModuleElement,
    PolyMatrix,
    Submodule,
    buchberger,
    intersect,
    is_member,
    kernel_of_matrix,
    module_equal,
    preimage,
)
from .geocontrol import (
    StateSubmodule,
    SystemPair,
    curly_M,
    max_reachability_iterative,
    max_reachability_kernel,
    pencil_kernel,
    reachable_module,
    verify_reachability_certificate,
)
from .groebner import CANONICAL_ORDER, ModuleOrder, ResourceExhaustedError, work_budget
from .polyring import Polynomial, Ring

__all__ = [
    "CANONICAL_ORDER",
    "ModuleElement",
    "ModuleOrder",
    "PolyMatrix",
    "Polynomial",
    "ResourceExhaustedError",
    "Ring",
    "StateSubmodule",
    "Submodule",
    "Subspace",
    "SystemPair",
    "buchberger",
    "curly_M",
    "intersect",
    "is_member",
    "kernel_of_matrix",
    "max_reachability_iterative",
    "max_reachability_kernel",
    "module_equal",
    "pencil_kernel",
    "preimage",
    "reachable_module",
    "rstar_classical",
    "verify_reachability_certificate",
    "vstar_isa",
    "work_budget",
]
