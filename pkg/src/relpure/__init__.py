"""Relative purity for modules over Z and Z/m.

Exact integer linear algebra (Smith forms) underlies finitely presented
modules, four interchangeable purity tests, pure-injective preenvelopes and
envelopes, and relative Ext computed from both sides.
"""

__version__ = "0.1.0"

from .linalg import IntMatrix, RingSpec, ZZ, smith_normal_form, solve_linear, kernel_basis  # noqa: E402
from .modules import (  # noqa: E402
    FPModule,
    ModuleMap,
    HomModule,
    canonicalize,
    direct_sum,
    hom_module,
    tensor,
    auslander_transpose,
    submodule,
    quotient,
)
from .purity import ShortExactSequence, make_ses, is_s_pure, purity_cross_check, verify_certificate  # noqa: E402
from .classes import ModuleClass, generate_class, transpose_class, purity_equivalent  # noqa: E402
from .duality import pontryagin_dual, dual_map, is_s_pure_flat  # noqa: E402
from .envelopes import preenvelope, is_s_pure_injective, is_pure_essential, envelope, verify_envelope  # noqa: E402
from .relhom import precover, resolve, coresolve, rel_ext, pure_dims  # noqa: E402

__all__ = [
    "IntMatrix", "RingSpec", "ZZ", "smith_normal_form", "solve_linear", "kernel_basis",
    "FPModule", "ModuleMap", "HomModule", "canonicalize", "direct_sum", "hom_module", "tensor",
    "auslander_transpose", "submodule", "quotient",
    "ShortExactSequence", "make_ses", "is_s_pure", "purity_cross_check", "verify_certificate",
    "ModuleClass", "generate_class", "transpose_class", "purity_equivalent",
    "pontryagin_dual", "dual_map", "is_s_pure_flat",
    "preenvelope", "is_s_pure_injective", "is_pure_essential", "envelope", "verify_envelope",
    "precover", "resolve", "coresolve", "rel_ext", "pure_dims",
]
