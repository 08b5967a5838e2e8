"""Exact computations for five-dimensional almost contact metric structures.

Structure constants of an invariant coframe are stored with rational
coefficients; connections, curvature, torsion and the Clifford action on
spinors are derived from them.
"""

__version__ = "0.1.0"

from .forms import Form, hodge, interior, wedge  # noqa: E402
from .coframe import (ModelParams, StructureDefinition, make_builtin,  # noqa: E402
                      validate_structure)
from .contact import classify, lee_form, nijenhuis, torsion_form  # noqa: E402
from .curvature import curvature, levi_civita_forms, torsion_connection_forms  # noqa: E402
from .spinors import (KillingProblem, killing_equation_solve, parallel_spinors,  # noqa: E402
                      special_conformal, theorem_suite)

__all__ = [
    "Form", "hodge", "interior", "wedge",
    "ModelParams", "StructureDefinition", "make_builtin", "validate_structure",
    "classify", "lee_form", "nijenhuis", "torsion_form",
    "curvature", "levi_civita_forms", "torsion_connection_forms",
    "KillingProblem", "killing_equation_solve", "parallel_spinors", "special_conformal",
    "theorem_suite",
]
