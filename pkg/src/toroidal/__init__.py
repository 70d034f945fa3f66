"""Exact computations with toroidal morphism germs.

Log smoothness tests via the logarithmic Jacobian, and monomialization of
log smooth germs (units, torus translation and monomial map), all over Q or
a number field with truncated power series.
"""

from .errors import ToroidalError
from .fields import FieldSpec, Scalar, nth_root
from .intlat import hnf, snf, split_basis
from .logjac import MorphismGerm, augment_to_equal_dim, is_log_smooth, log_jacobian
from .monomialize import (
    certify_counterexample,
    hensel_units,
    lemma3_etale_check,
    monomialize_pipeline,
    verify_diagram,
)
from .scenario import Scenario, parse_scenario, serialize_scenario
from .series import LocalModel, Series, extract_monomial_unit
from .toric import AffineMonoid, ToricPoint, eval_character

__version__ = "0.1.0"

__all__ = [
    "AffineMonoid",
    "FieldSpec",
    "LocalModel",
    "MorphismGerm",
    "Scalar",
    "Scenario",
    "Series",
    "ToricPoint",
    "ToroidalError",
    "augment_to_equal_dim",
    "certify_counterexample",
    "eval_character",
    "extract_monomial_unit",
    "hensel_units",
    "hnf",
    "is_log_smooth",
    "lemma3_etale_check",
    "log_jacobian",
    "monomialize_pipeline",
    "nth_root",
    "parse_scenario",
    "serialize_scenario",
    "snf",
    "split_basis",
    "verify_diagram",
]
