"""Exact computer algebra for the open-string moduli space of the
mirror quintic.

The package derives the modular vector field on the nine-dimensional
moduli space of mirror quintics enhanced with a pair of rational curves
and a mixed-Hodge-adapted frame, verifies its normal form symbolically,
integrates it as an exact Puiseux series in q, and extracts the closed
(rational curve) and open (disk) instanton numbers from the Yukawa
coupling and the disk function.  All arithmetic is exact over Q(sqrt5).
"""

from .numfield import QuadRat, qr_parse, qr_print
from .series import (
    InvariantTable,
    PuiseuxSeries,
    invert_closed_lambert,
    invert_open_lambert,
    series_from_text,
    series_to_text,
)
from .symca import OneFormMatrix, Poly, RatFunc, RFMatrix, VectorField, mat_d
from .gmconn import (
    PFData,
    VectorFieldData,
    build_A,
    build_B1,
    build_B2,
    build_C,
    build_S,
    derive_modular_vector_field,
    disk_function,
    modular_vector_field,
    pf_data,
    verify_normal_form,
    yukawa,
)
from .perioddom import (
    GroupElement,
    TauData,
    check_period_relations,
    tau_normalize,
    tau_shape,
)
from .modsolver import (
    DEFAULT_EPSILON,
    SeedConstants,
    SolutionBundle,
    invariants,
    phi_series,
    potentials,
    seed_constants,
    solve,
    verify_pfih,
)

__version__ = "0.1.0"

__all__ = [
    "QuadRat", "qr_parse", "qr_print",
    "PuiseuxSeries", "InvariantTable", "series_to_text", "series_from_text",
    "invert_closed_lambert", "invert_open_lambert",
    "Poly", "RatFunc", "RFMatrix", "OneFormMatrix", "VectorField", "mat_d",
    "PFData", "VectorFieldData", "pf_data", "build_C", "build_B1", "build_B2",
    "build_S", "build_A", "modular_vector_field", "derive_modular_vector_field",
    "verify_normal_form", "yukawa", "disk_function",
    "GroupElement", "TauData", "tau_shape", "tau_normalize",
    "check_period_relations",
    "SeedConstants", "SolutionBundle", "seed_constants", "solve", "potentials",
    "invariants", "phi_series", "verify_pfih", "DEFAULT_EPSILON",
    "__version__",
]
