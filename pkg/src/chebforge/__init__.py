"""Chebyshev series of inverse polynomials and relative-error polynomial fits."""

from .catalog import CatalogEntry, catalog, catalog_entry, catalog_names
from .core import (
    Basis,
    ChebSeries,
    MonomialPoly,
    cheb_eval,
    chebyshev_points,
    differentiate,
    divide_by_x,
    from_monomial,
    integrate,
    product,
    tail_bound,
    to_monomial,
)
from .errors import *  # noqa: F401,F403
from .partial_fractions import (
    PartialFractionTerm,
    PFDecomposition,
    a_n1,
    a_ns_table,
    decompose,
    expand_inverse,
    expand_inverse_shifted,
    moment,
    principal_w,
    sensitivity,
)
from .recurrence import DivisionState, divide_Tn_oracle, division_step, extend, iterate_states
from .relerr import (
    FitConfig,
    FitResult,
    equilibrate,
    jacobian,
    locate_extrema,
    newton_fit,
    relative_error_curve,
)
from .special import (
    alpha_table,
    appendixE_identities,
    bessel_i,
    bessel_j,
    digamma_K,
    elliptic_G,
    elliptic_KE,
)
from .truncation import BandedSystem, build_matrix, divide, reciprocal, reciprocal_via_power_series

__version__ = "0.1.0"
