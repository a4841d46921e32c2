"""Exact period computations for one-parameter families.

Truncated rational series, theta-form differential operators, Frobenius
bases, mirror maps and Yukawa couplings, high-precision analytic
continuation, and a small toolkit for two-dimensional reflexive polygons.
"""

from .errors import MathError, PeriodEngineError, SchemaError
from .series import (
    LogSolution,
    TruncatedSeries,
    hypergeom_series,
    series_arith,
    series_compose,
    series_elementary,
    series_reverse,
)
from .diffop import (
    INFINITY,
    DerivOperator,
    Substitution,
    ThetaOperator,
    is_symmetric_cube,
    is_symmetric_square,
    normal_form,
    pullback,
    singular_points,
    symmetric_cube,
    symmetric_power,
    symmetric_square,
)
from .frobenius import FrobeniusBasis, frobenius_basis, indicial_roots, normalized_period_series
from .mirror import (
    MirrorMap,
    Prepotential,
    YukawaCoupling,
    integral_scale,
    mirror_map,
    prepotential_from_yukawa,
    special_geometry_potential,
    yukawa_algebraic,
    yukawa_flat,
)
from .continuation import (
    PathPolyline,
    cayley_fixed_point,
    monodromy,
    normalized_period_value,
    taylor_continue,
)
from .toric2d import LatticePolytope2D, anticanonical_sections, lattice_points, polar_dual

__version__ = "0.1.0"
