"""Exact lattice counting and p-body volumes for monomial and toric models."""

from .cones import RationalCone, TruncatingHalfspace, cone_from_generators, is_pointed_with_witness, truncated_cone_volume
from .lab import auto_halfspace, growth_bound_check, hk_sequence, length_sequence, vol_mult_check
from .lattice import Ordering, WeightVector, a_compare, enumerate_box
from .pbody import PBody, count_scaled, delta_q_membership, fujita_check, limit_check, pbody_truncated_volume
from .reports import ConvergenceReport
from .semigroups import (
    NotStandard,
    PSystem,
    SemigroupIdeal,
    StandardSemigroup,
    ideal_membership,
    make_standard_semigroup,
    minimalize,
    semigroup_membership,
    validate_p_system,
)
from .toric import (
    MonomialIdeal,
    NotMPrimary,
    PFamily,
    ToricRing,
    cartier_contraction,
    colength,
    e_hk,
    find_c,
    frobenius_power,
    make_family,
    ordinary_power,
)

__version__ = "0.1.0"
