"""Asymptotic unitary representations pulled back from the Voiculescu pair,
their multiplicative defects, and the winding-number obstruction to
perturbing them into genuine representations."""

from .bar_complex import (
    Chain,
    boundary2,
    boundary3,
    coboundary_cocycle,
    cup_cocycle,
    is_cycle,
    kronecker_pair,
    push_forward_chain,
    verify_cocycle,
)
from .datafiles import load_group_data
from .errors import (
    BranchCutError,
    CannotVerifyError,
    GroupDataError,
    HomomorphismError,
    IntegrityError,
    InvalidParameterError,
    RewritingError,
)
from .group_model import GroupData, GroupMorphism, IntHom, Word, check_hom
from .matrix_core import principal_log_unitary, schatten_norm, trace_log_unitary
from .obstruction import THRESHOLD, Certificate, PairingResult, certify_nonstable, recheck_certificate, winding_pair
from .perturb import (
    PerturbationReport,
    SearchProblem,
    TableTarget,
    make_problem,
    oracle_min_distance_scalar,
    run_searches,
    search,
)
from .voiculescu import AsymptoticRep, defect_bound, defect_norm, make_u, make_v, twist_defect

__version__ = "0.1.0"
