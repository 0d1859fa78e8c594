"""Optimal transmission switching with exact linear connectedness constraints."""

from .constraints import (
    VARIANTS,
    BigMPolicy,
    add_connectedness,
    add_contingency_connectedness,
    add_n_minus_1,
    add_necessary_connectedness,
    assemble,
    build_base_ots,
    make_uniquely_balanced_c,
)
from .fixtures import FIXTURES, make_fixture
from .graph import (
    BalanceClass,
    BalanceKind,
    Multigraph,
    NisCatalog,
    classify_balance,
    connected_components,
    edge_induced,
    enumerate_connected_nis,
    is_unbalanced_nis,
    laplacian,
    oriented_incidence,
    potential_feasible,
)
from .grid import (
    Branch,
    Bus,
    CaseError,
    ContingencySet,
    Network,
    SwitchConfig,
    default_contingencies,
    load_case,
    sample_switchable,
    save_case,
)
from .model import MilpModel
from .reduction import (
    ReductionPlan,
    UnbalancedNisSet,
    contract,
    equivalence_check,
    find_unbalanced_nis,
    reduced_connectedness,
)
from .solver import Solution, SolverOptions, check_solution, export_lp, solve

__version__ = "0.1.0"
