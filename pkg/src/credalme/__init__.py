"""Sequential maximum entropy selection for credal networks."""

from .geometry import (
    InfeasibleError,
    hrep_to_vrep,
    in_convex,
    vertices_box_simplex,
    vrep_to_hrep,
)
from .imap import ImapReport, UndirectedGraph, build_gkb, ci_gap, separates, verify_imap
from .inference import (
    Query,
    UndefinedConditionalError,
    cond_prob,
    credal_bounds,
    dag_violations,
    joint_of_bn,
    local_conditionals,
)
from .model import (
    AtomicEvent,
    CapExceededError,
    Conditional,
    ConditionalSet,
    ConjunctiveEvent,
    Convex,
    ConvexConditional,
    ConvexSpec,
    CredalError,
    CredalNetwork,
    CycleError,
    Halfspace,
    Interval,
    JointTable,
    NetworkFormatError,
    Point,
    Variable,
    enumerate_atomic_events,
    load_network,
    network_kb,
    parse_network,
    render_network,
    topological_order,
    validate,
)
from .sequential import (
    NetworkInvalidError,
    SelectionResult,
    global_me_model,
    select_sequential,
    select_sequential_direct,
)
from .solvers import (
    SolverConfig,
    SolverError,
    entropy,
    linearize,
    maxent_box,
    maxent_hrep,
    maxent_joint,
    maxent_vrep,
)

__version__ = "0.1.0"
