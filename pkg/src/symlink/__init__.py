"""Symbolic linking numbers of invariant measures on Markov-partitioned flows.

The package splits into a model layer (transition data of the partition),
word combinatorics and orders, exact-rational measure calculus, the linking
machinery, discrete-time thermodynamic formalism, and the cross-section /
boundary decision procedures with verifiable certificates.
"""

from .errors import (
    ModelParseError,
    ModelValidationError,
    PreconditionError,
    SymlinkError,
)
from .model import MarkovModel, load_model, serialize, validate
from .words import (
    Axis,
    BiWord,
    CyclicWord,
    Ordering,
    canonical,
    compare,
    concat,
    periodic,
    primitive_decompose,
    realization_degree,
    shift_word,
)
from .measures import (
    SignedMeasure,
    cohomologous_shift,
    edge_flow,
    homology_class,
    make_measure,
    orbit_measure,
    reduce,
    reduce_all,
)
from .linking import (
    BaseLinkTable,
    LinkValue,
    PrimeOrbit,
    enumerate_prime_orbits,
    link_full,
    linking_function,
    linking_pairing,
    return_word,
)
from .gibbs import (
    MarkovMeasure,
    Potential,
    PressureReport,
    equilibrium_state,
    escape_bound_check,
    is_homologically_full,
    null_class_potential,
    pressure,
)
from .sections import (
    Boundary1Cycle,
    EdgeWeighting,
    MinLinkResult,
    ObstructionCertificate,
    PotentialCertificate,
    birkhoff_boundary_verdict,
    cross_section,
    fried_boundary,
    max_mean_cycle,
    min_link,
    separating_functional,
)

__version__ = "0.1.0"
