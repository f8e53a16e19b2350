"""Exact invariants of free-group automorphisms and marked metric graphs:
Lipschitz distortion on Outer space, generic stretching factors via
non-backtracking random walks, geodesic-current weights, volume entropy,
and growth asymptotics of stretching factors under iteration.
"""

__version__ = "0.1.0"

from .words import (  # noqa: F401
    CyclicWord,
    InputError,
    Word,
    cyclic_length,
    cyclic_reduce,
    occurrences,
    parse_word,
)
from .automorphisms import (  # noqa: F401
    Automorphism,
    CompositionCapError,
    NotABasis,
    certify_basis,
    compose_automorphisms,
    identity,
    parse_endomorphism,
    phi_family,
    random_automorphism,
)
from .marked_graphs import (  # noqa: F401
    Edge,
    MarkedGraph,
    act,
    load_graph,
    rose,
    save_graph,
    standard_rose,
    translation_length,
    unit_rose,
)
from .lipschitz import (  # noqa: F401
    candidates,
    extremal_stretch,
    lambda_distortion,
    lipschitz_distance,
)
from .currents import (  # noqa: F401
    counting_current,
    intersection_form,
    j_current,
    j_current_weight,
    uniform_current,
    volume_entropy,
    weight_table,
)
from .stretch import (  # noqa: F401
    DriftWindowError,
    exact_generic_stretch,
    mc_generic_stretch,
    symmetrized_I,
)
from .asymptotics import (  # noqa: F401
    GrowthFit,
    algebraic_stretch_estimate,
    growth_fit,
    power_stretch_sequence,
)
