"""Behavioral distances for finite coalgebras via Kantorovich and
Wasserstein functor liftings, with exact rational arithmetic."""

from .coalgebra import (
    MetricTS,
    ProbTS,
    System,
    from_metric_ts,
    from_prob_ts,
    load_lift_instance,
    load_system,
    serialize,
)
from .fixpoint import (
    DistanceMatrix,
    IterationOptions,
    behavioral_distances,
    bisimilarity_partition,
    kernel_partition,
)
from .functors import (
    Coproduct,
    Const,
    DiagSquare,
    Dist,
    Distribution,
    FinPow,
    Id,
    MaxEval,
    PNormEval,
    Product,
    PseudometricTable,
    Tagged,
)
from .lifting import (
    KANTOROVICH,
    WASSERSTEIN,
    LiftingEngine,
    check_well_behaved,
    duality_gap,
    lift_dist,
)
from .values import INF, NumericMode, TopBound, Value

__all__ = [
    "Coproduct", "Const", "DiagSquare", "Dist", "Distribution", "FinPow",
    "Id", "MaxEval", "PNormEval", "Product", "PseudometricTable", "Tagged",
    "System", "ProbTS", "MetricTS", "from_prob_ts", "from_metric_ts",
    "load_system", "load_lift_instance", "serialize",
    "DistanceMatrix", "IterationOptions", "behavioral_distances",
    "bisimilarity_partition", "kernel_partition",
    "KANTOROVICH", "WASSERSTEIN", "LiftingEngine", "check_well_behaved",
    "duality_gap", "lift_dist",
    "INF", "NumericMode", "TopBound", "Value",
]

__version__ = "1.0.0"
