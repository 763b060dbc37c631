"""Sequential Born-rule simulation of generalized quantum measurements."""

from .born_standard import OrthonormalBasisMeasurement, born_distribution, collapse_projective
from .estimators import BornMeasurement, ImpreciseMeasurement, SequentialBornMeasurement
from .exceptions import (
    CapacityError,
    ConfigError,
    DimensionMismatchError,
    ImpossibleOutcomeError,
    NotHermitianError,
    NotNormalizedError,
    NotOrthonormalError,
    NullVectorError,
    ResolutionError,
    SeqmeasError,
    UnknownLabelError,
)
from .hilbert import (
    HermitianOperator,
    StateVector,
    evolve_unitary,
    inner_product,
    normalize,
    phase_equal,
    project_affirmative,
    project_null,
    random_state,
)
from .imprecise import (
    ResolutionMatrix,
    imprecise_collapse,
    imprecise_distribution,
    orthogonality_metric,
    reduced_operator,
)
from .oracle import brute_force_oracle
from .scenarios import ChainStage, Scenario, build_example, chain_run, rotate_2d
from .sequential import (
    MeasurementDevice,
    Outcome,
    OutcomeDistribution,
    PathRecord,
    iter_paths,
    marginal_probability,
    measure_exact,
    measure_sampled,
    total_variation,
)

__version__ = "0.1.0"
