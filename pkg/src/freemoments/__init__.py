"""Symmetrized phase-space moments of free quantum particles and classical ensembles."""

__version__ = "0.1.0"

from .errors import (BoundaryOverflowError, ConvergenceError, DegenerateEnsembleError,
                     DegenerateTopMomentError, InvalidInputError, MomentError,
                     ResolutionError)
from .moments import (CentroidState, InvariantSet, MomentVector, centroid_evolve,
                      derivative, invariants, moments_from_invariants, propagate,
                      reference_time, second_order_waist)
from .cubic import cubic_real_roots
from .geometry import (CriticalPoint, GeometryReport, classify, classify_fourth,
                       classify_third, real_initial_fourth, special_case_topzero)
from .grid import (GridWavefunction, ShapeMetrics, free_propagate, measure_moments,
                   shape_metrics, symmetrized_moment)
from .wigner import WignerGrid, wigner_moment, wigner_moment_vector, wigner_transform
from .families import (make_family, make_gaussian, make_power_exponential,
                       make_skew_gaussian, make_truncated_power_exponential)
from .ensemble import (ParticleEnsemble, classical_omega4, drift, ensemble_moment,
                       ensemble_moments)
from .inequalities import (InequalityReport, check_even_product, check_heisenberg,
                           check_kurtosis_skewness, check_omega4_bound, check_schrodinger)
