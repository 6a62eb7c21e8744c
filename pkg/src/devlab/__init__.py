"""Numerical laboratory for renormalization of parabolic flows.

Rauzy-Veech-Zorich induction of interval exchange transformations, the
Lyapunov spectrum of its cocycle, and measured deviations of ergodic sums,
with circle rotations and the Heisenberg nilflow as homogeneous baselines.
"""
from .deviation import (DeviationFit, DeviationSeries, Observable, compare_spectrum, fit_exponent,
                        geometric_schedule, homology_deviation, observable_sum)
from .errors import (ConfigError, DegenerateSeries, DevlabError, InconsistentSignature,
                     KeaneViolation, NonRecurrent, NonZeroMean, RationalAlpha, RejectNonPositive,
                     RejectReducible)
from .homogeneous import (ContinuedFraction, SkewOrbitState, continued_fraction, denjoy_koksma_check,
                          heisenberg_sum, rotation_sum)
from .iet import (IntervalExchange, Itinerary, LabeledPermutation, apply, asymptotic_cycle,
                  itinerary, new_iet, random_iet)
from .lyapunov import (CocycleAccumulator, SpectrumReport, estimate_spectrum, full_spectrum_structure,
                       merge_reports, predict_deviation_exponents, sobolev_order_report)
from .rauzy import RenormStep, StratumSignature, omega_matrix, rauzy_step, stratum, zorich_step

__version__ = "0.1.0"
