"""Nonlocal energies, their small-time limits, and the diagnostics around them."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BVRequestError, ConeOverlapError, ConstructionError, DivergenceError, DomainError, FitError,
    NoCertifyingDeltaError, NonConvergenceError, NonlocError, NormalizationError, PoleError,
    ResolutionError, TabulationError,
)
from .special import (  # noqa: E402
    RegimeLabel, ball_volume, bbm_heat_constant, directional_average_closed, frac_heat_local_constant,
    frac_tail_constant, gamma_fn, regime, sphere_area,
)
from .kernels import (  # noqa: E402
    KernelFamily, Profile, make_anisotropic_box, make_annulus_escape, make_blowup_ball,
    make_frac_heat, make_frac_heat_derived, make_fractional_bbm, make_heat, make_heat_derived,
    make_rescaled, make_weight,
)
from .grid import AnalyticFunction, GridFunction, ball_indicator, box_indicator, gaussian, sample, tent  # noqa: E402
from .energy import EnergySample, bbm_energy, local_energy_weighted, mixed_energy, nonlocal_seminorm  # noqa: E402
from .asymptotics import LimitEstimate, Verdict, compare_to_prediction, extract_limit  # noqa: E402
from .heat_content import heat_content_curve, heat_content_energy, perimeter_from_heat  # noqa: E402
