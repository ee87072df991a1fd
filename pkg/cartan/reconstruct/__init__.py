# flake8: noqa F401
from .cartan_normal import CartanResult, cartan_normal_map, normal_coordinates
from .exceptions import (
    AmbiguousNormalGeodesic,
    InvalidPath,
    InvalidProblem,
    NewtonNotConverged,
    NotOnSubmanifold,
    PathExitsDomain,
    ReconstructionException,
)
from .maps import BundleMaps, TabulatedBundleMaps
from .problem import CahProblem, ProblemMode, TransportedIsomorphism
from .reconstruct import (
    DriftReport,
    PathStrategy,
    Reconstruction,
    SecondFormComparison,
    normal_pushforward_residual,
    pulled_back_second_fundamental_form,
    pushforward,
    pushforward_ratio,
    reconstruct_along,
    reconstruct_map,
    reconstruct_points,
    restriction_residual,
    straight_line_path,
    well_definedness,
)
