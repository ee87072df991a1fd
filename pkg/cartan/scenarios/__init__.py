# flake8: noqa F401
from .catalog import (
    axis_line,
    boundary_line,
    codazzi_bump_bundle,
    equator,
    euclidean,
    flat_bundle,
    flat_strip,
    hyperbolic_half_plane,
    latitude,
    line,
    plane_circle,
    ricci_bundle,
    sphere_chart,
    sphere_in_flat_bundle,
)
from .exceptions import OracleDomainError, ScenarioException, UnknownScenario
from .oracles import (
    oracle_geodesic,
    oracle_great_circle,
    oracle_holonomy_sphere,
    oracle_hyperbolic_vertical,
    oracle_plane_rotation,
    oracle_rotation,
    oracle_sphere_embedding,
    rotation_matrix,
)
from .problems import (
    MANIFOLDS,
    PROBLEMS,
    ScenarioCatalog,
    cartan_strip,
    codazzi_bump,
    default_catalog,
    equator_rotation,
    flat_rotation,
    flattened_target,
    gauss_violation,
    get_problem,
    identity_flat,
    identity_maps,
    identity_sphere,
    problem_names,
    radius_mismatch,
    ricci_plane,
    scaled_psi,
    sphere_into_space,
    with_maps,
)
