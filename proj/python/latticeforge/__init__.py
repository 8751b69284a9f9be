"""Lattice coding toolkit: lattices, theta series, space-time codes,
compute-and-forward and wiretap coset coding."""

import json as _json

from ._latticeforge import (
    CapacityError,
    ConfigError,
    DomainError,
    Error,
    Lattice,
    RankError,
    SpaceTimeCode,
    __version__,
    alamouti_code,
    best_coefficients,
    catalog,
    catalog_names,
    closest_vector,
    computation_rate,
    count_points,
    flatness_factor,
    golden_code,
    is_well_rounded,
    iterated_alamouti,
    jacobi_theta,
    min_determinant,
    optimal_alpha,
    run_cli,
    successive_minima,
    theta,
    theta_closed_form,
)
from . import _latticeforge as _core


def theta_approximation(lattice, q):
    return _json.loads(_core.theta_approximation(lattice, q))


def codebook(fine, subgroup):
    return _json.loads(_core.codebook(fine, subgroup))


def fast_decoding(code):
    return _json.loads(_core.fast_decoding(code))


def ecdp_bound(code, subgroup, rho_e, n_e=1):
    return _json.loads(_core.ecdp_bound(code, subgroup, rho_e, n_e))


def cli(*args):
    """Run a command line; returns (exit code, stdout text, stderr text)."""
    return run_cli([str(a) for a in args])
