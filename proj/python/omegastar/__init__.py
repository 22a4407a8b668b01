"""Shifted-prime divisor function experiments."""

from ._core import (
    CounterexampleError,
    ResourceError,
    average,
    average_exact,
    check_names,
    cli,
    count_profiles_at_prime,
    d_formula,
    distribution,
    dyadic_profile,
    g_k,
    g_k_at_prime,
    lcm_identity_check,
    markov_check,
    moment_sum,
    moment_via_tuples,
    omega_star,
    omega_star_table,
    p_k_count,
    profile_consistent,
    profile_from_tuple,
    psi_image_size,
    run_check,
    shifted_prime_average,
    us_decompose,
)

__all__ = [
    "CounterexampleError",
    "ResourceError",
    "average",
    "average_exact",
    "check_names",
    "cli",
    "count_profiles_at_prime",
    "d_formula",
    "distribution",
    "dyadic_profile",
    "g_k",
    "g_k_at_prime",
    "lcm_identity_check",
    "markov_check",
    "moment_sum",
    "moment_via_tuples",
    "omega_star",
    "omega_star_table",
    "p_k_count",
    "profile_consistent",
    "profile_from_tuple",
    "psi_image_size",
    "run_check",
    "shifted_prime_average",
    "us_decompose",
]
