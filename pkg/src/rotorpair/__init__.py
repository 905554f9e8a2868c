"""Entanglement generation in a pair of coupled quantized kicked rotators.

Split-operator evolution of two rotors on a discretized torus, purity and
phase-space observables, semiclassical decay-law fits, classical reference
dynamics, and reproducible experiment drivers with structured output.
"""

__version__ = "0.1.0"

from .classical import (
    ClassicalEnsemble,
    LyapunovEstimate,
    NoChaoticSeaError,
    draw_chaotic_points,
    evolve_ensemble,
    histogram,
    lyapunov_exponent,
    lyapunov_exponent_separation,
    sample_gaussian_ensemble,
    standard_map_step,
)
from .config import ConfigError, ExperimentConfig, parse_config, render_config
from .emit import read_grid, read_manifest, read_purity_csv, write_grid, write_manifest
from .experiments import (
    RUNNERS,
    RegimeRefusalError,
    ResourceRefusalError,
    run_env_decoherence,
    run_gamma_estimate,
    run_lyapunov_collapse,
    run_lyapunov_estimate,
    run_purity_sweep,
    run_wigner_compare,
)
from .observables import (
    PhaseSpaceDistribution,
    PuritySeries,
    ReducedDensity,
    correspondence_distance,
    husimi,
    kernel_smooth,
    purity,
    purity_from_state,
    reduce,
    wigner,
    wigner_to_density,
)
from .theory import (
    DecayFit,
    InsufficientDecayError,
    RegimeReport,
    SemiclassicalParams,
    classify_regime,
    fit_decay,
    g_correlator,
    gamma_from_correlator,
    onset_time,
    predict_purity,
    predict_purity_env,
    predict_rate,
)
from .torus import (
    CouplingParams,
    GaussianSpec,
    OneParticleState,
    RotorParams,
    TorusGrid,
    TwoParticleState,
    dense_floquet_oracle_two,
    floquet_step_one,
    floquet_step_two,
    make_gaussian,
    product_state,
    two_particle_plan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
