"""
Scenario Runners
================

Equilibrium (grand-canonical and canonical), relaxation and junction
experiments. Each runner turns a validated ScenarioConfig into a per-point
evaluation and hands it to the sweep engine.

Energies are in units of k_BT (with beta = 1), times in units of 1/Gamma.
"""

import logging
from typing import Optional

from physics.fock import (
    canonical_gibbs,
    default_particle_number,
    grand_canonical_gibbs_fock,
    mode_occupation,
    negativity,
    partial_negativities,
)
from physics.gaussian import CorrelationEvolution, gibbs_correlation_matrix, mean_occupation
from physics.model import (
    BathSpec,
    ImpuritySpec,
    JunctionSpec,
    build_junction,
    build_single_bath,
    initial_correlation_matrix_junction,
    initial_correlation_matrix_single,
)
from utils.config_loader import ScenarioConfig

from .sweep_engine import ScenarioResult, sweep_engine

logger = logging.getLogger(__name__)


def resolve_epsilon0(config: ScenarioConfig) -> float:
    """Impurity level; a band-edge distance delta (units of Gamma) takes precedence."""
    bath = config.bath
    if config.scenario != 'junction' and bath.delta is not None:
        return 0.5 * bath.absolute_bandwidth - bath.delta * bath.gamma
    return config.model.epsilon0


def impurity_spec(config: ScenarioConfig) -> ImpuritySpec:
    return ImpuritySpec(resolve_epsilon0(config), config.model.n0_initial)


def bath_spec(config: ScenarioConfig) -> BathSpec:
    """Single bath; mu_offset (units of k_BT) ties mu to the impurity level."""
    bath = config.bath
    beta = config.model.beta
    mu = bath.mu
    if bath.mu_offset is not None:
        mu = resolve_epsilon0(config) + bath.mu_offset / beta
    return BathSpec(bath.absolute_bandwidth, bath.level_count, bath.gamma, beta, mu)


def junction_spec(config: ScenarioConfig) -> JunctionSpec:
    j = config.junction
    return JunctionSpec(
        impurity=impurity_spec(config),
        mu_bar=j.mu_bar,
        voltage=j.voltage,
        asymmetry=j.asymmetry,
        gamma=j.gamma,
        bandwidth=j.absolute_bandwidth,
        level_count_per_bath=j.level_count,
        beta=config.model.beta,
    )


def negativity_row(correlations, cutoff) -> dict:
    values = partial_negativities(correlations, cutoff)
    return {f"N_{j}": value for j, value in enumerate(values, start=1)}


def _require(config, scenario):
    if config.scenario != scenario:
        raise ValueError(f"config is for scenario {config.scenario!r}, expected {scenario!r}")


def _point(config, value):
    return config if config.sweep.variable == 't' else config.at(config.sweep.variable, value)


def _gc_row(config: ScenarioConfig, value: float) -> dict:
    point = _point(config, value)
    bath = bath_spec(point)
    h = build_single_bath(impurity_spec(point), bath)
    c = gibbs_correlation_matrix(h, bath.beta, bath.mu)
    row = negativity_row(c, point.output.cutoff)
    row['n_0'] = mean_occupation(c)
    return row


def _canonical_row(config: ScenarioConfig, value: float) -> dict:
    point = _point(config, value)
    bath = bath_spec(point)
    h = build_single_bath(impurity_spec(point), bath)
    particles = point.output.canonical_particles
    if particles is None:
        particles = default_particle_number(bath.level_count)
    rho = canonical_gibbs(h, bath.beta, particles)
    row = {'N': negativity(rho)}
    if point.output.compare_grand_canonical:
        row['N_gc'] = negativity(grand_canonical_gibbs_fock(h, bath.beta, bath.mu))
    row['n_0'] = mode_occupation(rho, 0)
    return row


def relaxation_evolution(config: ScenarioConfig) -> CorrelationEvolution:
    impurity, bath = impurity_spec(config), bath_spec(config)
    h = build_single_bath(impurity, bath)
    return CorrelationEvolution(initial_correlation_matrix_single(impurity, bath), h)


def junction_evolution(config: ScenarioConfig) -> CorrelationEvolution:
    spec = junction_spec(config)
    return CorrelationEvolution(initial_correlation_matrix_junction(spec), build_junction(spec))


def _dynamic_row(evolution: CorrelationEvolution, t: float, cutoff: int) -> dict:
    c = evolution.at(t)
    row = negativity_row(c, cutoff)
    row['n_0'] = mean_occupation(c)
    row['particle_number'] = c.particle_number
    return row


def _dynamic_runner(config, build_evolution):
    if config.sweep.variable == 't':
        # One eigendecomposition serves the whole time grid.
        evolution = build_evolution(config)
        return lambda cfg, tau: _dynamic_row(evolution, tau / cfg.gamma, cfg.output.cutoff)

    def runner(cfg, value):
        point = cfg.at(cfg.sweep.variable, value)
        return _dynamic_row(build_evolution(point), point.time.t_eval / point.gamma, point.output.cutoff)
    return runner


def run_equilibrium_gc(config: ScenarioConfig, workers: Optional[int] = None) -> ScenarioResult:
    """Partial negativities N_1..N_M of the grand-canonical Gibbs state per sweep point."""
    _require(config, 'equilibrium_gc')
    return sweep_engine(config, _gc_row, workers)


def run_equilibrium_canonical(config: ScenarioConfig, workers: Optional[int] = None) -> ScenarioResult:
    """Full negativity of the fixed-N Gibbs state, optionally beside the grand-canonical one."""
    _require(config, 'equilibrium_canonical')
    return sweep_engine(config, _canonical_row, workers)


def run_relaxation(config: ScenarioConfig, workers: Optional[int] = None) -> ScenarioResult:
    """Quench from a product state into a single bath; N_M(t) and n_0(t)."""
    _require(config, 'relaxation')
    return sweep_engine(config, _dynamic_runner(config, relaxation_evolution), workers)


def run_junction(config: ScenarioConfig, workers: Optional[int] = None) -> ScenarioResult:
    """
    Voltage-biased junction.

    With sweep variable t this is a time series; otherwise each point is
    evaluated at time.t_eval, the operational steady state.
    """
    _require(config, 'junction')
    return sweep_engine(config, _dynamic_runner(config, junction_evolution), workers)


RUNNERS = {
    'equilibrium_gc': run_equilibrium_gc,
    'equilibrium_canonical': run_equilibrium_canonical,
    'relaxation': run_relaxation,
    'junction': run_junction,
}


def run_scenario(config: ScenarioConfig, workers: Optional[int] = None) -> ScenarioResult:
    logger.info(f"Running {config.scenario} scenario")
    return RUNNERS[config.scenario](config, workers)
