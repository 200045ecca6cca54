# Scenario runners and sweep engine
# =================================

from .sweep_engine import ScenarioResult, SweepError, sweep_engine
from .runners import (
    RUNNERS,
    run_equilibrium_canonical,
    run_equilibrium_gc,
    run_junction,
    run_relaxation,
    run_scenario,
)

__all__ = [
    'ScenarioResult', 'SweepError', 'sweep_engine', 'RUNNERS',
    'run_equilibrium_canonical', 'run_equilibrium_gc', 'run_junction',
    'run_relaxation', 'run_scenario',
]
