"""
Sweep Engine
============

Evaluates a scenario runner on every point of a sweep grid, in parallel
when more than one worker is available, and assembles the rows in grid
order.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Mapping, Optional

import numpy as np
import pandas as pd

from utils.config_loader import ScenarioConfig

logger = logging.getLogger(__name__)

WORKERS_ENV = 'IMPURITY_ENTANGLEMENT_WORKERS'
ARTIFACT_VERSION = '1.0.0'

# runner(config, grid_value) -> {column: value}
PointRunner = Callable[[ScenarioConfig, float], Mapping[str, float]]


class SweepError(RuntimeError):
    """A sweep point failed; carries the offending point."""

    def __init__(self, variable, value, index, cause):
        self.variable = variable
        self.value = value
        self.index = index
        super().__init__(f"sweep point {index} ({variable}={value:g}) failed: {cause}")


@dataclass
class ScenarioResult:
    """Rows of one scenario run plus the resolved config that produced them."""

    config: ScenarioConfig
    frame: pd.DataFrame
    started: str = ''
    elapsed: float = 0.0
    version: str = ARTIFACT_VERSION

    def __post_init__(self):
        if len(self.frame) != len(self.config.sweep.values):
            raise ValueError(f"result has {len(self.frame)} rows for a {len(self.config.sweep.values)}-point grid")

    @property
    def variable(self) -> str:
        return self.config.sweep.variable


def resolve_workers(workers=None, points=None) -> int:
    """Worker count: explicit argument, then the environment, then cpu_count."""
    if workers is None:
        raw = os.environ.get(WORKERS_ENV)
        if raw:
            try:
                workers = int(raw)
            except ValueError:
                raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    if points is not None:
        workers = min(workers, max(points, 1))
    return workers


def _evaluate(config, runner, index, value):
    try:
        return dict(runner(config, value))
    except Exception as e:
        logger.error(f"Sweep point {index} ({config.sweep.variable}={value:g}) failed: {e}")
        raise SweepError(config.sweep.variable, value, index, e) from e


def sweep_engine(config: ScenarioConfig, runner: PointRunner, workers: Optional[int] = None) -> ScenarioResult:
    """
    Evaluate runner(config, value) for every value of config.sweep.values.

    Points are independent. Rows are ordered by grid index whatever the
    completion order; the first failing point aborts the sweep with a
    SweepError naming it.
    """
    variable = config.sweep.variable
    grid = tuple(config.sweep.values)
    if not grid:
        raise ValueError("sweep grid must not be empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("sweep grid must be strictly increasing")

    workers = resolve_workers(workers, len(grid))
    n = len(grid)
    logger.info(f"Sweeping {config.scenario} over {variable}: {n} points, {workers} worker(s)")
    started = datetime.now().isoformat(timespec='seconds')
    clock = time.perf_counter()
    rows = [None] * n

    if workers == 1:
        for i, value in enumerate(grid):
            rows[i] = _evaluate(config, runner, i, value)
            logger.info(f"point {i + 1}/{n} done: {variable}={value:.6g}")
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futures = {ex.submit(_evaluate, config, runner, i, value): i for i, value in enumerate(grid)}
            done = 0
            for fut in as_completed(futures):
                i = futures[fut]
                try:
                    rows[i] = fut.result()
                except SweepError:
                    for pending in futures:
                        pending.cancel()
                    raise
                done += 1
                logger.info(f"point {done}/{n} done: {variable}={grid[i]:.6g}")

    frame = pd.DataFrame(rows)
    frame.insert(0, variable, list(grid))
    elapsed = time.perf_counter() - clock
    negative = [c for c in frame.columns if c.startswith('N') and (frame[c] < 0).any()]
    assert not negative, f"negative negativity in columns {negative}"
    logger.info(f"Sweep finished in {elapsed:.2f} s")
    return ScenarioResult(config, frame, started=started, elapsed=elapsed)
