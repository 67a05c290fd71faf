"""Hyperparameters shared by the stochastic mappers.

``iterations`` means SA steps, GA generations, PSO iterations or ACO rounds;
``population`` means GA population, PSO swarm or ACO colony size.  ``None``
picks the per-algorithm default from :data:`DEFAULT_BUDGETS`.

Documented ranges (closed unless noted):

==================== ========== =====================================
field                range      default
==================== ========== =====================================
mutation_rate        [0, 1]     1 / number of tasks
crossover_rate       [0, 1]     0.9
inertia              [0, 1]     0.7
cognitive, social    [0, 4]     1.4
pheromone_weight     [0, 10]    1.0
desirability_weight  [0, 10]    2.0
evaporation          [0, 1]     0.1
initial_temperature  (0, inf)   10 x objective of the starting mapping
cooling              (0, 1]     0.995
==================== ========== =====================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ConfigError

DEFAULT_BUDGETS: dict[str, tuple[int, int]] = {
    # algorithm: (iterations, population)
    "sa": (1000, 1),
    "ga": (50, 20),
    "pso": (60, 15),
    "aco": (40, 10),
}

_RANGES = {
    "crossover_rate": (0.0, 1.0),
    "inertia": (0.0, 1.0),
    "cognitive": (0.0, 4.0),
    "social": (0.0, 4.0),
    "pheromone_weight": (0.0, 10.0),
    "desirability_weight": (0.0, 10.0),
    "evaporation": (0.0, 1.0),
}


@dataclass(frozen=True)
class HeuristicConfig:
    seed: int = 0
    iterations: int | None = None
    population: int | None = None
    mutation_rate: float | None = None
    crossover_rate: float = 0.9
    inertia: float = 0.7
    cognitive: float = 1.4
    social: float = 1.4
    pheromone_weight: float = 1.0
    desirability_weight: float = 2.0
    evaporation: float = 0.1
    initial_temperature: float | None = None
    cooling: float = 0.995

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for name in ("iterations", "population"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be >= 1, got {v}")
        for name, (lo, hi) in _RANGES.items():
            v = getattr(self, name)
            if not (math.isfinite(v) and lo <= v <= hi):
                raise ConfigError(f"{name}={v} outside [{lo}, {hi}]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError(f"mutation_rate={self.mutation_rate} outside [0, 1]")
        if self.initial_temperature is not None and not (
            math.isfinite(self.initial_temperature) and self.initial_temperature > 0
        ):
            raise ConfigError("initial_temperature must be positive")
        if not 0.0 < self.cooling <= 1.0:
            raise ConfigError(f"cooling={self.cooling} outside (0, 1]")

    def budget(self, algorithm: str) -> tuple[int, int]:
        iters, pop = DEFAULT_BUDGETS[algorithm]
        return (self.iterations or iters, self.population or pop)
