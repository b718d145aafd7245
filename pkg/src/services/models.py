"""
Game Models - Shared types for the equilibrium services.
"""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.services.errors import DomainError, HeterogeneityError, ParameterError
from src.services.network import Graph
from src.services.weighting import WeightingSpec


# =============================================================================
# Enums
# =============================================================================

class Externality(str, Enum):
    TOTAL_EFFORT = "total_effort"
    WEAKEST_LINK = "weakest_link"
    BEST_SHOT = "best_shot"


class NodeCase(str, Enum):
    FULL_INVEST = "full_invest"
    INTERIOR = "interior"
    ZERO = "zero"
    NONE = "none"


class SolveMethod(str, Enum):
    BRD = "brd"
    LCP = "lcp"
    INTERIOR_SOLVE = "interior"
    ANALYTIC = "analytic"


class Order(str, Enum):
    ROUND_ROBIN = "round_robin"
    RANDOM = "random"


class StartRule(str, Enum):
    ZEROS = "zeros"
    ONES = "ones"
    INTERIOR = "interior"
    RANDOM = "random"


# =============================================================================
# Game
# =============================================================================

class PlayerParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0, allow_inf_nan=False, description="Cost per unit of investment")
    L: float = Field(..., gt=0, allow_inf_nan=False, description="Loss on successful attack")
    weighting: WeightingSpec

    @property
    def ratio(self) -> float:
        return self.c / self.L


class GameSpec(BaseModel):
    """Graph, per-node players (index 0 is node 1) and externality."""
    model_config = ConfigDict(frozen=True)

    graph: Graph
    players: tuple[PlayerParams, ...]
    externality: Externality = Externality.TOTAL_EFFORT

    @classmethod
    def build(cls, graph: Graph, players, externality: Externality | str = Externality.TOTAL_EFFORT) -> "GameSpec":
        players = tuple(players)
        if len(players) != graph.n:
            raise ParameterError(f"{len(players)} players given for a graph on {graph.n} nodes")
        return cls(graph=graph, players=players, externality=Externality(externality))

    @classmethod
    def homogeneous(
        cls,
        graph: Graph,
        weighting: WeightingSpec,
        c: float,
        L: float = 1.0,
        externality: Externality | str = Externality.TOTAL_EFFORT,
    ) -> "GameSpec":
        player = PlayerParams(c=c, L=L, weighting=weighting)
        return cls.build(graph, [player] * graph.n, externality)

    @property
    def n(self) -> int:
        return self.graph.n

    def player(self, i: int) -> PlayerParams:
        """Parameters of node i (1-based)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"node {i} outside 1..{self.n}")
        return self.players[i - 1]

    def is_homogeneous(self) -> bool:
        return len(set(self.players)) <= 1

    def require_homogeneous(self, operation: str) -> PlayerParams:
        if not self.is_homogeneous():
            raise HeterogeneityError(f"{operation} requires homogeneous players")
        return self.players[0]

    def with_externality(self, externality: Externality | str) -> "GameSpec":
        return self.model_copy(update={"externality": Externality(externality)})

    def attack_probabilities(self, s: np.ndarray) -> np.ndarray:
        """True attack probability per node under this game's externality."""
        s = np.asarray(s, dtype=float)
        if self.externality == Externality.TOTAL_EFFORT:
            closed = self.graph.adjacency_matrix() + np.eye(self.n)
            x = 1.0 - closed @ s / self.graph.extended_sizes()
        else:
            pick = min if self.externality == Externality.WEAKEST_LINK else max
            x = np.array([1.0 - pick(s[j - 1] for j in self.graph.closed_neighborhood(i)) for i in self.graph.nodes])
        return np.clip(x, 0.0, 1.0)


# =============================================================================
# Profiles and Reports
# =============================================================================

class StrategyProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: tuple[float, ...] = Field(..., description="Investment per node, node 1 first")

    @field_validator("s")
    @classmethod
    def _bounded(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        for v in value:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"investment {v} outside [0, 1]")
        return value

    @classmethod
    def from_array(cls, values, slack: float = 1e-12) -> "StrategyProfile":
        arr = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr < -slack) or np.any(arr > 1.0 + slack):
            raise DomainError(f"investments must lie in [0, 1], got {arr.tolist()}")
        return cls(s=tuple(float(v) for v in np.clip(arr, 0.0, 1.0)))

    @classmethod
    def constant(cls, n: int, value: float) -> "StrategyProfile":
        return cls.from_array(np.full(n, value))

    def as_array(self) -> np.ndarray:
        return np.array(self.s, dtype=float)

    def __len__(self) -> int:
        return len(self.s)


class PneVerification(BaseModel):
    is_pne: bool
    max_violation: float = Field(..., description="Largest utility gain from a unilateral deviation")
    per_node_case: list[NodeCase]
    per_node_gain: list[float]
    characterization_ok: bool = Field(..., description="Every node matches one best-response case")


class EquilibriumReport(BaseModel):
    profile: StrategyProfile
    attack_probs: list[float]
    phi: float
    is_pne: bool
    per_node_case: list[NodeCase]
    max_violation: float
    iterations: int
    method: SolveMethod
    converged: bool = True
    diagnostics: dict[str, Any] = Field(default_factory=dict)
