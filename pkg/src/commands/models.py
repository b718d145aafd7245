"""
Game configuration files and command output models.

A configuration is a JSON (or YAML) document:

    {
      "graph": {"edge_list": [[1, 2], [2, 3]], "n": 3}
               | {"generate": {"kind": "cycle", "params": {"n": 6}}},
      "players": {"homogeneous": {"alpha": 0.6, "c": 0.45, "L": 1.0}}
                 | {"per_node": [{"alpha": 0.6, "c": 0.45}, ...]},
      "externality": "total_effort" | "weakest_link" | "best_shot"
    }

Unknown keys are rejected.
"""
import json
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.services.critical import AssumptionLargeNReport
from src.services.errors import ConfigError
from src.services.models import Externality, GameSpec, PlayerParams
from src.services.network import Graph, GraphKind, generate
from src.services.weighting import WeightingKind, WeightingSpec


# =============================================================================
# Config Models
# =============================================================================

class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GenerateSection(StrictModel):
    kind: GraphKind = Field(..., description="Named topology", examples=["cycle"])
    params: dict[str, int] = Field(..., description="Generator parameters: n, and k for k_regular", examples=[{"n": 6}])


class GraphSection(StrictModel):
    edge_list: list[tuple[int, int]] | None = Field(None, description="1-based node pairs", examples=[[[1, 2], [2, 3]]])
    n: int | None = Field(None, ge=1, description="Node count (defaults to the largest id)")
    generate: GenerateSection | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "GraphSection":
        if (self.edge_list is None) == (self.generate is None):
            raise ValueError("graph needs exactly one of 'edge_list' or 'generate'")
        if self.generate is not None and self.n is not None:
            raise ValueError("'n' belongs inside generate.params")
        return self

    def build(self) -> Graph:
        if self.generate is not None:
            params = dict(self.generate.params)
            unknown = set(params) - {"n", "k"}
            if unknown or "n" not in params:
                raise ConfigError(f"generate.params takes n (and k), got {sorted(params)}")
            return generate(self.generate.kind, **params)
        largest = max((max(e) for e in self.edge_list), default=0)
        return Graph.from_edges(self.n if self.n is not None else largest, self.edge_list)


class PlayerEntry(StrictModel):
    weighting: WeightingKind = Field(WeightingKind.PRELEC, description="Weighting family")
    alpha: float | None = Field(None, gt=0, le=1, description="Prelec curvature", examples=[0.6])
    c: float = Field(..., gt=0, allow_inf_nan=False, description="Cost per unit of investment", examples=[0.45])
    L: float = Field(1.0, gt=0, allow_inf_nan=False, description="Loss on successful attack")

    @model_validator(mode="after")
    def _alpha_for_prelec(self) -> "PlayerEntry":
        if self.weighting == WeightingKind.PRELEC and self.alpha is None:
            raise ValueError("prelec weighting needs 'alpha'")
        return self

    def build(self) -> PlayerParams:
        spec = WeightingSpec.identity() if self.weighting == WeightingKind.IDENTITY else WeightingSpec.prelec(self.alpha)
        return PlayerParams(c=self.c, L=self.L, weighting=spec)


class PlayersSection(StrictModel):
    homogeneous: PlayerEntry | None = None
    per_node: list[PlayerEntry] | None = None

    @model_validator(mode="after")
    def _one_form(self) -> "PlayersSection":
        if (self.homogeneous is None) == (self.per_node is None):
            raise ValueError("players needs exactly one of 'homogeneous' or 'per_node'")
        return self


class GameConfigFile(StrictModel):
    graph: GraphSection
    players: PlayersSection
    externality: Externality = Field(..., examples=["total_effort"])

    def to_game(self) -> GameSpec:
        graph = self.graph.build()
        if self.players.homogeneous is not None:
            players = [self.players.homogeneous.build()] * graph.n
        else:
            players = [entry.build() for entry in self.players.per_node]
        return GameSpec.build(graph, players, self.externality)

    def normalized(self) -> str:
        """Canonical JSON used for cache digests."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def load_game_config(path: Path) -> GameConfigFile:
    """
    Read and validate a game configuration (YAML by .yaml/.yml extension, JSON otherwise).

    Raises:
        ConfigError: unreadable file, malformed document or schema violation.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        if Path(path).suffix.lower() in (".yaml", ".yml"):
            document = yaml.safe_load(text)
        else:
            document = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    try:
        return GameConfigFile.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(f"invalid game config {path}:\n{exc}") from None


# =============================================================================
# Output Models
# =============================================================================

class AssumptionSummary(BaseModel):
    holds: bool
    per_d: list[AssumptionLargeNReport]
    warning: str | None = None


class BoundsOutput(BaseModel):
    bound_sum: float
    bound_avg: float | None = None
    applicable: bool


class TotalEffortOutput(BaseModel):
    """Total effort solve report; mirrored by docs/report.schema.json."""
    externality: Literal["total_effort"] = "total_effort"
    n: int
    method: str
    iterations: int
    converged: bool
    is_pne: bool
    max_violation: float
    investments: list[float]
    attack_probs: list[float]
    phi: float
    per_node_case: list[str]
    assumption: AssumptionSummary
    bounds: BoundsOutput | None = None
    diagnostics: dict[str, Any] = Field(default_factory=dict)


class BestShotEquilibriumOutput(BaseModel):
    support: list[int]
    investments: list[float]
    is_pne: bool
    max_violation: float


class BestShotOutput(BaseModel):
    externality: Literal["best_shot"] = "best_shot"
    n: int
    s_star: float
    regime: str
    tie: bool
    equilibria: list[BestShotEquilibriumOutput]
