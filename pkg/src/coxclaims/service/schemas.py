"""Pydantic request/response models for the HTTP service."""

from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from ..delays import DelayModel, delay_from_dict
from ..errors import ConfigError
from ..model import ModelSpec, spec_from_dict


class DelaySchema(BaseModel):
    family: str
    params: dict[str, Any] = Field(default_factory=dict)

    def build(self) -> DelayModel:
        return delay_from_dict(self.model_dump())


class RunConfig(BaseModel):
    """JSON run configuration: model spec, delay law, valuation and seed."""

    g: int
    gamma: Union[list[float], list[list[float]]]
    pi1: list[float]
    shapes: list[int]
    theta: float
    grid: list[float]
    exposures: list[float]
    delay: Optional[DelaySchema] = None
    valuation: Optional[float] = None
    seed: Optional[int] = None

    def build_spec(self) -> ModelSpec:
        return spec_from_dict(self.model_dump(exclude={"delay", "valuation", "seed"}))

    def build_delay(self) -> DelayModel:
        if self.delay is None:
            raise ConfigError("config is missing the 'delay' key")
        return self.delay.build()

    def resolved_valuation(self, spec: ModelSpec) -> float:
        if self.valuation is None:
            return float(spec.grid[-1])
        return float(self.valuation)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError(
                "stochastic commands require a seed ('seed' key or --seed flag)"
            )
        return int(self.seed)

    def make_rng(self) -> np.random.Generator:
        return np.random.default_rng(self.require_seed())


class SimulateRequest(BaseModel):
    config: RunConfig
    k: Optional[int] = None
    replications: int = 1


class DistRequest(BaseModel):
    config: RunConfig
    which: Literal["reported", "ibnr", "period-marginal"] = "reported"
    period: int = 1
    n_max: Optional[int] = None
    eps: float = 1e-6
    mc: Optional[int] = None
    verify: bool = False
    verify_replications: int = 100_000


class AcfRequest(BaseModel):
    config: RunConfig
    max_lag: int = 10


class VerifyRequest(BaseModel):
    config: RunConfig
    which: Literal["reported", "ibnr"] = "reported"
    replications: int = 100_000
    eps: float = 1e-6


class VerifyReport(BaseModel):
    which: str
    replications: int
    bins_checked: int
    max_abs_z: float
    passed: bool


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str
