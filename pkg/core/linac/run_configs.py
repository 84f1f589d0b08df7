from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import (
    INTEGRATOR_REL_TOL,
    INTEGRATOR_ABS_TOL,
    INTEGRATOR_MAX_STEPS,
    ESCAPE_NORM,
    QUADRATURE_NODES,
    QUADRATURE_AGREEMENT,
    QUADRATURE_MAX_NODES,
    CLOSED_FORM_TOL,
    PERIODICITY_TOL,
    VALIDATION_SAMPLES,
    VALIDATION_RADIUS,
    VALIDATION_S_MIN,
    VALIDATION_S_MAX,
    PERIODICITY_SAMPLES,
    PERIODICITY_RADIUS,
    FIT_RADIUS,
    FIT_COND_LIMIT,
    FIT_ZERO_THRESHOLD,
    INJECTIVITY_START_RADIUS,
    INJECTIVITY_MIN_RADIUS,
    INJECTIVITY_BOUNDARY_SAMPLES,
    INJECTIVITY_PAIR_SAMPLES,
    INJECTIVITY_MIN_SINGULAR,
    INJECTIVITY_COLLISION,
    INJECTIVITY_SEPARATION,
    INJECTIVITY_BISECTION_STEPS,
    NORMALIZATION_GATE,
    SATURATION_BASE_DEPTH,
    SATURATION_DOUBLINGS,
    CONJUGACY_SAMPLES,
    CONJUGACY_X_RADIUS,
    CONJUGACY_IM_Z,
    CONJUGACY_RE_Z,
    SEED,
)


class _FrozenConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class IntegratorConfig(_FrozenConfig):
    """Tolerances of the complex-time integrator; the state is treated as 2n reals."""
    rel_tol: float = Field(default=INTEGRATOR_REL_TOL, gt=0, le=1e-2, title="relative tolerance")
    abs_tol: float = Field(default=INTEGRATOR_ABS_TOL, gt=0, le=1e-2, title="absolute tolerance")
    max_steps: int = Field(default=INTEGRATOR_MAX_STEPS, ge=1, title="accepted steps per integration")
    initial_step: Optional[float] = Field(default=None, gt=0, title="first step as a fraction of the path, None lets the stepper choose")
    escape_norm: float = Field(default=ESCAPE_NORM, gt=0, title="abort when max |x_j| exceeds this")


class QuadratureConfig(_FrozenConfig):
    """Composite trapezoid on t in [0, 1]."""
    nodes: int = Field(default=QUADRATURE_NODES, ge=2, title="node count N")
    adaptive: bool = Field(default=True, title="double N until two levels agree")
    agreement: float = Field(default=QUADRATURE_AGREEMENT, gt=0)
    max_nodes: int = Field(default=QUADRATURE_MAX_NODES, ge=2)

    @field_validator("max_nodes")
    @classmethod
    def _cap_above_start(cls, v: int, info) -> int:
        nodes = info.data.get("nodes", QUADRATURE_NODES)
        if v < nodes:
            raise ValueError(f"max_nodes {v} below starting node count {nodes}")
        return v


class SamplingConfig(_FrozenConfig):
    """Random (s, s', x) triples for the closed-form action axioms."""
    count: int = Field(default=VALIDATION_SAMPLES, ge=1)
    radius: float = Field(default=VALIDATION_RADIUS, gt=0, title="polydisc radius of x")
    s_min: float = Field(default=VALIDATION_S_MIN, ge=0, title="smallest |s|, 0 is a domain error")
    s_max: float = Field(default=VALIDATION_S_MAX, gt=0)
    tolerance: float = Field(default=CLOSED_FORM_TOL, gt=0)
    seed: int = SEED


class PeriodicityConfig(_FrozenConfig):
    count: int = Field(default=PERIODICITY_SAMPLES, ge=1)
    radius: float = Field(default=PERIODICITY_RADIUS, gt=0)
    tolerance: float = Field(default=PERIODICITY_TOL, gt=0)
    seed: int = SEED


class ConjugacySampling(_FrozenConfig):
    """Sample cloud for the conjugacy certificate: |x_j| <= x_radius, |Re z| <= re_z, |Im z| <= im_z."""
    count: int = Field(default=CONJUGACY_SAMPLES, ge=1)
    x_radius: float = Field(default=CONJUGACY_X_RADIUS, gt=0)
    re_z: float = Field(default=CONJUGACY_RE_Z, ge=0)
    im_z: float = Field(default=CONJUGACY_IM_Z, ge=0)
    seed: int = SEED


class FitGridConfig(_FrozenConfig):
    radius: float = Field(default=FIT_RADIUS, gt=0, title="radius of the circle nodes on every axis")
    points_per_axis: Optional[int] = Field(default=None, ge=1, title="None means max_deg + 2")
    cond_limit: float = Field(default=FIT_COND_LIMIT, gt=1)
    zero_threshold: float = Field(default=FIT_ZERO_THRESHOLD, ge=0)
    pin_normalization: bool = Field(default=True, title="fix F(p) = 0 and DF(p) = Id, fit degree >= 2 only")


class InjectivitySearchConfig(_FrozenConfig):
    start_radius: float = Field(default=INJECTIVITY_START_RADIUS, gt=0)
    min_radius: float = Field(default=INJECTIVITY_MIN_RADIUS, gt=0)
    boundary_samples: int = Field(default=INJECTIVITY_BOUNDARY_SAMPLES, ge=1)
    pair_samples: int = Field(default=INJECTIVITY_PAIR_SAMPLES, ge=2)
    min_singular: float = Field(default=INJECTIVITY_MIN_SINGULAR, gt=0)
    collision: float = Field(default=INJECTIVITY_COLLISION, gt=0)
    separation: float = Field(default=INJECTIVITY_SEPARATION, gt=0)
    bisection_steps: int = Field(default=INJECTIVITY_BISECTION_STEPS, ge=0)
    normalization_gate: float = Field(default=NORMALIZATION_GATE, gt=0)
    seed: int = SEED


class SaturationBudget(_FrozenConfig):
    """Contraction schedule depth_k = 2**k * base_depth, k = 0 .. doublings."""
    doublings: int = Field(default=SATURATION_DOUBLINGS, ge=0)
    base_depth: float = Field(default=SATURATION_BASE_DEPTH, gt=0)
