from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from linac_logger import log_stage
from .basemodels import (
    ActionKind,
    FixedPointClass,
    FixedPointTag,
    SignConvention,
    ValidationReport,
    WeightData,
)
from .config import SEMISIMPLE_COND_LIMIT, WEIGHT_CAP, WEIGHT_ROUNDING_TOL
from .exception import DomainError, InputError, NilpotentPartDetected, NotAPeriodicFlow, SuspectWeights
from .flow import FlowQuery, integrate_flow, integrate_path, linear_flow_matrix, periodicity_check
from .poly import ActionPoly, LaurentPoly, PolyMap
from .run_configs import IntegratorConfig, PeriodicityConfig, SamplingConfig
from .sampling import group_parameters, make_rng, polydisc

TWO_PI_I = 2j * np.pi


def group_element(z) -> complex:
    """s = exp(2 pi i z)."""
    return np.exp(TWO_PI_I * z)


def additive_time(s) -> complex:
    """The principal z with exp(2 pi i z) = s."""
    s = complex(s)
    if s == 0:
        raise DomainError("s = 0 has no additive time")
    return np.log(s) / TWO_PI_I


class ActionSpec:
    """
    A C*-action on C^n with a declared fixed point p.

    Either a closed form phi(s, x) (ActionPoly) or the generating vector field X (PolyMap),
    whose time-z flow realizes phi at s = exp(2 pi i z).
    """

    def __init__(self, kind: ActionKind, fixed_point, action: Optional[ActionPoly] = None,
                 field: Optional[PolyMap] = None):
        if (kind is ActionKind.CLOSED_FORM) != (action is not None) or (kind is ActionKind.VECTOR_FIELD) != (field is not None):
            raise InputError(f"{kind.value} spec needs exactly its own payload")
        self.kind = kind
        self.action = action
        self.field = field
        n = (action or field).dimension
        p = np.zeros(n, dtype=complex) if fixed_point is None else np.asarray(fixed_point, dtype=complex)
        if p.shape != (n,):
            raise InputError(f"fixed point of shape {p.shape} for an action on C^{n}")
        self.fixed_point = p

    @classmethod
    def closed_form(cls, action: ActionPoly, fixed_point=None) -> "ActionSpec":
        return cls(ActionKind.CLOSED_FORM, fixed_point, action=action)

    @classmethod
    def vector_field(cls, field: PolyMap, fixed_point=None) -> "ActionSpec":
        return cls(ActionKind.VECTOR_FIELD, fixed_point, field=field)

    @property
    def dimension(self) -> int:
        return self.fixed_point.shape[0]

    @property
    def is_closed_form(self) -> bool:
        return self.kind is ActionKind.CLOSED_FORM

    @cached_property
    def centered(self) -> ActionPoly:
        """Closed form with p moved to the origin."""
        return self.action.translate(self.fixed_point)

    def flow(self, z, x, cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
        """phi^z(x) with s = exp(2 pi i z)."""
        x = np.asarray(x, dtype=complex)
        if complex(z) == 0:
            return x.copy()
        if self.is_closed_form:
            return self.action(group_element(complex(z)), x)
        return integrate_flow(self.field, FlowQuery(complex(z), x), cfg)

    def flow_along(self, x, zs, cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
        """phi^z(x) for every z of a path that starts at 0; one row per z."""
        zs = np.asarray(zs, dtype=complex).ravel()
        if self.is_closed_form:
            return self.action.evaluate_many(group_element(zs), x)
        return integrate_path(self.field, x, zs, cfg)

    def __repr__(self) -> str:
        payload = self.action if self.is_closed_form else self.field
        return f"ActionSpec({self.kind.value}, p={self.fixed_point.tolist()}, {payload!r})"


###############################
# Validation
###############################
def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def group_law_residual(spec: ActionSpec, s, s_prime, x) -> float:
    """Absolute |phi(s, phi(s', x)) - phi(s s', x)|_inf at one point."""
    if not spec.is_closed_form:
        raise InputError("group law residual is defined for closed-form actions")
    phi = spec.action
    lhs = phi(s, phi(s_prime, x))
    rhs = phi(complex(s) * complex(s_prime), x)
    return float(np.max(np.abs(lhs - rhs)))


def _validate_closed_form(spec: ActionSpec, samples: SamplingConfig) -> ValidationReport:
    if samples.s_min <= 0:
        raise DomainError("sampling range reaches s = 0")
    rng = make_rng(samples.seed)
    n, p, phi = spec.dimension, spec.fixed_point, spec.action
    ss = group_parameters(rng, samples.count, samples.s_min, samples.s_max)
    ss_prime = group_parameters(rng, samples.count, samples.s_min, samples.s_max)
    xs = polydisc(rng, samples.count, n, samples.radius, center=p)

    residuals = {"group_law": 0.0, "identity": phi.identity_defect(), "fixed_point": 0.0}
    worst = {}
    for s, s2, x in zip(ss, ss_prime, xs):
        group = _relative(phi(s, phi(s2, x)), phi(s * s2, x))
        if group >= residuals["group_law"]:
            residuals["group_law"] = group
            worst = {"s": [s.real, s.imag], "s_prime": [s2.real, s2.imag],
                     "x": [[v.real, v.imag] for v in x]}
        residuals["identity"] = max(residuals["identity"], _relative(phi(1.0, x), x))
        residuals["fixed_point"] = max(residuals["fixed_point"], _relative(phi(s, p), p))

    passed = all(r <= samples.tolerance for r in residuals.values())
    return ValidationReport(kind=spec.kind, residuals=residuals, tolerance=samples.tolerance,
                            sample_count=samples.count, passed=passed, worst_sample=worst)


def _validate_vector_field(spec: ActionSpec, periodicity: PeriodicityConfig,
                           integrator: IntegratorConfig) -> ValidationReport:
    at_fixed_point = float(np.max(np.abs(spec.field(spec.fixed_point))))
    report = periodicity_check(spec.field, periodicity, integrator, center=spec.fixed_point)
    residuals = {"periodicity": report.max_residual, "field_at_fixed_point": at_fixed_point}
    passed = report.passed and at_fixed_point <= periodicity.tolerance
    worst = {} if report.worst_point is None else {"x": [[v.real, v.imag] for v in report.worst_point]}
    return ValidationReport(kind=spec.kind, residuals=residuals, tolerance=periodicity.tolerance,
                            sample_count=report.sample_count, passed=passed, worst_sample=worst)


def validate_action(spec: ActionSpec, samples: Optional[SamplingConfig] = None,
                    periodicity: Optional[PeriodicityConfig] = None,
                    integrator: Optional[IntegratorConfig] = None) -> ValidationReport:
    """
    Sampled check of the action axioms.

    Closed form: group law, phi^1 = Id and phi^s(p) = p, all as relative residuals
    |a - b|_inf / max(1, |b|_inf). Vector field: |phi^1(x) - x| on a polydisc and |X(p)|.
    """
    if spec.is_closed_form:
        report = _validate_closed_form(spec, samples or SamplingConfig())
    else:
        report = _validate_vector_field(spec, periodicity or PeriodicityConfig(), integrator or IntegratorConfig())
    summary = ", ".join(f"{k}={v:.2e}" for k, v in report.residuals.items())
    log_stage("VALIDATE", f"{report.kind.value}: {summary}", passed=report.passed)
    return report


###############################
# Linear part and weights
###############################
@dataclass(frozen=True)
class LinearPart:
    """
    (D phi^s)(p) as a function of the group parameter.

    Closed forms keep the Laurent matrix L(s) = sum_k C_k s^k; vector fields keep DX(p), with
    L(exp(2 pi i z)) = exp(z DX(p)).
    """
    kind: ActionKind
    dimension: int
    laurent: Optional[tuple[tuple[LaurentPoly, ...], ...]] = None
    derivative: Optional[np.ndarray] = None

    def at(self, s) -> np.ndarray:
        s = complex(s)
        if s == 0:
            raise DomainError("linear part evaluated at s = 0")
        if self.laurent is not None:
            return np.array([[c(s) for c in row] for row in self.laurent], dtype=complex)
        return linear_flow_matrix(self.derivative, additive_time(s))

    def exponent_matrix(self) -> np.ndarray:
        """sum_k k C_k for closed forms, DX(p) / (2 pi i) for vector fields."""
        if self.laurent is None:
            return np.asarray(self.derivative, dtype=complex) / TWO_PI_I
        out = np.zeros((self.dimension, self.dimension), dtype=complex)
        for i, row in enumerate(self.laurent):
            for j, c in enumerate(row):
                out[i, j] = sum((k * v for k, v in c.terms.items()), 0j)
        return out

    def generator_matrix(self) -> np.ndarray:
        """Infinitesimal generator: the matrix D with L(exp(2 pi i z)) = exp(z D)."""
        if self.laurent is None:
            return np.asarray(self.derivative, dtype=complex)
        return TWO_PI_I * self.exponent_matrix()


def linear_part(spec: ActionSpec) -> LinearPart:
    if spec.is_closed_form:
        return LinearPart(ActionKind.CLOSED_FORM, spec.dimension, laurent=spec.centered.linear_part())
    return LinearPart(ActionKind.VECTOR_FIELD, spec.dimension, derivative=spec.field.jacobian(spec.fixed_point))


def _diagonal_frame(m: np.ndarray, cond_limit: float) -> tuple[np.ndarray, np.ndarray, float]:
    n = m.shape[0]
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        return np.diag(m).copy(), np.eye(n, dtype=complex), 1.0
    eigvals, vecs = np.linalg.eig(m)
    condition = float(np.linalg.cond(vecs))
    if not np.isfinite(condition) or condition > cond_limit:
        raise NilpotentPartDetected(
            f"eigenvector matrix condition number {condition:.3e} exceeds {cond_limit:.0e}: linear part has a nilpotent part")
    return eigvals, vecs, condition


def extract_weights(linear: LinearPart, tol: float = WEIGHT_ROUNDING_TOL,
                    cond_limit: float = SEMISIMPLE_COND_LIMIT, cap: int = WEIGHT_CAP) -> WeightData:
    """
    Integer weights lambda and basis A with A^-1 L(s) A = diag(s^lambda).

    The eigenvalues of the exponent matrix are the weights. For closed forms the basis is also
    checked against L(s) on the unit circle, and that defect enters the residual.
    """
    ratios, basis, condition = _diagonal_frame(linear.exponent_matrix(), cond_limit)
    rounded = np.rint(ratios.real)
    residual = float(np.max(np.abs(ratios - rounded), initial=0.0))
    if residual > tol:
        raise NotAPeriodicFlow(
            f"eigenvalue ratios {np.round(ratios, 6).tolist()} are {residual:.3e} away from integers")
    if np.max(np.abs(rounded), initial=0) > cap:
        raise SuspectWeights(f"weights {rounded.astype(int).tolist()} exceed the cap {cap}")
    weights = tuple(int(w) for w in rounded)

    if linear.laurent is not None:
        inverse = np.linalg.inv(basis)
        for theta in (0.137, 0.618):
            s = group_element(theta)
            model = np.diag(np.power(s, np.asarray(weights, dtype=float)))
            residual = max(residual, float(np.max(np.abs(inverse @ linear.at(s) @ basis - model))))
        if residual > tol:
            raise NotAPeriodicFlow(f"linear part is not the character diag(s^{list(weights)}), defect {residual:.3e}")

    log_stage("WEIGHTS", f"lambda={list(weights)} residual={residual:.2e} cond={condition:.2e}", passed=True)
    return WeightData(weights=weights, basis=basis, residual=residual, condition=condition)


def classify_fixed_point(weights: WeightData) -> FixedPointClass:
    lam = np.asarray(weights.weights)
    if np.any(lam == 0):
        return FixedPointClass(FixedPointTag.ZERO_WEIGHT)
    if np.all(lam > 0):
        return FixedPointClass(FixedPointTag.DICRITICAL, SignConvention.POSITIVE)
    if np.all(lam < 0):
        return FixedPointClass(FixedPointTag.DICRITICAL, SignConvention.NEGATIVE)
    return FixedPointClass(FixedPointTag.MIXED_SIGNS)


def action_weights(spec: ActionSpec, tol: float = WEIGHT_ROUNDING_TOL) -> WeightData:
    return extract_weights(linear_part(spec), tol)
