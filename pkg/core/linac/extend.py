"""
Injectivity domain of a linearizer and its extension along orbits.

Inside a polydisc D about p where F is injective, the extension is

    T(y) = psi^-z F(phi^z(y)),  for any z with phi^z(y) in D,

and it does not depend on the choice of z. At a dicritical fixed point every orbit enters D
when the action contracts towards p, so T is defined on all of C^n.
"""
from typing import Optional

import numpy as np

from linac_logger import log_stage
from .action import ActionSpec, classify_fixed_point, group_element
from .basemodels import InjectivityDomain, SaturationResult, SignConvention
from .exception import DegenerateLinearizer, InputError, NotDicritical, OrbitNeverEntersDomain
from .linearize import Linearizer, normalization_report
from .run_configs import InjectivitySearchConfig, IntegratorConfig, SaturationBudget
from .sampling import make_rng, polydisc, polydisc_boundary


###############################
# Injectivity search
###############################
def _radius_accepted(linearizer: Linearizer, radius: float, cfg: InjectivitySearchConfig) -> tuple[bool, float]:
    n, p = linearizer.dimension, linearizer.fixed_point
    basis = linearizer.weights.basis
    rng = make_rng(cfg.seed)

    frame_points = np.vstack([np.zeros((1, n), dtype=complex),
                              polydisc_boundary(rng, cfg.boundary_samples, n, radius)])
    min_singular = np.inf
    for v in frame_points:
        singular = np.linalg.svd(linearizer.jacobian(p + basis @ v), compute_uv=False)
        min_singular = min(min_singular, float(singular[-1]))
        if min_singular < cfg.min_singular:
            return False, min_singular

    half = cfg.pair_samples // 2
    first = polydisc(rng, cfg.pair_samples, n, radius)
    second = np.vstack([polydisc(rng, half, n, radius), -first[half:]])
    x1, x2 = p + first @ basis.T, p + second @ basis.T
    apart = np.max(np.abs(x1 - x2), axis=1) >= cfg.separation
    images = np.max(np.abs(linearizer(x1) - linearizer(x2)), axis=1)
    if np.any(apart & (images < cfg.collision)):
        return False, min_singular
    return True, min_singular


def injectivity_radius(linearizer: Linearizer, cfg: Optional[InjectivitySearchConfig] = None) -> InjectivityDomain:
    """
    Largest tested polydisc radius, in the diagonalizing frame, on which F looks injective.

    A radius is accepted when the Jacobian stays nonsingular on boundary samples and no sampled
    pair of separated points collides. The search tries the start radius, then the floor, then
    bisects geometrically between them.
    """
    cfg = cfg or InjectivitySearchConfig()
    norm = normalization_report(linearizer)
    if max(norm.value_at_fixed_point, norm.jacobian_defect) > cfg.normalization_gate:
        raise DegenerateLinearizer(
            f"linearizer is not normalized at p: |F(p)|={norm.value_at_fixed_point:.3e}, "
            f"|DF(p)-Id|={norm.jacobian_defect:.3e}")

    def domain(radius: float, singular: float) -> InjectivityDomain:
        log_stage("DOMAIN", f"injectivity radius {radius:.4g}", passed=True)
        return InjectivityDomain(radius=radius, fixed_point=linearizer.fixed_point,
                                 basis_inverse=linearizer.weights.basis_inverse,
                                 boundary_samples=cfg.boundary_samples, pair_samples=cfg.pair_samples,
                                 min_singular_value=singular)

    ok, singular = _radius_accepted(linearizer, cfg.start_radius, cfg)
    if ok:
        return domain(cfg.start_radius, singular)
    ok, singular = _radius_accepted(linearizer, cfg.min_radius, cfg)
    if not ok:
        raise DegenerateLinearizer(f"no injectivity radius >= {cfg.min_radius:g} found")

    lo, hi, best = cfg.min_radius, cfg.start_radius, singular
    for _ in range(cfg.bisection_steps):
        mid = float(np.sqrt(lo * hi))
        ok, singular = _radius_accepted(linearizer, mid, cfg)
        if ok:
            lo, best = mid, singular
        else:
            hi = mid
    return domain(lo, best)


###############################
# Saturation extension
###############################
def _require_dicritical(linearizer: Linearizer) -> SignConvention:
    fp_class = classify_fixed_point(linearizer.weights)
    if not fp_class.is_dicritical:
        raise NotDicritical(f"fixed point is {fp_class}; extension along orbits needs a dicritical point")
    return fp_class.sign


def contraction_times(sign: SignConvention, budget: SaturationBudget) -> list[complex]:
    """z = i tau with |tau| = 2^k base_depth; |s|^lambda = exp(-2 pi lambda tau) < 1."""
    direction = 1.0 if sign is SignConvention.POSITIVE else -1.0
    return [1j * direction * budget.base_depth * 2 ** k for k in range(budget.doublings + 1)]


def _representable_times(linearizer: Linearizer, times: list[complex]) -> list[complex]:
    """Prefix of the schedule on which s = exp(2 pi i z) and psi^-z stay finite and nonzero."""
    usable = []
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        for z in times:
            s = group_element(z)
            if s == 0 or not np.isfinite(s) or not np.all(np.isfinite(linearizer.psi(-z))):
                break
            usable.append(z)
    if len(usable) < len(times):
        log_stage("EXTEND", f"schedule stops at depth {len(usable) - 1}: exp(2 pi i z) leaves the float range")
    return usable


def _pullback(spec: ActionSpec, linearizer: Linearizer, y: np.ndarray, z: complex,
              integrator: Optional[IntegratorConfig]) -> np.ndarray:
    return linearizer.psi(-z) @ linearizer(spec.flow(z, y, integrator))


def welldefined_check(spec: ActionSpec, linearizer: Linearizer, domain: InjectivityDomain, y,
                      z1: complex, z2: complex, integrator: Optional[IntegratorConfig] = None) -> float:
    """|psi^-z1 F(phi^z1(y)) - psi^-z2 F(phi^z2(y))|_inf, both flowed points inside the domain."""
    y = np.asarray(y, dtype=complex)
    for z in (z1, z2):
        if not domain.contains(spec.flow(z, y, integrator)):
            raise InputError(f"phi^z(y) for z={complex(z):.6g} lies outside the injectivity domain")
    if complex(z1) == complex(z2):
        return 0.0
    gap = _pullback(spec, linearizer, y, z1, integrator) - _pullback(spec, linearizer, y, z2, integrator)
    return float(np.max(np.abs(gap)))


def saturate_extend(spec: ActionSpec, linearizer: Linearizer, domain: InjectivityDomain, y,
                    budget: Optional[SaturationBudget] = None,
                    integrator: Optional[IntegratorConfig] = None) -> SaturationResult:
    """
    T(y) from the first contraction depth that brings phi^z(y) into the domain.

    The result carries the gap to the pullback from the next deeper contraction; a point already
    inside the domain is compared against the first depth instead.
    """
    budget = budget or SaturationBudget()
    sign = _require_dicritical(linearizer)
    y = np.asarray(y, dtype=complex)
    if y.shape != linearizer.fixed_point.shape:
        raise InputError(f"point of shape {y.shape} for a linearizer on C^{linearizer.dimension}")
    times = _representable_times(linearizer, contraction_times(sign, budget))
    if not times:
        raise OrbitNeverEntersDomain("no contraction time of the schedule is representable", budget.doublings)

    if domain.contains(y):
        value = linearizer(y)
        residual = float(np.max(np.abs(value - _pullback(spec, linearizer, y, times[0], integrator))))
        return SaturationResult(point=y, value=value, witness_z=0j, residual=residual, depth_index=-1)

    for k, z in enumerate(times):
        moved = spec.flow(z, y, integrator)
        if not domain.contains(moved):
            continue
        value = linearizer.psi(-z) @ linearizer(moved)
        # the last representable depth is compared against the one before it
        deeper = times[k + 1] if k + 1 < len(times) else times[max(k - 1, 0)]
        residual = float(np.max(np.abs(value - _pullback(spec, linearizer, y, deeper, integrator))))
        return SaturationResult(point=y, value=value, witness_z=z, residual=residual, depth_index=k)

    raise OrbitNeverEntersDomain(f"orbit of {y.tolist()} did not enter the domain within {len(times)} of "
                                 f"{budget.doublings + 1} contraction depths", budget.doublings)


def _invert_near_fixed_point(linearizer: Linearizer, target: np.ndarray, domain: InjectivityDomain,
                             tol: float = 1e-13, max_iter: int = 50) -> Optional[np.ndarray]:
    """Newton solve of F(x) = target from x = p + target; None unless it converges inside the domain."""
    x = linearizer.fixed_point + target
    for _ in range(max_iter):
        gap = linearizer(x) - target
        if np.max(np.abs(gap)) <= tol * (1.0 + np.max(np.abs(target))):
            return x if domain.contains(x) else None
        try:
            x = x - np.linalg.solve(linearizer.jacobian(x), gap)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(x)):
            return None
    return None


def saturate_pullback(spec: ActionSpec, linearizer: Linearizer, domain: InjectivityDomain, w,
                      budget: Optional[SaturationBudget] = None,
                      integrator: Optional[IntegratorConfig] = None) -> SaturationResult:
    """
    Inverse of the extension: phi^-z F^-1(psi^z(w)) for the first contraction z at which
    psi^z(w) has a preimage inside the domain.
    """
    budget = budget or SaturationBudget()
    sign = _require_dicritical(linearizer)
    w = np.asarray(w, dtype=complex)
    for k, z in enumerate([0j] + _representable_times(linearizer, contraction_times(sign, budget))):
        preimage = _invert_near_fixed_point(linearizer, linearizer.psi(z) @ w, domain)
        if preimage is None:
            continue
        value = spec.flow(-z, preimage, integrator)
        residual = float(np.max(np.abs(linearizer.psi(-z) @ linearizer(preimage) - w)))
        return SaturationResult(point=w, value=value, witness_z=z, residual=residual, depth_index=k - 1)
    raise OrbitNeverEntersDomain(f"no preimage of {w.tolist()} found after {budget.doublings} doublings",
                                 budget.doublings)
