"""
Complex-time flow of a polynomial vector field.

The solution of dx/dz = X(x) at complex time z is followed along straight segments of the
z-plane. Each segment 0 -> dz is reparametrized by tau in [0, 1], dx/dtau = dz X(x), and the
state is handed to the real DOP853 stepper of scipy as the 2n reals (Re x, Im x).
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.integrate import DOP853

from linac_logger import linac_logger, log_stage
from .basemodels import PeriodicityReport
from .config import SEMISIMPLE_COND_LIMIT
from .exception import IntegrationFailure, InputError
from .poly import PolyMap
from .run_configs import IntegratorConfig, PeriodicityConfig
from .sampling import make_rng, polydisc


@dataclass(frozen=True)
class FlowQuery:
    z: complex
    x0: np.ndarray


def _pack(x: np.ndarray) -> np.ndarray:
    return np.concatenate([x.real, x.imag])


def _unpack(u: np.ndarray, n: int) -> np.ndarray:
    return u[:n] + 1j * u[n:]


class _PathIntegrator:
    """Shared step budget for a sequence of segments starting at one point."""

    def __init__(self, field: PolyMap, cfg: IntegratorConfig):
        self.field = field
        self.cfg = cfg
        self.steps = 0

    def segment(self, x: np.ndarray, z_start: complex, dz: complex) -> np.ndarray:
        n = self.field.dimension
        if dz == 0:
            return x

        def rhs(_tau, u):
            return _pack(dz * self.field(_unpack(u, n)))

        first_step = None if self.cfg.initial_step is None else min(self.cfg.initial_step, 1.0)
        solver = DOP853(rhs, 0.0, _pack(x), 1.0, rtol=self.cfg.rel_tol, atol=self.cfg.abs_tol,
                        first_step=first_step)
        while solver.status == "running":
            if self.steps >= self.cfg.max_steps:
                raise IntegrationFailure(f"step budget of {self.cfg.max_steps} exhausted",
                                         z_start + solver.t * dz, self.steps)
            solver.step()
            self.steps += 1
            if solver.status == "failed":
                raise IntegrationFailure("step size underflow", z_start + solver.t * dz, self.steps)
            if not np.all(np.isfinite(solver.y)) or np.max(np.abs(solver.y)) > self.cfg.escape_norm:
                raise IntegrationFailure(f"state left the ball of radius {self.cfg.escape_norm:g}",
                                         z_start + solver.t * dz, self.steps)
        return _unpack(solver.y, n)


def _check_point(field: PolyMap, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=complex)
    if x0.ndim != 1 or x0.shape[0] != field.dimension:
        raise InputError(f"initial point of shape {x0.shape} for a field on C^{field.dimension}")
    return x0


def integrate_flow(field: PolyMap, query: FlowQuery, cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """phi^z(x0) for the flow of `field`, integrated along the straight segment 0 -> z."""
    cfg = cfg or IntegratorConfig()
    x0 = _check_point(field, query.x0)
    z = complex(query.z)
    if z == 0:
        return x0.copy()
    return _PathIntegrator(field, cfg).segment(x0, 0j, z)


def integrate_path(field: PolyMap, x0, waypoints: Sequence[complex],
                   cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """
    States at successive complex times, one integration through all of them.

    The path starts at z = 0 and runs along straight segments through `waypoints`; the returned
    array has one row per waypoint. One step budget covers the whole path.
    """
    cfg = cfg or IntegratorConfig()
    x = _check_point(field, x0)
    integrator = _PathIntegrator(field, cfg)
    out = np.empty((len(waypoints), field.dimension), dtype=complex)
    previous = 0j
    for k, z in enumerate(waypoints):
        z = complex(z)
        x = integrator.segment(x, previous, z - previous)
        out[k] = x
        previous = z
    return out


def linear_flow_matrix(generator, z: complex, cond_limit: float = SEMISIMPLE_COND_LIMIT) -> np.ndarray:
    """exp(z D) by diagonalization, falling back to scaling and squaring for defective D."""
    d = np.asarray(generator, dtype=complex)
    n = d.shape[0]
    z = complex(z)
    if z == 0:
        return np.eye(n, dtype=complex)
    if np.count_nonzero(d - np.diag(np.diag(d))) == 0:
        return np.diag(np.exp(z * np.diag(d)))
    eigvals, vecs = np.linalg.eig(d)
    if np.linalg.cond(vecs) <= cond_limit:
        return (vecs * np.exp(z * eigvals)) @ np.linalg.inv(vecs)
    linac_logger.warning("linear part is not diagonalizable, using scaling and squaring")
    return scipy.linalg.expm(z * d)


def variational_matrix(field: PolyMap, z: complex, fixed_point) -> np.ndarray:
    """D(phi^z)(p) = exp(z DX(p))."""
    p = _check_point(field, fixed_point)
    return linear_flow_matrix(field.jacobian(p), z)


def periodicity_check(field: PolyMap, samples=None, cfg: Optional[IntegratorConfig] = None,
                      center=None) -> PeriodicityReport:
    """
    Max over the sample points of |phi^1(x) - x|.

    `samples` is either an explicit (m, n) array of points or a PeriodicityConfig, in which case
    the points are drawn in the polydisc of the configured radius about `center`.
    """
    cfg = cfg or IntegratorConfig()
    if samples is None or isinstance(samples, PeriodicityConfig):
        pc = samples or PeriodicityConfig()
        points = polydisc(make_rng(pc.seed), pc.count, field.dimension, pc.radius, center)
        tolerance = pc.tolerance
    else:
        points = np.atleast_2d(np.asarray(samples, dtype=complex))
        tolerance = PeriodicityConfig().tolerance

    worst, worst_point = 0.0, None
    for x in points:
        residual = float(np.max(np.abs(integrate_flow(field, FlowQuery(1.0, x), cfg) - x)))
        if worst_point is None or residual > worst:
            worst, worst_point = residual, x
    passed = worst <= tolerance
    log_stage("PERIODICITY", f"max residual {worst:.3e} over {len(points)} points", passed=passed)
    return PeriodicityReport(max_residual=worst, sample_count=len(points), tolerance=tolerance,
                             passed=passed, worst_point=worst_point)


def sample_path(waypoints: Sequence[complex], per_leg: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Parameter t and complex time z along the piecewise-linear path 0 -> w_1 -> ... -> w_m.

    Leg k covers t in [k, k+1]; every leg contributes `per_leg` evenly spaced samples and the
    start point t = 0 comes first.
    """
    if per_leg < 1:
        raise InputError("at least one sample per leg is required")
    ts, zs = [0.0], [0j]
    previous = 0j
    for k, w in enumerate(waypoints):
        w = complex(w)
        frac = np.arange(1, per_leg + 1) / per_leg
        ts.extend(k + frac)
        zs.extend(previous + frac * (w - previous))
        previous = w
    return np.asarray(ts), np.asarray(zs, dtype=complex)


def orbit_samples(flow_along: Callable[[np.ndarray, np.ndarray], np.ndarray], x0,
                  waypoints: Sequence[complex], per_leg: int = 16) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, z, states) along a path; flow_along(x0, zs) returns phi^z(x0) for every z in zs."""
    ts, zs = sample_path(waypoints, per_leg)
    states = flow_along(np.asarray(x0, dtype=complex), zs)
    return ts, zs, states
