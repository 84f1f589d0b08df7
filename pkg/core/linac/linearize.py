"""
Linearizers of C*-actions by averaging over the circle |s| = 1.

For a C*-action phi with fixed point p the map

    F(x) = integral over t in [0, 1] of D(phi^-t)(p) [phi^t(x) - p] dt

satisfies F(p) = 0, DF(p) = Id and psi^z o F = F o phi^z, where psi^z = D(phi^z)(p) is the
linear part. The symbolic backend reads the average off the Laurent coefficients of a closed
form; the numeric backend applies the composite trapezoid rule to the flow.
"""
import itertools
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from linac_logger import log_stage
from .action import ActionSpec, group_element, linear_part
from .basemodels import ConjugacyReport, FitReport, NormalizationReport, WeightData
from .config import FD_POINTS, FD_RADIUS, MAX_WORKERS, WEIGHT_ROUNDING_TOL
from .exception import DegreeTooHighForGrid, InputError, IntegrationFailure, WeightsUnreliable
from .flow import variational_matrix
from .poly import ActionPoly, PolyMap, grlex_key, monomial_values
from .run_configs import ConjugacySampling, FitGridConfig, IntegratorConfig, QuadratureConfig
from .sampling import circle_nodes, complex_times, make_rng, polydisc, tensor_circle_grid


def holomorphic_jacobian(f, x, radius: float = FD_RADIUS, points: int = FD_POINTS) -> np.ndarray:
    """
    DF(x) from the Cauchy integral on a small circle about x in every coordinate direction.

    df/dx_j(x) = mean_k exp(-i theta_k) f(x + r exp(i theta_k) e_j) / r
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    nodes = circle_nodes(points, radius)
    cols = []
    for j in range(n):
        shifted = np.repeat(x[None, :], points, axis=0)
        shifted[:, j] += nodes
        values = np.asarray(f(shifted))
        cols.append(np.mean(values / nodes[:, None], axis=0))
    return np.stack(cols, axis=-1)


class Linearizer(ABC):
    """
    A map F with F(p) = 0 and DF(p) = Id conjugating an action to its linear part.

    psi^z = A diag(exp(2 pi i lambda z)) A^-1 is the linear action on the target side.
    """

    def __init__(self, fixed_point, weights: WeightData):
        self.fixed_point = np.asarray(fixed_point, dtype=complex)
        self.weights = weights

    @property
    def dimension(self) -> int:
        return self.fixed_point.shape[0]

    @abstractmethod
    def __call__(self, x) -> np.ndarray:
        """F at one point (shape (n,)) or at a batch (shape (m, n))."""

    @abstractmethod
    def jacobian(self, x) -> np.ndarray:
        """DF at one point."""

    def psi(self, z) -> np.ndarray:
        """Matrix of the linear action at additive time z."""
        if complex(z) == 0:
            return np.eye(self.dimension, dtype=complex)
        return self.weights.linear_action(z)


class PolynomialLinearizer(Linearizer):
    def __init__(self, polymap: PolyMap, fixed_point, weights: WeightData, fit: Optional[FitReport] = None):
        super().__init__(fixed_point, weights)
        if polymap.dimension != self.dimension:
            raise InputError(f"linearizer on C^{polymap.dimension} with a fixed point in C^{self.dimension}")
        self.polymap = polymap
        self.fit = fit

    def __call__(self, x) -> np.ndarray:
        return self.polymap(x)

    def jacobian(self, x) -> np.ndarray:
        return self.polymap.jacobian(x)

    def __repr__(self) -> str:
        return f"PolynomialLinearizer({self.polymap!r}, weights={list(self.weights.weights)})"


class AveragingLinearizer(Linearizer):
    """Point values of F by trapezoid averaging; batches fan out over a thread pool."""

    def __init__(self, spec: ActionSpec, weights: WeightData, quadrature: Optional[QuadratureConfig] = None,
                 integrator: Optional[IntegratorConfig] = None, workers: int = MAX_WORKERS):
        super().__init__(spec.fixed_point, weights)
        self.spec = spec
        self.quadrature = quadrature or QuadratureConfig()
        self.integrator = integrator or IntegratorConfig()
        self.workers = max(1, int(workers))

    def _one(self, x) -> np.ndarray:
        return bochner_numeric(self.spec, x, self.quadrature, self.integrator)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.ndim == 1:
            return self._one(x)
        if self.workers == 1 or len(x) == 1:
            return np.array([self._one(row) for row in x])
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            return np.array(list(executor.map(self._one, x)))

    def jacobian(self, x) -> np.ndarray:
        return holomorphic_jacobian(self, x)

    def to_polynomial(self, max_deg: int, grid: Optional[FitGridConfig] = None) -> PolynomialLinearizer:
        polymap, fit = reconstruct_polymap(self.spec, max_deg, grid, self.quadrature, self.integrator,
                                           self.workers, weights=self.weights)
        return PolynomialLinearizer(polymap, self.fixed_point, self.weights, fit)


###############################
# Symbolic backend
###############################
def _require_reliable(weights: WeightData, tol: float) -> None:
    if weights.residual > tol:
        raise WeightsUnreliable(f"weight residual {weights.residual:.3e} above {tol:.0e}, averaging refused")


def bochner_symbolic(action: ActionPoly, weights: WeightData, fixed_point=None,
                     tol: float = WEIGHT_ROUNDING_TOL) -> PolynomialLinearizer:
    """
    Exact average of a closed form.

    In the frame u = A^-1 (x - p), coordinate i of the average keeps, for every monomial u^alpha,
    the s^0 coefficient of s^-lambda_i c_{i,alpha}(s). Back in x: F(x) = A Fhat(A^-1 (x - p)).
    """
    _require_reliable(weights, tol)
    n = action.dimension
    p = np.zeros(n, dtype=complex) if fixed_point is None else np.asarray(fixed_point, dtype=complex)
    basis = weights.basis
    diagonal_frame = np.array_equal(basis, np.eye(n))

    model = action.translate(p)
    if not diagonal_frame:
        model = model.conjugate_linear(basis)

    coords = []
    for i in range(n):
        lam = weights.weights[i]
        coords.append({alpha: c.shift(-lam).circle_average() for alpha, c in model.items(i)})
    f_hat = PolyMap(n, coords)

    if diagonal_frame:
        polymap = f_hat if not np.any(p) else f_hat.compose(PolyMap.affine(np.eye(n), -p))
    else:
        inverse = weights.basis_inverse
        polymap = f_hat.compose(PolyMap.affine(inverse, -inverse @ p)).transform(basis)
    log_stage("AVERAGE", f"symbolic average with {sum(len(c) for c in polymap.coords)} terms")
    return PolynomialLinearizer(polymap, p, weights)


###############################
# Numeric backend
###############################
class _Integrand:
    """t -> D(phi^-t)(p) [phi^t(x) - p] on a uniform grid of t in [0, 1)."""

    def __init__(self, spec: ActionSpec, x: np.ndarray, integrator: IntegratorConfig):
        self.spec = spec
        self.x = x
        self.integrator = integrator
        self.linear = linear_part(spec) if spec.is_closed_form else None

    def _inverse_linear(self, t: float) -> np.ndarray:
        if self.linear is not None:
            return self.linear.at(group_element(-t))
        return variational_matrix(self.spec.field, -t, self.spec.fixed_point)

    def values(self, nodes: int) -> np.ndarray:
        ts = np.arange(nodes) / nodes
        states = self.spec.flow_along(self.x, ts, self.integrator)
        displaced = states - self.spec.fixed_point
        return np.array([self._inverse_linear(t) @ d for t, d in zip(ts, displaced)])


def bochner_numeric(spec: ActionSpec, x, quadrature: Optional[QuadratureConfig] = None,
                    integrator: Optional[IntegratorConfig] = None) -> np.ndarray:
    """
    Composite trapezoid rule for F(x) on t in [0, 1].

    The integrand is 1-periodic, so the rule with N nodes is exact once N exceeds its largest
    Laurent frequency. Adaptive mode evaluates the integrand once on 2N nodes, compares the N
    and 2N rules and doubles N until they agree or the node cap is reached.
    """
    quadrature = quadrature or QuadratureConfig()
    integrator = integrator or IntegratorConfig()
    if quadrature.nodes < 2:
        raise InputError(f"trapezoid rule needs at least 2 nodes, got {quadrature.nodes}")
    x = np.asarray(x, dtype=complex)
    if x.shape != spec.fixed_point.shape:
        raise InputError(f"point of shape {x.shape} for an action on C^{spec.dimension}")
    if np.array_equal(x, spec.fixed_point):
        return np.zeros_like(x)

    integrand = _Integrand(spec, x, integrator)
    if not quadrature.adaptive:
        return integrand.values(quadrature.nodes).mean(axis=0)

    nodes = quadrature.nodes
    while True:
        values = integrand.values(2 * nodes)
        coarse, fine = values[::2].mean(axis=0), values.mean(axis=0)
        scale = 1.0 + float(np.max(np.abs(fine)))
        if spec.is_closed_form:
            threshold = quadrature.agreement * scale
        else:
            threshold = max(quadrature.agreement, 10 * integrator.rel_tol * scale)
        gap = float(np.max(np.abs(fine - coarse)))
        if gap <= threshold:
            return fine
        if 4 * nodes > quadrature.max_nodes:
            log_stage("AVERAGE", f"node cap {quadrature.max_nodes} reached, last gap {gap:.3e}", level="WARNING")
            return fine
        nodes *= 2


###############################
# Polynomial reconstruction
###############################
def _fit_exponents(n: int, max_deg: int, min_deg: int) -> list[tuple[int, ...]]:
    exps = [alpha for alpha in itertools.product(range(max_deg + 1), repeat=n) if min_deg <= sum(alpha) <= max_deg]
    return sorted(exps, key=grlex_key)


def reconstruct_polymap(spec: ActionSpec, max_deg: int, grid: Optional[FitGridConfig] = None,
                        quadrature: Optional[QuadratureConfig] = None,
                        integrator: Optional[IntegratorConfig] = None,
                        workers: int = MAX_WORKERS, weights: Optional[WeightData] = None) -> tuple[PolyMap, FitReport]:
    """
    Least squares fit of F up to total degree max_deg from averaged point values.

    Samples sit on a tensor grid of circle nodes about p. With normalization pinned, F(p) = 0
    and DF(p) = Id are imposed and only the terms of degree >= 2 are fitted. Columns are scaled
    by r^|alpha|; the fit is refused when their condition number exceeds the configured limit.
    """
    grid = grid or FitGridConfig()
    if max_deg < 1:
        raise InputError(f"max_deg must be at least 1, got {max_deg}")
    n, p = spec.dimension, spec.fixed_point
    per_axis = grid.points_per_axis or max_deg + 2
    offsets = tensor_circle_grid(n, per_axis, grid.radius)

    min_deg = 2 if grid.pin_normalization else 0
    exps = _fit_exponents(n, max_deg, min_deg)
    linearizer = AveragingLinearizer(spec, weights or _unit_weights(n), quadrature, integrator, workers)
    values = linearizer(p + offsets)
    targets = values - offsets if grid.pin_normalization else values

    if exps:
        design = monomial_values(offsets / grid.radius, np.array(exps))
        condition = _column_condition(design)
        if not np.isfinite(condition) or condition > grid.cond_limit:
            raise DegreeTooHighForGrid(
                f"fit matrix condition {condition:.3e} above {grid.cond_limit:.0e}; "
                f"lower --max-deg or use more than {per_axis} points per axis", condition)
        solution, *_ = np.linalg.lstsq(design, targets, rcond=None)
        residual = float(np.max(np.abs(design @ solution - targets)))
        scales = grid.radius ** np.array([sum(a) for a in exps], dtype=float)
        coeffs = solution / scales[:, None]
    else:
        condition, coeffs = 1.0, np.zeros((0, n))
        residual = float(np.max(np.abs(targets)))

    coords = []
    for i in range(n):
        coord = dict(zip(exps, coeffs[:, i]))
        if grid.pin_normalization:
            coord[tuple(1 if j == i else 0 for j in range(n))] = 1.0
        coords.append(coord)
    local = PolyMap(n, coords).chop(grid.zero_threshold)
    polymap = local if not np.any(p) else local.compose(PolyMap.affine(np.eye(n), -p))

    report = FitReport(residual=residual, condition=condition, grid_size=len(offsets),
                       max_degree=max_deg, unknowns=len(exps) * n)
    log_stage("FIT", f"degree {max_deg}: residual {residual:.3e}, condition {condition:.2e}")
    return polymap, report


def _column_condition(design: np.ndarray) -> float:
    # fewer rows than columns leaves a null space that cond() over the nonzero spectrum misses
    singular = np.linalg.svd(design, compute_uv=False)
    if design.shape[0] < design.shape[1] or singular[-1] == 0:
        return float("inf")
    return float(singular[0] / singular[-1])


def _unit_weights(n: int) -> WeightData:
    return WeightData(weights=tuple([1] * n), basis=np.eye(n, dtype=complex), residual=0.0)


###############################
# Certificates
###############################
def conjugacy_samples(spec: ActionSpec, sampling: Optional[ConjugacySampling] = None) -> tuple[np.ndarray, np.ndarray]:
    sampling = sampling or ConjugacySampling()
    rng = make_rng(sampling.seed)
    zs = complex_times(rng, sampling.count, sampling.re_z, sampling.im_z)
    xs = polydisc(rng, sampling.count, spec.dimension, sampling.x_radius, center=spec.fixed_point)
    return zs, xs


def verify_conjugacy(linearizer: Linearizer, spec: ActionSpec, z_samples=None, x_samples=None,
                     integrator: Optional[IntegratorConfig] = None) -> ConjugacyReport:
    """Residuals |psi^z(F(x)) - F(phi^z(x))|_inf over paired samples (z_k, x_k)."""
    if z_samples is None or x_samples is None:
        z_samples, x_samples = conjugacy_samples(spec)
    zs = np.atleast_1d(np.asarray(z_samples, dtype=complex))
    xs = np.atleast_2d(np.asarray(x_samples, dtype=complex))
    if len(zs) != len(xs):
        raise InputError(f"{len(zs)} times paired with {len(xs)} points")

    residuals, relatives = np.empty(len(zs)), np.empty(len(zs))
    for k, (z, x) in enumerate(zip(zs, xs)):
        try:
            moved = spec.flow(z, x, integrator)
        except IntegrationFailure as e:
            raise IntegrationFailure(f"conjugacy sample {k} (z={z:.6g})", e.reached, e.steps) from e
        rhs = linearizer(moved)
        lhs = linearizer.psi(z) @ linearizer(x)
        residuals[k] = float(np.max(np.abs(lhs - rhs)))
        relatives[k] = residuals[k] / max(1.0, float(np.max(np.abs(rhs))))

    worst = int(np.argmax(residuals))
    report = ConjugacyReport(max_residual=float(residuals[worst]), mean_residual=float(residuals.mean()),
                             sample_count=len(zs), worst_sample=(complex(zs[worst]), xs[worst].copy()),
                             max_relative=float(relatives.max()))
    log_stage("CONJUGACY", f"max residual {report.max_residual:.3e} over {len(zs)} samples")
    return report


def normalization_report(linearizer: Linearizer) -> NormalizationReport:
    """|F(p)|_inf and |DF(p) - Id|_max."""
    p = linearizer.fixed_point
    value = float(np.max(np.abs(linearizer(p))))
    defect = float(np.max(np.abs(linearizer.jacobian(p) - np.eye(linearizer.dimension))))
    return NormalizationReport(value_at_fixed_point=value, jacobian_defect=defect)
