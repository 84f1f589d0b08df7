from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Any

import numpy as np


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def vector_pairs(v) -> list[list[float]]:
    return [complex_pair(z) for z in np.asarray(v, dtype=complex).ravel()]


def matrix_pairs(m) -> list[list[list[float]]]:
    return [vector_pairs(row) for row in np.asarray(m, dtype=complex)]


###############################
# Action models
###############################
class ActionKind(Enum):
    CLOSED_FORM = "closed_form"
    VECTOR_FIELD = "vector_field"


class FixedPointTag(Enum):
    DICRITICAL = "Dicritical"
    ZERO_WEIGHT = "ZeroWeight"
    MIXED_SIGNS = "MixedSigns"


class SignConvention(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


@dataclass(frozen=True)
class FixedPointClass:
    tag: FixedPointTag
    sign: Optional[SignConvention] = None

    @property
    def is_dicritical(self) -> bool:
        return self.tag is FixedPointTag.DICRITICAL

    def __str__(self) -> str:
        return f"{self.tag.value}({self.sign.value})" if self.sign else self.tag.value

    def to_dict(self) -> dict:
        return {"tag": self.tag.value, "sign": self.sign.value if self.sign else None}


@dataclass(frozen=True)
class WeightData:
    """
    Integer weights and the basis A with A^-1 L(s) A = diag(s^lambda_j).

    residual is the largest distance of an eigenvalue ratio (or of a basis check) from
    the integer model.
    """
    weights: tuple[int, ...]
    basis: np.ndarray
    residual: float
    condition: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def basis_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.basis)

    def linear_action(self, z) -> np.ndarray:
        """psi^z = A diag(exp(2 pi i lambda_j z)) A^-1."""
        phase = np.exp(2j * np.pi * np.asarray(self.weights) * complex(z))
        return (self.basis * phase) @ self.basis_inverse

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "basis": matrix_pairs(self.basis),
            "residual": float(self.residual),
            "condition": float(self.condition),
        }


@dataclass
class ValidationReport:
    kind: ActionKind
    residuals: dict[str, float]
    tolerance: float
    sample_count: int
    passed: bool
    worst_sample: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "tolerance": self.tolerance,
            "sample_count": self.sample_count,
            "passed": self.passed,
            "worst_sample": self.worst_sample,
        }


@dataclass
class PeriodicityReport:
    max_residual: float
    sample_count: int
    tolerance: float
    passed: bool
    worst_point: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {
            "max_residual": float(self.max_residual),
            "sample_count": self.sample_count,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "worst_point": None if self.worst_point is None else vector_pairs(self.worst_point),
        }


###############################
# Linearizer models
###############################
@dataclass
class ConjugacyReport:
    max_residual: float
    mean_residual: float
    sample_count: int
    worst_sample: tuple[complex, np.ndarray]
    max_relative: float = 0.0

    def to_dict(self) -> dict:
        z, x = self.worst_sample
        return {
            "max_residual": float(self.max_residual),
            "mean_residual": float(self.mean_residual),
            "max_relative": float(self.max_relative),
            "sample_count": self.sample_count,
            "worst_sample": {"z": complex_pair(z), "x": vector_pairs(x)},
        }


@dataclass
class NormalizationReport:
    value_at_fixed_point: float
    jacobian_defect: float

    def within(self, value_tol: float = 1e-13, jacobian_tol: float = 1e-11) -> bool:
        return self.value_at_fixed_point <= value_tol and self.jacobian_defect <= jacobian_tol

    def to_dict(self) -> dict:
        return {"value_at_fixed_point": float(self.value_at_fixed_point),
                "jacobian_defect": float(self.jacobian_defect)}


@dataclass
class FitReport:
    residual: float
    condition: float
    grid_size: int
    max_degree: int
    unknowns: int

    def to_dict(self) -> dict:
        return {
            "residual": float(self.residual),
            "condition": float(self.condition),
            "grid_size": self.grid_size,
            "max_degree": self.max_degree,
            "unknowns": self.unknowns,
        }


###############################
# Extension models
###############################
@dataclass
class InjectivityDomain:
    """Polydisc of the given radius about p in the diagonalizing frame."""
    radius: float
    fixed_point: np.ndarray
    basis_inverse: np.ndarray
    boundary_samples: int = 0
    pair_samples: int = 0
    min_singular_value: float = np.inf

    def frame(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return (x - self.fixed_point) @ self.basis_inverse.T

    def contains(self, x) -> bool:
        return bool(np.max(np.abs(self.frame(x))) < self.radius)

    def to_dict(self) -> dict:
        return {
            "radius": float(self.radius),
            "boundary_samples": self.boundary_samples,
            "pair_samples": self.pair_samples,
            "min_singular_value": float(self.min_singular_value),
        }


@dataclass
class SaturationResult:
    point: np.ndarray
    value: np.ndarray
    witness_z: complex
    residual: float
    depth_index: int = -1

    def to_dict(self) -> dict:
        return {
            "y": vector_pairs(self.point),
            "value": vector_pairs(self.value),
            "witness_z": complex_pair(self.witness_z),
            "residual": float(self.residual),
        }
