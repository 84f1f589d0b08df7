from .__version__ import __version__
from .exception import (
    LinacError,
    InputError,
    SpecFormatError,
    DomainError,
    NotAPeriodicFlow,
    SuspectWeights,
    NilpotentPartDetected,
    WeightsUnreliable,
    IntegrationFailure,
    DegreeTooHighForGrid,
    DegenerateLinearizer,
    NotDicritical,
    OrbitNeverEntersDomain,
)
from .poly import (
    LaurentPoly,
    PolyMap,
    ActionPoly,
    poly_eval,
    action_eval,
    laurent_circle_average,
)
from .basemodels import (
    ActionKind,
    FixedPointTag,
    SignConvention,
    FixedPointClass,
    WeightData,
    ValidationReport,
    PeriodicityReport,
    ConjugacyReport,
    NormalizationReport,
    FitReport,
    InjectivityDomain,
    SaturationResult,
)
from .run_configs import (
    IntegratorConfig,
    QuadratureConfig,
    SamplingConfig,
    PeriodicityConfig,
    ConjugacySampling,
    FitGridConfig,
    InjectivitySearchConfig,
    SaturationBudget,
)
from .flow import (
    FlowQuery,
    integrate_flow,
    integrate_path,
    variational_matrix,
    periodicity_check,
    orbit_samples,
)
from .action import (
    ActionSpec,
    LinearPart,
    validate_action,
    group_law_residual,
    linear_part,
    extract_weights,
    classify_fixed_point,
    group_element,
)
from .linearize import (
    Linearizer,
    PolynomialLinearizer,
    AveragingLinearizer,
    bochner_symbolic,
    bochner_numeric,
    reconstruct_polymap,
    verify_conjugacy,
    conjugacy_samples,
    normalization_report,
)
from .extend import (
    injectivity_radius,
    saturate_extend,
    welldefined_check,
    saturate_pullback,
)
from .spec_io import (
    SpecDocument,
    parse_document,
    load_document,
    load_action_spec,
    load_linearizer,
    spec_to_document,
    linearizer_to_document,
    dump_document,
    load_points,
)
from .report import ReportFile

__all__ = [
    "__version__",
    "LinacError", "InputError", "SpecFormatError", "DomainError", "NotAPeriodicFlow", "SuspectWeights",
    "NilpotentPartDetected", "WeightsUnreliable", "IntegrationFailure", "DegreeTooHighForGrid",
    "DegenerateLinearizer", "NotDicritical", "OrbitNeverEntersDomain",
    "LaurentPoly", "PolyMap", "ActionPoly", "poly_eval", "action_eval", "laurent_circle_average",
    "ActionKind", "FixedPointTag", "SignConvention", "FixedPointClass", "WeightData", "ValidationReport",
    "PeriodicityReport", "ConjugacyReport", "NormalizationReport", "FitReport", "InjectivityDomain",
    "SaturationResult",
    "IntegratorConfig", "QuadratureConfig", "SamplingConfig", "PeriodicityConfig", "ConjugacySampling",
    "FitGridConfig", "InjectivitySearchConfig", "SaturationBudget",
    "FlowQuery", "integrate_flow", "integrate_path", "variational_matrix", "periodicity_check", "orbit_samples",
    "ActionSpec", "LinearPart", "validate_action", "group_law_residual", "linear_part", "extract_weights",
    "classify_fixed_point", "group_element",
    "Linearizer", "PolynomialLinearizer", "AveragingLinearizer", "bochner_symbolic", "bochner_numeric",
    "reconstruct_polymap", "verify_conjugacy", "conjugacy_samples", "normalization_report",
    "injectivity_radius", "saturate_extend", "welldefined_check", "saturate_pullback",
    "SpecDocument", "parse_document", "load_document", "load_action_spec", "load_linearizer",
    "spec_to_document", "linearizer_to_document", "dump_document", "load_points",
    "ReportFile",
]
