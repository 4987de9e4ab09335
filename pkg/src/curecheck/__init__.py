"""curecheck: decide whether a right-censored dataset supports a cure model."""

__version__ = "0.1.0"

from .assessment import (
    AssessmentConfig,
    CureAssessment,
    ModelTableRow,
    VERDICT_APPROPRIATE,
    VERDICT_INSUFFICIENT,
    VERDICT_NONCURE,
    VERDICT_SMALL_CURE,
    VERDICTS,
    receus_assess,
    receus_components,
    receus_ratio,
    select_model_by_aic,
    verdict_from_flags,
)
from .cli import read_csv, write_csv
from .diagnostics import (
    CureFractionEvidence,
    FollowUpTest,
    alpha_n_test,
    deviance_cure_test,
    nonparametric_cure_evidence,
)
from .errors import (
    AssessmentError,
    CurecheckError,
    DomainError,
    FitError,
    ValidationError,
)
from .models import (
    FAMILIES,
    FamilySpec,
    FitOptions,
    ModelFit,
    Params,
    WaldIntervals,
    aic_value,
    fit_model,
    latency_quantile,
    latency_survival,
    log_likelihood,
    population_survival,
    wald_intervals,
)
from .plot import emit_km_plot, km_plot_csv, km_plot_svg
from .report import ReportDocument, build_report, render_json, render_text, report_schema
from .simulate import (
    AdministrativeCensoring,
    CompositeCensoring,
    ExponentialCensoring,
    GroundTruth,
    SimulationConfig,
    UniformCensoring,
    restrict_followup,
    simulate_mixture,
)
from .survival import (
    FollowUpSummary,
    KMStep,
    KaplanMeierCurve,
    SurvivalSample,
    followup_summary,
    kaplan_meier,
    km_survival_at,
    validate_sample,
)

__all__ = [
    "AdministrativeCensoring",
    "AssessmentConfig",
    "AssessmentError",
    "CompositeCensoring",
    "CureAssessment",
    "CureFractionEvidence",
    "CurecheckError",
    "DomainError",
    "ExponentialCensoring",
    "FAMILIES",
    "FamilySpec",
    "FitError",
    "FitOptions",
    "FollowUpSummary",
    "FollowUpTest",
    "GroundTruth",
    "KMStep",
    "KaplanMeierCurve",
    "ModelFit",
    "ModelTableRow",
    "Params",
    "ReportDocument",
    "SimulationConfig",
    "SurvivalSample",
    "UniformCensoring",
    "VERDICTS",
    "VERDICT_APPROPRIATE",
    "VERDICT_INSUFFICIENT",
    "VERDICT_NONCURE",
    "VERDICT_SMALL_CURE",
    "ValidationError",
    "WaldIntervals",
    "aic_value",
    "alpha_n_test",
    "build_report",
    "deviance_cure_test",
    "emit_km_plot",
    "fit_model",
    "followup_summary",
    "kaplan_meier",
    "km_plot_csv",
    "km_plot_svg",
    "km_survival_at",
    "latency_quantile",
    "latency_survival",
    "log_likelihood",
    "nonparametric_cure_evidence",
    "population_survival",
    "read_csv",
    "receus_assess",
    "receus_components",
    "receus_ratio",
    "render_json",
    "render_text",
    "report_schema",
    "restrict_followup",
    "select_model_by_aic",
    "simulate_mixture",
    "validate_sample",
    "verdict_from_flags",
    "wald_intervals",
    "write_csv",
]
