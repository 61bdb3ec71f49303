"""Single-server scheduling simulator for size-based policies under noisy size estimates."""

from .engine import (
    CompletionRecord,
    ContractViolation,
    active_backend,
    run_simulation,
    simulate,
)
from .metrics import (
    RunSummary,
    ci95,
    empirical_cdf,
    mean_conditional_slowdown,
    mean_sojourn,
    pearson_correlation,
    slowdowns,
    summarize,
)
from .policies import POLICIES, canonical_name, make_policy
from .workload import (
    InvalidParameter,
    JobSpec,
    ParetoSizes,
    TraceError,
    WeibullSizes,
    Workload,
    WorkloadSpec,
    generate,
    ingest_trace,
    scale_to_load,
)

__version__ = "0.1.0"

__all__ = [
    "CompletionRecord",
    "ContractViolation",
    "InvalidParameter",
    "JobSpec",
    "POLICIES",
    "ParetoSizes",
    "RunSummary",
    "TraceError",
    "WeibullSizes",
    "Workload",
    "WorkloadSpec",
    "__version__",
    "active_backend",
    "canonical_name",
    "ci95",
    "empirical_cdf",
    "generate",
    "ingest_trace",
    "make_policy",
    "mean_conditional_slowdown",
    "mean_sojourn",
    "pearson_correlation",
    "run_simulation",
    "scale_to_load",
    "simulate",
    "slowdowns",
    "summarize",
]
