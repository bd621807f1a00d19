"""servicecut: microservice candidate extraction via spectral graph
partitioning of fused call/performance feature graphs."""

from .cost_model import SizeModel, api_estimate, edge_cost
from .feature_graph import (
    AffinityMatrix,
    FeatureGraph,
    attach_perf,
    build_method_graph,
    fuse,
    lift_to_classes,
    to_affinity,
)
from .metrics import QualityReport, cut_value, mq, mqw, score
from .oracle import brute_force_best
from .pipeline import PipelineInputs, SweepResult, partition_accuracy, run_pipeline, sweep
from .records import (
    CallRecord,
    LogParseError,
    PerfRecord,
    TypeCatalog,
    TypeRef,
    parse_call_log,
    parse_perf_log,
    parse_type_catalog,
)
from .spectral import (
    Embedding,
    Laplacian,
    NumericError,
    Partition,
    build_laplacian,
    embed,
    extract_candidates,
    kmeans,
)
from .synth import SynthSpec, generate_system, synth_generate

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix",
    "CallRecord",
    "Embedding",
    "FeatureGraph",
    "Laplacian",
    "LogParseError",
    "NumericError",
    "Partition",
    "PerfRecord",
    "PipelineInputs",
    "QualityReport",
    "SizeModel",
    "SweepResult",
    "SynthSpec",
    "TypeCatalog",
    "TypeRef",
    "api_estimate",
    "attach_perf",
    "brute_force_best",
    "build_laplacian",
    "build_method_graph",
    "cut_value",
    "edge_cost",
    "embed",
    "extract_candidates",
    "fuse",
    "generate_system",
    "kmeans",
    "lift_to_classes",
    "mq",
    "mqw",
    "parse_call_log",
    "parse_perf_log",
    "parse_type_catalog",
    "partition_accuracy",
    "run_pipeline",
    "score",
    "sweep",
    "synth_generate",
    "to_affinity",
]
