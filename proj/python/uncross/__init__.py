"""Low-stress graph layouts with edge crossing reduction."""

from ._core import (
    BenchmarkInstance,
    Edge,
    GenerationError,
    GraphDocument,
    GraphInstance,
    Hyperplane,
    IoError,
    PenaltyParams,
    RunReport,
    SeparationResult,
    SmacofResult,
    TraceEntry,
    WeightMatrix,
    build_weights,
    count_crossings,
    crsm_run,
    generate_planar_instance,
    load_graph,
    make_graph_document,
    render_svg,
    save_graph,
    segments_intersect,
    separation_objective,
    smacof_embed,
    solve_separation,
    stress,
)

__all__ = [
    "BenchmarkInstance",
    "Edge",
    "GenerationError",
    "GraphDocument",
    "GraphInstance",
    "Hyperplane",
    "IoError",
    "PenaltyParams",
    "RunReport",
    "SeparationResult",
    "SmacofResult",
    "TraceEntry",
    "WeightMatrix",
    "build_weights",
    "count_crossings",
    "crsm_run",
    "generate_planar_instance",
    "load_graph",
    "make_graph_document",
    "render_svg",
    "save_graph",
    "segments_intersect",
    "separation_objective",
    "smacof_embed",
    "solve_separation",
    "stress",
]
