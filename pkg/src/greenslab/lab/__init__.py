from .convergence import ConvergenceLevel, ConvergenceReport, run_oracle_check
from .pipeline import AnalysisPipeline, AnalysisResult, problem_from_config
from .report import analysis_report, convergence_report, emit_heatmap_csv, save_report, sweep_report
from .settings import RunConfig, SweepSettings
from .sweep import SweepPoint, SweepReport, Threshold, run_sweep, sweep_values

__all__ = [
    "AnalysisPipeline",
    "AnalysisResult",
    "ConvergenceLevel",
    "ConvergenceReport",
    "RunConfig",
    "SweepPoint",
    "SweepReport",
    "SweepSettings",
    "Threshold",
    "analysis_report",
    "convergence_report",
    "emit_heatmap_csv",
    "problem_from_config",
    "run_oracle_check",
    "run_sweep",
    "save_report",
    "sweep_report",
    "sweep_values",
]
