"""Heuristic matching of GUI widgets across application versions."""

from .engine import PipelineConfig, Strategy, default_config, execute, load_config
from .errors import (
    ConfigError,
    ConsistencyError,
    FileError,
    FormatError,
    PlanError,
    WidgetMatchError,
)
from .evaluation import MetricsReport, Oracle, evaluate, load_oracle
from .model import FilterConfig, GuiModel, Widget, Window, apply_filters, parse_model
from .state import MatchResult, MatchState

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "FileError",
    "FilterConfig",
    "FormatError",
    "GuiModel",
    "MatchResult",
    "MatchState",
    "MetricsReport",
    "Oracle",
    "PipelineConfig",
    "PlanError",
    "Strategy",
    "WidgetMatchError",
    "Widget",
    "Window",
    "apply_filters",
    "default_config",
    "evaluate",
    "execute",
    "load_config",
    "load_oracle",
    "parse_model",
]
