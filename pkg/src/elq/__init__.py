"""Headless element queries: a small DOM, a CSS subset, a layout model with
an explicit event loop, resize detectors, and the ELQ plugin engine."""

from .batch import BatchProcessor, double_width, double_width_naive
from .core import (
    MAX_SETTLE_ROUNDS,
    BehaviorProps,
    Breakpoint,
    BreakpointState,
    CycleHistory,
    Elq,
    PluginDefinition,
    compute_states,
    detect_cycle,
)
from .detection import OBJECT_MEMORY_MB, ResizeDetection
from .dom import Document, Element, Mutation, Node, parse_fragment, parse_markup, serialize
from .errors import ElqError
from .harness import Config, Report, bench, run, run_scenario, validate, validate_source
from .layout import Box, Counters, EventLoop, LayoutEngine, Page
from .plugins import DEFAULT_PLUGINS, install_default_plugins
from .style import Length, Percent, Stylesheet, cascade, matches, parse_selector, parse_stylesheet

import logging as _logging

_logging.getLogger(__name__).addHandler(_logging.NullHandler())

__version__ = "0.1.0"

__all__ = [
    "BatchProcessor", "double_width", "double_width_naive",
    "MAX_SETTLE_ROUNDS", "BehaviorProps", "Breakpoint", "BreakpointState", "CycleHistory",
    "Elq", "PluginDefinition", "compute_states", "detect_cycle",
    "OBJECT_MEMORY_MB", "ResizeDetection",
    "Document", "Element", "Mutation", "Node", "parse_fragment", "parse_markup", "serialize",
    "ElqError",
    "Config", "Report", "bench", "run", "run_scenario", "validate", "validate_source",
    "Box", "Counters", "EventLoop", "LayoutEngine", "Page",
    "DEFAULT_PLUGINS", "install_default_plugins",
    "Length", "Percent", "Stylesheet", "cascade", "matches", "parse_selector", "parse_stylesheet",
]
