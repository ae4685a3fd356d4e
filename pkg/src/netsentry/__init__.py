"""netsentry: streaming intrusion detection with ensemble scoring,
behavioral profiling, and adaptive deception responses."""

__version__ = "0.1.0"

from .ensemble import DetectorScores, EnsembleWeights, ThresholdConfig, classify, combine, tune_threshold
from .flows import Dataset, FlowRecord, Standardizer
from .orchestrator import Engine, EventOutcome, TrafficEvent
from .profiler import Profile, ProfileClass, ProfileStore
from .signal_bus import Signal, SignalBus

__all__ = [
    "Dataset",
    "DetectorScores",
    "Engine",
    "EnsembleWeights",
    "EventOutcome",
    "FlowRecord",
    "Profile",
    "ProfileClass",
    "ProfileStore",
    "Signal",
    "SignalBus",
    "Standardizer",
    "ThresholdConfig",
    "TrafficEvent",
    "classify",
    "combine",
    "tune_threshold",
    "__version__",
]
