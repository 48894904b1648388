"""Early multivariate time-series classification with interval forests.

The package trains one interval forest per growing prefix window of the
input series and reports how class evidence accumulates over time:
accuracy curves, per-window confusion matrices, temporal class-probability
traces and channel substitution response curves.
"""

from .core import (
    ChannelSpec,
    Dataset,
    DrCifConfig,
    MultivariateSeries,
    NormalizationParams,
    stratified_split,
)
from .data_io import SynthConfig, load_dataset, save_dataset, synthesize
from .drcif import DrCifModel, fit, model_from_dict, model_to_dict
from .earlyclass import (
    WindowGrid,
    WindowSweep,
    accuracy_curve,
    confusion,
    leave_one_out,
    length_histogram,
    temporal_probabilities,
    train_sweep,
)
from .explain import PdpSurface, partial_dependence, pdp_surface
from .features import ATTRIBUTE_NAMES, catch22, summary7, warm_up

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "Dataset",
    "DrCifConfig",
    "MultivariateSeries",
    "NormalizationParams",
    "stratified_split",
    "SynthConfig",
    "load_dataset",
    "save_dataset",
    "synthesize",
    "DrCifModel",
    "fit",
    "model_from_dict",
    "model_to_dict",
    "WindowGrid",
    "WindowSweep",
    "accuracy_curve",
    "confusion",
    "leave_one_out",
    "length_histogram",
    "temporal_probabilities",
    "train_sweep",
    "PdpSurface",
    "partial_dependence",
    "pdp_surface",
    "ATTRIBUTE_NAMES",
    "catch22",
    "summary7",
    "warm_up",
    "__version__",
]
