"""Nuclear-feature classification of multichannel EEG trials.

Pipeline: cross-channel normalization -> channel Gram ("nuclear") matrix ->
dominant singular values as features -> class-means minimum-distance
classifier, with cross-validation, ROC/AUC and scatter-matrix analysis.
"""
from .classify import CMMDCModel, fit
from .errors import (
    ConfigError,
    DataError,
    DecompositionError,
    DimensionMismatchError,
    NonFiniteError,
    NotPSDError,
    NucleegError,
)
from .evaluation import (
    ConfusionCounts,
    EvaluationReport,
    FoldPlan,
    MetricsReport,
    ScatterAnalysis,
    confusion,
    crossval,
    kfold_split,
    metrics,
    roc_auc,
    scatter_analysis,
    subject_holdout,
    subject_split,
)
from .nuclear import (
    FeatureVector,
    NuclearMatrix,
    extract_features,
    extract_many,
    nuclear_matrix,
    nuclear_norm,
    singular_values,
)
from .signal_core import (
    DatasetManifest,
    NormalizedTrial,
    RegionSpec,
    Trial,
    amplitude_reject,
    load_dataset,
    normalize,
    preset_regions,
    region_select,
    save_dataset,
)
from .synthgen import ArtifactConfig, GeneratorConfig, generate_dataset, inject_artifacts

__version__ = "0.1.0"
