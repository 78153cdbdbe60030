"""Statistical LOS/NLOS classification of UWB channel impulse responses.

Pipeline: generate (or load) labeled CIRs -> extract per-record statistics ->
fit per-class empirical densities and thresholds -> classify by likelihood
ratio or threshold test -> report per-statistic accuracies.
"""

from .cir import (
    DEFAULT_GRID,
    Cir,
    Dataset,
    GeneratorParams,
    Label,
    LabeledCir,
    TimeGrid,
    first_significant_index,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from .classify import (
    COV_SELECTOR,
    Direction,
    FittedModel,
    Method,
    ThresholdRule,
    classify_record,
    hypothesis_classify,
    load_model,
    ratio_classify,
    save_model,
    select_threshold,
)
from .density import (
    ClassDensities,
    HistogramPdf,
    fit_histogram,
    joint_likelihood_ratio,
    likelihood_ratio,
    pdf_eval,
)
from .errors import (
    DegenerateSignalError,
    FormatError,
    GridMismatchError,
    LosidError,
    ParameterError,
    UnsupportedCombinationError,
)
from .evaluation import (
    AccuracyReport,
    FitConfig,
    evaluate,
    fit_model,
    render_csv,
    render_report,
    render_text,
    split,
)
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    amp_mean,
    cov_mean_statistic,
    energy,
    energy_ratio,
    extract_all,
    feature_value,
    kurtosis,
    load_feature_table,
    mean_excess_delay,
    rms_delay_spread,
    save_feature_table,
    skewness,
)

__version__ = "0.1.0"
