"""botsift: bot-account classification for Twitter-shaped data."""

from .crawler import (
    AccountSource,
    CrawlState,
    FixtureSource,
    RateLimitPolicy,
    SimulatedClock,
    SystemClock,
    checkpoint,
    crawl_step,
    new_crawl_state,
    resume,
    run_crawl,
)
from .features import FEATURE_COLUMNS, FeatureVector, extract_all, extract_features
from .ingest import (
    AccountRecord,
    Dataset,
    Label,
    TweetRecord,
    flag_by_tff,
    load_dataset,
    parse_account,
    save_dataset,
    serialize_account,
    split,
    tff_ratio,
)
from .metrics import ConfusionMatrix, EvalReport, confusion, evaluate, report_to_dict
from .mlp import (
    MlpConfig,
    MlpModel,
    SweepResult,
    TrainingTrace,
    batch_loss,
    forward,
    grad,
    init_model,
    load_model,
    lr_sweep,
    predict,
    save_model,
    train,
)
from .normalize import (
    NormalizationStats,
    emit_csv,
    fit,
    load_csv,
    load_stats,
    save_stats,
    transform_row,
    transform_rows,
    transform_value,
)
from .synth import BOT_PROFILE, HUMAN_PROFILE, ClassProfile, SynthProfile, generate

__version__ = "0.1.0"
