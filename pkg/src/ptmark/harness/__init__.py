"""Evaluation harness: config, runtime, batch eval, ablations, reports."""

from .ablate import AXES, ablation_variants, run_ablation
from .config import (
    AblationGrids,
    DenoiserConfig,
    KeyConfig,
    KEYS_DIR_ENV,
    OUTPUT_DIR_ENV,
    RunConfig,
    ScheduleConfig,
    config_from_dict,
    default_keys_dir,
    load_config,
)
from .evaluate import (
    FAILURE_THRESHOLD,
    METHOD_BASELINE,
    METHOD_TUNED,
    EvalResult,
    ImageRecord,
    MetricsRow,
    method_variants,
    run_eval,
)
from .keystore import KeyStore
from .reports import reemit_from_json, result_to_json, rows_to_csv, write_reports
from .runtime import Runtime, build_runtime, make_image_context, tune_image

__all__ = [
    "RunConfig",
    "DenoiserConfig",
    "ScheduleConfig",
    "KeyConfig",
    "AblationGrids",
    "config_from_dict",
    "load_config",
    "default_keys_dir",
    "OUTPUT_DIR_ENV",
    "KEYS_DIR_ENV",
    "Runtime",
    "build_runtime",
    "make_image_context",
    "tune_image",
    "run_eval",
    "run_ablation",
    "ablation_variants",
    "AXES",
    "EvalResult",
    "MetricsRow",
    "ImageRecord",
    "method_variants",
    "METHOD_BASELINE",
    "METHOD_TUNED",
    "FAILURE_THRESHOLD",
    "KeyStore",
    "write_reports",
    "rows_to_csv",
    "result_to_json",
    "reemit_from_json",
]
