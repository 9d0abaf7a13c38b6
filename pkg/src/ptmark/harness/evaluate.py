"""Batch evaluation: quality metrics and per-perturbation detection AUC."""

from __future__ import annotations

import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .. import metrics
from ..errors import PtMarkError
from ..watermark import auc
from .config import RunConfig
from .runtime import (
    CLEAN_LABEL,
    Runtime,
    build_runtime,
    cell_label,
    make_image_context,
    perturbation_cells,
    tune_image,
)

METHOD_BASELINE = "tree-ring"
METHOD_TUNED = "pt-mark"
FAILURE_THRESHOLD = 0.10


@dataclass
class MetricsRow:
    method: str
    psnr: float
    ssim: float
    msssim: float
    auc_by_cell: Dict[str, float]
    auc_avg: float
    params: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "msssim": self.msssim,
            "auc": dict(self.auc_by_cell),
            "auc_avg": self.auc_avg,
            "params": dict(self.params),
        }


@dataclass
class ImageRecord:
    prompt: str
    seed: int
    method: str
    psnr: float = 0.0
    ssim: float = 0.0
    msssim: float = 0.0
    p_values: Dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "seed": self.seed,
            "method": self.method,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "msssim": self.msssim,
            "p_values": dict(self.p_values),
            "error": self.error,
        }


@dataclass
class EvalResult:
    rows: List[MetricsRow]
    records: List[ImageRecord]
    clean_p: Dict[str, List[float]]
    failed: int
    total: int

    @property
    def failure_rate(self) -> float:
        return self.failed / self.total if self.total else 0.0

    @property
    def over_failure_threshold(self) -> bool:
        return self.failure_rate > FAILURE_THRESHOLD


def method_variants(cfg: RunConfig) -> List[Tuple[str, RunConfig]]:
    """Baseline (no optimization) and the fully tuned method."""
    return [
        (METHOD_BASELINE, cfg.replace_tuning(n_iters=0)),
        (METHOD_TUNED, cfg),
    ]


def _evaluate_cell(rt: Runtime, variants, prompt: str, seed: int):
    """All work for one (prompt, seed): reference, methods, verifications."""
    records: List[ImageRecord] = []
    clean_p: Dict[str, float] = {}
    cells = perturbation_cells(rt.cfg)
    try:
        ctx = make_image_context(rt, prompt, seed)
    except PtMarkError as exc:
        msg = f"reference generation failed: {exc}"
        return ([ImageRecord(prompt, seed, name, error=msg) for name, _ in variants],
                clean_p)
    for spec in cells:
        rep = _safe_verify(rt, ctx, ctx.x_ref, spec, "clean-ref")
        if rep is not None:
            clean_p[cell_label(spec)] = rep["p_value"]
    for name, variant_cfg in variants:
        rec = ImageRecord(prompt=prompt, seed=seed, method=name)
        try:
            result = tune_image(rt, ctx, variant_cfg.tuning)
            rec.psnr = metrics.psnr(result.image, ctx.x_ref)
            rec.ssim = metrics.ssim(result.image, ctx.x_ref)
            rec.msssim = metrics.msssim(result.image, ctx.x_ref)
            for spec in cells:
                rep = _safe_verify(rt, ctx, result.image, spec, name)
                if rep is not None:
                    rec.p_values[cell_label(spec)] = rep["p_value"]
        except PtMarkError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        except Exception as exc:  # keep long grids alive; record and move on
            rec.error = "".join(traceback.format_exception_only(type(exc), exc)).strip()
        records.append(rec)
    return records, clean_p


def _safe_verify(rt, ctx, x, spec, stream):
    from .runtime import verify_under
    try:
        return verify_under(rt, ctx, x, spec, stream)
    except PtMarkError:
        return None


def aggregate_rows(cfg: RunConfig, records: List[ImageRecord],
                   clean_p: Dict[str, List[float]],
                   params_by_method: Optional[Dict[str, dict]] = None) -> List[MetricsRow]:
    """Fold per-image records into one row per method."""
    labels = [cell_label(s) for s in perturbation_cells(cfg)]
    methods: List[str] = []
    for r in records:
        if r.method not in methods:
            methods.append(r.method)
    rows = []
    for method in methods:
        ok = [r for r in records if r.method == method and r.error is None]
        if not ok:
            continue
        auc_by_cell = {}
        for label in labels:
            wm = [r.p_values[label] for r in ok if label in r.p_values]
            clean = clean_p.get(label, [])
            if wm and clean:
                auc_by_cell[label] = auc(wm, clean)
        perturbed = [v for k, v in auc_by_cell.items() if k != CLEAN_LABEL]
        rows.append(MetricsRow(
            method=method,
            psnr=sum(r.psnr for r in ok) / len(ok),
            ssim=sum(r.ssim for r in ok) / len(ok),
            msssim=sum(r.msssim for r in ok) / len(ok),
            auc_by_cell=auc_by_cell,
            auc_avg=sum(perturbed) / len(perturbed) if perturbed else 0.0,
            params=(params_by_method or {}).get(method, {}),
        ))
    return rows


def run_eval(cfg: RunConfig, runtime: Optional[Runtime] = None) -> EvalResult:
    """Evaluate the baseline and tuned methods over the prompt/seed grid."""
    rt = runtime or build_runtime(cfg)
    variants = method_variants(cfg)
    cells = [(prompt, seed) for prompt in cfg.prompts for seed in cfg.seeds]

    def work(cell):
        return _evaluate_cell(rt, variants, cell[0], cell[1])

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(work, cells))
    else:
        outcomes = [work(c) for c in cells]

    records: List[ImageRecord] = []
    clean_p: Dict[str, List[float]] = {}
    for recs, cp in outcomes:
        records.extend(recs)
        for label, p in cp.items():
            clean_p.setdefault(label, []).append(p)
    rows = aggregate_rows(cfg, records, clean_p)
    failed = sum(1 for r in records if r.error is not None)
    return EvalResult(rows=rows, records=records, clean_p=clean_p,
                      failed=failed, total=len(records))
