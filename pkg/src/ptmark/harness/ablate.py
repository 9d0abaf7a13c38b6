"""Ablation runners: loss-weight grid, iteration count, starting step, modules."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

from ..errors import ConfigError
from .config import AblationGrids, RunConfig
from .evaluate import EvalResult, _evaluate_cell, aggregate_rows
from .runtime import Runtime, build_runtime

AXES = ("lambda_grid", "n_iters", "start_step", "modules")

MODULE_BASELINE = "Tree-Ring"
MODULE_NO_WP = "PT-Mark (w/o WP)"
MODULE_FULL = "PT-Mark"


def ablation_variants(cfg: RunConfig, axis: str,
                      grids: Optional[AblationGrids] = None,
                      ) -> List[Tuple[str, RunConfig, Dict[str, object]]]:
    """(label, config, params) triples for the requested axis."""
    grids = grids or cfg.ablation
    if axis == "lambda_grid":
        return [
            (f"l1={l1:g},l2={l2:g}",
             cfg.replace_tuning(lambda1=l1, lambda2=l2),
             {"lambda1": l1, "lambda2": l2})
            for l1 in grids.lambda1 for l2 in grids.lambda2
        ]
    if axis == "n_iters":
        return [
            (f"iters={n}", cfg.replace_tuning(n_iters=n), {"n_iters": n})
            for n in grids.n_iters
        ]
    if axis == "start_step":
        t = cfg.schedule.t_sample
        values = [s for s in grids.start_step if s < t]
        return [
            (f"start={s}", cfg.replace_tuning(start_step=s), {"start_step": s})
            for s in values
        ]
    if axis == "modules":
        return [
            (MODULE_BASELINE, cfg.replace_tuning(n_iters=0), {"n_iters": 0}),
            (MODULE_NO_WP, cfg.replace_tuning(lambda2=0.0), {"lambda2": 0.0}),
            (MODULE_FULL, cfg, {}),
        ]
    raise ConfigError(f"unknown ablation axis {axis!r}; expected one of {AXES}")


def run_ablation(cfg: RunConfig, axis: str,
                 grids: Optional[AblationGrids] = None,
                 runtime: Optional[Runtime] = None) -> EvalResult:
    """Evaluate every variant of one ablation axis over the prompt/seed grid.

    The clean reference, its inversion pivot and the clean p-value population
    are computed once per (prompt, seed) and shared across variants.
    """
    rt = runtime or build_runtime(cfg)
    variants = ablation_variants(cfg, axis, grids)
    named = [(label, vcfg) for label, vcfg, _ in variants]
    params = {label: p for label, _, p in variants}
    cells = [(prompt, seed) for prompt in cfg.prompts for seed in cfg.seeds]

    def work(cell):
        return _evaluate_cell(rt, named, cell[0], cell[1])

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(work, cells))
    else:
        outcomes = [work(c) for c in cells]

    records = []
    clean_p: Dict[str, List[float]] = {}
    for recs, cp in outcomes:
        records.extend(recs)
        for label, p in cp.items():
            clean_p.setdefault(label, []).append(p)
    rows = aggregate_rows(cfg, records, clean_p, params_by_method=params)
    failed = sum(1 for r in records if r.error is not None)
    return EvalResult(rows=rows, records=records, clean_p=clean_p,
                      failed=failed, total=len(records))
