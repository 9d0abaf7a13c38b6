"""FastAPI service wrapping the watermarking pipeline.

Single-image operations (keygen, embed, tune, verify, attack) are stateless
apart from the key store; batch evaluation and ablation run synchronously at
desk scale and write their reports server-side.
"""

from __future__ import annotations

import os
from typing import Optional

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..diffusion import null_embed, prompt_embed
from ..errors import ConfigError, PtMarkError
from ..harness import (
    KeyStore,
    OUTPUT_DIR_ENV,
    RunConfig,
    build_runtime,
    config_from_dict,
    default_keys_dir,
    make_image_context,
    run_ablation,
    run_eval,
    tune_image,
    write_reports,
)
from ..harness.reports import reemit_from_json
from ..metrics import psnr, ssim
from ..numerics import SeededRng
from ..perturb import PerturbationSpec, apply_perturbation
from ..watermark import key_to_dict, keygen, verify
from .models import (
    AblateRequest,
    AttackRequest,
    AttackResponse,
    EvalRequest,
    EvalResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    KeygenRequest,
    KeyResponse,
    LossPoint,
    PackedArray,
    PipelineModel,
    ReportRequest,
    ReportResponse,
    RowModel,
    VerifyRequest,
    VerifyResponse,
)


def _pipeline_config(pipeline: PipelineModel, prompt: str, seed: int) -> RunConfig:
    data = {
        "prompts": [prompt],
        "seeds": [seed],
        "denoiser": dict(pipeline.denoiser),
        "schedule": dict(pipeline.schedule),
        "key": dict(pipeline.key),
        "tuning": dict(pipeline.tuning),
        "threshold": pipeline.threshold,
    }
    return config_from_dict(data)


def create_app(keys_dir: Optional[str] = None, output_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="ptmark", version=__version__)
    store = KeyStore(default_keys_dir(keys_dir))
    base_output = output_dir or os.environ.get(OUTPUT_DIR_ENV, "ptmark-out")

    def fail(exc: Exception, code: int = 422):
        raise HTTPException(status_code=code, detail=str(exc))

    def runtime_for(pipeline: PipelineModel, prompt: str, seed: int,
                    key_fingerprint: Optional[str]):
        cfg = _pipeline_config(pipeline, prompt, seed)
        rt = build_runtime(cfg)
        if key_fingerprint:
            key = store.load(key_fingerprint)
            if (key.height, key.width) != (rt.denoiser.height, rt.denoiser.width):
                raise ConfigError("stored key dimensions do not match the pipeline")
            rt = type(rt)(cfg=rt.cfg, schedule=rt.schedule, denoiser=rt.denoiser, key=key)
        return rt

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/keys", response_model=KeyResponse)
    def make_key(req: KeygenRequest):
        try:
            key = keygen(req.seed, radius=req.radius, channel=req.channel,
                         height=req.height, width=req.width)
            fingerprint = store.save(key)
        except PtMarkError as exc:
            fail(exc)
        return KeyResponse(fingerprint=fingerprint, key=key_to_dict(key))

    @app.get("/keys/{fingerprint}", response_model=KeyResponse)
    def get_key(fingerprint: str):
        try:
            key = store.load(fingerprint)
        except PtMarkError as exc:
            fail(exc, code=404)
        return KeyResponse(fingerprint=fingerprint, key=key_to_dict(key))

    def _generate(req: GenerateRequest, tuned: bool) -> GenerateResponse:
        try:
            rt = runtime_for(req.pipeline, req.prompt, req.seed, req.key_fingerprint)
            tuning = rt.cfg.tuning if tuned else rt.cfg.replace_tuning(n_iters=0).tuning
            ctx = make_image_context(rt, req.prompt, req.seed)
            result = tune_image(rt, ctx, tuning)
            report = verify(result.image, rt.denoiser, rt.key, ctx.cond, rt.schedule,
                            threshold=rt.cfg.threshold)
        except PtMarkError as exc:
            return fail(exc)
        curves = [LossPoint(step=r.step_index, timestep=r.timestep, iteration=r.iteration,
                            l_sem=r.l_sem, l_wm=r.l_wm, l_total=r.l_total)
                  for r in result.loss_curves] if tuned else []
        return GenerateResponse(
            image=PackedArray.pack(result.image),
            psnr_vs_clean=psnr(result.image, ctx.x_ref),
            ssim_vs_clean=ssim(result.image, ctx.x_ref),
            p_value=report.p_value,
            decision=report.decision,
            loss_curves=curves,
        )

    @app.post("/embed", response_model=GenerateResponse)
    def embed(req: GenerateRequest):
        """Baseline watermarked generation (no trajectory tuning)."""
        return _generate(req, tuned=False)

    @app.post("/tune", response_model=GenerateResponse)
    def tune(req: GenerateRequest):
        """Watermarked generation with semantic pivotal tuning."""
        return _generate(req, tuned=True)

    @app.post("/verify", response_model=VerifyResponse)
    def verify_image(req: VerifyRequest):
        try:
            rt = runtime_for(req.pipeline, req.prompt, 0, req.key_fingerprint)
            if req.null_conditioning:
                cond = null_embed(rt.denoiser.embed_dim)
            else:
                cond = prompt_embed(req.prompt, rt.denoiser.embed_dim)
            report = verify(req.image.unpack(), rt.denoiser, rt.key, cond,
                            rt.schedule, threshold=rt.cfg.threshold)
        except PtMarkError as exc:
            return fail(exc)
        return VerifyResponse(**report.to_dict())

    @app.post("/attack", response_model=AttackResponse)
    def attack(req: AttackRequest):
        try:
            spec = PerturbationSpec(kind=req.kind, param=req.param)
            ctx = None
            if spec.kind == "regenerate":
                rt = runtime_for(req.pipeline, "", 0, None)
                ctx = rt.regen_ctx
            out = apply_perturbation(req.image.unpack(), spec,
                                     SeededRng(req.seed), ctx)
        except PtMarkError as exc:
            return fail(exc)
        return AttackResponse(image=PackedArray.pack(out))

    def _batch_response(cfg, result, kind, out_dir) -> EvalResponse:
        paths = write_reports(cfg, result, kind, out_dir)
        return EvalResponse(
            rows=[RowModel(**r.to_dict()) for r in result.rows],
            failed=result.failed,
            total=result.total,
            failure_rate=result.failure_rate,
            over_failure_threshold=result.over_failure_threshold,
            paths=paths,
        )

    @app.post("/eval", response_model=EvalResponse)
    def evaluate(req: EvalRequest):
        try:
            cfg = config_from_dict(req.config)
            result = run_eval(cfg)
        except PtMarkError as exc:
            return fail(exc)
        out_dir = req.output_dir or cfg.output_dir or base_output
        return _batch_response(cfg, result, "eval", out_dir)

    @app.post("/ablate", response_model=EvalResponse)
    def ablate(req: AblateRequest):
        try:
            cfg = config_from_dict(req.config)
            result = run_ablation(cfg, req.axis)
        except PtMarkError as exc:
            return fail(exc)
        out_dir = req.output_dir or cfg.output_dir or base_output
        return _batch_response(cfg, result, f"ablate-{req.axis}", out_dir)

    @app.post("/report", response_model=ReportResponse)
    def report(req: ReportRequest):
        try:
            paths = reemit_from_json(req.json_path, req.output_dir or base_output)
        except (PtMarkError, OSError, KeyError, ValueError) as exc:
            return fail(exc)
        return ReportResponse(paths=paths)

    return app
