"""Command-line interface: a thin client over the HTTP service.

Commands default to an in-process service; pass ``--server`` (or set
``PTMARK_SERVER``) to target a running instance.  Exit codes: 0 on success,
2 on configuration errors, 3 when a batch run exceeds the failure threshold.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import click
import numpy as np

from .client import ServiceClient, ServiceError
from .harness import load_config
from .service.models import PackedArray

EXIT_CONFIG_ERROR = 2
EXIT_FAILURE_THRESHOLD = 3


def _client(ctx) -> ServiceClient:
    return ServiceClient(base_url=ctx.obj.get("server"),
                         keys_dir=ctx.obj.get("keys_dir"),
                         output_dir=ctx.obj.get("output_dir"))


def _config_payload(config_path: Optional[str], seed: Optional[int],
                    threads: Optional[int], output_dir: Optional[str]) -> dict:
    if config_path is None:
        raise click.UsageError("--config is required")
    try:
        cfg = load_config(config_path)
    except Exception as exc:
        raise click.UsageError(str(exc))
    data = cfg.to_dict()
    if seed is not None:
        data["seeds"] = [seed]
    if threads is not None:
        data["threads"] = threads
    if output_dir is not None:
        data["output_dir"] = output_dir
    return data


def _save_image(path: str, payload: dict) -> None:
    arr = PackedArray(**payload).unpack()
    np.save(path, arr)


def _load_image(path: str) -> dict:
    arr = np.load(path)
    return PackedArray.pack(arr).model_dump()


def _run(ctx, fn):
    try:
        return fn()
    except ServiceError as exc:
        message = str(exc)
        click.echo(f"error: {message}", err=True)
        if message.startswith(("400", "404", "422")):
            raise SystemExit(EXIT_CONFIG_ERROR)
        raise SystemExit(1)


@click.group()
@click.option("--server", envvar="PTMARK_SERVER", default=None,
              help="Base URL of a running service; defaults to in-process.")
@click.option("--keys-dir", envvar="PTMARK_KEYS_DIR", default=None,
              help="Key store directory (in-process mode).")
@click.option("--output-dir", envvar="PTMARK_OUTPUT_DIR", default=None,
              help="Default output directory for reports.")
@click.pass_context
def main(ctx, server, keys_dir, output_dir):
    """Watermark generation, verification and evaluation."""
    ctx.ensure_object(dict)
    ctx.obj.update(server=server, keys_dir=keys_dir, output_dir=output_dir)


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--radius", type=int, default=10, show_default=True)
@click.option("--channel", type=int, default=3, show_default=True)
@click.option("--height", type=int, default=64, show_default=True)
@click.option("--width", type=int, default=64, show_default=True)
@click.pass_context
def keygen(ctx, seed, radius, channel, height, width):
    """Create a ring key and store it under its fingerprint."""
    out = _run(ctx, lambda: _client(ctx).post("/keys", {
        "seed": seed, "radius": radius, "channel": channel,
        "height": height, "width": width}))
    click.echo(out["fingerprint"])


def _generate_command(ctx, endpoint, prompt, seed, key, config, out, curves):
    pipeline = {}
    if config:
        data = _config_payload(config, None, None, None)
        pipeline = {k: data[k] for k in ("denoiser", "schedule", "key", "tuning")}
        pipeline["threshold"] = data["threshold"]
    payload = {"prompt": prompt, "seed": seed, "key_fingerprint": key,
               "pipeline": pipeline}
    result = _run(ctx, lambda: _client(ctx).post(endpoint, payload))
    _save_image(out, result["image"])
    if curves and result.get("loss_curves"):
        lines = ["step,timestep,iter,l_sem,l_wm,l_total"]
        for r in result["loss_curves"]:
            lines.append(f"{r['step']},{r['timestep']},{r['iteration']},"
                         f"{r['l_sem']:.12g},{r['l_wm']:.12g},{r['l_total']:.12g}")
        Path(curves).write_text("\n".join(lines) + "\n")
    click.echo(json.dumps({
        "image": out,
        "psnr_vs_clean": result["psnr_vs_clean"],
        "ssim_vs_clean": result["ssim_vs_clean"],
        "p_value": result["p_value"],
        "decision": result["decision"],
    }, indent=2))


@main.command()
@click.option("--prompt", required=True)
@click.option("--seed", type=int, required=True)
@click.option("--key", default=None, help="Fingerprint of a stored key.")
@click.option("--config", "-c", type=click.Path(), default=None)
@click.option("--out", "-o", type=click.Path(), required=True, help="Output .npy image.")
@click.pass_context
def embed(ctx, prompt, seed, key, config, out):
    """Baseline watermarked generation (no trajectory tuning)."""
    _generate_command(ctx, "/embed", prompt, seed, key, config, out, None)


@main.command()
@click.option("--prompt", required=True)
@click.option("--seed", type=int, required=True)
@click.option("--key", default=None, help="Fingerprint of a stored key.")
@click.option("--config", "-c", type=click.Path(), default=None)
@click.option("--out", "-o", type=click.Path(), required=True, help="Output .npy image.")
@click.option("--curves", type=click.Path(), default=None, help="Loss-curve CSV path.")
@click.pass_context
def tune(ctx, prompt, seed, key, config, out, curves):
    """Watermarked generation with semantic pivotal tuning."""
    _generate_command(ctx, "/tune", prompt, seed, key, config, out, curves)


@main.command()
@click.option("--image", type=click.Path(exists=True), required=True)
@click.option("--prompt", required=True)
@click.option("--null-conditioning", is_flag=True, default=False,
              help="Invert with the zero embedding instead of the prompt's.")
@click.option("--key", default=None, help="Fingerprint of a stored key.")
@click.option("--config", "-c", type=click.Path(), default=None)
@click.option("--threshold", type=float, default=None)
@click.pass_context
def verify(ctx, image, prompt, null_conditioning, key, config, threshold):
    """Verify the watermark in an image."""
    pipeline = {}
    if config:
        data = _config_payload(config, None, None, None)
        pipeline = {k: data[k] for k in ("denoiser", "schedule", "key", "tuning")}
        pipeline["threshold"] = data["threshold"]
    if threshold is not None:
        pipeline["threshold"] = threshold
    payload = {"image": _load_image(image), "prompt": prompt,
               "null_conditioning": null_conditioning,
               "key_fingerprint": key, "pipeline": pipeline}
    result = _run(ctx, lambda: _client(ctx).post("/verify", payload))
    click.echo(json.dumps(result, indent=2))


@main.command()
@click.option("--image", type=click.Path(exists=True), required=True)
@click.option("--kind", required=True,
              type=click.Choice(["jpeg", "crop", "blur", "noise", "brightness",
                                 "rotate", "regenerate"]))
@click.option("--param", type=float, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--config", "-c", type=click.Path(), default=None,
              help="Pipeline config (needed for the regeneration attack).")
@click.option("--out", "-o", type=click.Path(), required=True)
@click.pass_context
def attack(ctx, image, kind, param, seed, config, out):
    """Apply one perturbation to an image."""
    pipeline = {}
    if config:
        data = _config_payload(config, None, None, None)
        pipeline = {k: data[k] for k in ("denoiser", "schedule", "key", "tuning")}
    payload = {"image": _load_image(image), "kind": kind, "param": param,
               "seed": seed, "pipeline": pipeline}
    result = _run(ctx, lambda: _client(ctx).post("/attack", payload))
    _save_image(out, result["image"])
    click.echo(out)


def _finish_batch(result: dict) -> None:
    click.echo(json.dumps({
        "rows": result["rows"],
        "failed": result["failed"],
        "total": result["total"],
        "paths": result["paths"],
    }, indent=2))
    if result["over_failure_threshold"]:
        click.echo(f"failure rate {result['failure_rate']:.1%} exceeds threshold", err=True)
        raise SystemExit(EXIT_FAILURE_THRESHOLD)


@main.command("eval")
@click.option("--config", "-c", type=click.Path(), required=True)
@click.option("--seed", type=int, default=None, help="Replace the seed list with one seed.")
@click.option("--threads", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def eval_cmd(ctx, config, seed, threads, out):
    """Run the quality/robustness evaluation grid."""
    payload = {"config": _config_payload(config, seed, threads, out)}
    result = _run(ctx, lambda: _client(ctx).post("/eval", payload))
    _finish_batch(result)


@main.command()
@click.option("--config", "-c", type=click.Path(), required=True)
@click.option("--axis", required=True,
              type=click.Choice(["lambda_grid", "n_iters", "start_step", "modules"]))
@click.option("--seed", type=int, default=None, help="Replace the seed list with one seed.")
@click.option("--threads", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def ablate(ctx, config, axis, seed, threads, out):
    """Run one ablation axis."""
    payload = {"config": _config_payload(config, seed, threads, out), "axis": axis}
    result = _run(ctx, lambda: _client(ctx).post("/ablate", payload))
    _finish_batch(result)


@main.command()
@click.option("--json-path", "json_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def report(ctx, json_path, out):
    """Re-emit CSV and SVG from a stored JSON report."""
    payload = {"json_path": json_path, "output_dir": out}
    result = _run(ctx, lambda: _client(ctx).post("/report", payload))
    click.echo(json.dumps(result, indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(keys_dir=ctx.obj.get("keys_dir"),
                     output_dir=ctx.obj.get("output_dir"))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
