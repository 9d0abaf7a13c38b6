"""Pydantic request/response models for the HTTP service.

Arrays travel as base64-encoded little-endian float64 buffers with an
explicit shape, so payloads round-trip bit-exactly.
"""

from __future__ import annotations

import base64
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import ConfigError


class PackedArray(BaseModel):
    shape: List[int]
    dtype: str = "float64"
    data_b64: str

    @staticmethod
    def pack(arr: np.ndarray) -> "PackedArray":
        arr = np.ascontiguousarray(arr, dtype="<f8")
        return PackedArray(shape=list(arr.shape),
                           data_b64=base64.b64encode(arr.tobytes()).decode("ascii"))

    def unpack(self) -> np.ndarray:
        if self.dtype != "float64":
            raise ConfigError(f"unsupported dtype {self.dtype!r}")
        raw = base64.b64decode(self.data_b64)
        expected = int(np.prod(self.shape)) * 8
        if len(raw) != expected:
            raise ConfigError(f"payload has {len(raw)} bytes, shape needs {expected}")
        return np.frombuffer(raw, dtype="<f8").reshape(self.shape).astype(float)


class PipelineModel(BaseModel):
    """Model/schedule/key settings shared by the single-image endpoints."""

    denoiser: Dict[str, object] = Field(default_factory=dict)
    schedule: Dict[str, object] = Field(default_factory=dict)
    key: Dict[str, object] = Field(default_factory=dict)
    tuning: Dict[str, object] = Field(default_factory=dict)
    threshold: float = 0.01


class KeygenRequest(BaseModel):
    seed: int
    radius: int = 10
    channel: int = 3
    height: int = 64
    width: int = 64


class KeyResponse(BaseModel):
    fingerprint: str
    key: dict


class GenerateRequest(BaseModel):
    prompt: str
    seed: int
    key_fingerprint: Optional[str] = None
    pipeline: PipelineModel = Field(default_factory=PipelineModel)


class LossPoint(BaseModel):
    step: int
    timestep: int
    iteration: int
    l_sem: float
    l_wm: float
    l_total: float


class GenerateResponse(BaseModel):
    image: PackedArray
    psnr_vs_clean: float
    ssim_vs_clean: float
    p_value: float
    decision: bool
    loss_curves: List[LossPoint] = Field(default_factory=list)


class VerifyRequest(BaseModel):
    image: PackedArray
    prompt: str
    # Invert with the zero unconditional embedding instead of the prompt's.
    null_conditioning: bool = False
    key_fingerprint: Optional[str] = None
    pipeline: PipelineModel = Field(default_factory=PipelineModel)


class VerifyResponse(BaseModel):
    eta: float
    sigma2: float
    dof: int
    noncentrality: float
    p_value: float
    decision: bool
    threshold: float


class AttackRequest(BaseModel):
    image: PackedArray
    kind: str
    param: float
    seed: int = 0
    pipeline: PipelineModel = Field(default_factory=PipelineModel)


class AttackResponse(BaseModel):
    image: PackedArray


class EvalRequest(BaseModel):
    config: dict
    output_dir: Optional[str] = None


class AblateRequest(BaseModel):
    config: dict
    axis: str
    output_dir: Optional[str] = None


class RowModel(BaseModel):
    method: str
    psnr: float
    ssim: float
    msssim: float
    auc: Dict[str, float]
    auc_avg: float
    params: Dict[str, object] = Field(default_factory=dict)


class EvalResponse(BaseModel):
    rows: List[RowModel]
    failed: int
    total: int
    failure_rate: float
    over_failure_threshold: bool
    paths: Dict[str, str]


class ReportRequest(BaseModel):
    json_path: str
    output_dir: Optional[str] = None


class ReportResponse(BaseModel):
    paths: Dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str
