"""Ring-key generation and its JSON serialization.

A key is a disc mask on the centered spectrum (DC excluded) together with a
complex pattern that is constant on each integer-radius ring and conjugate
symmetric about the center.  Ring values come from ring-averaging the
centered FFT of a seeded Gaussian grid, which keeps the watermarked initial
noise close to the Gaussian prior the sampler expects.  Everything is a
deterministic function of (seed, radius, channel, h, w); serialized ring
values act as a checksum on load.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..errors import ConfigError
from ..numerics import SeededRng, center_spectrum, derive_seed, fft2

KEY_FORMAT_VERSION = 1
DEFAULT_RADIUS = 10
DEFAULT_CHANNEL = 3


@dataclass(frozen=True)
class WatermarkKey:
    seed: int
    radius: int
    channel: int
    height: int
    width: int
    mask: np.ndarray          # (H, W) bool, centered coordinates
    pattern: np.ndarray       # (H, W) complex, zero off-mask
    ring_values: Dict[int, complex]

    @property
    def mask_coords(self) -> List[Tuple[int, int]]:
        rows, cols = np.nonzero(self.mask)
        return list(zip(rows.tolist(), cols.tolist()))

    @property
    def mask_size(self) -> int:
        return int(self.mask.sum())

    def fingerprint(self) -> str:
        payload = json.dumps(key_to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _ring_geometry(height: int, width: int, radius: int):
    ci, cj = height // 2, width // 2
    di = np.arange(height)[:, None] - ci
    dj = np.arange(width)[None, :] - cj
    dist = np.sqrt(di * di + dj * dj)
    mask = dist < radius
    mask[ci, cj] = False  # DC carries the channel mean, not N(0, sigma^2)
    ring_index = np.round(dist).astype(int)
    return mask, ring_index


def keygen(seed: int, radius: int = DEFAULT_RADIUS, channel: int = DEFAULT_CHANNEL,
           height: int = 64, width: int = 64) -> WatermarkKey:
    """Build the ring key for an (height, width) spectrum."""
    if radius >= min(height, width) / 2:
        raise ConfigError(
            f"radius {radius} too large for {height}x{width} (must be < {min(height, width) / 2})")
    if radius < 1:
        raise ConfigError(f"radius must be >= 1, got {radius}")
    if not (0 <= channel):
        raise ConfigError(f"channel index must be nonnegative, got {channel}")
    mask, ring_index = _ring_geometry(height, width, radius)
    grid = SeededRng(derive_seed(seed, "ring-pattern")).normal((height, width))
    spectrum = center_spectrum(fft2(grid))
    pattern = np.zeros((height, width), dtype=np.complex128)
    ring_values: Dict[int, complex] = {}
    for r in range(1, radius + 1):
        ring = mask & (ring_index == r)
        if not ring.any():
            continue
        value = complex(spectrum[ring].mean())
        pattern[ring] = value
        ring_values[r] = value
    # Enforce exact conjugate symmetry: pattern(-m) = conj(pattern(m)).
    flipped = np.conj(pattern[::-1, ::-1])
    flipped = np.roll(flipped, (1, 1), axis=(0, 1))  # realign centers on even grids
    pattern = 0.5 * (pattern + flipped)
    pattern[~mask] = 0.0
    ring_values = {r: complex(pattern[mask & (ring_index == r)][0])
                   for r in ring_values}
    return WatermarkKey(seed=seed, radius=radius, channel=channel,
                        height=height, width=width, mask=mask,
                        pattern=pattern, ring_values=ring_values)


def key_to_dict(key: WatermarkKey) -> dict:
    """Byte-stable JSON form; ring values double as a load-time checksum."""
    return {
        "version": KEY_FORMAT_VERSION,
        "seed": key.seed,
        "channel": key.channel,
        "radius": key.radius,
        "h": key.height,
        "w": key.width,
        "rings": [
            {"radius": r, "re": v.real, "im": v.imag}
            for r, v in sorted(key.ring_values.items())
        ],
    }


def key_from_dict(data: dict) -> WatermarkKey:
    """Regenerate from parameters and validate stored ring values."""
    if data.get("version") != KEY_FORMAT_VERSION:
        raise ConfigError(f"unsupported key format version: {data.get('version')}")
    key = keygen(seed=int(data["seed"]), radius=int(data["radius"]),
                 channel=int(data["channel"]), height=int(data["h"]),
                 width=int(data["w"]))
    for ring in data["rings"]:
        r = int(ring["radius"])
        stored = complex(float(ring["re"]), float(ring["im"]))
        if r not in key.ring_values or abs(key.ring_values[r] - stored) > 1e-9:
            raise ConfigError(f"ring checksum mismatch at radius {r}")
    if len(data["rings"]) != len(key.ring_values):
        raise ConfigError("ring checksum mismatch: ring count differs")
    return key
