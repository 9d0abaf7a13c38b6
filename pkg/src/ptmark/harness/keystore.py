"""File-backed key store: one JSON file per key, named by fingerprint."""

from __future__ import annotations

import json
from pathlib import Path
from typing import List

from ..errors import ConfigError
from ..watermark import WatermarkKey, key_from_dict, key_to_dict


class KeyStore:
    def __init__(self, directory):
        self.directory = Path(directory)

    def save(self, key: WatermarkKey) -> str:
        """Persist the key; returns its fingerprint."""
        self.directory.mkdir(parents=True, exist_ok=True)
        fingerprint = key.fingerprint()
        path = self.directory / f"{fingerprint}.json"
        path.write_text(json.dumps(key_to_dict(key), indent=2, sort_keys=False) + "\n")
        return fingerprint

    def load(self, fingerprint: str) -> WatermarkKey:
        """Load and checksum-validate a stored key."""
        path = self.directory / f"{fingerprint}.json"
        if not path.exists():
            raise ConfigError(f"no key with fingerprint {fingerprint!r} in {self.directory}")
        key = key_from_dict(json.loads(path.read_text()))
        if key.fingerprint() != fingerprint:
            raise ConfigError(f"fingerprint mismatch for stored key {fingerprint!r}")
        return key

    def list(self) -> List[str]:
        if not self.directory.exists():
            return []
        return sorted(p.stem for p in self.directory.glob("*.json"))
