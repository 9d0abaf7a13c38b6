"""Thin HTTP client for the service.

With a base URL the client talks to a running server; without one it mounts
the ASGI app in-process, so the CLI works without a daemon while still going
through the exact HTTP surface.
"""

from __future__ import annotations

import asyncio
from typing import Optional

import httpx

from .errors import PtMarkError


class ServiceError(PtMarkError):
    """The service rejected a request."""


class ServiceClient:
    def __init__(self, base_url: Optional[str] = None,
                 keys_dir: Optional[str] = None,
                 output_dir: Optional[str] = None,
                 timeout: float = 1800.0):
        self.base_url = base_url
        self.timeout = timeout
        self._app = None
        if base_url is None:
            from .service import create_app
            self._app = create_app(keys_dir=keys_dir, output_dir=output_dir)

    def _raise_for(self, response: httpx.Response) -> dict:
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(f"{response.status_code}: {detail}")
        return response.json()

    def request(self, method: str, path: str, payload: Optional[dict] = None) -> dict:
        if self._app is not None:
            return asyncio.run(self._request_local(method, path, payload))
        with httpx.Client(base_url=self.base_url, timeout=self.timeout) as client:
            response = client.request(method, path, json=payload)
        return self._raise_for(response)

    async def _request_local(self, method: str, path: str, payload: Optional[dict]) -> dict:
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(transport=transport, base_url="http://ptmark",
                                     timeout=self.timeout) as client:
            response = await client.request(method, path, json=payload)
        return self._raise_for(response)

    def get(self, path: str) -> dict:
        return self.request("GET", path)

    def post(self, path: str, payload: dict) -> dict:
        return self.request("POST", path, payload)
