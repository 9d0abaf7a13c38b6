"""Central finite differences, used by the gradient-checking tests."""

from __future__ import annotations

from typing import Callable

import numpy as np


def central_difference(f: Callable[[np.ndarray], float], x: np.ndarray,
                       h: float = 1e-5) -> np.ndarray:
    """Gradient estimate of scalar-valued ``f`` at ``x`` by central differences."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    flat = grad.ravel()
    xf = x.ravel()
    for i in range(xf.size):
        orig = xf[i]
        xf[i] = orig + h
        up = f(x)
        xf[i] = orig - h
        down = f(x)
        xf[i] = orig
        flat[i] = (up - down) / (2.0 * h)
    return grad


def relative_error(approx: np.ndarray, exact: np.ndarray) -> float:
    """||approx - exact|| / max(||exact||, tiny)."""
    num = float(np.linalg.norm(np.asarray(approx) - np.asarray(exact)))
    den = float(np.linalg.norm(np.asarray(exact)))
    return num / max(den, 1e-300)
