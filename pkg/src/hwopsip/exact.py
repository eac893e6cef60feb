"""Closed-form test solutions of ``-Laplace u = f`` on the unit square."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["ExactSolution", "boundary_layer", "sine", "zero"]

LAYER_RATE = 128.0


@dataclass(frozen=True)
class ExactSolution:
    u: Callable
    grad_u: Callable
    laplacian_u: Callable
    name: str = ""

    def f(self, x1, x2):
        """Source term ``-Laplace u``."""
        return -self.laplacian_u(x1, x2)


def _g(s):
    return s * s * (s - 1.0) ** 2


def _dg(s):
    return 2.0 * s * (s - 1.0) * (2.0 * s - 1.0)


def _d2g(s):
    return 12.0 * s * s - 12.0 * s + 2.0


def boundary_layer(rate: float = LAYER_RATE) -> ExactSolution:
    """``u = x1^2 (x1-1)^2 x2^2 (x2-1)^2 exp(-rate x2)``.

    With ``q(s) = g(s) e^{-rate s}``, ``q'' = (g'' - 2 rate g' + rate^2 g) e^{-rate s}``.
    """

    def q(s):
        return _g(s) * np.exp(-rate * s)

    def dq(s):
        return (_dg(s) - rate * _g(s)) * np.exp(-rate * s)

    def d2q(s):
        return (_d2g(s) - 2.0 * rate * _dg(s) + rate * rate * _g(s)) * np.exp(-rate * s)

    def u(x1, x2):
        return _g(x1) * q(x2)

    def grad_u(x1, x2):
        return _dg(x1) * q(x2), _g(x1) * dq(x2)

    def laplacian_u(x1, x2):
        return _d2g(x1) * q(x2) + _g(x1) * d2q(x2)

    return ExactSolution(u, grad_u, laplacian_u, name="boundary_layer")


def sine() -> ExactSolution:
    """``u = sin(pi x1) sin(pi x2)``."""
    pi = np.pi

    def u(x1, x2):
        return np.sin(pi * x1) * np.sin(pi * x2)

    def grad_u(x1, x2):
        return (pi * np.cos(pi * x1) * np.sin(pi * x2),
                pi * np.sin(pi * x1) * np.cos(pi * x2))

    def laplacian_u(x1, x2):
        return -2.0 * pi * pi * u(x1, x2)

    return ExactSolution(u, grad_u, laplacian_u, name="sine")


def zero() -> ExactSolution:
    def u(x1, x2):
        return np.zeros(np.broadcast(x1, x2).shape)

    def grad_u(x1, x2):
        z = u(x1, x2)
        return z, z

    return ExactSolution(u, grad_u, u, name="zero")
