"""Single Chua oscillator: parameters, nonlinearity, vector field, derived constants."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveDecayRate, ValidationError


@dataclass(frozen=True)
class ChuaParams:
    """Constants of the extended Chua circuit.

    ``a`` is the slope of the nonlinearity on ``|x| <= 1`` and ``b`` the slope
    outside, with ``a < b < 0``. ``|a|`` is therefore the Lipschitz constant of
    the nonlinearity.
    """

    alpha: float
    beta: float
    gamma: float
    a: float
    b: float

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.a, self.b)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite Chua parameter in {vals}")
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta > 0:
            raise ValidationError(f"beta must be > 0, got {self.beta}")
        if not self.gamma >= 0:
            raise ValidationError(f"gamma must be >= 0, got {self.gamma}")
        if not self.a < self.b < 0:
            raise ValidationError(f"need a < b < 0, got a={self.a}, b={self.b}")

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(*(float(d[k]) for k in ("alpha", "beta", "gamma", "a", "b")))
        except KeyError as exc:
            raise ValidationError(f"missing Chua parameter {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad Chua parameter: {exc}") from None

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "a": self.a, "b": self.b}


# Parameter sets of the two reference scenarios.
EXAMPLE1 = ChuaParams(alpha=15.61, beta=25.581, gamma=0.0, a=-1.142, b=-0.715)
EXAMPLE2 = ChuaParams(alpha=10.0, beta=15.0, gamma=0.1, a=-1.31, b=-0.75)


def chua_nonlinearity(x, p: ChuaParams):
    """Piecewise-linear diode characteristic, slope ``a`` inside ``[-1, 1]`` and ``b`` outside.

    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    out = p.b * x + 0.5 * (p.a - p.b) * (np.abs(x + 1.0) - np.abs(x - 1.0))
    return out[()] if out.ndim == 0 else out


def node_vector_field(s, u, p: ChuaParams):
    """Right-hand side of a single oscillator driven by scalar input ``u`` on the first coordinate."""
    x1, x2, x3 = (float(v) for v in s)
    return np.array([
        p.alpha * (-x1 + x2 - chua_nonlinearity(x1, p)) + u,
        x1 - x2 + x3,
        -p.beta * x2 - p.gamma * x3,
    ])


def system_matrices(p: ChuaParams):
    """Return ``(A, b, c)`` of the linear part; the nonlinearity enters as ``-alpha f(x1)`` on row 0."""
    A = np.array([[-p.alpha, p.alpha, 0.0], [1.0, -1.0, 1.0], [0.0, -p.beta, -p.gamma]])
    e1 = np.array([1.0, 0.0, 0.0])
    return A, e1, e1.copy()


def lipschitz_constant(p: ChuaParams) -> float:
    return abs(p.a)


def a0_matrix(p: ChuaParams) -> np.ndarray:
    """Linear block driving the second and third coordinates."""
    return np.array([[-1.0, 1.0], [-p.beta, -p.gamma]])


def mu0(p: ChuaParams) -> float:
    """Decay rate of ``a0_matrix(p)``, i.e. minus its spectral abscissa."""
    half = 0.5 * (1.0 + p.gamma)
    disc = half * half - (p.gamma + p.beta)
    # complex pair: the square root is imaginary and contributes no real part
    rate = half if disc < 0 else half - math.sqrt(disc)
    if not rate > 0:
        raise NonPositiveDecayRate(f"mu0 = {rate} is not positive; cannot certify")
    return rate
