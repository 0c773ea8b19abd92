"""Sector-bounded coupling functions and sampling-based audits of their sector claims.

Built-in couplings with analytic sector constants:

* ``linear``        k(e) = k e                   (k1 = k2 = k)
* ``linear_arctan`` k(e) = c e + arctan(e)       (k1 = c, k2 = c + 1, since 0 <= arctan(e)/e <= 1)
* ``saturated``     k(e) = k clip(e, -s, s)      (k1 = 0, k2 = k)

Couplings must be odd, locally Lipschitz and pure. Sampling cannot prove
global sector membership; ``verify_sector`` only audits a claim.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigParseError, NonPositiveGain, ValidationError

# kernel codes understood by the compiled network integrator
KIND_CUSTOM = -1
KIND_LINEAR = 0
KIND_LINEAR_ARCTAN = 1
KIND_SATURATED = 2


@dataclass(frozen=True)
class SectorCoupling:
    name: str
    evaluator: Callable = field(repr=False, compare=False)
    k1: float
    k2: float
    parameters: dict = field(default_factory=dict)
    kind: int = KIND_CUSTOM

    def __post_init__(self):
        if not (math.isfinite(self.k1) and math.isfinite(self.k2)):
            raise ValidationError("sector constants must be finite")
        if not 0 <= self.k1 <= self.k2:
            raise ValidationError(f"need 0 <= k1 <= k2, got k1={self.k1}, k2={self.k2}")

    def __call__(self, e):
        return self.evaluator(np.asarray(e, dtype=float))

    def kernel_args(self):
        """``(kind, params)`` for the compiled integrator; params is a length-2 float array."""
        p = self.parameters
        if self.kind == KIND_LINEAR:
            vals = (p["k"], 0.0)
        elif self.kind == KIND_LINEAR_ARCTAN:
            vals = (p["c"], 0.0)
        elif self.kind == KIND_SATURATED:
            vals = (p["k"], p["s"])
        else:
            vals = (0.0, 0.0)
        return self.kind, np.array(vals, dtype=float)

    def with_sector(self, k1=None, k2=None):
        """Copy with overridden sector claim (e.g. to audit a user's claim)."""
        return replace(self, k1=self.k1 if k1 is None else float(k1), k2=self.k2 if k2 is None else float(k2))

    def to_spec(self):
        return {"name": self.name, **self.parameters, "k1": self.k1, "k2": self.k2}


def _positive(name, v):
    v = float(v)
    if not (math.isfinite(v) and v > 0):
        raise NonPositiveGain(f"{name} must be a positive finite number, got {v}")
    return v


def make_linear(k) -> SectorCoupling:
    k = _positive("k", k)
    return SectorCoupling("linear", lambda e: k * e, k, k, {"k": k}, KIND_LINEAR)


def make_linear_plus_arctan(c) -> SectorCoupling:
    c = _positive("c", c)
    return SectorCoupling("linear_arctan", lambda e: c * e + np.arctan(e), c, c + 1.0, {"c": c}, KIND_LINEAR_ARCTAN)


def make_saturated(k, s=1.0) -> SectorCoupling:
    k = _positive("k", k)
    s = _positive("s", s)
    return SectorCoupling("saturated", lambda e: k * np.clip(e, -s, s), 0.0, k, {"k": k, "s": s}, KIND_SATURATED)


REGISTRY: dict[str, Callable[..., SectorCoupling]] = {
    "linear": make_linear,
    "linear_arctan": make_linear_plus_arctan,
    "saturated": make_saturated,
}


def register_coupling(name, factory):
    """Add a factory returning a ``SectorCoupling`` with an explicit (k1, k2) claim."""
    if name in REGISTRY:
        raise ValidationError(f"coupling {name!r} already registered")
    REGISTRY[name] = factory


def from_spec(spec: dict) -> SectorCoupling:
    """Build a coupling from ``{"name": ..., <params>..., "k1"?: ..., "k2"?: ...}``."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigParseError("coupling spec needs a 'name'")
    spec = dict(spec)
    name = spec.pop("name")
    k1, k2 = spec.pop("k1", None), spec.pop("k2", None)
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ConfigParseError(f"unknown coupling {name!r}; known: {sorted(REGISTRY)}") from None
    try:
        c = factory(**spec)
    except TypeError as exc:
        raise ConfigParseError(f"bad parameters for coupling {name!r}: {exc}") from None
    if k1 is not None or k2 is not None:
        c = c.with_sector(k1, k2)
    return c


def tilde_k(c: SectorCoupling, e):
    """``k(e) - k2 e``; lies in the second/fourth quadrants for a valid sector claim."""
    e = np.asarray(e, dtype=float)
    return c(e) - c.k2 * e


@dataclass(frozen=True)
class SectorReport:
    verified: bool
    worst_violation: float
    samples_tested: int
    violating_input: Optional[float] = None


def _sample_points(rng_range, samples, seed):
    n_grid = samples // 2
    grid = np.linspace(-rng_range, rng_range, n_grid)
    rand = np.random.default_rng(seed).uniform(-rng_range, rng_range, samples - n_grid)
    return np.concatenate([grid, rand])


def verify_sector(c: SectorCoupling, range=1e3, samples=100_000, tolerance=1e-12, seed=0) -> SectorReport:
    """Audit sign, oddness and both sector bounds on a grid plus fixed-seed random points.

    Violations are measured in slope units (divided by ``|e|``); positive means violated.
    """
    if samples < 2 or not range > 0:
        raise ValidationError("need samples >= 2 and range > 0")
    e = _sample_points(float(range), int(samples), seed)
    ke = np.asarray(c(e), dtype=float)
    kneg = np.asarray(c(-e), dtype=float)
    nz = e != 0
    viol = np.empty_like(e)
    en, ken = e[nz], ke[nz]
    slope = ken / en
    ratio = np.abs(ken) / np.abs(en)
    viol[nz] = np.max(np.stack([
        -slope,                              # k(e) e >= 0
        np.abs(kneg[nz] + ken) / np.abs(en),  # k(-e) = -k(e)
        c.k1 - ratio,                        # k1 |e| <= |k(e)|
        ratio - c.k2,                        # |k(e)| <= k2 |e|
    ]), axis=0)
    viol[~nz] = np.abs(ke[~nz]) + np.abs(kneg[~nz])
    viol[~np.isfinite(viol)] = np.inf
    worst_idx = int(np.argmax(viol))
    worst = float(viol[worst_idx])
    ok = worst <= tolerance
    return SectorReport(ok, worst, int(e.size), None if ok else float(e[worst_idx]))


def pair_bound_residual(c: SectorCoupling, ei, ej, normalize=True):
    """``|k~(ei - ej) + k~(ej)| - (k2 - k1)(|ei| + |ej|)``, optionally divided by ``1 + |ei| + |ej|``."""
    ei = np.asarray(ei, dtype=float)
    ej = np.asarray(ej, dtype=float)
    lhs = np.abs(tilde_k(c, ei - ej) + tilde_k(c, ej))
    res = lhs - (c.k2 - c.k1) * (np.abs(ei) + np.abs(ej))
    if normalize:
        res = res / (1.0 + np.abs(ei) + np.abs(ej))
    return res


def check_pair_bound(c: SectorCoupling, pairs=100_000, range=1e3, seed=0, normalize=True) -> float:
    """Largest sampled residual of the key two-argument inequality; must be <= 0 up to rounding."""
    if pairs < 1:
        raise ValidationError("need pairs >= 1")
    rng = np.random.default_rng(seed)
    ei, ej = rng.uniform(-range, range, (2, int(pairs)))
    return float(np.max(pair_bound_residual(c, ei, ej, normalize)))
