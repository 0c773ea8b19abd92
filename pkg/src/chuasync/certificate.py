"""Comparison matrix assembly, Hurwitz certificates, and gain/pivot searches."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import spectral
from .errors import DimensionMismatch, EigensolverFailure, TooFewNodes, ValidationError
from .model import ChuaParams, lipschitz_constant, mu0
from .topology import Topology, build_aux_matrices, non_pivot_nodes

DEFAULT_MARGIN = 1e-9


def build_m(p: ChuaParams, t: Topology, pivot: int = 0, k1: float = 0.0, k2: float = 0.0) -> np.ndarray:
    """Comparison matrix ``[[B, alpha I], [I, -mu0 I]]`` of size ``2(n-1)``.

    ``B = -(alpha - alpha|a|) I - k1 diag(deg) + (k2 - k1) A1 + k2 A2`` over the
    non-pivot nodes in ascending order.
    """
    if t.n < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {t.n}")
    if not 0 <= k1 <= k2:
        raise ValidationError(f"need 0 <= k1 <= k2, got k1={k1}, k2={k2}")
    idx = non_pivot_nodes(t, pivot)
    a1, a2 = build_aux_matrices(t, pivot)
    n = idx.size
    eye = np.eye(n)
    deg = t.adjacency[idx].sum(axis=1).astype(float)
    alpha = p.alpha
    b = -(alpha - alpha * lipschitz_constant(p)) * eye - k1 * np.diag(deg) + (k2 - k1) * a1 + k2 * a2
    return np.block([[b, alpha * eye], [eye, -mu0(p) * eye]])


@dataclass(frozen=True, eq=False)
class Certificate:
    m: np.ndarray
    eigenvalues: np.ndarray
    spectral_abscissa: float
    hurwitz: bool
    pivot: Optional[int] = None
    margin_tolerance: float = DEFAULT_MARGIN

    @property
    def worst_eigenvalue(self) -> complex:
        return complex(self.eigenvalues[np.argmax(self.eigenvalues.real)])

    @property
    def min_real_part(self) -> float:
        return float(self.eigenvalues.real.min())

    def summary(self):
        return {
            "hurwitz": self.hurwitz,
            "spectral_abscissa": self.spectral_abscissa,
            "min_real_part": self.min_real_part,
            "worst_eigenvalue": [self.worst_eigenvalue.real, self.worst_eigenvalue.imag],
            "pivot": self.pivot,
            "dimension": int(self.m.shape[0]),
            "margin_tolerance": self.margin_tolerance,
        }


def assess(m, margin_tolerance=DEFAULT_MARGIN, pivot=None) -> Certificate:
    """Hurwitz test: certified iff the spectral abscissa is below ``-margin_tolerance``."""
    spec = spectral.eigenvalues(m)
    if not spec.converged:
        raise EigensolverFailure(f"QR iteration did not converge after {spec.iterations} sweeps")
    eigs = spec.eigenvalues[np.lexsort((spec.eigenvalues.imag, -spec.eigenvalues.real))]
    absc = float(eigs.real.max())
    return Certificate(np.asarray(m, dtype=float), eigs, absc, absc < -margin_tolerance, pivot, margin_tolerance)


def certify(p, t, k1, k2, pivot=0, margin_tolerance=DEFAULT_MARGIN) -> Certificate:
    return assess(build_m(p, t, pivot, k1, k2), margin_tolerance, pivot)


def two_node_threshold(p: ChuaParams) -> float:
    """Linear gain above which two linearly coupled oscillators are certified."""
    return p.alpha * (lipschitz_constant(p) + 1.0 / mu0(p) - 1.0)


def routh_hurwitz_2x2(p: ChuaParams, k: float) -> bool:
    """Routh-Hurwitz conditions for the two-node comparison matrix with linear gain ``k``.

    The second condition ``(alpha - alpha|a| + k) mu0 - alpha > 0`` is evaluated
    after division by ``mu0 > 0`` so the boundary ``k == two_node_threshold(p)``
    is excluded exactly.
    """
    la = p.alpha * lipschitz_constant(p)
    m0 = mu0(p)
    return bool(m0 + p.alpha - la + k > 0 and k > two_node_threshold(p))


_TIE_RTOL = 1e-12


def best_pivot(p, t, k1, k2, margin_tolerance=DEFAULT_MARGIN) -> Certificate:
    """Certificate with the smallest spectral abscissa over all pivots.

    Abscissas within ``1e-12`` (relative) count as ties and the lowest index
    wins, so symmetric graphs report pivot 0. The result may be non-Hurwitz if
    no pivot certifies.
    """
    best = None
    for pivot in range(t.n):
        cert = certify(p, t, k1, k2, pivot, margin_tolerance)
        if best is None:
            best = cert
            continue
        tie = _TIE_RTOL * max(1.0, abs(best.spectral_abscissa))
        if cert.spectral_abscissa < best.spectral_abscissa - tie:
            best = cert
    return best


@dataclass(frozen=True)
class GainSearch:
    gain: float
    verified: bool
    monotone: bool
    evaluations: int


def min_linear_gain(p, t, pivot=0, k_max=100.0, resolution=1e-4,
                    margin_tolerance=DEFAULT_MARGIN) -> Optional[GainSearch]:
    """Smallest linear gain ``k = k1 = k2`` in ``(0, k_max]`` that certifies, up to ``resolution``.

    Doubling scan then bisection. Monotonicity in ``k`` is not guaranteed for
    general graphs, so every evaluated verdict is kept and ``monotone`` reports
    whether they were consistent with a single crossing. ``verified`` re-checks
    the answer at ``k*`` and ``k* +/- resolution``. Returns None if nothing up to
    ``k_max`` certifies.
    """
    if not (k_max > 0 and resolution > 0):
        raise ValidationError("k_max and resolution must be positive")
    seen = {}

    def ok(k):
        if k not in seen:
            seen[k] = certify(p, t, k, k, pivot, margin_tolerance).hurwitz
        return seen[k]

    lo, k = 0.0, min(resolution, k_max)
    while not ok(k):
        if k >= k_max:
            return None
        lo, k = k, min(2.0 * k, k_max)
    hi = k
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    below = hi - resolution
    verified = ok(hi) and ok(hi + resolution) and (below <= 0 or not ok(below))
    verdicts = [seen[k] for k in sorted(seen)]
    first_true = verdicts.index(True)
    monotone = all(verdicts[first_true:])
    return GainSearch(hi, bool(verified), monotone, len(seen))


@dataclass(frozen=True, eq=False)
class ComparisonState:
    """Comparison bounds: ``sigma`` on the first-coordinate errors, ``chi`` on the remaining error norms."""

    sigma: np.ndarray
    chi: np.ndarray

    def as_vector(self):
        return np.concatenate([self.sigma, self.chi])

    @classmethod
    def from_vector(cls, z):
        z = np.asarray(z, dtype=float)
        h = z.size // 2
        return cls(z[:h].copy(), z[h:].copy())


def comparison_rhs(m, z):
    """Right-hand side ``M z`` of the comparison system; accepts a vector or ``ComparisonState``."""
    m = np.asarray(m, dtype=float)
    as_state = isinstance(z, ComparisonState)
    vec = z.as_vector() if as_state else np.asarray(z, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or vec.shape != (m.shape[0],):
        raise DimensionMismatch(f"matrix {m.shape} incompatible with state {vec.shape}")
    out = m @ vec
    return ComparisonState.from_vector(out) if as_state else out
