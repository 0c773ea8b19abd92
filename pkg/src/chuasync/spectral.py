"""Dense real nonsymmetric eigenvalues: Householder Hessenberg reduction + Francis double-shift QR.

Eigenvalues only (no vectors). ``charpoly_roots_oracle`` is an independent
small-matrix route used for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .errors import DimensionTooLarge, NonFiniteInput, ValidationError


@jit
def hessenberg_kernel(A):
    """Orthogonally similar upper Hessenberg form of ``A`` (copy)."""
    H = A.copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        peak = np.max(np.abs(x))
        if peak == 0.0:
            continue
        # the reflector only needs the direction; scaling keeps x*x out of underflow
        x /= peak
        normx = np.sqrt(np.sum(x * x))
        beta = -normx if x[0] >= 0.0 else normx
        v = x.copy()
        v[0] -= beta
        vn = np.sqrt(np.sum(v * v))
        if vn == 0.0:
            continue
        v /= vn
        blk = np.ascontiguousarray(H[k + 1:, k:])
        H[k + 1:, k:] = blk - 2.0 * np.outer(v, v @ blk)
        blk = np.ascontiguousarray(H[:, k + 1:])
        H[:, k + 1:] = blk - 2.0 * np.outer(blk @ v, v)
        H[k + 2:, k] = 0.0
    return H


@jit
def hqr_kernel(H, tol, max_its):
    """Eigenvalues of upper Hessenberg ``H``.

    Returns ``(wr, wi, sweeps, converged)``. Works on a 1-based padded copy.
    Unconverged slots are left as NaN.
    """
    n = H.shape[0]
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = H
    wr = np.full(n + 1, np.nan)
    wi = np.full(n + 1, np.nan)
    anorm = 0.0
    for i in range(1, n + 1):
        for j in range(max(i - 1, 1), n + 1):
            anorm += abs(a[i, j])
    nn = n
    t = 0.0
    sweeps = 0
    x = y = z = w = p = q = r = s = 0.0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            for ll in range(nn, 1, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) <= tol * s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + (z if p >= 0.0 else -z)
                    wr[nn - 1] = x + z
                    wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = 0.0
                    wi[nn] = 0.0
                else:
                    wr[nn - 1] = x + p
                    wr[nn] = x + p
                    wi[nn - 1] = z
                    wi[nn] = -z
                nn -= 2
                break
            if its >= max_its:
                return wr[1:], wi[1:], sweeps, False
            if its > 0 and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(1, nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = 0.75 * s
                y = x
                w = -0.4375 * s * s
            its += 1
            sweeps += 1
            # look for two consecutive small subdiagonal elements
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            # double-shift QR step on rows l..nn, columns m..nn
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = 0.0
                    if k != nn - 1:
                        r = a[k + 2, k - 1]
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.sqrt(p * p + q * q + r * r)
                if p < 0.0:
                    s = -s
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k, k - 1] = -a[k, k - 1]
                    else:
                        a[k, k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    if k != nn - 1:
                        P = a[k, k:nn + 1] + q * a[k + 1, k:nn + 1] + r * a[k + 2, k:nn + 1]
                        a[k + 2, k:nn + 1] -= P * z
                    else:
                        P = a[k, k:nn + 1] + q * a[k + 1, k:nn + 1]
                    a[k + 1, k:nn + 1] -= P * y
                    a[k, k:nn + 1] -= P * x
                    mmin = nn if nn < k + 3 else k + 3
                    if k != nn - 1:
                        P = x * a[l:mmin + 1, k] + y * a[l:mmin + 1, k + 1] + z * a[l:mmin + 1, k + 2]
                        a[l:mmin + 1, k + 2] -= P * r
                    else:
                        P = x * a[l:mmin + 1, k] + y * a[l:mmin + 1, k + 1]
                    a[l:mmin + 1, k + 1] -= P * q
                    a[l:mmin + 1, k] -= P
    return wr[1:], wi[1:], sweeps, True


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    iterations: int
    converged: bool

    @property
    def abscissa(self) -> float:
        return float(np.max(self.eigenvalues.real))


def balance(m, radix=2.0):
    """Diagonal similarity scaling (powers of ``radix``) equalizing row and column norms."""
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[0]
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(a[:, i]).sum() - abs(a[i, i])
            r = np.abs(a[i, :]).sum() - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def _as_square(m):
    a = np.ascontiguousarray(np.asarray(m, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise NonFiniteInput("matrix has non-finite entries")
    return a


def eigenvalues(m, tolerance=1e-12, max_iterations=100, balanced=False) -> Spectrum:
    """All eigenvalues of a real square matrix.

    A subdiagonal entry is deflated once it falls below
    ``tolerance * (|h[i-1, i-1]| + |h[i, i]|)``. ``max_iterations`` caps QR sweeps
    per eigenvalue; ``converged`` is False if the cap was hit. The matrix is
    scaled by a power of two (exact) so tiny or huge entries cannot under- or
    overflow inside the shift computations.
    """
    a = _as_square(m)
    if balanced:
        a = balance(a)
    peak = np.abs(a).max(initial=0.0)
    scale = 2.0 ** np.frexp(peak)[1] if peak > 0 else 1.0
    h = hessenberg_kernel(a / scale)
    wr, wi, sweeps, ok = hqr_kernel(h, float(tolerance), int(max_iterations))
    return Spectrum((wr + 1j * wi) * scale, int(sweeps), bool(ok))


def spectral_abscissa(m, **kwargs) -> float:
    return eigenvalues(m, **kwargs).abscissa


def _charpoly(a):
    # Faddeev-LeVerrier: coefficients of det(lambda I - A), leading 1
    n = a.shape[0]
    coeffs = [1.0]
    mk = np.zeros_like(a)
    c = 1.0
    for k in range(1, n + 1):
        mk = a @ mk + c * np.eye(n)
        c = -np.trace(a @ mk) / k
        coeffs.append(c)
    return np.array(coeffs)


def charpoly_roots_oracle(m) -> np.ndarray:
    """Eigenvalues of a matrix up to 4x4 via its characteristic polynomial (test oracle)."""
    a = _as_square(m)
    n = a.shape[0]
    if n > 4:
        raise DimensionTooLarge(f"oracle supports dimension <= 4, got {n}")
    poly = _charpoly(a)
    if n == 1:
        return np.array([-poly[1]], dtype=complex)
    if n == 2:
        b, c = poly[1], poly[2]
        disc = b * b - 4.0 * c
        if disc >= 0:
            sq = math.sqrt(disc)
            r1 = -0.5 * (b + math.copysign(sq, b))
            r2 = c / r1 if r1 != 0 else 0.0
            return np.array([r1, r2], dtype=complex)
        sq = math.sqrt(-disc)
        return np.array([complex(-0.5 * b, 0.5 * sq), complex(-0.5 * b, -0.5 * sq)])
    roots = np.roots(poly).astype(complex)
    dpoly = np.polyder(poly)
    for _ in range(3):
        d = np.polyval(dpoly, roots)
        step = np.where(d != 0, np.polyval(poly, roots) / np.where(d != 0, d, 1), 0)
        roots = roots - step
    return roots
