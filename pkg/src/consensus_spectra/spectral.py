"""pi-geometry, exact spectra of reversible matrices, and cut constants."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import config
from .matrices import MatrixError, _as_array, _pi_array, gram, is_reversible


class SizeError(MatrixError):
    """Exact subset enumeration requested on too large a matrix."""


# -- pi inner product -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class PiGeometry:
    """Inner product <x, y>_pi = sum pi_i x_i y_i and the projection onto 1^perp."""

    pi: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.pi, dtype=float)
        if (p <= 0).any():
            raise MatrixError("pi must be positive")
        object.__setattr__(self, "pi", p)

    def inner(self, x, y) -> float:
        return float(np.dot(self.pi * np.asarray(x), np.asarray(y)))

    def norm(self, x) -> float:
        return math.sqrt(max(self.inner(x, x), 0.0))

    def mean(self, x) -> float:
        """Coordinate of the projection onto span(1), i.e. <x, 1>_pi."""
        return float(np.dot(self.pi, x))

    def project_out(self, x) -> np.ndarray:
        """Component of x pi-orthogonal to the constants."""
        x = np.asarray(x, dtype=float)
        return x - self.mean(x)


def seminorm_N(x) -> float:
    """max(x) - min(x)."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("seminorm of an empty vector")
    return float(x.max() - x.min())


def quadratic_form(P, pi, x) -> float:
    """Q_P(x) = <x, x - Px>_pi."""
    a = _as_array(P)
    x = np.asarray(x, dtype=float)
    return PiGeometry(_pi_array(a, pi)).inner(x, x - a @ x)


def green_sum(P, pi, x) -> float:
    """(1/2) sum_ij pi_i P_ij (x_i - x_j)^2; equals Q_P(x) for reversible P."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    return 0.5 * float(np.sum(p[:, None] * a * diff**2))


# -- Jacobi eigensolver ---------------------------------------------------


@njit(cache=True)
def _offdiag(s):
    n = s.shape[0]
    tot = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                tot += s[i, j] * s[i, j]
    return math.sqrt(tot)


@njit(cache=True)
def jacobi_eigenvalues(s, tol, max_sweeps):
    """Cyclic Jacobi on a symmetric matrix (a copy); returns (eigenvalues, off, sweeps).

    Rotations visit the upper triangle in row-major order.
    """
    a = s.copy()
    n = a.shape[0]
    off = _offdiag(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - sn * akq
                    a[k, q] = sn * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - sn * aqk
                    a[q, k] = sn * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
        sweeps += 1
        off = _offdiag(a)
    return np.diag(a).copy(), off, sweeps


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]  # descending
    offdiag: float
    sweeps: int = 0

    @property
    def lambda2(self) -> float:
        return self.eigenvalues[1] if len(self.eigenvalues) > 1 else float("nan")

    @property
    def lambda_n(self) -> float:
        return self.eigenvalues[-1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "eigenvalues": list(self.eigenvalues),
                "lambda2": self.lambda2,
                "lambda_n": self.lambda_n,
                "method": "jacobi",
                "offdiag": self.offdiag,
            }
        )


def symmetrized(P, pi=None) -> np.ndarray:
    """S = D^{1/2} P D^{-1/2} with D = diag(pi), symmetric under detailed balance."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    r = np.sqrt(p)
    s = r[:, None] * a / r[None, :]
    return 0.5 * (s + s.T)


def reversible_spectrum(P, pi=None) -> Spectrum:
    a = _as_array(P)
    p = _pi_array(a, pi)
    if not is_reversible(a, config.TOL.reversible, p):
        raise MatrixError(
            "matrix is not reversible w.r.t. pi; use gram(P) for non-reversible input"
        )
    vals, off, sweeps = jacobi_eigenvalues(symmetrized(a, p), config.TOL.jacobi_offdiag, config.TOL.jacobi_sweeps)
    if off > config.TOL.jacobi_offdiag:
        raise MatrixError(f"Jacobi did not converge: off-diagonal norm {off:.3e}")
    return Spectrum(tuple(float(v) for v in np.sort(vals)[::-1]), float(off), int(sweeps))


def second_singular(P, pi=None) -> float:
    """sigma_2 = sqrt(lambda_2(P^dag P))."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    lam = reversible_spectrum(gram(a, p), p).lambda2
    return math.sqrt(max(lam, 0.0))


def gershgorin_floor(P) -> float:
    return float(-1.0 + 2.0 * np.diag(_as_array(P)).min())


# -- cut constants by enumeration ------------------------------------------


@njit(cache=True)
def _enumerate_cuts(flow, pi, half_tol):
    """Gray-code sweep over all subsets; returns (mu, h, mu_set, h_set) as bitmasks."""
    n = flow.shape[0]
    inside = np.zeros(n, dtype=np.bool_)
    cut = 0.0
    mass = 0.0
    mu = np.inf
    h = np.inf
    mu_set = 0
    h_set = 0
    mask = 0
    full = (1 << n) - 1
    for k in range(1, 1 << n):
        # bit flipped between gray(k-1) and gray(k)
        v = 0
        x = k
        while x & 1 == 0:
            x >>= 1
            v += 1
        if inside[v]:
            inside[v] = False
            mass -= pi[v]
            for j in range(n):
                if j == v:
                    continue
                if inside[j]:
                    cut += flow[j, v]
                else:
                    cut -= flow[v, j]
        else:
            for j in range(n):
                if j == v:
                    continue
                if inside[j]:
                    cut -= flow[j, v]
                else:
                    cut += flow[v, j]
            inside[v] = True
            mass += pi[v]
        mask ^= 1 << v
        if mask == full:
            continue
        if cut < mu:
            mu = cut
            mu_set = mask
        if mass <= 0.5 + half_tol:
            r = cut / mass
            if r < h:
                h = r
                h_set = mask
    return mu, h, mu_set, h_set


def cut_value(P, pi, subset) -> float:
    """sum_{i in S, j not in S} pi_i P_ij."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    s = np.zeros(a.shape[0], dtype=bool)
    s[list(subset)] = True
    return float((p[s, None] * a[np.ix_(s, ~s)]).sum())


@dataclass(frozen=True)
class CutConstants:
    mu: float
    h: float
    mu_subset: tuple[int, ...]
    h_subset: tuple[int, ...]

    @property
    def cheeger_bracket(self) -> tuple[float, float]:
        """Cheeger inequalities: 1 - 2h <= lambda_2 <= 1 - h^2/2."""
        return 1.0 - 2.0 * self.h, 1.0 - self.h**2 / 2.0


def _bits(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


def cut_constants(P, pi=None) -> CutConstants:
    a = _as_array(P)
    n = a.shape[0]
    if n > config.TOL.max_enum_n:
        raise SizeError(
            f"exact enumeration needs n <= {config.TOL.max_enum_n}, got {n}; "
            "use the analytic bound mu(A^dag A) >= alpha(A)/2 instead"
        )
    if n < 2:
        raise SizeError("cut constants need n >= 2")
    p = _pi_array(a, pi)
    flow = p[:, None] * a
    mu, h, ms, hs = _enumerate_cuts(flow, p, 1e-12)
    return CutConstants(float(max(mu, 0.0)), float(max(h, 0.0)), _bits(ms, n), _bits(hs, n))


def mu(P, pi=None) -> float:
    """min over proper nonempty S of the cut sum_{i in S, j not in S} pi_i P_ij."""
    return cut_constants(P, pi).mu


def cheeger(P, pi=None) -> float:
    """h(P): min over pi(S) <= 1/2 of cut(S)/pi(S)."""
    return cut_constants(P, pi).h
