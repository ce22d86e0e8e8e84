"""Stratum parameterization, root solving, and branch-tracked log periods.

A point of the stratum is coded by the chart (w, c): the critical points
w_1..w_p with prescribed multiplicities k_1 >= ... >= k_p and the integration
constant c, giving

    f(z) = c + integral_0^z n * prod (t - w_i)^{k_i} dt.

In this chart the squarefree locus is the complement of the p analytic walls
{f(w_i) = 0}.  All arithmetic is double precision with relative tolerances
against scale = max(1, max |coefficient|).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateW,
    InputError,
    NoConvergence,
    NotSquarefree,
    PathThroughZero,
    WallHit,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Partition:
    """Multiset kappa = k_1 >= ... >= k_p of critical multiplicities.

    The associated polynomial degree is n = 1 + sum(parts).
    """

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts:
            raise InputError("partition needs at least one part")
        if any(k < 1 for k in self.parts):
            raise InputError(f"parts must be positive: {self.parts}")
        if any(self.parts[i] < self.parts[i + 1] for i in range(len(self.parts) - 1)):
            raise InputError(f"parts must be nonincreasing: {self.parts}")
        object.__setattr__(self, "parts", tuple(int(k) for k in self.parts))

    @property
    def n(self) -> int:
        return 1 + sum(self.parts)

    @property
    def p(self) -> int:
        return len(self.parts)

    def __str__(self):
        return "{" + ",".join(str(k) for k in self.parts) + "}"


@dataclass(frozen=True)
class Polynomial:
    """Monic polynomial, coefficients ascending (coeffs[j] multiplies z^j)."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise InputError("polynomial must have degree >= 1")
        lead = self.coeffs[-1]
        if abs(lead - 1.0) > 1e-12:
            raise InputError(f"polynomial must be monic, got leading coefficient {lead}")
        object.__setattr__(self, "coeffs", tuple(complex(a) for a in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def scale(self) -> float:
        return max(1.0, max(abs(a) for a in self.coeffs))

    def __call__(self, z):
        """Horner evaluation; accepts scalars or numpy arrays."""
        acc = np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0j
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def derivative(self) -> "Polynomial":
        dcoeffs = tuple(j * self.coeffs[j] for j in range(1, len(self.coeffs)))
        # derivative of a monic polynomial is not monic; return raw coefficients
        return RawPoly(dcoeffs)

    def deriv_eval(self, z):
        acc = np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0j
        for j in range(self.degree, 0, -1):
            acc = acc * z + j * self.coeffs[j]
        return acc


@dataclass(frozen=True)
class RawPoly:
    """Non-monic polynomial helper (ascending coefficients)."""

    coeffs: tuple[complex, ...]

    def __call__(self, z):
        acc = np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0j
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def integrate(self, const: complex = 0j) -> tuple[complex, ...]:
        out = [complex(const)]
        for j, a in enumerate(self.coeffs):
            out.append(a / (j + 1))
        return tuple(out)


@dataclass(frozen=True)
class StratumPoint:
    """Chart point (kappa, w, c) determining f via integration from 0."""

    kappa: Partition
    w: tuple[complex, ...]
    c: complex

    def __post_init__(self):
        if len(self.w) != self.kappa.p:
            raise InputError(f"expected {self.kappa.p} critical points, got {len(self.w)}")
        object.__setattr__(self, "w", tuple(complex(v) for v in self.w))
        object.__setattr__(self, "c", complex(self.c))

    def critical_values(self) -> tuple[complex, ...]:
        f = expand_from_stratum(self)
        return tuple(f(wi) for wi in self.w)


@dataclass(frozen=True)
class PointConfig:
    """The n + p marked points of a stratum member, with weights.

    Roots carry weight -1, the critical point w_i carries weight k_i, and the
    point at infinity (the outer boundary circle) is implicit with weight -1.
    """

    kappa: Partition
    roots: tuple[complex, ...]
    critical: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(complex(z) for z in self.roots))
        object.__setattr__(self, "critical", tuple(complex(z) for z in self.critical))

    @property
    def points(self) -> tuple[complex, ...]:
        return self.roots + self.critical

    def weight(self, index: int) -> int:
        """Weight of marked point `index` in the roots-then-critical order."""
        n = len(self.roots)
        if index < n:
            return -1
        return self.kappa.parts[index - n]

    @property
    def diameter(self) -> float:
        pts = self.points
        return max(abs(a - b) for a in pts for b in pts)

    def min_separation(self) -> float:
        pts = self.points
        return min(
            abs(pts[i] - pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts))
        )


def critical_derivative(kappa: Partition, w: tuple[complex, ...]) -> RawPoly:
    """Coefficients of f'(t) = n * prod (t - w_i)^{k_i}, ascending."""
    coeffs = np.array([1.0 + 0j])
    for wi, ki in zip(w, kappa.parts):
        factor = np.array([-wi, 1.0 + 0j])
        for _ in range(ki):
            coeffs = np.convolve(coeffs, factor)
    coeffs = coeffs * kappa.n
    return RawPoly(tuple(coeffs))


def expand_from_stratum(s: StratumPoint) -> Polynomial:
    """Expand the chart point into monic coefficients (f(0) = c)."""
    fprime = critical_derivative(s.kappa, s.w)
    return Polynomial(fprime.integrate(const=s.c))


def roots(
    f: Polynomial,
    tol: float = 1e-12,
    max_iter: int = 400,
    separation_threshold: float = 1e-7,
) -> list[complex]:
    """All roots by Aberth-Ehrlich simultaneous iteration.

    Deterministic: initial guesses lie on a Cauchy-bound circle with a fixed
    irrational phase offset, and restarts perturb them with a seeded
    generator.  Output is sorted lexicographically by (Re, Im).
    """
    n = f.degree
    coeffs = np.array(f.coeffs, dtype=complex)
    scale = f.scale
    radius = 1.0 + max(abs(a) for a in coeffs[:-1])

    rng = np.random.default_rng(987654321)
    for attempt in range(6):
        z = radius * np.exp(
            2j * math.pi * (np.arange(n) / n + 0.2862405226 + 0.05 * attempt)
        )
        if attempt > 0:
            z = z * (1.0 + 0.1 * rng.standard_normal(n)) + 0.1 * radius * (
                rng.standard_normal(n) + 1j * rng.standard_normal(n)
            )
        converged = False
        for _ in range(max_iter):
            pv = np.zeros(n, dtype=complex)
            dv = np.zeros(n, dtype=complex)
            for a in coeffs[::-1]:
                dv = dv * z + pv
                pv = pv * z + a
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv_sum = (1.0 / diff).sum(axis=1) - 1.0  # drop the diagonal 1/1 terms
            with np.errstate(all="ignore"):
                newton = pv / dv
                denom = 1.0 - newton * inv_sum
                step = newton / denom
            bad = ~np.isfinite(step)
            if bad.any():
                safe = np.where(np.isfinite(newton), newton, 0.0)
                step = np.where(bad, safe, step)
            z = z - step
            if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(z))):
                converged = True
                break
        if converged and np.max(np.abs(f(z))) < 1e3 * tol * scale:
            break
    else:
        raise NoConvergence(f"Aberth iteration failed after {max_iter} iterations x 6 restarts")

    out = sorted((complex(v) for v in z), key=lambda v: (v.real, v.imag))
    d = max(1.0, max(abs(v) for v in out))
    for i in range(len(out) - 1):
        for j in range(i + 1, len(out)):
            if abs(out[i] - out[j]) < separation_threshold * d:
                raise NotSquarefree(
                    f"roots {i} and {j} separated by {abs(out[i] - out[j]):.3e}"
                )
    return out


def validate_stratum(s: StratumPoint, tol: float = 1e-9) -> PointConfig:
    """Check the squarefree condition and return the full point configuration.

    Raises DegenerateW when critical points collide and WallHit(i) when the
    critical value f(w_i) falls below tol * scale.
    """
    p = s.kappa.p
    if p > 1:
        d = max(1.0, max(abs(v) for v in s.w))
        for i in range(p):
            for j in range(i + 1, p):
                if abs(s.w[i] - s.w[j]) < 1e-9 * d:
                    raise DegenerateW(f"critical points {i} and {j} coincide")
    f = expand_from_stratum(s)
    for i, wi in enumerate(s.w):
        v = f(wi)
        if abs(v) <= tol * f.scale:
            raise WallHit(i, v)
    zs = roots(f)
    return PointConfig(kappa=s.kappa, roots=tuple(zs), critical=s.w)


def _segment_log_increment(f: Polynomial, a: complex, b: complex, clearance: float,
                           depth: int = 0, max_depth: int = 48) -> complex:
    """Branch-tracked log f(b) - log f(a) along the straight segment [a, b].

    Subdivides (step doubling) until each step's argument increment is below
    pi/2, which makes the branch continuation unambiguous.
    """
    fa = f(a)
    fb = f(b)
    if abs(fa) <= clearance or abs(fb) <= clearance:
        raise PathThroughZero(f"|f| fell below clearance {clearance:.2e} on the path")
    ratio = fb / fa
    dphi = cmath.phase(ratio)
    if abs(dphi) < math.pi / 2 and abs(ratio - 1.0) < 0.7:
        return cmath.log(ratio)
    if depth >= max_depth:
        raise PathThroughZero("subdivision limit reached; path too close to a root")
    mid = 0.5 * (a + b)
    return (
        _segment_log_increment(f, a, mid, clearance, depth + 1, max_depth)
        + _segment_log_increment(f, mid, b, clearance, depth + 1, max_depth)
    )


def log_period(f: Polynomial, path, clearance_factor: float = 1e-12) -> complex:
    """Integral of df/f along a polyline, with continuous branch tracking.

    Equals log f(end) - log f(start) for the branch continued along the path.
    A closed positively-oriented loop around a single root returns 2*pi*i.
    """
    pts = [complex(z) for z in path]
    if len(pts) < 2:
        return 0j
    clearance = clearance_factor * f.scale
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            continue
        total += _segment_log_increment(f, a, b, clearance)
    return total


def circle_path(center: complex, radius: float, samples: int = 64,
                turns: float = 1.0, phase: float = 0.0) -> list[complex]:
    """Closed (for integer turns) polyline circle, positively oriented."""
    m = max(8, int(samples * max(1.0, abs(turns))))
    return [
        center + radius * cmath.exp(1j * (phase + TWO_PI * turns * k / m))
        for k in range(m + 1)
    ]


def random_stratum_point(
    kappa: Partition,
    rng: np.random.Generator,
    tol: float = 1e-6,
    max_tries: int = 200,
) -> StratumPoint:
    """Sample a valid stratum point: w uniform in a disk, c normal, resampled
    until validate_stratum accepts."""
    for _ in range(max_tries):
        w = tuple(
            complex(x, y)
            for x, y in zip(rng.uniform(-1.5, 1.5, kappa.p), rng.uniform(-1.5, 1.5, kappa.p))
        )
        c = complex(rng.normal(), rng.normal())
        s = StratumPoint(kappa=kappa, w=w, c=c)
        try:
            cfg = validate_stratum(s, tol=tol)
        except (WallHit, DegenerateW, NotSquarefree, NoConvergence):
            continue
        if cfg.min_separation() > 0.05:
            return s
    raise NoConvergence(f"could not sample a valid stratum point for {kappa}")
