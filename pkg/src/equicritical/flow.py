"""Direction-field tracing utilities shared by the surface and loop layers.

The horizontal field is V = f/f' (leaf tangents); the vertical flow iV/|V|
climbs between levels of Im log f.  The corridor between an adjacent pair of
cone points follows the vertical flow from the free prong of one up to a
prong of the other; its arrival direction identifies the natural collision
direction for pinch loops.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .core import PointConfig, Polynomial
from .errors import AmbiguousCapture, NotAdjacent

TWO_PI = 2.0 * math.pi


def taylor_lead(f: Polynomial, w: complex, order: int) -> complex:
    """Coefficient of (z - w)^order in f's Taylor expansion at w."""
    coeffs = np.array(f.coeffs, dtype=complex)
    n = len(coeffs) - 1
    acc = 0j
    for j in range(order, n + 1):
        acc += coeffs[j] * math.comb(j, order) * w ** (j - order)
    return acc


def rk4_unit(f: Polynomial, z: complex, sgn: float, h: float) -> complex:
    """One RK4 step of the unit horizontal field, sign +1 toward infinity."""

    def vel(y: complex) -> complex:
        V = f(y) / f.deriv_eval(y)
        a = abs(V)
        if a == 0 or not cmath.isfinite(V):
            raise AmbiguousCapture("direction field singular along trace")
        return sgn * V / a

    k1 = vel(z)
    k2 = vel(z + 0.5 * h * k1)
    k3 = vel(z + 0.5 * h * k2)
    k4 = vel(z + h * k3)
    return z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def climb(f: Polynomial, cfg: PointConfig, z0: complex, gap: float, wi: complex,
          max_steps: int = 60_000):
    """Integrate the vertical unit field until the height gain reaches gap,
    returning the trail when it arrives near the target cone point."""
    z = z0
    climbed = 0.0
    trail = [z]
    diam = cfg.diameter
    others = [q for q in cfg.points if q != wi]
    for _ in range(max_steps):
        dmin = min(abs(z - q) for q in others)
        d_target = abs(z - wi)
        h = min(max(0.1 * min(dmin, d_target + 0.05 * diam), 1e-7 * diam), 0.05 * diam)
        V = f(z) / f.deriv_eval(z)
        a = abs(V)
        if a == 0 or not cmath.isfinite(V):
            return None
        z_new = z + 1j * h * V / a
        dphi = cmath.phase(f(z_new) / f(z))
        climbed += dphi
        # horizontal drift correction: keep Re log f constant
        dre = math.log(abs(f(z_new))) - math.log(abs(f(z)))
        Vn = f(z_new) / f.deriv_eval(z_new)
        z_new = z_new - Vn * dre
        z = z_new
        trail.append(z)
        if climbed >= gap - 0.12:
            if abs(z - wi) < 0.25 * diam:
                return trail
            return None
        if abs(z) > 12 * diam:
            return None
    return None


def vertical_corridor(f: Polynomial, cfg: PointConfig, i: int, j: int,
                      max_steps: int = 60_000) -> list[complex]:
    """Path from cone j to cone i following the vertical flow (the adjacency
    corridor between the free prong of j and a fixed prong of i)."""
    wj = cfg.critical[j]
    wi = cfg.critical[i]
    kj = cfg.kappa.parts[j]
    vj = f(wj)
    vi = f(wi)
    gap = (cmath.phase(vi) - cmath.phase(vj)) % TWO_PI
    if gap < 1e-9:
        gap = TWO_PI

    C = taylor_lead(f, wj, kj + 1)
    best = None
    d_near = min(abs(wj - q) for q in cfg.points if q != wj)
    for direction in range(2 * (kj + 1)):
        theta = (cmath.phase(vj / C)) / (kj + 1) + math.pi * direction / (kj + 1)
        z0 = wj + 0.03 * d_near * cmath.exp(1j * theta)
        V = f(z0) / f.deriv_eval(z0)
        if (V / cmath.exp(1j * theta)).real <= 0:
            continue  # not a rightward ray
        trail = climb(f, cfg, z0, gap, wi, max_steps)
        if trail is not None:
            cand = [wj] + trail + [wi]
            if best is None or _length(cand) < _length(best):
                best = cand
    if best is None:
        raise NotAdjacent(f"no vertical corridor from cone {j} to cone {i}")
    return best


def corridor_collision_direction(f: Polynomial, cfg: PointConfig,
                                 i: int, j: int) -> complex:
    """Unit vector from cone i toward cone j along their corridor (the
    direction in which the pair merges when pinched naturally)."""
    corridor = vertical_corridor(f, cfg, i, j)
    wi = cfg.critical[i]
    # sample the corridor a little before its arrival at w_i
    for z in reversed(corridor[:-1]):
        if abs(z - wi) > 0.02 * cfg.diameter:
            d = z - wi
            return d / abs(d)
    d = corridor[0] - wi
    return d / abs(d)


def _length(pts) -> float:
    return sum(abs(b - a) for a, b in zip(pts[:-1], pts[1:]))
