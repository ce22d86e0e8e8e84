"""Path tracking in the stratum and the library of loop generators.

Loops are realized in critical-value space and lifted by Newton iteration on
Phi(w, c) = (f(w_1), ..., f(w_p)), with the translation gauge fixed by
holding sum(w) constant.  Push moves live on the branched sheet where two
critical points collide: the relative critical value lambda = v_j - v_i
scales as (w_j - w_i)^{k_i + k_j + 1} near the collision, so winding lambda
by k_i + k_j + 1 full turns twists the pair once (the full-twist loop), and
2k + 1 half-turns exchange an equal-order pair (the swap loop).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    Partition,
    PointConfig,
    Polynomial,
    StratumPoint,
    critical_derivative,
    expand_from_stratum,
    roots,
    validate_stratum,
)
from .braids import ROOT, Color, crit
from .errors import (
    AmbiguousCapture,
    GaugeBreak,
    InputError,
    NewtonDivergence,
    NotAdjacent,
    NumericalError,
    StrandCollision,
    WallHit,
)

TWO_PI = 2.0 * math.pi


@dataclass
class StepControl:
    """Tuning knobs for track()."""

    initial_step: float = 0.01
    min_step: float = 1e-7
    max_step: float = 0.05
    newton_tol: float = 1e-12
    newton_max_iter: int = 12
    motion_fraction: float = 0.2   # max predicted motion / local min separation
    collision_factor: float = 1e-4  # of configuration diameter
    max_steps: int = 200_000


@dataclass
class StratumPath:
    """Time-sampled path of stratum points, piecewise-linear in (w, c)."""

    kappa: Partition
    samples: list[tuple[float, StratumPoint]]
    closed: bool = False
    gauge_note: str = ""

    def at(self, t: float) -> StratumPoint:
        """Linear interpolation of (w, c) between bracketing samples."""
        ts = [s[0] for s in self.samples]
        if t <= ts[0]:
            return self.samples[0][1]
        if t >= ts[-1]:
            return self.samples[-1][1]
        import bisect

        k = bisect.bisect_right(ts, t) - 1
        t0, s0 = self.samples[k]
        t1, s1 = self.samples[k + 1]
        u = (t - t0) / (t1 - t0)
        w = tuple(a + u * (b - a) for a, b in zip(s0.w, s1.w))
        c = s0.c + u * (s1.c - s0.c)
        return StratumPoint(self.kappa, w, c)

    def reversed(self) -> "StratumPath":
        rs = [(1.0 - t, s) for t, s in reversed(self.samples)]
        return StratumPath(self.kappa, rs, self.closed, self.gauge_note)

    def concat(self, other: "StratumPath") -> "StratumPath":
        """Concatenate loops based at the same point (time reparametrized)."""
        first = [(0.5 * t, s) for t, s in self.samples]
        second = [(0.5 + 0.5 * t, s) for t, s in other.samples]
        return StratumPath(self.kappa, first + second[1:], self.closed and other.closed)

    def validate(self, tol: float = 1e-9) -> None:
        for _, s in self.samples:
            validate_stratum(s, tol=tol)


@dataclass
class StrandSet:
    """Labeled trajectories of the n root strands and p critical strands."""

    kappa: Partition
    times: np.ndarray            # (T,)
    positions: np.ndarray        # (T, n + p) complex
    colors: tuple[Color, ...]    # length n + p

    @property
    def n(self) -> int:
        return self.kappa.n

    @property
    def p(self) -> int:
        return self.kappa.p

    def reversed(self) -> "StrandSet":
        return StrandSet(
            self.kappa,
            1.0 - self.times[::-1],
            self.positions[::-1].copy(),
            self.colors,
        )

    def closure_permutation(self, tol_factor: float = 1e-5) -> tuple[int, ...]:
        """Match final to initial positions; perm[i] = strand ending at slot i's start."""
        first = self.positions[0]
        last = self.positions[-1]
        scale = max(1.0, np.max(np.abs(first)))
        perm = []
        used = set()
        for z in last:
            d = np.abs(first - z)
            j = int(np.argmin(d))
            if d[j] > 1e-3 * scale or j in used:
                raise NumericalError(
                    f"strand endpoint {z} does not match a start position (err {d[j]:.2e})"
                )
            used.add(j)
            perm.append(j)
        return tuple(perm)


@dataclass(frozen=True)
class LoopSpec:
    """Named loop family at a basepoint.

    kinds: c_orbit(index, radius, turns), full_push(i, j), half_push_pair(i, j),
    swap_equal_order(i, j), cyclic_shift, custom (explicit path).
    All indices are 0-based into the critical tuple.
    """

    kind: str
    base: StratumPoint
    index: int = 0
    other: int = 0
    radius: float = 0.0
    turns: int = 1
    path: StratumPath | None = None
    pinch: float = 0.06

    def describe(self) -> str:
        if self.kind == "c_orbit":
            return f"c_orbit({self.index}, radius={self.radius:g}, turns={self.turns})"
        if self.kind in ("full_push", "half_push_pair", "swap_equal_order"):
            return f"{self.kind}({self.index}, {self.other})"
        return self.kind


def strand_colors(kappa: Partition) -> tuple[Color, ...]:
    return (ROOT,) * kappa.n + tuple(crit(k) for k in kappa.parts)


# ---------------------------------------------------------------------------
# Tracking


def track(path: StratumPath, step: StepControl | None = None) -> StrandSet:
    """Parallel-transport the root/critical configuration along the path.

    Root strands are continued by an explicit predictor (dz/dt from the
    coefficient velocity) and Newton corrector; critical strands follow the
    path's w exactly.  Steps halve adaptively whenever the predicted motion
    exceeds a fraction of the local minimum strand separation.
    """
    sc = step or StepControl()
    kappa = path.kappa
    n, p = kappa.n, kappa.p
    s0 = path.at(0.0)
    f0 = expand_from_stratum(s0)
    z = np.array(roots(f0), dtype=complex)
    w = np.array(s0.w, dtype=complex)
    diam = max(
        1.0,
        float(np.max(np.abs(np.concatenate([z, w])[:, None] - np.concatenate([z, w])[None, :]))),
    )
    collision_threshold = sc.collision_factor * diam

    times = [0.0]
    snapshots = [np.concatenate([z, w])]

    t = 0.0
    dt = sc.initial_step
    nsteps = 0
    while t < 1.0:
        nsteps += 1
        if nsteps > sc.max_steps:
            raise NumericalError("track: step budget exhausted")
        dt = min(dt, 1.0 - t)
        s_a = path.at(t)
        s_b = path.at(t + dt)
        fa = expand_from_stratum(s_a)
        fb = expand_from_stratum(s_b)
        ca = np.array(fa.coeffs)
        cb = np.array(fb.coeffs)
        dcoef = cb - ca

        # predictor: dz/dt = -(df/dt)(z) / f'(z), with df/dt from coefficients
        dfdt = _polyval_vec(dcoef, z)
        fprime = _polyval_vec(_deriv_coeffs(ca), z)
        with np.errstate(all="ignore"):
            vel = -dfdt / fprime
        vel[~np.isfinite(vel)] = 0.0

        all_pts = np.concatenate([z, np.array(s_a.w)])
        minsep = _min_separation(all_pts)
        w_b = np.array(s_b.w, dtype=complex)
        w_motion = float(np.max(np.abs(w_b - np.array(s_a.w))))
        predicted = max(float(np.max(np.abs(vel))), w_motion)

        if predicted > sc.motion_fraction * minsep and dt > sc.min_step:
            dt = max(sc.min_step, dt * 0.5)
            continue

        z_pred = z + vel
        z_new, ok = _newton_all(cb, z_pred, sc.newton_tol * fb.scale, sc.newton_max_iter)
        if not ok:
            if dt > sc.min_step:
                dt = max(sc.min_step, dt * 0.5)
                continue
            raise NewtonDivergence(t + dt)

        pts = np.concatenate([z_new, w_b])
        if _min_separation(pts) < collision_threshold:
            raise StrandCollision(t + dt, f"separation below {collision_threshold:.2e}")

        t = t + dt
        z = z_new
        times.append(t)
        snapshots.append(pts)
        dt = min(sc.max_step, dt * 1.4)

    positions = np.array(snapshots)
    return StrandSet(kappa, np.array(times), positions, strand_colors(kappa))


def _polyval_vec(coeffs_ascending, z):
    acc = np.zeros_like(z)
    for a in coeffs_ascending[::-1]:
        acc = acc * z + a
    return acc


def _deriv_coeffs(coeffs_ascending):
    return np.array(
        [j * coeffs_ascending[j] for j in range(1, len(coeffs_ascending))], dtype=complex
    )


def _min_separation(pts) -> float:
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _newton_all(coeffs, z0, tol, max_iter) -> tuple[np.ndarray, bool]:
    z = z0.copy()
    dc = _deriv_coeffs(coeffs)
    for _ in range(max_iter):
        fv = _polyval_vec(coeffs, z)
        if np.max(np.abs(fv)) < tol:
            return z, True
        fp = _polyval_vec(dc, z)
        with np.errstate(all="ignore"):
            step = fv / fp
        if not np.isfinite(step).all():
            return z, False
        z = z - step
    fv = _polyval_vec(coeffs, z)
    return z, bool(np.max(np.abs(fv)) < tol)


# ---------------------------------------------------------------------------
# Newton lifting of critical-value paths


def critical_value_jacobian(kappa: Partition, w, c) -> np.ndarray:
    """Analytic Jacobian of Phi(w, c) = (f(w_i))_i plus the gauge row.

    d Phi_i / dc = 1;  d Phi_i / d w_j = -k_j * integral_0^{w_i} f'(t)/(t-w_j) dt,
    a polynomial integral because (t - w_j) divides f'.
    """
    p = kappa.p
    J = np.zeros((p + 1, p + 1), dtype=complex)
    for j in range(p):
        q = np.array([1.0 + 0j])
        for m, (wm, km) in enumerate(zip(w, kappa.parts)):
            e = km - 1 if m == j else km
            for _ in range(e):
                q = np.convolve(q, np.array([-wm, 1.0 + 0j]))
        q = q * kappa.n
        Q = np.concatenate([[0.0 + 0j], q / np.arange(1, len(q) + 1)])
        J[:p, j] = -kappa.parts[j] * _polyval_vec(Q, np.array(w, dtype=complex))
    J[:p, p] = 1.0
    J[p, :p] = 1.0
    J[p, p] = 0.0
    return J


def _phi(kappa: Partition, w, c) -> np.ndarray:
    f = expand_from_stratum(StratumPoint(kappa, tuple(w), c))
    return _polyval_vec(np.array(f.coeffs), np.array(w, dtype=complex))


def newton_lift_point(
    kappa: Partition,
    target: np.ndarray,
    w0,
    c0,
    gauge_sum: complex,
    tol: float,
    max_iter: int = 30,
) -> tuple[np.ndarray, complex]:
    """Solve Phi(w, c) = target with sum(w) = gauge_sum by Newton iteration."""
    w = np.array(w0, dtype=complex)
    c = complex(c0)
    p = kappa.p
    for _ in range(max_iter):
        F = np.empty(p + 1, dtype=complex)
        F[:p] = _phi(kappa, w, c) - target
        F[p] = np.sum(w) - gauge_sum
        if np.max(np.abs(F)) < tol:
            return w, c
        J = critical_value_jacobian(kappa, w, c)
        try:
            delta = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(message=f"singular Jacobian: {exc}") from exc
        if not np.isfinite(delta).all():
            raise NewtonDivergence(message="non-finite Newton step")
        w = w - delta[:p]
        c = c - delta[p]
    F = np.empty(p + 1, dtype=complex)
    F[:p] = _phi(kappa, w, c) - target
    F[p] = np.sum(w) - gauge_sum
    if np.max(np.abs(F)) < tol:
        return w, c
    raise NewtonDivergence(message=f"Newton stalled, residual {np.max(np.abs(F)):.2e}")


def lift_critical_values(
    target: Callable[[float], np.ndarray],
    seed: StratumPoint,
    residual_tol: float = 1e-10,
    wall_clearance_factor: float = 5e-3,
    initial_step: float = 0.02,
    min_step: float = 1e-8,
    max_samples: int = 100_000,
    collision_tol: float = 0.0,
) -> StratumPath:
    """Lift a path of critical values to a stratum path.

    target(t) must equal the seed's critical values at t = 0.  The lift holds
    sum(w) constant (translation gauge) and marches t adaptively, halving the
    step on Newton failure or fast motion.
    """
    kappa = seed.kappa
    p = kappa.p
    v0 = np.asarray(target(0.0), dtype=complex)
    seed_values = np.array(seed.critical_values(), dtype=complex)
    if np.max(np.abs(v0 - seed_values)) > 1e-6 * max(1.0, np.max(np.abs(seed_values))):
        raise InputError("target(0) does not match the seed's critical values")
    clearance = wall_clearance_factor * float(np.median(np.abs(v0)))

    gauge_sum = complex(np.sum(np.array(seed.w)))
    w = np.array(seed.w, dtype=complex)
    c = complex(seed.c)
    samples: list[tuple[float, StratumPoint]] = [(0.0, seed)]

    t = 0.0
    dt = initial_step
    count = 0
    while t < 1.0:
        count += 1
        if count > max_samples:
            raise NumericalError("lift: sample budget exhausted")
        dt = min(dt, 1.0 - t)
        t_next = t + dt
        v_next = np.asarray(target(t_next), dtype=complex)
        if np.min(np.abs(v_next)) <= clearance:
            raise WallHit(int(np.argmin(np.abs(v_next))), complex(v_next[np.argmin(np.abs(v_next))]))
        try:
            w_new, c_new = newton_lift_point(
                kappa, v_next, w, c, gauge_sum, residual_tol, max_iter=14
            )
        except NewtonDivergence:
            if dt > min_step:
                dt = max(min_step, dt * 0.5)
                continue
            raise
        # reject jumps that suggest sheet hopping: steps must stay small
        # against both the global scale and the closest pair of critical
        # points (the fiber's deck translates differ by about that much)
        wdiam = max(1.0, float(np.max(np.abs(w))))
        limit = 0.35 * wdiam
        if p > 1:
            d = np.abs(w[:, None] - w[None, :])
            np.fill_diagonal(d, np.inf)
            limit = min(limit, 0.22 * float(d.min()))
        if np.max(np.abs(w_new - w)) > limit and dt > min_step:
            dt = max(min_step, dt * 0.5)
            continue
        if collision_tol > 0.0:
            d = np.abs(w_new[:, None] - w_new[None, :])
            np.fill_diagonal(d, np.inf)
            if d.min() < collision_tol:
                raise StrandCollision(t_next, "critical points collided during lift")
        if abs(np.sum(w_new) - gauge_sum) > 1e-9 * max(1.0, abs(gauge_sum)):
            raise GaugeBreak(f"gauge drift {abs(np.sum(w_new) - gauge_sum):.2e}")
        t = t_next
        w, c = w_new, c_new
        samples.append((t, StratumPoint(kappa, tuple(w), c)))
        dt = min(initial_step * 2.0, dt * 1.5)

    return StratumPath(kappa, samples, closed=False)


# ---------------------------------------------------------------------------
# Loop construction


def make_loop(spec: LoopSpec) -> StratumPath:
    """Realize a named loop as a closed stratum path."""
    if spec.kind == "custom":
        if spec.path is None:
            raise InputError("custom loop needs an explicit path")
        return spec.path
    if spec.kind == "c_orbit":
        return _c_orbit_loop(spec)
    if spec.kind in ("full_push", "swap_equal_order", "half_push_pair"):
        return _pair_loop(spec)
    if spec.kind == "cyclic_shift":
        return _cyclic_shift_loop(spec)
    raise InputError(f"unknown loop kind: {spec.kind}")


def _c_orbit_loop(spec: LoopSpec) -> StratumPath:
    """Lasso in the c-plane around the wall {f(w_i) = 0}, w held fixed.

    Closed pointwise by construction.  When another critical value coincides
    with (or crowds) v_i, the two walls sit at the same point of the c-plane
    and a lasso would wind both clusters; such values are first rotated out
    of the way and the lasso is conjugated by that preparation.
    """
    base = spec.base
    kappa = base.kappa
    v = np.array(base.critical_values(), dtype=complex)
    i = spec.index
    if not (0 <= i < kappa.p):
        raise InputError(f"wall index {i} out of range")
    radius = spec.radius if spec.radius > 0 else 0.3 ** (kappa.parts[i] + 1) * abs(v[i])
    crowded = [
        m for m in range(kappa.p)
        if m != i and abs(v[m] - v[i]) < max(6.0 * radius, 0.12 * abs(v[i]))
    ]
    if not crowded:
        return _c_orbit_core(spec, base, radius)
    last_exc: Exception | None = None
    for signs in itertools.product((1.0, -1.0), repeat=len(crowded)):
        phases = {m: (0.7 if s > 0 else 1.9, 0) for m, s in zip(crowded, signs)}
        try:
            pre_path, inner_base = _pre_move(base, phases)
            core = _c_orbit_core(spec, inner_base, radius)
            whole = pre_path.concat(core).concat(pre_path.reversed())
        except (NewtonDivergence, WallHit, NumericalError) as exc:
            last_exc = exc
            continue
        whole.closed = True
        whole.gauge_note = f"conjugated by value pre-rotation {phases}"
        return whole
    raise NumericalError(f"c_orbit({i}): wall separation failed ({last_exc})")


def _c_orbit_core(spec: LoopSpec, base: StratumPoint, radius: float) -> StratumPath:
    kappa = base.kappa
    v = np.array(base.critical_values(), dtype=complex)
    i = spec.index
    c0 = complex(base.c)
    wall = c0 - v[i]  # f_{c*}(w_i) = 0
    if radius >= abs(v[i]):
        raise InputError("c_orbit radius places the basepoint inside the circle")
    other_walls = np.array([c0 - v[m] for m in range(kappa.p) if m != i], dtype=complex)

    # approach the circle radially from the base, detouring around other walls
    approach = _segment_with_detours(c0, wall + radius * _unit(c0 - wall), other_walls,
                                     0.45 * radius)
    phase0 = cmath.phase(approach[-1] - wall)
    m = max(48, 24 * abs(spec.turns))
    circle = [
        wall + radius * cmath.exp(1j * (phase0 + TWO_PI * spec.turns * k / m))
        for k in range(1, m + 1)
    ]
    cpath = approach + circle + list(reversed(approach[:-1]))
    pts = [(k / (len(cpath) - 1), StratumPoint(kappa, base.w, cc)) for k, cc in enumerate(cpath)]
    return StratumPath(kappa, pts, closed=True)


def _unit(z: complex) -> complex:
    return z / abs(z) if z != 0 else 1.0


def _segment_with_detours(a: complex, b: complex, obstacles, clearance: float) -> list[complex]:
    """Polyline from a to b bowing around obstacle points by semicircles."""
    out = [a]
    direction = b - a
    length = abs(direction)
    if length == 0:
        return [a, b]
    u = direction / length
    events = []
    for o in obstacles:
        s = ((o - a) / u).real
        d = abs(a + s * u - o)
        if 0.0 < s < length and d < clearance:
            events.append((s, o, d))
    events.sort(key=lambda e: e[0])
    pos = 0.0
    for s, o, d in events:
        foot = a + s * u
        side = 1.0 if ((o - a) / u).imag <= 0 else -1.0  # bow away from the obstacle
        entry = max(pos, s - clearance)
        out.append(a + entry * u)
        for k in range(1, 12):
            th = math.pi * k / 12
            out.append(foot - clearance * u * math.cos(th) + 1j * side * clearance * u * math.sin(th))
        pos = min(length, s + clearance)
        out.append(a + pos * u)
    out.append(b)
    return out


def _pair_values_path(
    v0: np.ndarray,
    i: int,
    j: int,
    half_turns: int,
    lam_factor: float,
) -> Callable[[float], np.ndarray]:
    """Swap-style path: shift the pair center, shrink the relative value,
    wind it, retrace.  Both values move; closure swaps them for odd turns."""
    mu0 = 0.5 * (v0[i] + v0[j])
    lam0 = v0[j] - v0[i]
    if abs(mu0) >= 0.6 * abs(lam0):
        mu1 = mu0
    else:
        mu1 = mu0 + 0.55 * abs(lam0) * 1j * _unit(lam0)

    t1, t2, t3, t4 = 0.12, 0.30, 0.70, 0.88

    def path(t: float) -> np.ndarray:
        v = v0.copy()
        if t <= t1:
            u = t / t1
            mu, lam = mu0 + u * (mu1 - mu0), lam0
        elif t <= t2:
            u = (t - t1) / (t2 - t1)
            mu, lam = mu1, lam0 * (1.0 + u * (lam_factor - 1.0))
        elif t <= t3:
            u = (t - t2) / (t3 - t2)
            mu, lam = mu1, lam0 * lam_factor * cmath.exp(1j * math.pi * half_turns * u)
        elif t <= t4:
            u = (t - t3) / (t4 - t3)
            end = lam0 * cmath.exp(1j * math.pi * half_turns)
            lam = end * (lam_factor + u * (1.0 - lam_factor))
            mu = mu1
        else:
            u = (t - t4) / (1.0 - t4)
            mu = mu1 + u * (mu0 - mu1)
            lam = lam0 * cmath.exp(1j * math.pi * half_turns)
        v[i] = mu - 0.5 * lam
        v[j] = mu + 0.5 * lam
        return v

    return path


def _push_values_path(
    v0: np.ndarray,
    i: int,
    j: int,
    full_turns: int,
    lam_factor: float,
    branch: int,
) -> Callable[[float], np.ndarray]:
    """Full-push path in relative-log space: v_j flies to just below v_i,
    orbits it, and flies back.  v_i and all other values stay fixed, and
    v_j = v_i exp(l) never crosses a wall.

    The flight is polar around the collision locus l = 0: shrink radially to
    a safe ring, rotate to the approach angle (the net rotation, offset by
    `branch` full turns, selects the homotopy class and hence the sheet),
    then descend radially.  It never hugs the locus."""
    l0 = cmath.log(v0[j] / v0[i])
    rho0 = abs(l0)
    phi0 = cmath.phase(l0) if rho0 > 1e-9 else -0.5 * math.pi
    ring = min(max(0.2, 0.5 * rho0), 0.5)
    phi1 = -0.5 * math.pi + 2.0 * math.pi * branch
    seg = [max(abs(rho0 - ring), 0.05), max(ring * abs(phi1 - phi0), 0.05), max(ring, 0.05)]
    tot = sum(seg)
    b1, b2 = seg[0] / tot, (seg[0] + seg[1]) / tot

    def flight(u: float) -> complex:
        u = min(max(u, 0.0), 1.0)
        if u <= b1:
            rho = rho0 + (ring - rho0) * (u / b1 if b1 else 1.0)
            return rho * cmath.exp(1j * phi0)
        if u <= b2:
            s = (u - b1) / (b2 - b1) if b2 > b1 else 1.0
            return ring * cmath.exp(1j * (phi0 + (phi1 - phi0) * s))
        s = (u - b2) / (1.0 - b2) if b2 < 1.0 else 1.0
        rho = ring + (lam_factor - ring) * s
        return rho * cmath.exp(1j * phi1)

    l1 = lam_factor * cmath.exp(1j * phi1)
    t1, t2 = 0.3, 0.7

    def path(t: float) -> np.ndarray:
        v = v0.copy()
        if t <= t1:
            l = flight(t / t1)
        elif t <= t2:
            u = (t - t1) / (t2 - t1)
            l = l1 * cmath.exp(2j * math.pi * full_turns * u)
        else:
            l = flight((1.0 - t) / (1.0 - t2))
        v[j] = v0[i] * cmath.exp(l)
        return v

    return path


def _pair_loop(spec: LoopSpec) -> StratumPath:
    base = spec.base
    kappa = base.kappa
    i, j = spec.index, spec.other
    if not (0 <= i < kappa.p and 0 <= j < kappa.p and i != j):
        raise InputError(f"invalid pair ({i}, {j})")
    ki, kj = kappa.parts[i], kappa.parts[j]
    if spec.kind == "swap_equal_order":
        if ki != kj:
            raise InputError("swap requires equal orders")
    elif spec.kind == "half_push_pair":
        if ki != kj:
            raise InputError("half_push_pair closes only for equal orders")

    last_exc: Exception | None = None
    v_base = np.array(base.critical_values(), dtype=complex)
    degenerate = abs(v_base[j] - v_base[i]) < 0.05 * max(abs(v_base[i]), abs(v_base[j]))

    def swap_conjugated() -> StratumPath | None:
        # ride an equal-order exchange to a reordered basepoint where the
        # pair is adjacent, twist there, and return
        nonlocal last_exc
        for m in range(kappa.p):
            if m in (i, j) or kappa.parts[m] != kappa.parts[j]:
                continue
            try:
                carrier = _pair_loop(LoopSpec("swap_equal_order", base, index=m, other=j))
                mid_base = carrier.samples[-1][1]
                inner = _pair_loop(LoopSpec("full_push", mid_base, index=i, other=m))
                whole = carrier.concat(inner).concat(carrier.reversed())
                _check_pair_closure(whole, base, i, j, spec.kind)
                whole.closed = True
                whole.gauge_note = f"conjugated by swap({m},{j})"
                return whole
            except (NotAdjacent, NewtonDivergence, WallHit, NumericalError) as exc:
                last_exc = exc
                continue
        return None

    if spec.kind == "full_push" and degenerate:
        whole = swap_conjugated()
        if whole is not None:
            return whole

    # values crowding the pinch region entangle the collision sheets; rotate
    # them out of the way first and conjugate the loop by that preparation
    for pre_phases in _pre_move_options(base, i, j):
        try:
            pre_path, inner_base = _pre_move(base, pre_phases)
        except (NewtonDivergence, WallHit, NumericalError) as exc:
            last_exc = exc
            continue
        try:
            core = _pair_core_loop(spec, inner_base, i, j)
        except (NotAdjacent, NewtonDivergence, WallHit, NumericalError) as exc:
            last_exc = exc
            continue
        if pre_path is None:
            return core
        whole = pre_path.concat(core).concat(pre_path.reversed())
        _check_pair_closure(whole, base, i, j, spec.kind)
        whole.closed = True
        whole.gauge_note = f"conjugated by value pre-rotation {pre_phases}"
        return whole

    if spec.kind == "full_push" and not degenerate:
        whole = swap_conjugated()
        if whole is not None:
            return whole
    raise NotAdjacent(
        f"{spec.kind}({i},{j}): no pinch approach reached the colliding sheet"
        + (f" ({last_exc})" if last_exc else "")
    )


def _pre_move_options(base: StratumPoint, i: int, j: int):
    """Candidate radial pushes for values crowding the pinch center.

    Radial moves separate the coinciding walls by a large margin without
    sweeping any value past another, so the conjugating paths braid nothing
    and the extracted word stays clean.
    """
    v0 = np.array(base.critical_values(), dtype=complex)
    p = len(v0)
    crowded = [
        m for m in range(p)
        if m not in (i, j) and abs(v0[m] - v0[i]) < 0.25 * abs(v0[i])
    ]
    yield {}
    if crowded:
        for factor in (0.6, 1.2):
            yield {m: (factor, 0) for m in crowded}
    # cones sharing the pair's log-modulus block the vertical corridor even
    # when their values are far; push them off the corridor line too
    others = [m for m in range(p) if m not in (i, j)]
    blocking = [
        m for m in others
        if abs(abs(v0[m]) - abs(v0[i])) < 0.2 * abs(v0[i])
        and m not in crowded
    ]
    for group in (blocking, others):
        if group:
            for factor in (0.6, 1.2):
                yield {m: (factor, 0) for m in group}
    # deck changes: wind one of the pair's values a full turn (fixes all
    # values but moves to another fiber point), combined with clearing moves
    for spin in (1, -1):
        for whom in (j, i):
            yield {whom: (0.0, spin)}
            if others:
                combo = {m: (0.6, 0) for m in others}
                combo[whom] = (0.0, spin)
                yield combo


def _pre_move(base: StratumPoint, moves: dict):
    """Lift the preparation path scaling and/or spinning the listed values.

    moves[m] is (radial factor, whole turns); a pure spin fixes every value
    while moving to another point of the fiber (a deck change).
    """
    if not moves:
        return None, base
    v0 = np.array(base.critical_values(), dtype=complex)

    def coerce(mv):
        return mv if isinstance(mv, tuple) else (mv, 0)

    def vpath(t: float) -> np.ndarray:
        v = v0.copy()
        for m, mv in moves.items():
            factor, spin = coerce(mv)
            v[m] = v0[m] * (1.0 + factor * t) * cmath.exp(2j * math.pi * spin * t)
        return v

    path = lift_critical_values(vpath, base)
    return path, path.samples[-1][1]


def _pair_core_loop(spec: LoopSpec, base: StratumPoint, i: int, j: int) -> StratumPath:
    kappa = base.kappa
    ki, kj = kappa.parts[i], kappa.parts[j]
    order_sum = ki + kj + 1
    v0 = np.array(base.critical_values(), dtype=complex)
    last_exc: Exception | None = None

    if spec.kind == "full_push":
        # primary realization: shrink the relative value along its own
        # direction (the free prong is already adjacent there) and wind
        # 2(k_i + k_j + 1) half-turns
        if abs(v0[j] - v0[i]) > 0.05 * max(abs(v0[i]), abs(v0[j])):
            for shrink in (spec.pinch * 3.5, 0.25, 0.15):
                lam_factor = min(0.25, max(1e-5, shrink ** order_sum))
                vpath = _pair_values_path(v0, i, j, 2 * order_sum, lam_factor)
                try:
                    lifted = lift_critical_values(vpath, base)
                    _check_pinch_branched(lifted, base, i, j, spec.kind)
                except (NewtonDivergence, WallHit, NumericalError, NotAdjacent) as exc:
                    last_exc = exc
                    continue
                lifted.closed = True
                return lifted
        # degenerate or stubborn pairs: polar flight in relative-log space,
        # searching the winding branch that reaches the colliding sheet
        for shrink in (spec.pinch * 3.5, 0.25, 0.15):
            lam_factor = min(0.25, max(1e-5, shrink ** order_sum))
            candidates = []
            for branch in (0, -1, 1, -2, 2):
                vpath = _push_values_path(v0, i, j, order_sum, lam_factor, branch)
                try:
                    lifted = lift_critical_values(vpath, base)
                    _check_pinch_branched(lifted, base, i, j, spec.kind)
                except (NewtonDivergence, WallHit, NumericalError, NotAdjacent) as exc:
                    last_exc = exc
                    continue
                candidates.append((_w_path_length(lifted), branch, lifted))
            if candidates:
                candidates.sort(key=lambda c: c[0])
                lifted = candidates[0][2]
                lifted.closed = True
                return lifted
        raise NotAdjacent(
            f"full_push({i},{j}): pinch failed" + (f" ({last_exc})" if last_exc else "")
        )

    half_turns = 2 * kj + 1 if spec.kind == "swap_equal_order" else 2
    for shrink in (spec.pinch * 3.5, 0.25, 0.15):
        lam_factor = min(0.25, max(1e-5, shrink ** order_sum))
        vpath = _pair_values_path(v0, i, j, half_turns, lam_factor)
        try:
            lifted = lift_critical_values(vpath, base)
            _check_pinch_branched(lifted, base, i, j, spec.kind)
        except (NewtonDivergence, WallHit, NumericalError, NotAdjacent) as exc:
            last_exc = exc
            continue
        lifted.closed = True
        return lifted
    raise NotAdjacent(
        f"{spec.kind}({i},{j}): pinch failed" + (f" ({last_exc})" if last_exc else "")
    )


def _corridor_direction(base: StratumPoint, i: int, j: int) -> complex | None:
    """Unit direction from w_i toward w_j along their surface corridor."""
    from .flow import corridor_collision_direction

    try:
        f = expand_from_stratum(base)
        cfg = validate_stratum(base)
        return corridor_collision_direction(f, cfg, i, j)
    except (NotAdjacent, NumericalError, AmbiguousCapture):
        return None


def _w_path_length(path: StratumPath) -> float:
    total = 0.0
    prev = None
    for _, s in path.samples:
        w = np.array(s.w)
        if prev is not None:
            total += float(np.sum(np.abs(w - prev)))
        prev = w
    return total


def _check_pair_closure(path: StratumPath, base: StratumPoint, i: int, j: int,
                        kind: str) -> None:
    s_end = path.samples[-1][1]
    w_end = np.array(s_end.w)
    w_start = np.array(base.w)
    scale = max(1.0, float(np.max(np.abs(w_start))))
    expected = w_start.copy()
    if kind in ("swap_equal_order", "half_push_pair"):
        expected[i], expected[j] = w_start[j], w_start[i]
    if np.max(np.abs(w_end - expected)) > 1e-6 * scale or abs(s_end.c - base.c) > 1e-6 * scale:
        raise NumericalError(f"{kind}({i},{j}): composed loop failed to close")


def _check_pinch_branched(path: StratumPath, base: StratumPoint, i: int, j: int,
                          kind: str) -> None:
    """The loop is the intended push only if the pinch actually brought the
    pair together (branched sheet).  Otherwise the braid is trivial."""
    d0 = abs(base.w[i] - base.w[j])
    mid = path.at(0.5)
    dmid = abs(mid.w[i] - mid.w[j])
    if not dmid < 0.75 * d0:
        raise NotAdjacent(
            f"{kind}({i},{j}): pair separation did not shrink "
            f"({dmid:.3g} vs {d0:.3g}); prongs not adjacent on this sheet"
        )
    # closure up to the allowed relabeling
    s_end = path.samples[-1][1]
    w_end = np.array(s_end.w)
    w_start = np.array(base.w)
    scale = max(1.0, float(np.max(np.abs(w_start))))
    if kind in ("full_push",):
        if np.max(np.abs(w_end - w_start)) > 1e-6 * scale or abs(s_end.c - base.c) > 1e-6 * scale:
            raise NumericalError(f"{kind}({i},{j}): loop failed to close pointwise")
    else:
        swapped = w_start.copy()
        swapped[i], swapped[j] = w_start[j], w_start[i]
        if np.max(np.abs(w_end - swapped)) > 1e-6 * scale or abs(s_end.c - base.c) > 1e-6 * scale:
            raise NumericalError(f"{kind}({i},{j}): loop failed to close up to the swap")


def _cyclic_shift_loop(spec: LoopSpec) -> StratumPath:
    """Composite of one positive wall orbit per critical point.

    At a standard basepoint each orbit cyclically rotates the cluster of
    k_i + 1 roots attached to w_i, and consecutive clusters share one root,
    so the composite induces an n-cycle on the roots.
    """
    base = spec.base
    kappa = base.kappa
    loop: StratumPath | None = None
    for i in range(kappa.p):
        sub = _c_orbit_loop(LoopSpec("c_orbit", base, index=i, turns=1))
        loop = sub if loop is None else loop.concat(sub)
    assert loop is not None
    loop.closed = True
    return loop


def random_value_loop(base: StratumPoint, rng: np.random.Generator,
                      amplitude: float = 0.12, modes: int = 2) -> StratumPath:
    """Small random null-homotopic loop of critical values, lifted.

    Closed pointwise because the value loop is contractible in the wall
    complement.
    """
    kappa = base.kappa
    v0 = np.array(base.critical_values(), dtype=complex)
    coeff = amplitude * (
        rng.standard_normal((kappa.p, modes)) + 1j * rng.standard_normal((kappa.p, modes))
    ) / math.sqrt(modes)

    def vpath(t: float) -> np.ndarray:
        g = np.zeros(kappa.p, dtype=complex)
        for k in range(modes):
            g = g + coeff[:, k] * (np.exp(2j * math.pi * (k + 1) * t) - 1.0)
        return v0 * (1.0 + g)

    path = lift_critical_values(vpath, base)
    s_end = path.samples[-1][1]
    scale = max(1.0, float(np.max(np.abs(np.array(base.w)))))
    if np.max(np.abs(np.array(s_end.w) - np.array(base.w))) > 1e-6 * scale:
        raise NumericalError("random value loop failed to close")
    path.closed = True
    return path
