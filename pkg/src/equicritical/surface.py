"""Strip decomposition of the translation surface of df/f.

The horizontal foliation (level sets of Im log f) has n bi-infinite strips
of height 2*pi, one per root.  Each cone point of order k emits 2(k+1)
horizontal separatrices, alternating between rays escaping to infinity and
rays captured by roots.  Every infinity-ray is a cut of the decomposition;
its two germs are identified by where the angularly adjacent root-rays land:
the germ above a cut hugs the counterclockwise-adjacent root-ray, the germ
below hugs the clockwise-adjacent one.  A landing height of 0 marks a strip
bottom (above-germ) or, wrapping, a strip top (below-germ); interior heights
mark slit sides.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Partition,
    PointConfig,
    Polynomial,
    StratumPoint,
    expand_from_stratum,
    validate_stratum,
)
from .continuation import lift_critical_values, newton_lift_point
from .errors import (
    AmbiguousCapture,
    InputError,
    NewtonDivergence,
    NumericalError,
    SolveFailure,
    TraceEscapeFailure,
    WallHit,
)
from .winding import Arc, Marking, outer_radius, remark_windings

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SeparatrixTrace:
    """One traced horizontal ray of a cone point."""

    cone: int
    direction_index: int
    angle: float
    sense: str                     # "infinity" or "root"
    points: tuple[complex, ...]
    terminus_root: int = -1        # root index for captured rays
    landing_angle: float = 0.0     # arg(z - root) at capture


@dataclass(frozen=True)
class FreeProng:
    cone: int
    host: int                      # root index of the hosting strip
    height: float                  # Im period in (0, 2pi)
    period: complex


@dataclass(frozen=True)
class Strip:
    root: int
    fixed_cone: int
    fixed_direction: int
    landing_angle: float
    top_target: tuple
    bottom_target: tuple


@dataclass(frozen=True)
class StripDiagram:
    kappa: Partition
    strips: tuple[Strip, ...]
    free_prongs: tuple[FreeProng, ...]
    traces: tuple[SeparatrixTrace, ...]

    @property
    def cone_orders(self) -> dict[int, int]:
        return {i: k for i, k in enumerate(self.kappa.parts)}

    def grouping(self) -> tuple[int, ...]:
        """Number of strips whose fixed prong belongs to each cone."""
        counts = [0] * self.kappa.p
        for s in self.strips:
            counts[s.fixed_cone] += 1
        return tuple(counts)

    def signature(self):
        """Combinatorial content, stable under small perturbations."""
        strips = tuple(
            (s.root, s.fixed_cone, s.top_target, s.bottom_target) for s in self.strips
        )
        prongs = tuple((fp.cone, fp.host) for fp in self.free_prongs)
        return strips, prongs


def _nearest_dist(z: complex, pts) -> float:
    return min(abs(z - q) for q in pts)


def trace_separatrix(
    f: Polynomial,
    config: PointConfig,
    cone: int,
    direction_index: int,
    escape_radius: float | None = None,
    capture_tol: float = 1e-9,
    max_steps: int = 40_000,
) -> SeparatrixTrace:
    """Trace one horizontal ray of a cone point to a root or to infinity.

    Integrates the unit direction field V/|V| (V = f/f') by RK4 with steps
    proportional to the distance to the nearest marked point, correcting the
    level drift after every step; near the cone the ray is seeded from the
    local chart f ~ v + C (z - w)^{k+1}.
    """
    kappa = config.kappa
    w = config.critical[cone]
    k = kappa.parts[cone]
    pts = config.points
    diam = config.diameter
    esc = escape_radius if escape_radius else 10.0 * max(diam, 1.0)

    # local chart: leading Taylor coefficient of f at w after the flat part
    C = _taylor_lead(f, w, k + 1)
    v = f(w)
    base = (cmath.phase(v / C)) / (k + 1)
    theta = base + math.pi * direction_index / (k + 1)
    d_near = _nearest_dist(w, [q for q in pts if q != w])
    r0 = 0.02 * d_near
    z = w + r0 * cmath.exp(1j * theta)

    V = f(z) / f.deriv_eval(z)
    outward = cmath.exp(1j * theta)
    sgn = 1.0 if (V / outward).real > 0 else -1.0
    sense = "infinity" if sgn > 0 else "root"

    trail = [w, z]
    scale = f.scale
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise TraceEscapeFailure(
                f"separatrix from cone {cone} direction {direction_index} stalled"
            )
        dmin = _nearest_dist(z, pts)
        h = min(max(0.12 * dmin, 1e-7 * diam), 0.08 * esc)
        z_new = _rk4_unit(f, z, sgn, h)
        # level drift correction
        ratio = f(z_new) / f(z)
        drift = cmath.phase(ratio)
        if abs(drift) > 1.2:
            raise AmbiguousCapture("separatrix step crossed a singular region")
        Vn = f(z_new) / f.deriv_eval(z_new)
        z_new = z_new - 1j * Vn * drift
        z = z_new
        trail.append(z)
        if sense == "infinity" and abs(z) > esc:
            return SeparatrixTrace(cone, direction_index, theta, sense, tuple(trail))
        if sense == "root":
            dists = [abs(z - zr) for zr in config.roots]
            j = int(np.argmin(dists))
            if dists[j] < 2e-5 * diam or abs(f(z)) < capture_tol * scale:
                landing = cmath.phase(z - config.roots[j])
                trail.append(config.roots[j])
                return SeparatrixTrace(
                    cone, direction_index, theta, sense, tuple(trail), j, landing
                )
            other_cones = [q for q in config.critical if q != w]
            if other_cones and _nearest_dist(z, other_cones) < 1e-6 * diam:
                raise AmbiguousCapture(
                    f"separatrix from cone {cone} grazes another cone point"
                )


def _taylor_lead(f: Polynomial, w: complex, order: int) -> complex:
    """Coefficient of (z - w)^order in f's Taylor expansion at w."""
    coeffs = np.array(f.coeffs, dtype=complex)
    # repeated synthetic differentiation: value of f^(order)(w) / order!
    n = len(coeffs) - 1
    acc = 0j
    for j in range(order, n + 1):
        acc += coeffs[j] * math.comb(j, order) * w ** (j - order)
    return acc


def _rk4_unit(f: Polynomial, z: complex, sgn: float, h: float) -> complex:
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


def strip_decomposition(config: PointConfig, f: Polynomial | None = None) -> StripDiagram:
    """Trace all separatrices and assemble the combinatorial strip diagram."""
    kappa = config.kappa
    if f is None:
        f = expand_from_stratum(StratumPoint(kappa, config.critical, 0.0))
        raise InputError("strip_decomposition requires the polynomial")
    n, p = kappa.n, kappa.p

    traces: list[SeparatrixTrace] = []
    for cone in range(p):
        k = kappa.parts[cone]
        cone_traces = [
            trace_separatrix(f, config, cone, j) for j in range(2 * (k + 1))
        ]
        senses = [t.sense for t in cone_traces]
        if senses.count("infinity") != k + 1 or senses.count("root") != k + 1:
            raise AmbiguousCapture(
                f"cone {cone}: ray senses do not alternate as expected: {senses}"
            )
        traces.extend(cone_traces)

    incident: dict[int, list[SeparatrixTrace]] = {r: [] for r in range(n)}
    for t in traces:
        if t.sense == "root":
            incident[t.terminus_root].append(t)
    for r in range(n):
        if not incident[r]:
            raise AmbiguousCapture(f"root {r} received no prong leaf")

    # fixed prong per root: deterministic convention (smallest cone id, then
    # smallest direction index)
    fixed: dict[int, SeparatrixTrace] = {}
    for r in range(n):
        fixed[r] = min(incident[r], key=lambda t: (t.cone, t.direction_index))

    # heights of incident leaves within each strip
    def height_in_strip(t: SeparatrixTrace) -> float:
        th = (t.landing_angle - fixed[t.terminus_root].landing_angle) % TWO_PI
        return th

    # free prongs: infinity-rays that lie at the same level as a non-fixed
    # root-ray of the same cone; concretely, every root-incident trace that is
    # not a fixed prong hosts one slit
    free_prongs: list[FreeProng] = []
    prong_of_trace: dict[tuple[int, int], int] = {}
    for r in range(n):
        for t in incident[r]:
            if t is fixed[r]:
                continue
            h = height_in_strip(t)
            re = math.log(abs(f(config.critical[t.cone]))) - math.log(
                abs(f(config.critical[fixed[r].cone]))
            )
            prong_of_trace[(t.cone, t.direction_index)] = len(free_prongs)
            free_prongs.append(FreeProng(t.cone, r, h, complex(re, h)))
    if len(free_prongs) != p - 1:
        raise AmbiguousCapture(
            f"expected {p - 1} free prongs, found {len(free_prongs)}"
        )

    # cut germs: for each infinity-ray, the ccw/cw adjacent root-rays
    strips: list[Strip] = []
    by_cone: dict[int, list[SeparatrixTrace]] = {c: [] for c in range(p)}
    for t in traces:
        by_cone[t.cone].append(t)
    for c in range(p):
        by_cone[c].sort(key=lambda t: t.direction_index)

    def adjacent_root_ray(t_inf: SeparatrixTrace, side: str) -> SeparatrixTrace:
        rays = by_cone[t_inf.cone]
        m = len(rays)
        step = 1 if side == "ccw" else -1
        t = rays[(t_inf.direction_index + step) % m]
        if t.sense != "root":
            raise AmbiguousCapture("ray senses around cone do not alternate")
        return t

    def germ_label(t_root: SeparatrixTrace) -> tuple:
        r = t_root.terminus_root
        if t_root is fixed[r]:
            return ("strip", r)
        return ("slit", prong_of_trace[(t_root.cone, t_root.direction_index)], r)

    # strip tops and bottoms
    for r in range(n):
        fx = fixed[r]
        rays = by_cone[fx.cone]
        m = len(rays)
        r_top = rays[(fx.direction_index + 1) % m]   # ccw neighbor: cut above
        r_bot = rays[(fx.direction_index - 1) % m]   # cw neighbor: cut below
        if r_top.sense != "infinity" or r_bot.sense != "infinity":
            raise AmbiguousCapture("prong alternation failure at a fixed prong")
        # the cut r_top bounds this strip above; its other germ is labeled by
        # its own ccw-adjacent root ray
        top_other = adjacent_root_ray(r_top, "ccw")
        lbl = germ_label(top_other)
        top_target = ("strip_bottom", lbl[1]) if lbl[0] == "strip" else ("slit_above", lbl[1], lbl[2])
        bot_other = adjacent_root_ray(r_bot, "cw")
        lbl2 = germ_label(bot_other)
        bottom_target = ("strip_top", lbl2[1]) if lbl2[0] == "strip" else ("slit_below", lbl2[1], lbl2[2])
        strips.append(
            Strip(r, fx.cone, fx.direction_index, fx.landing_angle, top_target, bottom_target)
        )

    diagram = StripDiagram(kappa, tuple(strips), tuple(free_prongs), tuple(traces))
    _validate_diagram(diagram)
    return diagram


def _validate_diagram(d: StripDiagram) -> None:
    n, p = d.kappa.n, d.kappa.p
    if len(d.strips) != n:
        raise NumericalError(f"{len(d.strips)} strips, expected {n}")
    if len(d.free_prongs) != p - 1:
        raise NumericalError(f"{len(d.free_prongs)} free prongs, expected {p - 1}")
    # prong-leaf count: root-incident separatrices
    incident_count = sum(1 for t in d.traces if t.sense == "root")
    if incident_count != n + p - 1:
        raise NumericalError(
            f"{incident_count} prong leaves, expected n + p - 1 = {n + p - 1}"
        )
    # mirror consistency of strip-to-strip gluings
    for s in d.strips:
        if s.top_target[0] == "strip_bottom":
            other = d.strips[s.top_target[1]]
            if other.bottom_target != ("strip_top", s.root):
                raise NumericalError("asymmetric strip gluing")
    # connectivity of the adjacency graph (genus-0 closure facet)
    adj: dict[int, set[int]] = {s.root: set() for s in d.strips}
    for s in d.strips:
        nxt = s.top_target[1] if s.top_target[0] == "strip_bottom" else d.free_prongs[s.top_target[1]].host
        adj[s.root].add(nxt)
        adj[nxt].add(s.root)
        prv = s.bottom_target[1] if s.bottom_target[0] == "strip_top" else d.free_prongs[s.bottom_target[1]].host
        adj[s.root].add(prv)
        adj[prv].add(s.root)
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    if len(seen) != n:
        raise NumericalError("strip adjacency graph is disconnected")


# ---------------------------------------------------------------------------
# Basepoints


def basepoint_target_values(kappa: Partition, sigma: tuple[int, ...]) -> np.ndarray:
    """Critical values of the standard basepoint: the cone in group position m
    carries value (-1)^(m-1), placing each free prong at height pi with zero
    relative real part."""
    v = np.zeros(kappa.p, dtype=complex)
    for m, cone in enumerate(sigma):
        v[cone] = (-1.0) ** m
    return v


def _identity_sigma(kappa: Partition) -> tuple[int, ...]:
    return tuple(range(kappa.p))


@functools.lru_cache(maxsize=None)
def _solve_basepoint_cached(parts: tuple[int, ...], sigma: tuple[int, ...]) -> StratumPoint:
    kappa = Partition(parts)
    p = kappa.p
    target = basepoint_target_values(kappa, sigma)

    if p == 1:
        # f = (z - 0)^n + v: w = 0, c = f(0) = v
        return StratumPoint(kappa, (0.0,), complex(target[0]))

    seeds = []
    # real-line seeds: cones ordered by sigma with spacing by order
    for spacing in (1.0, 0.6, 1.5):
        for order in _seed_orders(sigma, p):
            pos = np.zeros(p)
            x = 0.0
            for idx in order:
                pos[idx] = x
                x += spacing * (1.0 + 0.3 * kappa.parts[idx])
            pos -= pos.mean()
            seeds.append(tuple(complex(q) for q in pos))

    for seed_w in seeds:
        try:
            s0 = StratumPoint(kappa, seed_w, 0.0)
            v0 = np.array(s0.critical_values(), dtype=complex)
            if np.min(np.abs(v0)) < 1e-6:
                s0 = StratumPoint(kappa, seed_w, 0.37)
                v0 = np.array(s0.critical_values(), dtype=complex)
        except (NumericalError, InputError):
            continue
        for vpath in _target_paths(v0, target):
            try:
                path = lift_critical_values(vpath, s0, wall_clearance_factor=1e-4)
                cand = path.samples[-1][1]
                cfg = validate_stratum(cand)
                f = expand_from_stratum(cand)
                diagram = strip_decomposition(cfg, f)
                if _matches_basepoint(diagram, kappa, sigma, cand):
                    return cand
            except (NewtonDivergence, WallHit, NumericalError, AmbiguousCapture):
                continue
    raise SolveFailure(f"no seed realized the standard basepoint for {kappa} sigma={sigma}")


def _target_paths(v0: np.ndarray, v1: np.ndarray):
    """Candidate wall-avoiding paths from v0 to v1 in critical-value space.

    The straight path first when it clears the walls; then polar staging
    (inflate moduli, rotate arguments, settle moduli) with both rotation
    senses per coordinate, reaching different fiber sheets.
    """
    p = len(v0)
    if _straight_path_clear(v0, v1):
        yield lambda t: v0 + t * (v1 - v0)
    m0 = np.abs(v0)
    m1 = np.abs(v1)
    a0 = np.angle(v0)
    a1 = np.angle(v1)
    safe = np.maximum(np.maximum(m0, m1), 0.8)
    short = (a1 - a0 + math.pi) % TWO_PI - math.pi
    for combo in itertools.product((0, 1), repeat=p):
        delta = np.array([
            s if c == 0 else s - math.copysign(TWO_PI, s if s != 0 else 1.0)
            for s, c in zip(short, combo)
        ])

        def vpath(t: float, delta=delta) -> np.ndarray:
            if t <= 0.25:
                u = t / 0.25
                return v0 * (1.0 + u * (safe / np.maximum(m0, 1e-12) - 1.0))
            if t <= 0.75:
                u = (t - 0.25) / 0.5
                return safe * np.exp(1j * (a0 + u * delta))
            u = (t - 0.75) / 0.25
            mod = safe + u * (m1 - safe)
            return mod * np.exp(1j * (a0 + delta))

        yield vpath


def _seed_orders(sigma: tuple[int, ...], p: int):
    yield sigma
    yield tuple(reversed(sigma))
    for perm in itertools.permutations(range(p)):
        if perm != sigma and perm != tuple(reversed(sigma)):
            yield perm


def _straight_path_clear(v0: np.ndarray, v1: np.ndarray, clearance: float = 5e-3) -> bool:
    for a, b in zip(v0, v1):
        # distance from segment [a, b] to 0
        ab = b - a
        if abs(ab) == 0:
            d = abs(a)
        else:
            t = max(0.0, min(1.0, (-(a) * ab.conjugate()).real / abs(ab) ** 2))
            d = abs(a + t * ab)
        if d < clearance:
            return False
    return True


def _matches_basepoint(diagram: StripDiagram, kappa: Partition,
                       sigma: tuple[int, ...], point: StratumPoint) -> bool:
    """Invariant checks: value argument pattern, free prong hosting chain,
    and (for the identity ordering) the full grouping."""
    v = np.array(point.critical_values(), dtype=complex)
    for m, cone in enumerate(sigma):
        want = math.pi * (m % 2)
        got = cmath.phase(v[cone]) % TWO_PI
        if min(abs(got - want), abs(got - want - TWO_PI), abs(got - want + TWO_PI)) > 1e-6:
            return False
    # each cone sigma[m] (m >= 1) has its free prong hosted in a strip of the
    # previous group, at height ~pi
    host_fixed = {s.root: s.fixed_cone for s in diagram.strips}
    for m in range(1, kappa.p):
        cone = sigma[m]
        fps = [fp for fp in diagram.free_prongs if fp.cone == cone]
        if len(fps) != 1:
            return False
        fp = fps[0]
        if host_fixed[fp.host] != sigma[m - 1]:
            return False
        if abs(fp.height - math.pi) > 0.35:
            return False
    if sigma == _identity_sigma(kappa):
        expected = [0] * kappa.p
        expected[sigma[0]] = kappa.parts[sigma[0]] + 1
        for m in range(1, kappa.p):
            expected[sigma[m]] = kappa.parts[sigma[m]]
        if diagram.grouping() != tuple(expected):
            return False
    return True


def solve_basepoint(kappa: Partition, sigma: tuple[int, ...] | None = None) -> StratumPoint:
    """Standard basepoint of the stratum for the given cone ordering.

    Newton-solved from deterministic real-line seeds to the target critical
    values, then verified against the expected strip combinatorics; results
    are cached per (kappa, sigma).
    """
    if sigma is None:
        sigma = _identity_sigma(kappa)
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(kappa.p)):
        raise InputError(f"sigma must be a permutation of 0..{kappa.p - 1}")
    return _solve_basepoint_cached(kappa.parts, sigma)


# ---------------------------------------------------------------------------
# Standard marking


def standard_marking(diagram: StripDiagram, config: PointConfig,
                     f: Polynomial) -> Marking:
    """Admissible root marking: one leaf-parallel arc per strip at a small
    height above the fixed prong.  Leaf arcs are pairwise disjoint and have
    winding number zero."""
    n = config.kappa.n
    R = outer_radius(config)
    arcs = []
    heights = {s.root: [fp.height for fp in diagram.free_prongs if fp.host == s.root]
               for s in diagram.strips}
    for s in diagram.strips:
        root = config.roots[s.root]
        hs = heights[s.root]
        cap = min(hs) if hs else TWO_PI
        # sit halfway between the fixed prong and the lowest slit, keeping
        # maximal clearance from the cone points on both sides
        eps = 0.5 * min(cap, math.pi)
        theta = s.landing_angle + eps
        local = min(abs(root - q) for q in config.points if q != root)
        z = root + 0.05 * local * cmath.exp(1j * theta)
        trail = [root, z]
        diam = config.diameter
        steps = 0
        while abs(z) < R:
            steps += 1
            if steps > 40_000:
                raise TraceEscapeFailure("marking leaf failed to reach the outer circle")
            dmin = _nearest_dist(z, config.points)
            h = min(max(0.1 * dmin, 1e-7 * diam), 0.35 * R)
            z_new = _rk4_unit(f, z, +1.0, h)
            # correct roundoff drift so the arc stays on its leaf
            drift = cmath.phase(f(z_new) / f(z))
            Vn = f(z_new) / f.deriv_eval(z_new)
            z_new = z_new - 1j * Vn * drift
            z = z_new
            trail.append(z)
        arc = Arc(tuple(reversed(trail)), s.root)
        arcs.append(arc)
    arcs.sort(key=lambda a: a.root)
    marking = Marking(tuple(arcs), tuple(0 for _ in arcs))
    return remark_windings(marking, config, f)
