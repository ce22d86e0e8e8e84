"""Arcs, markings, the logarithmic relative winding number, and defects.

The winding number of an arc from the outer circle to a root measures the
total turning of the arc's tangent against the horizontal direction field
V(z) = f(z)/f'(z) of the translation structure, in units of full turns.
Arc ends are extended along leaves first, which makes the total an integer;
the pre-rounding residual is the quality check.

Transport of a marking along strand motion is a geometric ambient isotopy:
each marked point's displacement is applied to polyline vertices through a
bump-supported local translation, substepped so every update is a small
Lipschitz perturbation of the identity (hence an actual homeomorphism).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import PointConfig, Polynomial, Partition
from .continuation import StrandSet, StratumPath, track
from .errors import (
    ArcsNotDisjoint,
    ArcThroughPoint,
    InputError,
    IsotopyBreakdown,
    ResidualTooLarge,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Arc:
    """Simple polyline from a point on the outer circle to a root."""

    points: tuple[complex, ...]
    root: int  # index into config.roots

    def __post_init__(self):
        if len(self.points) < 2:
            raise InputError("arc needs at least two points")
        object.__setattr__(self, "points", tuple(complex(z) for z in self.points))


@dataclass(frozen=True)
class Marking:
    """One arc per root, with integer winding annotations."""

    arcs: tuple[Arc, ...]
    windings: tuple[int, ...]

    def __post_init__(self):
        targets = sorted(a.root for a in self.arcs)
        if targets != list(range(len(self.arcs))):
            raise InputError("marking must cover each root exactly once")
        if len(self.windings) != len(self.arcs):
            raise InputError("one winding per arc")

    @property
    def is_arm(self) -> bool:
        return all(v == 0 for v in self.windings)


@dataclass(frozen=True)
class DefectVector:
    values: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)


def outer_radius(config: PointConfig) -> float:
    return 2.2 * max(1.0, max(abs(z) for z in config.points))


def _field(f: Polynomial, z: complex) -> complex:
    return f(z) / f.deriv_eval(z)


def _wrap(x: float) -> float:
    return (x + math.pi) % TWO_PI - math.pi


def _arg_field_delta(f: Polynomial, a: complex, b: complex, depth: int = 0) -> float:
    """Continuously tracked change of arg V along the segment [a, b]."""
    va = _field(f, a)
    vb = _field(f, b)
    if va == 0 or vb == 0 or not (cmath.isfinite(va) and cmath.isfinite(vb)):
        raise ArcThroughPoint("field singular on the arc")
    d = _wrap(cmath.phase(vb) - cmath.phase(va))
    if abs(d) < 0.5:
        return d
    if depth > 40:
        raise ArcThroughPoint("field direction varies too fast; arc too close to a point")
    mid = 0.5 * (a + b)
    return _arg_field_delta(f, a, mid, depth + 1) + _arg_field_delta(f, mid, b, depth + 1)


def _extend_ends(arc: Arc, config: PointConfig, f: Polynomial) -> list[complex]:
    """Prepend an outer leaf tail and replace the root approach by a traced
    leaf segment so both end tangents match the field direction."""
    pts = list(arc.points)
    root = config.roots[arc.root]

    # outer end: far out the field is asymptotically radial, so extend radially
    z0 = pts[0]
    pre = [z0 * (1.0 + 0.6 * (1.0 - k / 6.0)) for k in range(6)]
    pts = pre + pts

    # root end: trim close vertices, then follow -V into the root
    local = min(
        abs(root - q)
        for q in config.points
        if q != root
    )
    rho = 0.35 * local
    while len(pts) > 2 and abs(pts[-2] - root) < rho:
        del pts[-2]
    cur = pts[-2] if abs(pts[-1] - root) < 1e-12 else pts[-1]
    if abs(pts[-1] - root) < 1e-12:
        del pts[-1]
    # walk toward the root along the normalized backward field
    guard = 0
    z = cur
    while abs(z - root) > 1e-5 * rho and guard < 400:
        guard += 1
        v = _field(f, z)
        step = min(0.2 * abs(z - root), 0.25 * rho)
        z = z - step * v / abs(v)
        pts.append(z)
    pts.append(root)
    return pts


def winding_number(arc: Arc, config: PointConfig, f: Polynomial,
                   residual_tol: float = 0.1) -> int:
    """Turning number of the arc against the field V = f/f', in full turns.

    Integer for leaf-aligned ends; raises ResidualTooLarge when the
    pre-rounding residual exceeds residual_tol.
    """
    _check_arc_clearance(arc, config)
    pts = _extend_ends(arc, config, f)

    total = 0.0
    prev_dir = None
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            continue
        d = b - a
        if prev_dir is not None:
            total += _wrap(cmath.phase(d) - cmath.phase(prev_dir))
        # stop the field tracking just short of the root endpoint
        b_eval = b if abs(b - config.roots[arc.root]) > 1e-12 else a + 0.999 * (b - a)
        total -= _arg_field_delta(f, a, b_eval)
        prev_dir = d

    # alignment residuals at both ends
    v_start = _field(f, pts[0])
    first_dir = next(b - a for a, b in zip(pts[:-1], pts[1:]) if b != a)
    r0 = _wrap(cmath.phase(first_dir) - cmath.phase(v_start) - math.pi)
    raw = (total - r0) / TWO_PI
    # the end alignment is exact by construction of the traced tail; fold the
    # start misalignment out and round
    val = round(raw)
    residual = abs(raw - val)
    if residual > residual_tol:
        raise ResidualTooLarge(residual)
    return int(val)


def _check_arc_clearance(arc: Arc, config: PointConfig) -> None:
    pts = np.array(arc.points, dtype=complex)
    for j, q in enumerate(config.points):
        if j == arc.root:
            d = np.abs(pts[:-1] - q)
            if d.size and np.min(d) < 1e-12:
                raise ArcThroughPoint("arc passes through its own root before its end")
            continue
        dmin = _polyline_point_distance(pts, q)
        if dmin < 1e-9 * max(1.0, abs(q)):
            raise ArcThroughPoint(f"arc passes through marked point {q}")


def _polyline_point_distance(pts: np.ndarray, q: complex) -> float:
    a = pts[:-1]
    b = pts[1:]
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(all="ignore"):
        t = np.clip(((q - a) * np.conj(ab)).real / np.where(denom == 0, 1.0, denom), 0.0, 1.0)
    proj = a + t * ab
    return float(np.min(np.abs(proj - q)))


def _segment_distances(pts: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """Min distance of each polyline segment to the point set qs."""
    a = pts[:-1, None]
    b = pts[1:, None]
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(all="ignore"):
        t = np.clip(((qs[None, :] - a) * np.conj(ab)).real
                    / np.where(denom == 0, 1.0, denom), 0.0, 1.0)
    proj = a + t * ab
    return np.min(np.abs(proj - qs[None, :]), axis=1)


# ---------------------------------------------------------------------------
# Transport


def _bump(x: np.ndarray) -> np.ndarray:
    """1 on [0, 0.5], smooth cubic fall to 0 at 1."""
    y = np.clip((x - 0.5) / 0.5, 0.0, 1.0)
    return 1.0 - y * y * (3.0 - 2.0 * y)


def transport(marking: Marking, strands: StrandSet,
              refine_budget: int = 60_000_000,
              substep_fraction: float = 0.025,
              refine_fraction: float = 0.12,
              root_reference: tuple[complex, ...] | None = None) -> Marking:
    """Carry a marking along strand motion by local ambient isotopy.

    Marked points never feel each other's bumps (radius 0.4 of the minimum
    separation), so arc endpoints track their root strands exactly.  Arcs far
    from every moving point are skipped per step.  Output windings are reset
    to 0; recompute them with remark_windings or delta_psi.
    """
    times = strands.times
    P = strands.positions  # (T, m)
    n = strands.n

    arcs = [list(a.points) for a in marking.arcs]
    total_v = 0

    for k in range(len(times) - 1):
        p_from = P[k]
        p_to = P[k + 1]
        disp = p_to - p_from
        maxd = float(np.max(np.abs(disp)))
        if maxd == 0.0:
            continue
        minsep = _min_sep(p_from)
        radius_hint = 0.4 * minsep
        movers = np.abs(disp) > 1e-15 * max(1.0, maxd)
        mover_pts = p_from[movers]

        active = []
        for ai, a in enumerate(arcs):
            arr = np.array(a, dtype=complex)
            dmin = float(np.min(_segment_distances(arr, mover_pts)))
            if dmin - maxd < 1.3 * radius_hint:
                active.append(ai)
        if not active:
            continue

        nsub = max(1, int(math.ceil(maxd / (substep_fraction * minsep))))
        for s in range(nsub):
            pa = p_from + (s / nsub) * disp
            d = disp / nsub
            sep = _min_sep(pa)
            radius = 0.4 * sep
            for ai in active:
                arcs[ai] = _refine_near(arcs[ai], pa[movers], radius, refine_fraction)
            arcs = _carry_once(arcs, pa, d, radius, active)
            total_v += sum(len(arcs[ai]) for ai in active)
            if total_v > refine_budget:
                raise IsotopyBreakdown("transport refinement budget exhausted")
        for ai in active:
            arcs[ai] = _refine(arcs[ai], P[k + 1], strands)

    final_roots = P[-1][:n]
    if root_reference is not None:
        # index against the caller's configuration (robust under float ties)
        ref = np.array(root_reference, dtype=complex)
        col_to_root = {
            col: int(np.argmin(np.abs(ref - final_roots[col]))) for col in range(n)
        }
    else:
        # canonical (lexicographic) indexing of the final roots, matching the
        # ordering validate_stratum produces for the final configuration
        canon = sorted(range(n), key=lambda j: (final_roots[j].real, final_roots[j].imag))
        col_to_root = {col: idx for idx, col in enumerate(canon)}
    out_arcs = []
    for a_pts, arc in zip(arcs, marking.arcs):
        # snap the tracked root endpoint exactly onto its strand
        col = _nearest_index(final_roots, a_pts[-1])
        a_pts[-1] = complex(final_roots[col])
        out_arcs.append(Arc(tuple(a_pts), col_to_root[col]))
    return Marking(tuple(out_arcs), tuple(0 for _ in out_arcs))


def _nearest_index(points: np.ndarray, z: complex) -> int:
    return int(np.argmin(np.abs(points - z)))


def _min_sep(pts: np.ndarray) -> float:
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _carry_once(arcs: list[list[complex]], centers: np.ndarray, disp: np.ndarray,
                radius: float, active: list[int] | None = None) -> list[list[complex]]:
    idxs = list(range(len(arcs))) if active is None else active
    sizes = [len(arcs[i]) for i in idxs]
    flat = np.concatenate([np.array(arcs[i], dtype=complex) for i in idxs])
    dist = np.abs(flat[:, None] - centers[None, :]) / radius
    weights = _bump(dist)
    flat = flat + weights @ disp
    out = list(arcs)
    pos = 0
    for i, s in zip(idxs, sizes):
        out[i] = list(flat[pos: pos + s])
        pos += s
    return out


def _refine_near(pts: list[complex], movers: np.ndarray, radius: float,
                 fraction: float = 0.12) -> list[complex]:
    """Split segments passing close to a moving point so the straightened
    polyline tracks the bump field faithfully."""
    if len(movers) == 0:
        return pts
    arr = np.array(pts, dtype=complex)
    lengths = np.abs(arr[1:] - arr[:-1])
    near = _segment_distances(arr, movers) < 2.2 * radius
    too_long = lengths > fraction * radius
    if not bool(np.any(near & too_long)):
        return pts
    out = [pts[0]]
    for idx in range(len(pts) - 1):
        a, b = pts[idx], pts[idx + 1]
        if near[idx] and too_long[idx]:
            kseg = int(math.ceil(lengths[idx] / (fraction * radius)))
            for j in range(1, kseg):
                out.append(a + (j / kseg) * (b - a))
        out.append(b)
    return out


def _refine(pts: list[complex], marked: np.ndarray, strands: StrandSet) -> list[complex]:
    """Merge sub-resolution debris, split segments that are long relative to
    their distance to marked points, and prune collinear runs.

    The merge displaces the curve by far less than the worst-case gap between
    neighboring strands of a wound arc (which scales with the same local
    clearance), so it cannot change the isotopy class.
    """
    merged = [pts[0]]
    for z in pts[1:-1]:
        a = merged[-1]
        L = abs(z - a)
        if L > 0:
            mid = 0.5 * (a + z)
            dmin = float(np.min(np.abs(marked - mid)))
            if L < 0.02 * dmin:
                continue
        merged.append(z)
    merged.append(pts[-1])
    pts = merged

    out = [pts[0]]
    for z in pts[1:]:
        a = out[-1]
        seg = z - a
        L = abs(seg)
        if L == 0:
            continue
        mid = 0.5 * (a + z)
        dmin = float(np.min(np.abs(marked - mid)))
        allowed = max(0.35 * dmin, 1e-6)
        if L > allowed:
            k = int(math.ceil(L / allowed))
            for j in range(1, k):
                out.append(a + (j / k) * seg)
        out.append(z)
    # prune nearly-collinear runs well away from the points (shortcuts this
    # conservative cannot sweep across another strand of the lamination)
    pruned = [out[0]]
    for j in range(1, len(out) - 1):
        a, b, c = pruned[-1], out[j], out[j + 1]
        d1, d2 = b - a, c - b
        if d1 != 0 and d2 != 0:
            turn = abs(_wrap(cmath.phase(d2) - cmath.phase(d1)))
            dmin = float(np.min(np.abs(marked - b)))
            if turn < 2e-4 and abs(c - a) < 0.15 * dmin:
                continue
        pruned.append(b)
    pruned.append(out[-1])
    return pruned


def remark_windings(marking: Marking, config: PointConfig, f: Polynomial) -> Marking:
    w = tuple(winding_number(a, config, f) for a in marking.arcs)
    return Marking(marking.arcs, w)


def delta_psi(loop: StratumPath | None, base_marking: Marking,
              strands: StrandSet | None = None,
              config: PointConfig | None = None,
              f: Polynomial | None = None) -> DefectVector:
    """Per-arc winding change around a closed loop.

    Component i compares the transported arc i against arc i's annotation.
    Either the loop or a precomputed strand set (with config and f) works.
    """
    from .core import expand_from_stratum, validate_stratum

    if strands is None:
        if loop is None:
            raise InputError("delta_psi needs a loop or a strand set")
        strands = track(loop)
    if f is None:
        if loop is None:
            raise InputError("delta_psi needs config and f when no loop is given")
        end = loop.samples[-1][1]
        f = expand_from_stratum(end)
        config = validate_stratum(end)
    carried = transport(base_marking, strands, root_reference=config.roots)
    values = []
    for i, arc in enumerate(carried.arcs):
        values.append(winding_number(arc, config, f) - base_marking.windings[i])
    return DefectVector(tuple(values))


# ---------------------------------------------------------------------------
# Arc types and mod-r reduction


def _segments_intersect(a1, a2, b1, b2) -> bool:
    def orient(p, q, r):
        v = (q - p).real * (r - p).imag - (q - p).imag * (r - p).real
        if abs(v) < 1e-15:
            return 0
        return 1 if v > 0 else -1

    o1 = orient(a1, a2, b1)
    o2 = orient(a1, a2, b2)
    o3 = orient(b1, b2, a1)
    o4 = orient(b1, b2, a2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def arcs_interior_disjoint(a: Arc, b: Arc, skip_shared_root: bool = True) -> bool:
    pa = a.points
    pb = b.points
    for i in range(len(pa) - 1):
        for j in range(len(pb) - 1):
            if skip_shared_root and i == len(pa) - 2 and j == len(pb) - 2:
                continue  # segments meeting at the shared root endpoint
            if _segments_intersect(pa[i], pa[i + 1], pb[j], pb[j + 1]):
                return False
    return True


def _polygon_winding(poly: list[complex], q: complex) -> int:
    total = 0.0
    for a, b in zip(poly, poly[1:] + poly[:1]):
        total += _wrap(cmath.phase(b - q) - cmath.phase(a - q))
    return round(total / TWO_PI)


def arc_type(a: Arc, b: Arc, config: PointConfig) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Ordered partition of the critical points by side of arc a.

    a and b must end at the same root with disjoint interiors; the closed
    curve a followed by reversed b (closed along the outer circle) splits
    the plane, and each critical point is classified left/right of a when a
    is oriented from the outer circle to the root.
    """
    if a.root != b.root:
        raise InputError("arc_type needs arcs with a common root")
    if not arcs_interior_disjoint(a, b):
        raise ArcsNotDisjoint("arc interiors intersect")
    ra = outer_radius(config)
    # close through the outside: along the circle the short way
    th_a = cmath.phase(a.points[0])
    th_b = cmath.phase(b.points[0])
    dth = _wrap(th_b - th_a)
    circle = [
        ra * cmath.exp(1j * (th_b - dth * k / 12)) for k in range(13)
    ]
    poly = list(b.points[::-1]) + circle[1:] + list(a.points)
    # poly runs: root -> b outer -> (circle) -> a outer -> root: close trivially
    left_probe = _left_probe(a)
    probe_w = _polygon_winding(poly, left_probe)
    left, right = [], []
    n = len(config.roots)
    for idx, wpt in enumerate(config.critical):
        wv = _polygon_winding(poly, wpt)
        if wv == probe_w and probe_w != 0:
            left.append(idx)
        elif wv != 0 and probe_w == 0:
            right.append(idx)
        elif wv == 0 and probe_w == 0:
            left.append(idx)
        elif wv == 0:
            right.append(idx)
        else:
            right.append(idx)
    return tuple(left), tuple(right)


def enclosure_counts(a: Arc, b: Arc, config: PointConfig) -> tuple[tuple[int, int], tuple[int, int]]:
    """For each side of a u b: (sum of enclosed critical orders, enclosed roots)."""
    if not arcs_interior_disjoint(a, b):
        raise ArcsNotDisjoint("arc interiors intersect")
    ra = outer_radius(config)
    th_a = cmath.phase(a.points[0])
    th_b = cmath.phase(b.points[0])
    dth = _wrap(th_b - th_a)
    circle = [ra * cmath.exp(1j * (th_b - dth * k / 12)) for k in range(13)]
    poly = list(b.points[::-1]) + circle[1:] + list(a.points)
    in_orders = 0
    in_roots = 0
    out_orders = 0
    out_roots = 0
    shared_root = config.roots[a.root]
    for idx, wpt in enumerate(config.critical):
        if _polygon_winding(poly, wpt) != 0:
            in_orders += config.kappa.parts[idx]
        else:
            out_orders += config.kappa.parts[idx]
    for idx, z in enumerate(config.roots):
        if z == shared_root:
            continue
        if _polygon_winding(poly, z) != 0:
            in_roots += 1
        else:
            out_roots += 1
    return (in_orders, in_roots), (out_orders, out_roots)


def _left_probe(a: Arc) -> complex:
    k = len(a.points) // 2
    p, q = a.points[k], a.points[min(k + 1, len(a.points) - 1)]
    d = q - p
    d = d / abs(d)
    return 0.5 * (p + q) + 1j * d * 1e-3 * max(1.0, abs(p))


def mod_r_reduce(kappa: Partition, v: DefectVector) -> tuple[int, tuple[int, ...]]:
    """r = gcd(k_1, ..., k_p); reduce the defect vector mod r."""
    r = 0
    for k in kappa.parts:
        r = math.gcd(r, k)
    reduced = tuple(x % r if r > 1 else 0 for x in v.values)
    return r, reduced
