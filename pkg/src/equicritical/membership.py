"""Framed-braid membership certification and the generator suite.

A loop certifies when its transported standard marking keeps every winding
number (zero defect vector) and its braid permutation preserves strand
colors: the finite criterion for membership in the framed braid group.
Containment says every honest stratum loop certifies; the suite also runs
the realization direction at desk scale, matching generated loop braids
against independently constructed reference words (corridor exchanges traced
on the surface itself).
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .braids import ColoredBraidWord, braids_equal, extract_braid, serialize_word
from .continuation import (
    LoopSpec,
    StepControl,
    StratumPath,
    StrandSet,
    lift_critical_values,
    make_loop,
    strand_colors,
    track,
)
from .core import (
    Partition,
    PointConfig,
    Polynomial,
    StratumPoint,
    expand_from_stratum,
    validate_stratum,
)
from .errors import NotAdjacent, NumericalError
from .surface import StripDiagram, solve_basepoint, standard_marking, strip_decomposition
from .winding import DefectVector, Marking, arc_type, delta_psi, transport, winding_number

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MembershipCertificate:
    braid: ColoredBraidWord
    defect: DefectVector
    color_ok: bool
    verdict: bool
    provenance: str
    permutation: tuple[int, ...]
    work: tuple[tuple[str, int], ...] = ()

    def summary(self) -> str:
        word = serialize_word(self.braid)
        return (
            f"braid={word} defect={list(self.defect.values)} "
            f"colors={'ok' if self.color_ok else 'BAD'} "
            f"verdict={'in_B_kappa_psi' if self.verdict else 'OUTSIDE'}"
        )


@dataclass
class BaseContext:
    """Cached per-basepoint data shared by certifications."""

    point: StratumPoint
    config: PointConfig
    f: Polynomial
    diagram: StripDiagram
    marking: Marking

    @staticmethod
    def at(point: StratumPoint) -> "BaseContext":
        f = expand_from_stratum(point)
        config = validate_stratum(point)
        diagram = strip_decomposition(config, f)
        marking = standard_marking(diagram, config, f)
        return BaseContext(point, config, f, diagram, marking)


# resolution ladder: (track motion fraction, transport substep, refine)
_LADDER = (
    (0.2, 0.025, 0.12),
    (0.1, 0.012, 0.06),
    (0.14, 0.018, 0.09),
    (0.06, 0.008, 0.04),
)


def certify(loop: StratumPath, context: BaseContext | None = None,
            provenance: str = "custom", seed: int = 0) -> MembershipCertificate:
    """Track the loop, extract its braid, transport the standard marking, and
    test the framed criterion.

    The defect vector is recomputed at increasing track/transport resolutions
    until two consecutive levels agree, so grazing discretization artifacts
    cannot masquerade as framing defects.
    """
    from .errors import IsotopyBreakdown
    from .winding import remark_windings, transport as _transport

    if context is None:
        context = BaseContext.at(loop.samples[0][1])
    seen: list[DefectVector] = []
    defect = None
    first_strands = None
    work_samples = 0
    for mf, sub, rf in _LADDER:
        strands = track(loop, StepControl(motion_fraction=mf))
        if first_strands is None:
            first_strands = strands
        carried = _transport(
            context.marking, strands, substep_fraction=sub, refine_fraction=rf,
            root_reference=context.config.roots,
        )
        values = tuple(
            winding_number(a, context.config, context.f) - context.marking.windings[idx]
            for idx, a in enumerate(carried.arcs)
        )
        candidate = DefectVector(values)
        work_samples += len(strands.times)
        if candidate in seen:
            defect = candidate  # reproduced at an independent resolution
            break
        seen.append(candidate)
    if defect is None:
        raise IsotopyBreakdown(
            f"{provenance}: defect vector did not stabilize across resolutions"
        )
    braid = extract_braid(first_strands, seed=seed)
    color_ok = braid.preserves_colors()
    verdict = defect.is_zero and color_ok
    try:
        strand_perm = first_strands.closure_permutation()
    except NumericalError:
        strand_perm = tuple(range(first_strands.positions.shape[1]))
    return MembershipCertificate(
        braid=braid,
        defect=defect,
        color_ok=color_ok,
        verdict=verdict,
        provenance=provenance,
        permutation=strand_perm,
        work=(("samples", work_samples),),
    )


def certify_strands(strands: StrandSet, context: BaseContext,
                    provenance: str = "synthetic", seed: int = 0) -> MembershipCertificate:
    """Certification from explicit strand motion (synthetic motions allowed).

    The strand sampling is fixed by the caller, so only the transport
    resolution escalates.
    """
    from .errors import IsotopyBreakdown
    from .winding import transport as _transport

    braid = extract_braid(strands, seed=seed)
    seen: list[DefectVector] = []
    defect = None
    for _, sub, rf in _LADDER:
        carried = _transport(
            context.marking, strands, substep_fraction=sub, refine_fraction=rf,
            root_reference=context.config.roots,
        )
        values = tuple(
            winding_number(a, context.config, context.f) - context.marking.windings[idx]
            for idx, a in enumerate(carried.arcs)
        )
        candidate = DefectVector(values)
        if candidate in seen:
            defect = candidate
            break
        seen.append(candidate)
    if defect is None:
        raise IsotopyBreakdown(
            f"{provenance}: defect vector did not stabilize across resolutions"
        )
    color_ok = braid.preserves_colors()
    verdict = defect.is_zero and color_ok
    try:
        strand_perm = strands.closure_permutation()
    except NumericalError:
        strand_perm = tuple(range(strands.positions.shape[1]))
    return MembershipCertificate(
        braid=braid,
        defect=defect,
        color_ok=color_ok,
        verdict=verdict,
        provenance=provenance,
        permutation=strand_perm,
        work=(("samples", len(strands.times)),),
    )


# ---------------------------------------------------------------------------
# Reference words from surface corridors


def _vertical_corridor(context: BaseContext, i: int, j: int,
                       max_steps: int = 60_000) -> list[complex]:
    """Path from cone j to cone i following the vertical flow (the adjacency
    corridor between the free prong of j and a fixed prong of i)."""
    f = context.f
    cfg = context.config
    wj = cfg.critical[j]
    wi = cfg.critical[i]
    kj = cfg.kappa.parts[j]
    vj = f(wj)
    vi = f(wi)
    gap = (cmath.phase(vi) - cmath.phase(vj)) % TWO_PI  # height to climb
    if gap < 1e-9:
        gap = TWO_PI
    diam = cfg.diameter

    # seed slightly along the free-prong (rightward) ray of cone j
    from .surface import _taylor_lead

    C = _taylor_lead(f, wj, kj + 1)
    best = None
    d_near = min(abs(wj - q) for q in cfg.points if q != wj)
    for direction in range(2 * (kj + 1)):
        theta = (cmath.phase(vj / C)) / (kj + 1) + math.pi * direction / (kj + 1)
        z0 = wj + 0.03 * d_near * cmath.exp(1j * theta)
        V = f(z0) / f.deriv_eval(z0)
        if (V / cmath.exp(1j * theta)).real <= 0:
            continue  # not a rightward ray
        path = _climb(f, cfg, z0, gap, wi, max_steps)
        if path is not None:
            cand = [wj] + path + [wi]
            if best is None or _path_length(cand) < _path_length(best):
                best = cand
    if best is None:
        raise NotAdjacent(f"no vertical corridor from cone {j} to cone {i}")
    return best


def _path_length(pts) -> float:
    return sum(abs(b - a) for a, b in zip(pts[:-1], pts[1:]))


def _climb(f, cfg, z0: complex, gap: float, wi: complex, max_steps: int):
    """Integrate the vertical unit field until the height gain reaches gap,
    then detect arrival near cone i."""
    z = z0
    climbed = 0.0
    trail = [z]
    diam = cfg.diameter
    for _ in range(max_steps):
        others = [q for q in cfg.points if q != wi]
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


def corridor_exchange_strands(context: BaseContext, i: int, j: int,
                              samples: int = 240) -> StrandSet:
    """Synthetic half-exchange of cones i and j along the surface corridor.

    The two cone strands swap along opposite offsets of the corridor; all
    other strands stay put.  Squaring the extracted word gives the reference
    full twist about the tight curve enclosing exactly these two cones.
    """
    cfg = context.config
    corridor = _vertical_corridor(context, i, j)
    corridor = _resample(corridor, samples)
    others = [q for q in cfg.points if q not in (cfg.critical[i], cfg.critical[j])]
    clearance = min(
        min(abs(z - q) for q in others) for z in corridor
    )
    delta = 0.25 * clearance
    n, p = cfg.kappa.n, cfg.kappa.p
    T = samples
    pos = np.zeros((T, n + p), dtype=complex)
    for idx, z in enumerate(cfg.roots):
        pos[:, idx] = z
    for idx, z in enumerate(cfg.critical):
        pos[:, n + idx] = z
    # normals along the corridor
    arr = np.array(corridor)
    for t in range(T):
        u = t / (T - 1)
        a = _along(arr, u)          # from w_j toward w_i
        b = _along(arr, 1.0 - u)    # from w_i toward w_j
        na = _normal(arr, u)
        nb = _normal(arr, 1.0 - u)
        bulge = math.sin(math.pi * u) * delta
        pos[t, n + j] = a - 1j * na * bulge
        pos[t, n + i] = b + 1j * nb * bulge
    times = np.linspace(0.0, 1.0, T)
    return StrandSet(cfg.kappa, times, pos, strand_colors(cfg.kappa))


def _resample(pts, m):
    arr = np.array(pts, dtype=complex)
    seg = np.abs(np.diff(arr))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    out = np.interp(np.linspace(0, total, m), s, arr.real) + 1j * np.interp(
        np.linspace(0, total, m), s, arr.imag
    )
    return list(out)


def _along(arr, u: float) -> complex:
    x = u * (len(arr) - 1)
    k = min(int(x), len(arr) - 2)
    frac = x - k
    return arr[k] * (1 - frac) + arr[k + 1] * frac


def _normal(arr, u: float) -> complex:
    x = u * (len(arr) - 1)
    k = min(int(x), len(arr) - 2)
    d = arr[k + 1] - arr[k]
    if d == 0:
        return 1.0
    return d / abs(d)


def reference_exchange_word(context: BaseContext, i: int, j: int,
                            seed: int = 0) -> ColoredBraidWord:
    strands = corridor_exchange_strands(context, i, j)
    return extract_braid(strands, seed=seed)


def reference_full_twist_word(context: BaseContext, i: int, j: int,
                              seed: int = 0) -> ColoredBraidWord:
    half = reference_exchange_word(context, i, j, seed=seed)
    return ColoredBraidWord(half.strand_count, half.letters * 2, half.colors)


# ---------------------------------------------------------------------------
# Suite


@dataclass
class SuiteEntry:
    name: str
    certificate: MembershipCertificate
    notes: tuple[str, ...] = ()


@dataclass
class SuiteReport:
    kappa: Partition
    sigma: tuple[int, ...]
    basepoint: StratumPoint
    entries: list[SuiteEntry]
    identities: list[tuple[str, bool, str]]  # (name, holds, mode)
    arc_types: list[tuple[str, tuple, tuple]]

    @property
    def all_certified(self) -> bool:
        return all(e.certificate.verdict for e in self.entries)

    def render_text(self) -> str:
        lines = [
            f"generator suite kappa={self.kappa} sigma={list(self.sigma)}",
            f"basepoint w={[_cfmt(z) for z in self.basepoint.w]} c={_cfmt(self.basepoint.c)}",
            "",
            "loops:",
        ]
        for e in self.entries:
            lines.append(f"  {e.name}\t{e.certificate.summary()}")
            for note in e.notes:
                lines.append(f"    note: {note}")
        lines.append("")
        lines.append("identities:")
        for name, holds, mode in self.identities:
            lines.append(f"  {name}\t{'HOLDS' if holds else 'FAILS'}\t({mode})")
        lines.append("")
        lines.append("arc types of transported markings (left orders | right orders):")
        for name, left, right in self.arc_types:
            lines.append(f"  {name}\tleft={list(left)}\tright={list(right)}")
        lines.append("")
        lines.append(f"all_certified: {self.all_certified}")
        return "\n".join(lines) + "\n"


def _cfmt(z: complex) -> str:
    return f"{z.real:+.12f}{z.imag:+.12f}i"


def generator_suite(kappa: Partition, sigma: tuple[int, ...] | None = None,
                    seed: int = 0) -> SuiteReport:
    """Certify the loop library at the standard basepoint and verify the
    expected braid identities."""
    if sigma is None:
        sigma = tuple(range(kappa.p))
    base = solve_basepoint(kappa, sigma)
    context = BaseContext.at(base)
    entries: list[SuiteEntry] = []
    identities: list[tuple[str, bool, str]] = []
    arc_types: list[tuple[str, tuple, tuple]] = []

    if kappa.p == 1:
        # single critical point: monodromy generated by the 1/n rotation
        spec = LoopSpec("c_orbit", base, index=0, turns=1)
        loop = make_loop(spec)
        cert = certify(loop, context, provenance=spec.describe(), seed=seed)
        entries.append(SuiteEntry("rotation_1_over_n", cert))
        perm_ok = _cycle_length(cert.permutation[: kappa.n]) == kappa.n
        identities.append(("rotation permutes roots in one n-cycle", perm_ok, "permutation"))
        return SuiteReport(kappa, sigma, base, entries, identities, arc_types)

    braids: dict[str, ColoredBraidWord] = {}

    # pairwise full pushes
    for a in range(kappa.p):
        for b in range(a + 1, kappa.p):
            name = f"full_push({a},{b})"
            spec = LoopSpec("full_push", base, index=a, other=b)
            loop = make_loop(spec)
            cert = certify(loop, context, provenance=spec.describe(), seed=seed)
            entries.append(SuiteEntry(name, cert))
            braids[name] = cert.braid

    # adjacent equal-order swaps (consecutive in sigma)
    for m in range(kappa.p - 1):
        a, b = sigma[m], sigma[m + 1]
        if kappa.parts[a] == kappa.parts[b]:
            name = f"swap({a},{b})"
            spec = LoopSpec("swap_equal_order", base, index=a, other=b)
            loop = make_loop(spec)
            cert = certify(loop, context, provenance=spec.describe(), seed=seed)
            entries.append(SuiteEntry(name, cert))
            braids[name] = cert.braid

    # cyclic shift
    shift_spec = LoopSpec("cyclic_shift", base)
    shift_loop = make_loop(shift_spec)
    shift_cert = certify(shift_loop, context, provenance="cyclic_shift", seed=seed)
    notes = []
    root_perm_len = _cycle_length(shift_cert.permutation[: kappa.n])
    notes.append(f"root cycle length {root_perm_len} of n={kappa.n}")
    entries.append(SuiteEntry("cyclic_shift", shift_cert, tuple(notes)))
    identities.append(
        ("cyclic shift induces one n-cycle on roots", root_perm_len == kappa.n, "permutation")
    )

    # identities on adjacent pairs: tight full twist and swap squared
    for m in range(kappa.p - 1):
        a, b = sigma[m], sigma[m + 1]
        name = f"full_push({min(a,b)},{max(a,b)})"
        if name not in braids:
            continue
        try:
            ref = reference_full_twist_word(context, a, b, seed=seed)
        except NotAdjacent:
            identities.append((f"tight twist reference for {name}", False, "corridor missing"))
            continue
        got = braids[name]
        strict = braids_equal(got, ref, mod_center=False)
        modc = strict or braids_equal(got, ref, mod_center=True)
        identities.append(
            (f"{name} equals tight twist about adjacent cones", modc,
             "strict" if strict else ("mod_center" if modc else "neither"))
        )
        sname = f"swap({a},{b})"
        if sname in braids:
            sq = ColoredBraidWord(
                braids[sname].strand_count, braids[sname].letters * 2, braids[sname].colors
            )
            strict2 = braids_equal(braids[name], sq, mod_center=False)
            modc2 = strict2 or braids_equal(braids[name], sq, mod_center=True)
            identities.append(
                (f"{name} equals {sname}^2", modc2,
                 "strict" if strict2 else ("mod_center" if modc2 else "neither"))
            )
            ref_half = reference_exchange_word(context, a, b, seed=seed)
            strict3 = braids_equal(braids[sname], ref_half, mod_center=False)
            modc3 = strict3 or braids_equal(braids[sname], ref_half, mod_center=True)
            identities.append(
                (f"{sname} equals corridor exchange", modc3,
                 "strict" if strict3 else ("mod_center" if modc3 else "neither"))
            )

    # arc types realized by transported markings (one sample per loop family)
    for e in entries[: kappa.p + 2]:
        try:
            name = e.name
            loop = _loop_by_name(name, base)
            if loop is None:
                continue
            strands = track(loop)
            carried = transport(context.marking, strands,
                                root_reference=context.config.roots)
            for idx, arc in enumerate(carried.arcs):
                orig = context.marking.arcs[arc.root]
                from .winding import arcs_interior_disjoint

                if not arcs_interior_disjoint(arc, orig):
                    continue
                left, right = arc_type(arc, orig, context.config)
                arc_types.append((f"{name}/arc{idx}", left, right))
                break
        except NumericalError:
            continue

    return SuiteReport(kappa, sigma, base, entries, identities, arc_types)


def _loop_by_name(name: str, base: StratumPoint) -> StratumPath | None:
    if name.startswith("full_push("):
        a, b = name[len("full_push("):-1].split(",")
        return make_loop(LoopSpec("full_push", base, index=int(a), other=int(b)))
    if name.startswith("swap("):
        a, b = name[len("swap("):-1].split(",")
        return make_loop(LoopSpec("swap_equal_order", base, index=int(a), other=int(b)))
    if name == "cyclic_shift":
        return make_loop(LoopSpec("cyclic_shift", base))
    return None


def _cycle_length(perm: tuple[int, ...]) -> int:
    start = 0
    x = perm[0]
    length = 1
    while x != start:
        x = perm[x]
        length += 1
        if length > len(perm):
            return -1
    return length