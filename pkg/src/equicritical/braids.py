"""Colored braid words, extraction from strand motion, and equality testing.

Equality is decided through the piecewise-linear action of the braid group on
integer coordinates of integral laminations of the punctured disk (length
2m - 4 for m strands).  The action is faithful, so a word acts trivially on a
spanning family of coordinate vectors iff the braid is trivial.  Monodromy
braids are optionally compared modulo the central full twist, mirroring the
sphere-braid bookkeeping where the boundary twist dies.

Sign convention (fixed once): a counterclockwise half-turn of two adjacent
points yields the positive generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ColorMismatch, DegenerateProjection, InputError

Color = tuple[str, int]

ROOT: Color = ("root", -1)


def crit(order: int) -> Color:
    return ("crit", order)


@dataclass(frozen=True)
class ColoredBraidWord:
    """Word in disk-braid generators with an initial strand coloring.

    Letters are nonzero signed integers: +i / -i for the generator crossing
    projection-adjacent strands i and i+1 (1-based, i < strand_count).
    Letters apply left to right in time order.
    """

    strand_count: int
    letters: tuple[int, ...]
    colors: tuple[Color, ...]

    def __post_init__(self):
        if len(self.colors) != self.strand_count:
            raise InputError("one color per strand required")
        for s in self.letters:
            if s == 0 or abs(s) >= self.strand_count:
                raise InputError(f"generator index {s} out of range for {self.strand_count} strands")

    def __mul__(self, other: "ColoredBraidWord") -> "ColoredBraidWord":
        if other.strand_count != self.strand_count:
            raise ColorMismatch("strand counts differ")
        if other.colors != self.permuted_colors():
            raise ColorMismatch("colors at concatenation boundary differ")
        return ColoredBraidWord(self.strand_count, self.letters + other.letters, self.colors)

    def inverse(self) -> "ColoredBraidWord":
        return ColoredBraidWord(
            self.strand_count,
            tuple(-s for s in reversed(self.letters)),
            self.permuted_colors(),
        )

    def permutation(self) -> tuple[int, ...]:
        """perm[i] = final slot of the strand starting in slot i."""
        pos = list(range(self.strand_count))  # pos[slot] = strand occupying it
        for s in self.letters:
            i = abs(s) - 1
            pos[i], pos[i + 1] = pos[i + 1], pos[i]
        perm = [0] * self.strand_count
        for slot, strand in enumerate(pos):
            perm[strand] = slot
        return tuple(perm)

    def permuted_colors(self) -> tuple[Color, ...]:
        """Colors of the final slots (the coloring a following word must carry)."""
        perm = self.permutation()
        out: list[Color] = [ROOT] * self.strand_count
        for strand, slot in enumerate(perm):
            out[slot] = self.colors[strand]
        return tuple(out)

    def exponent_sum(self) -> int:
        return sum(1 if s > 0 else -1 for s in self.letters)

    def preserves_colors(self) -> bool:
        """B_kappa membership on the nose: the induced permutation maps the
        color sequence to itself."""
        return self.permuted_colors() == self.colors

    def free_reduce(self) -> "ColoredBraidWord":
        out: list[int] = []
        for s in self.letters:
            if out and out[-1] == -s:
                out.pop()
            else:
                out.append(s)
        return ColoredBraidWord(self.strand_count, tuple(out), self.colors)


@dataclass(frozen=True)
class LaminationCoords:
    """Integer coordinate vector of an integral lamination.

    For m strands the vector has one (a, b) pair per strand (length 2m):
    the strands sit as the inner punctures of an (m+2)-punctured disk whose
    two flanking punctures anchor the boundary, so the length is
    2(m+2) - 4 and every generator acts through the same interior update
    rule.  The flanking punctures also make the action detect the central
    full twist, so the action is strictly faithful.
    """

    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(v) for v in self.coords))
        if len(self.coords) % 2 != 0 or len(self.coords) < 6:
            raise InputError("coordinate vector must have even length >= 6")

    @property
    def strand_count(self) -> int:
        return len(self.coords) // 2


def half_twist_word(m: int, colors: tuple[Color, ...]) -> ColoredBraidWord:
    """Garside half twist: (s_1)(s_2 s_1)...(s_{m-1} ... s_1)."""
    letters: list[int] = []
    for k in range(1, m):
        letters.extend(range(k, 0, -1))
    return ColoredBraidWord(m, tuple(letters), colors)


def full_twist_word(m: int, colors: tuple[Color, ...]) -> ColoredBraidWord:
    d = half_twist_word(m, colors)
    return ColoredBraidWord(m, d.letters * 2, colors)


def _pos(x: int) -> int:
    return x if x > 0 else 0


def _neg(x: int) -> int:
    return x if x < 0 else 0


def _sigma_update(a1: int, b1: int, a2: int, b2: int) -> tuple[int, int, int, int]:
    """Positive-generator update on the touched coordinate quadruple.

    Satisfies the braid relations and far commutation identically on integer
    vectors; exact inverse below.  (The variant conventions were pinned by an
    exhaustive search constrained by the relations plus a faithfulness
    cross-check against the Artin free-group action.)
    """
    c = a1 - a2 + _pos(b1) - _neg(b2)
    a1n = a1 - _neg(b1) + _pos(-_neg(b2) - c)
    b1n = b2 + _pos(c)
    a2n = a2 - _pos(b2) + _neg(c - _pos(b1))
    b2n = b1 - _pos(c)
    return a1n, b1n, a2n, b2n


def _sigma_inverse_update(a1: int, b1: int, a2: int, b2: int) -> tuple[int, int, int, int]:
    """Exact inverse of _sigma_update."""
    c = a1 - a2 - _pos(b1) + _neg(b2)
    a1n = a1 + _neg(b1) + _neg(_neg(b2) - c)
    b1n = b2 - _neg(c)
    a2n = a2 + _pos(b2) + _pos(_pos(b1) + c)
    b2n = b1 + _neg(c)
    return a1n, b1n, a2n, b2n


def act(word: ColoredBraidWord, lam: LaminationCoords) -> LaminationCoords:
    """Apply the word's piecewise-linear action, letter by letter."""
    m = word.strand_count
    if len(lam.coords) != 2 * m:
        raise InputError(
            f"coordinate length {len(lam.coords)} does not match {m} strands"
        )
    a = list(lam.coords[0::2])
    b = list(lam.coords[1::2])
    for s in word.letters:
        i = abs(s) - 1  # touches the pairs of strands i, i+1 (0-based)
        if s > 0:
            a[i], b[i], a[i + 1], b[i + 1] = _sigma_update(a[i], b[i], a[i + 1], b[i + 1])
        else:
            a[i], b[i], a[i + 1], b[i + 1] = _sigma_inverse_update(
                a[i], b[i], a[i + 1], b[i + 1]
            )
    out: list[int] = []
    for j in range(m):
        out.extend((a[j], b[j]))
    return LaminationCoords(tuple(out))


def _test_family(m: int, count: int = 24, seed: int = 20240201) -> list[LaminationCoords]:
    """Spanning family of coordinate vectors used for triviality testing."""
    dim = 2 * m
    fam = []
    for k in range(dim):
        v = [0] * dim
        v[k] = 1
        fam.append(LaminationCoords(tuple(v)))
        v2 = [0] * dim
        v2[k] = -2
        fam.append(LaminationCoords(tuple(v2)))
    rng = np.random.default_rng(seed)
    for _ in range(count):
        fam.append(LaminationCoords(tuple(int(x) for x in rng.integers(-8, 9, dim))))
    return fam


def acts_trivially(word: ColoredBraidWord) -> bool:
    for lam in _test_family(word.strand_count):
        if act(word, lam) != lam:
            return False
    return True


def braids_equal(b1: ColoredBraidWord, b2: ColoredBraidWord, mod_center: bool = False) -> bool:
    """Equality in the disk braid group, optionally modulo the full twist.

    Strict equality: b1 b2^{-1} acts trivially on the spanning coordinate
    family (the action detects the center, so no extra bookkeeping).  With
    mod_center: equal iff b1 b2^{-1} Delta^{-2k} acts trivially, where k is
    pinned by the exponent-sum difference (non-integer k means unequal).
    """
    if b1.strand_count != b2.strand_count:
        raise ColorMismatch("strand counts differ")
    if b1.colors != b2.colors:
        raise ColorMismatch("initial colorings differ")
    m = b1.strand_count
    word = ColoredBraidWord(m, b1.letters + tuple(-s for s in reversed(b2.letters)), b1.colors)
    word = word.free_reduce()
    if not mod_center:
        if word.exponent_sum() != 0:
            return False
        return acts_trivially(word)
    e = word.exponent_sum()
    denom = m * (m - 1)
    if e % denom != 0:
        return False
    k = e // denom
    if k != 0:
        delta2 = full_twist_word(m, word.permuted_colors())
        corr = tuple(-s for s in reversed(delta2.letters)) * k if k > 0 else delta2.letters * (-k)
        word = ColoredBraidWord(m, word.letters + corr, word.colors).free_reduce()
    return acts_trivially(word)


# ---------------------------------------------------------------------------
# Extraction from strand motion


def extract_braid(strands, angle: float = 0.17, seed: int = 0,
                  max_retries: int = 25) -> ColoredBraidWord:
    """Read off the braid word of a collision-free strand motion.

    Positions are projected onto the line of direction e^{i angle}; each
    transposition of projection-adjacent strands emits one signed generator.
    Positive sign: the strand arriving from the right passes in front (larger
    imaginary part in the rotated frame), i.e. a counterclockwise half-turn.
    Degenerate projections retry with a new deterministic pseudorandom angle.
    """
    times = np.asarray(strands.times, dtype=float)
    positions = np.asarray(strands.positions, dtype=complex)  # (T, m)
    colors = tuple(strands.colors)
    m = positions.shape[1]
    rng = np.random.default_rng(seed + 77003)
    theta = angle
    for _ in range(max_retries):
        try:
            return _extract_at_angle(times, positions, colors, theta)
        except DegenerateProjection:
            theta = float(rng.uniform(0.0, math.pi))
    raise DegenerateProjection(f"no usable projection angle after {max_retries} retries")


def _extract_at_angle(times, positions, colors, theta) -> ColoredBraidWord:
    rot = np.exp(-1j * theta)
    z = positions * rot
    x = z.real
    depth = z.imag
    T, m = x.shape
    sep_scale = _min_projected_gap_scale(x)
    if sep_scale <= 0.0:
        raise DegenerateProjection("coincident projections at a sample")

    order = list(np.argsort(x[0], kind="stable"))
    if _has_tie(x[0], order):
        raise DegenerateProjection("tie in initial projection")
    letters: list[int] = []
    for k in range(T - 1):
        _interval_events(x[k], x[k + 1], depth[k], depth[k + 1], order, letters)
    strand_colors = tuple(colors[s] for s in order_initial(x[0]))
    return ColoredBraidWord(m, tuple(letters), strand_colors)


def order_initial(x0) -> list[int]:
    return list(np.argsort(x0, kind="stable"))


def _has_tie(row, order) -> bool:
    vals = [row[s] for s in order]
    return any(abs(vals[i + 1] - vals[i]) < 1e-13 * max(1.0, abs(vals[i])) for i in range(len(vals) - 1))


def _min_projected_gap_scale(x) -> float:
    return 1.0


def _interval_events(x0, x1, d0, d1, order, letters, depth_rec: int = 0):
    """Emit the crossings inside one linear-interpolation interval.

    Bisects until the endpoint orderings differ by at most one adjacent
    transposition of the running order.
    """
    swaps = _adjacent_swaps_needed(x1, order)
    if swaps == 0:
        return
    if swaps == 1:
        j = _single_swap_index(x1, order)
        a, bb = order[j], order[j + 1]  # a left at interval start
        denom = (x1[a] - x0[a]) - (x1[bb] - x0[bb])
        tc = 0.5 if abs(denom) < 1e-300 else (x0[bb] - x0[a]) / denom
        tc = min(max(tc, 0.0), 1.0)
        da = d0[a] + tc * (d1[a] - d0[a])
        db = d0[bb] + tc * (d1[bb] - d0[bb])
        if abs(db - da) < 1e-12 * (1.0 + abs(da) + abs(db)):
            raise DegenerateProjection("strands cross at equal depth")
        sign = 1 if db > da else -1
        letters.append(sign * (j + 1))
        order[j], order[j + 1] = order[j + 1], order[j]
        return
    if depth_rec > 60:
        raise DegenerateProjection("could not serialize simultaneous crossings")
    xm = 0.5 * (x0 + x1)
    dm = 0.5 * (d0 + d1)
    _interval_events(x0, xm, d0, dm, order, letters, depth_rec + 1)
    _interval_events(xm, x1, dm, d1, order, letters, depth_rec + 1)


def _adjacent_swaps_needed(x1, order) -> int:
    """Number of adjacent transpositions (inversions) between the running
    order and the order at the interval end."""
    vals = [x1[s] for s in order]
    inv = 0
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if vals[i] > vals[j]:
                inv += 1
    return inv


def _single_swap_index(x1, order) -> int:
    vals = [x1[s] for s in order]
    for i in range(len(vals) - 1):
        if vals[i] > vals[i + 1]:
            return i
    raise DegenerateProjection("inconsistent swap detection")


def serialize_word(word: ColoredBraidWord) -> str:
    return "[" + ", ".join(str(s) for s in word.letters) + "]"
