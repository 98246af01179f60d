"""Strand-diagram combinatorics.

Heights of black endpoints are integers; red strands sit at half-integers.  To stay
in integer arithmetic every red segment is stored with doubled endpoints, so the
red strand between black heights j-1 and j has doubled height 2j-1.

Two monotone strands u->v and u'->v' (same doubled scale) cross in a minimal
diagram iff (u-u')(v-v') < 0.  Every count below is derived from that rule, never
from drawn coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

Pair = tuple[int, int]
PartialBijection = tuple[Pair, ...]  # sorted by source height

RIGHT, LEFT = 1, -1


def pb(pairs: Iterable[Pair]) -> PartialBijection:
    """Normalise and validate a partial bijection given as (source, target) pairs."""
    out = tuple(sorted((int(a), int(b)) for a, b in pairs))
    if len({a for a, _ in out}) != len(out) or len({b for _, b in out}) != len(out):
        raise ValueError(f"not injective: {out}")
    return out


def domain(x: PartialBijection) -> frozenset[int]:
    return frozenset(a for a, _ in x)


def image(x: PartialBijection) -> frozenset[int]:
    return frozenset(b for _, b in x)


def compose(x: PartialBijection, y: PartialBijection) -> PartialBijection:
    """The map y o x (first x, then y); assumes image(x) == domain(y)."""
    ymap = dict(y)
    return tuple([(a, ymap[b]) for a, b in x])  # x is sorted by source, so is the result


def identity(s: Iterable[int]) -> PartialBijection:
    return tuple((a, a) for a in sorted(s))


def inversions(x: PartialBijection) -> int:
    return sum(1 for (a, b), (c, d) in combinations(x, 2) if (a - c) * (b - d) < 0)


@dataclass(frozen=True)
class RedSegment:
    """A red strand in one half, from doubled height ``u`` on the left to ``v`` on the right."""

    u: int
    v: int
    orient: int  # RIGHT or LEFT
    arc: bool = False  # half of a cup/cap semicircle; ends on the interior line

    def crosses(self, a: int, b: int) -> bool:
        return (2 * a - self.u) * (2 * b - self.v) < 0


@dataclass(frozen=True)
class RedContext:
    """The red strands of an algebra diagram or of one half of a tangle piece."""

    reds: tuple[RedSegment, ...]
    parity: str = "algebra"  # "algebra", "odd" or "even"
    rr_right: int = 0  # crossings between two right-oriented reds
    rr_left: int = 0  # crossings between two left-oriented reds
    _memo: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def left_reds(self) -> int:
        return sum(1 for r in self.reds if r.orient == LEFT)


def algebra_context(p: Sequence[int]) -> RedContext:
    return RedContext(tuple(RedSegment(2 * j - 1, 2 * j - 1, s) for j, s in enumerate(p, 1)))


@dataclass(frozen=True)
class CrossingCounts:
    black_black: int
    asc_left: int  # ascending black x left-oriented red
    asc_right: int
    desc_left: int
    desc_right: int
    red_red_right: int = 0
    red_red_left: int = 0
    left_red_total: int = 0

    @property
    def black_left(self) -> int:
        return self.asc_left + self.desc_left

    @property
    def black_right(self) -> int:
        return self.asc_right + self.desc_right

    @property
    def black_total(self) -> int:
        """All crossings that involve a black strand."""
        return self.black_black + self.black_left + self.black_right


def count_crossings(x: PartialBijection, ctx: RedContext) -> CrossingCounts:
    bl = [0, 0, 0, 0]  # asc_left, asc_right, desc_left, desc_right
    for a, b in x:
        for r in ctx.reds:
            if r.crosses(a, b):
                # a horizontal black strand can only meet a sloped red; the
                # gradings use left/right totals, so its slope class is immaterial
                idx = (0 if b > a else 2) + (0 if r.orient == LEFT else 1)
                bl[idx] += 1
    return CrossingCounts(
        inversions(x), bl[0], bl[1], bl[2], bl[3], ctx.rr_right, ctx.rr_left, ctx.left_reds
    )


def total_crossings(x: PartialBijection, ctx: RedContext) -> int:
    memo = ctx._memo
    n = memo.get(x)
    if n is None:
        n = inversions(x)
        for a, b in x:
            for r in ctx.reds:
                if r.crosses(a, b):
                    n += 1
        memo[x] = n
    return n


def grade_algebra(x: PartialBijection, ctx: RedContext) -> tuple[int, int]:
    """(M, 2A) of an algebra generator: 2A = #(black x left red) - #(black x right red),
    M = #(black x black) - #(black x right red)."""
    c = count_crossings(x, ctx)
    return c.black_black - c.black_right, c.black_left - c.black_right


def grade_piece(x: PartialBijection, ctx: RedContext) -> tuple[int, int]:
    """(M, 2A) of the partial bijection in one half of a tangle piece."""
    c = count_crossings(x, ctx)
    two_a = c.black_left - c.black_right + c.red_red_right - c.red_red_left - c.left_red_total
    if ctx.parity == "odd":
        m = -c.black_black + c.black_left - c.red_red_left - c.left_red_total
    elif ctx.parity == "even":
        m = c.black_black - c.black_right + c.red_red_right
    else:
        raise ValueError("grade_piece needs an odd or even context")
    return m, two_a


def concat(
    x: PartialBijection,
    y: PartialBijection,
    ctx_x: RedContext,
    ctx_y: RedContext,
    ctx_xy: RedContext | None = None,
) -> PartialBijection | None:
    """Concatenate x then y; None unless the glued diagram is already minimal."""
    if image(x) != domain(y):
        return None
    z = compose(x, y)
    if ctx_xy is None:
        ctx_xy = ctx_x
    if total_crossings(x, ctx_x) + total_crossings(y, ctx_y) != total_crossings(z, ctx_xy):
        return None
    return z


def _swap_targets(x: PartialBijection, i: int, j: int) -> PartialBijection:
    lst = list(x)
    (a, b), (c, d) = lst[i], lst[j]
    lst[i], lst[j] = (a, d), (c, b)
    return tuple(sorted(lst))


def resolutions(x: PartialBijection, ctx: RedContext) -> list[PartialBijection]:
    """Resolve one black-black crossing, keeping only results with exactly one fewer crossing."""
    total = total_crossings(x, ctx)
    out = []
    for i, j in combinations(range(len(x)), 2):
        (a, b), (c, d) = x[i], x[j]
        if (a - c) * (b - d) < 0:
            y = _swap_targets(x, i, j)
            if total_crossings(y, ctx) == total - 1:
                out.append(y)
    return out


def introductions(x: PartialBijection, ctx: RedContext) -> list[PartialBijection]:
    """Introduce one black-black crossing, keeping only results with exactly one more crossing."""
    total = total_crossings(x, ctx)
    out = []
    for i, j in combinations(range(len(x)), 2):
        (a, b), (c, d) = x[i], x[j]
        if (a - c) * (b - d) > 0:
            y = _swap_targets(x, i, j)
            if total_crossings(y, ctx) == total + 1:
                out.append(y)
    return out
