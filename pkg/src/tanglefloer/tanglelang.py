"""Sign sequences, elementary tangles and tangle words.

Text grammar (pieces separated by ``;`` or newlines)::

    sign: + - -        left boundary signs, + for a strand oriented left to right
    id                 trivial piece (``id<n>`` additionally asserts the strand count)
    cup r              joins strands r and r+1 (1-based), which must have opposite signs
    cap r +-           creates strands r and r+1 with the given signs
    xe i / xo i        e-crossing / o-crossing of strands i and i+1

Words are read left to right; the boundary signs are propagated through every piece.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class TangleError(ValueError):
    pass


class TangleSyntaxError(TangleError):
    pass


class BoundaryMismatch(TangleError):
    pass


class OrientationError(TangleError):
    pass


SignSequence = tuple[int, ...]

KINDS = ("trivial", "cup", "cap", "xe", "xo")


def signs(text: str | Iterable[int]) -> SignSequence:
    """Build a sign sequence from ``"+-+"`` style text or an iterable of +-1."""
    if isinstance(text, str):
        out = []
        for ch in text:
            if ch == "+":
                out.append(1)
            elif ch == "-":
                out.append(-1)
            elif not ch.isspace() and ch != ",":
                raise TangleSyntaxError(f"bad sign character {ch!r}")
        return tuple(out)
    out = tuple(int(s) for s in text)
    if any(s not in (1, -1) for s in out):
        raise TangleSyntaxError(f"signs must be +1 or -1, got {out}")
    return out


def sign_str(p: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in p)


@dataclass(frozen=True)
class ElementaryTangle:
    """One piece of a tangle word.

    ``position`` is the height r of a cup or cap (the lower of its two strands)
    or the lower strand index i of a crossing, both 1-based.
    """

    kind: str
    position: int
    in_signs: SignSequence
    out_signs: SignSequence

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise TangleError(f"unknown piece kind {self.kind!r}")
        n_in, n_out = len(self.in_signs), len(self.out_signs)
        r = self.position
        p, pp = self.in_signs, self.out_signs
        if self.kind == "trivial":
            if p != pp:
                raise BoundaryMismatch("trivial piece must keep its signs")
        elif self.kind in ("xe", "xo"):
            if not 1 <= r <= n_in - 1:
                raise BoundaryMismatch(f"crossing at {r} needs at least {r + 1} strands, have {n_in}")
            if pp != p[: r - 1] + (p[r], p[r - 1]) + p[r + 1 :]:
                raise BoundaryMismatch("crossing must swap the signs at i, i+1")
        elif self.kind == "cup":
            if not 1 <= r <= n_in - 1:
                raise BoundaryMismatch(f"cup at {r} needs at least {r + 1} incoming strands, have {n_in}")
            if p[r - 1] == p[r]:
                raise OrientationError(f"cup at {r} joins two strands of sign {sign_str([p[r]])}")
            if pp != p[: r - 1] + p[r + 1 :]:
                raise BoundaryMismatch("cup output signs inconsistent")
        elif self.kind == "cap":
            if not 1 <= r <= n_out - 1 or n_out != n_in + 2:
                raise BoundaryMismatch(f"cap at {r} does not fit {n_in} incoming strands")
            if pp[r - 1] == pp[r]:
                raise OrientationError(f"cap at {r} creates two strands of sign {sign_str([pp[r]])}")
            if p != pp[: r - 1] + pp[r + 1 :]:
                raise BoundaryMismatch("cap input signs inconsistent")

    @property
    def n_in(self) -> int:
        return len(self.in_signs)

    @property
    def n_out(self) -> int:
        return len(self.out_signs)

    @property
    def size(self) -> int:
        """Half the number of red strands over both halves (an arc counts twice)."""
        return (self.n_in + self.n_out) // 2

    def token(self) -> str:
        if self.kind == "trivial":
            return "id" if self.n_in else "id0"
        if self.kind == "cap":
            r = self.position
            return f"cap {r} {sign_str(self.out_signs[r - 1 : r + 1])}"
        return f"{self.kind} {self.position}"

    def reversed(self) -> "ElementaryTangle":
        """Mirror image in a vertical line: orientations flip, cup<->cap, xe<->xo."""
        kind = {"trivial": "trivial", "cup": "cap", "cap": "cup", "xe": "xo", "xo": "xe"}[self.kind]
        return ElementaryTangle(
            kind,
            self.position,
            tuple(-s for s in self.out_signs),
            tuple(-s for s in self.in_signs),
        )


def trivial(p: Sequence[int]) -> ElementaryTangle:
    p = tuple(p)
    return ElementaryTangle("trivial", 0, p, p)


def crossing(kind: str, i: int, p: Sequence[int]) -> ElementaryTangle:
    p = tuple(p)
    out = p[: i - 1] + (p[i], p[i - 1]) + p[i + 1 :] if 1 <= i < len(p) else p
    return ElementaryTangle(kind, i, p, out)


def cup(r: int, p: Sequence[int]) -> ElementaryTangle:
    p = tuple(p)
    return ElementaryTangle("cup", r, p, p[: r - 1] + p[r + 1 :])


def cap(r: int, p: Sequence[int], pair: Sequence[int]) -> ElementaryTangle:
    p = tuple(p)
    return ElementaryTangle("cap", r, p, p[: r - 1] + tuple(pair) + p[r - 1 :])


@dataclass(frozen=True)
class TangleWord:
    pieces: tuple[ElementaryTangle, ...]
    boundary0: SignSequence
    boundary1: SignSequence

    def __post_init__(self) -> None:
        cur = self.boundary0
        for idx, t in enumerate(self.pieces):
            if t.in_signs != cur:
                raise BoundaryMismatch(f"piece {idx + 1} ({t.token()}) expects {sign_str(t.in_signs)}, got {sign_str(cur)}")
            cur = t.out_signs
        if cur != self.boundary1:
            raise BoundaryMismatch("right boundary does not match the last piece")

    @classmethod
    def from_pieces(cls, pieces: Sequence[ElementaryTangle], boundary0: Sequence[int] | None = None) -> "TangleWord":
        pieces = tuple(pieces)
        b0 = tuple(boundary0) if boundary0 is not None else (pieces[0].in_signs if pieces else ())
        b1 = pieces[-1].out_signs if pieces else b0
        return cls(pieces, b0, b1)

    @property
    def closed(self) -> bool:
        return not self.boundary0 and not self.boundary1

    def __len__(self) -> int:
        return len(self.pieces)

    def boundary_sizes(self) -> list[int]:
        return [len(self.boundary0)] + [t.n_out for t in self.pieces]

    def reversed(self) -> "TangleWord":
        return TangleWord.from_pieces(
            [t.reversed() for t in reversed(self.pieces)], tuple(-s for s in self.boundary1)
        )

    def __add__(self, other: "TangleWord") -> "TangleWord":
        return TangleWord(self.pieces + other.pieces, self.boundary0, other.boundary1)

    def __str__(self) -> str:
        return print_word(self)


_TOKEN = re.compile(r"^(id\d*|cup|cap|xe|xo)(?:\s+(\d+))?(?:\s+([+-]{2}))?$")


def parse(text: str) -> TangleWord:
    """Parse the text grammar described in the module docstring."""
    lines = text.strip().split("\n", 1)
    header = lines[0].strip()
    if not header.startswith("sign:"):
        raise TangleSyntaxError("word must start with a 'sign:' header")
    boundary0 = signs(header[len("sign:") :])
    body = lines[1] if len(lines) > 1 else ""
    tokens = [tok.strip() for chunk in body.split("\n") for tok in chunk.split(";")]
    tokens = [tok for tok in tokens if tok and not tok.startswith("#")]
    pieces = []
    cur = boundary0
    for tok in tokens:
        m = _TOKEN.match(" ".join(tok.split()))
        if m is None:
            raise TangleSyntaxError(f"cannot parse piece {tok!r}")
        name, num, pair = m.groups()
        if name.startswith("id"):
            if num or pair:
                raise TangleSyntaxError(f"'id' takes no arguments: {tok!r}")
            if name != "id" and int(name[2:]) != len(cur):
                raise BoundaryMismatch(f"{tok!r} but there are {len(cur)} strands")
            piece = trivial(cur)
        else:
            if num is None:
                raise TangleSyntaxError(f"missing position in {tok!r}")
            r = int(num)
            if name == "cap":
                if pair is None:
                    raise TangleSyntaxError(f"cap needs its orientation: {tok!r}")
                if not 1 <= r <= len(cur) + 1:
                    raise BoundaryMismatch(f"cap at {r} with only {len(cur)} strands")
                piece = cap(r, cur, signs(pair))
            else:
                if pair is not None:
                    raise TangleSyntaxError(f"only caps take an orientation: {tok!r}")
                if not 1 <= r <= len(cur) - 1:
                    raise BoundaryMismatch(f"{name} at {r} needs at least {r + 1} strands, have {len(cur)}")
                piece = cup(r, cur) if name == "cup" else crossing(name, r, cur)
        pieces.append(piece)
        cur = piece.out_signs
    return TangleWord(tuple(pieces), boundary0, cur)


def print_word(word: TangleWord) -> str:
    head = "sign:" + " ".join(sign_str([s]) for s in word.boundary0)
    return head + "\n" + " ; ".join(t.token() for t in word.pieces)


def size(word: TangleWord) -> int:
    return sum(t.size for t in word.pieces)


def cut_plat(word: TangleWord) -> TangleWord:
    """Turn a closed plat word into a (1,1)-tangle by opening its topmost component.

    Looks for a cap creating the two topmost strands and a later cup destroying
    them such that no piece in between touches the upper strand.  That strand
    and both arcs are removed; the strands they were joined to run out to the
    two boundaries instead.
    """
    if not word.closed:
        raise TangleError("cut_plat expects a closed word")
    pieces = list(word.pieces)
    starts = [k for k, t in enumerate(pieces) if t.kind == "cap" and t.position == t.n_in + 1]
    for start in reversed(starts):
        stop = _matching_top_cup(pieces, start)
        if stop is None:
            continue
        through = pieces[start].out_signs[-2]
        out = [_with_top(t, through) for t in pieces[:start]]
        out += [_drop_top(t) for t in pieces[start + 1 : stop]]
        out += [_with_top(t, through) for t in pieces[stop + 1 :]]
        return TangleWord.from_pieces(out, (through,))
    raise TangleError("word is not in a plat form with an untouched topmost strand")


def _matching_top_cup(pieces: list[ElementaryTangle], start: int) -> int | None:
    for k in range(start + 1, len(pieces)):
        t = pieces[k]
        top = t.n_in
        if t.kind == "cup" and t.position == top - 1:
            return k
        touches = (
            (t.kind in ("xe", "xo", "cup") and t.position + 1 >= top)
            or (t.kind == "cap" and t.position > top)
        )
        if touches:
            return None
    return None


def _with_top(t: ElementaryTangle, s: int) -> ElementaryTangle:
    return ElementaryTangle(t.kind, t.position, t.in_signs + (s,), t.out_signs + (s,))


def _drop_top(t: ElementaryTangle) -> ElementaryTangle:
    return ElementaryTangle(t.kind, t.position, t.in_signs[:-1], t.out_signs[:-1])


TREFOIL = "sign:\ncap 1 +- ; cap 3 -+ ; xe 2 ; xe 2 ; xe 2 ; cup 3 ; cup 1"
HOPF = "sign:\ncap 1 +- ; cap 3 -+ ; xe 2 ; xe 2 ; cup 3 ; cup 1"
UNKNOT = "sign:\ncap 1 +- ; cup 1"


def elementary_tangles(max_strands: int) -> list[ElementaryTangle]:
    """Every elementary tangle whose two boundaries have at most ``max_strands`` points."""
    from itertools import product

    out: list[ElementaryTangle] = []
    for n in range(max_strands + 1):
        for p in product((1, -1), repeat=n):
            out.append(trivial(p))
            for i in range(1, n):
                out.append(crossing("xe", i, p))
                out.append(crossing("xo", i, p))
                if p[i - 1] != p[i]:
                    out.append(cup(i, p))
            if n + 2 <= max_strands:
                for r in range(1, n + 2):
                    for pair in ((1, -1), (-1, 1)):
                        out.append(cap(r, p, pair))
    return out


def components(word: TangleWord) -> int:
    """Number of components (closed loops and arcs) of the tangle drawn by a word."""
    parent: dict = {}

    def find(u):
        while parent.setdefault(u, u) != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(u, v):
        parent[find(u)] = find(v)

    for i in range(len(word.boundary0)):
        find((0, i))
    for j, t in enumerate(word.pieces):
        r = t.position - 1
        for i in range(t.n_out):
            find((j + 1, i))
        if t.kind == "trivial":
            links = [(i, i) for i in range(t.n_in)]
        elif t.kind in ("xe", "xo"):
            links = [(i, r + 1 if i == r else r if i == r + 1 else i) for i in range(t.n_in)]
        elif t.kind == "cup":
            union((j, r), (j, r + 1))
            links = [(i, i if i < r else i - 2) for i in range(t.n_in) if i not in (r, r + 1)]
        else:
            union((j + 1, r), (j + 1, r + 1))
            links = [(i, i if i < r else i + 2) for i in range(t.n_in)]
        for a, b in links:
            union((j, a), (j + 1, b))
    return len({find(u) for u in list(parent)})
