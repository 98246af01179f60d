"""Type DA bimodules of elementary tangles and of tangle words.

A generator of one piece is a pair (f, g): f a partial bijection from the left
boundary points V0 to the interior line W (the odd half) and g one from W to the
right boundary points V1 (the even half), with W = range(f) disjoint-union dom(g).
"""

from __future__ import annotations

from collections import Counter, OrderedDict, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from . import strand
from .algebra import StrandAlgebra, build_algebra
from .homcore import DABimodule, Grading, TypeD, _gather, box_da_d, box_tensor, homology
from .strand import LEFT, RIGHT, PartialBijection, RedContext, RedSegment
from .tanglelang import ElementaryTangle, TangleWord

CTGen = tuple[PartialBijection, PartialBijection]


@dataclass(frozen=True)
class PieceGeometry:
    """Boundary points and red strands of the two halves of one elementary tangle."""

    v0: tuple[int, ...]
    w: tuple[int, ...]
    v1: tuple[int, ...]
    odd: RedContext
    even: RedContext


def _orient(s: int) -> int:
    return RIGHT if s > 0 else LEFT


def _horizontal(p: Sequence[int], skip: Iterable[int] = ()) -> list[RedSegment]:
    skip = set(skip)
    return [RedSegment(2 * j - 1, 2 * j - 1, _orient(s)) for j, s in enumerate(p, 1) if j not in skip]


def _crossing_reds(p: Sequence[int], i: int) -> tuple[list[RedSegment], int, int]:
    reds = _horizontal(p, skip=(i, i + 1))
    reds.append(RedSegment(2 * i - 1, 2 * i + 1, _orient(p[i - 1])))
    reds.append(RedSegment(2 * i + 1, 2 * i - 1, _orient(p[i])))
    rr_right = int(p[i - 1] > 0 and p[i] > 0)
    rr_left = int(p[i - 1] < 0 and p[i] < 0)
    return reds, rr_right, rr_left


def geometry(t: ElementaryTangle) -> PieceGeometry:
    p, pp = t.in_signs, t.out_signs
    v0 = tuple(range(t.n_in + 1))
    v1 = tuple(range(t.n_out + 1))
    if t.kind == "trivial":
        return PieceGeometry(v0, v0, v1, RedContext(tuple(_horizontal(p)), "odd"),
                             RedContext(tuple(_horizontal(pp)), "even"))
    if t.kind == "xe":
        reds, rr, rl = _crossing_reds(p, t.position)
        return PieceGeometry(v0, v0, v1, RedContext(tuple(_horizontal(p)), "odd"),
                             RedContext(tuple(reds), "even", rr, rl))
    if t.kind == "xo":
        reds, rr, rl = _crossing_reds(p, t.position)
        return PieceGeometry(v0, v0, v1, RedContext(tuple(reds), "odd", rr, rl),
                             RedContext(tuple(_horizontal(pp)), "even"))
    r = t.position
    if t.kind == "cup":
        n_big = t.n_in
        w = tuple(h for h in range(n_big + 1) if h != r)
        odd = [RedSegment(2 * j - 1, 2 * j - 1, _orient(p[j - 1])) for j in range(1, r)]
        odd.append(RedSegment(2 * r - 1, 2 * r, _orient(p[r - 1]), arc=True))
        odd.append(RedSegment(2 * r + 1, 2 * r, _orient(p[r]), arc=True))
        odd += [RedSegment(2 * j - 1, 2 * j - 1, _orient(p[j - 1])) for j in range(r + 2, n_big + 1)]
        even = [RedSegment(2 * j - 1, 2 * j - 1, _orient(p[j - 1])) for j in range(1, r)]
        even += [RedSegment(2 * j - 1, 2 * j - 5, _orient(p[j - 1])) for j in range(r + 2, n_big + 1)]
        return PieceGeometry(v0, w, v1, RedContext(tuple(odd), "odd"), RedContext(tuple(even), "even"))
    if t.kind == "cap":
        n_big = t.n_out
        w = tuple(h for h in range(n_big + 1) if h != r)
        odd = [RedSegment(2 * j - 1, 2 * j - 1, _orient(p[j - 1])) for j in range(1, r)]
        odd += [RedSegment(2 * j - 1, 2 * j + 3, _orient(p[j - 1])) for j in range(r, t.n_in + 1)]
        even = [RedSegment(2 * j - 1, 2 * j - 1, _orient(pp[j - 1])) for j in range(1, r)]
        even.append(RedSegment(2 * r, 2 * r - 1, _orient(pp[r - 1]), arc=True))
        even.append(RedSegment(2 * r, 2 * r + 1, _orient(pp[r]), arc=True))
        even += [RedSegment(2 * j - 1, 2 * j - 1, _orient(pp[j - 1])) for j in range(r + 2, n_big + 1)]
        return PieceGeometry(v0, w, v1, RedContext(tuple(odd), "odd"), RedContext(tuple(even), "even"))
    raise ValueError(f"unknown piece kind {t.kind}")


def enumerate_generators(geo: PieceGeometry) -> list[CTGen]:
    """All (f, g) with W = range(f) disjoint-union dom(g), in a deterministic order."""
    out: list[CTGen] = []
    w = geo.w
    for d_size in range(len(w) + 1):
        for dom_g in combinations(w, d_size):
            rng_f = tuple(h for h in w if h not in dom_g)
            fs = [tuple(sorted(zip(src, rng_f))) for src in permutations(geo.v0, len(rng_f))]
            gs = [tuple(zip(dom_g, tgt)) for tgt in permutations(geo.v1, d_size)]
            for f in fs:
                for g in gs:
                    out.append((f, g))
    return out


def grade_generator(x: CTGen, geo: PieceGeometry) -> Grading:
    mf, af = strand.grade_piece(x[0], geo.odd)
    mg, ag = strand.grade_piece(x[1], geo.even)
    return mf + mg, af + ag


def _crosses(s1: tuple[int, int], s2: tuple[int, int]) -> bool:
    return (s1[0] - s2[0]) * (s1[1] - s2[1]) < 0


def _red_between(reds: Iterable[RedSegment], lo: int, hi: int, at_left: bool) -> list[RedSegment]:
    """Reds meeting the W line strictly between heights lo and hi (doubled scale)."""
    out = []
    for r in reds:
        h = r.u if at_left else r.v
        if 2 * lo < h < 2 * hi:
            out.append(r)
    return out


def odd_exchanges(f: PartialBijection, geo: PieceGeometry) -> list[PartialBijection]:
    """Exchanges of two odd endpoints on W (they only see the odd half)."""
    finv = {b: a for a, b in f}
    out = []
    for p, q in combinations(geo.w, 2):
        if p not in finv or q not in finv:
            continue
        a, b = finv[p], finv[q]
        if not a > b:
            continue
        s1, s2 = (a, p), (b, q)
        ok = True
        for t in geo.w:
            if p < t < q:
                c = finv.get(t)
                if c is None or not (_crosses((c, t), s1) and _crosses((c, t), s2)):
                    ok = False
                    break
        if not ok:
            continue
        for r in _red_between(geo.odd.reds, p, q, at_left=False):
            if not r.arc or not (r.crosses(*s1) and r.crosses(*s2)):
                ok = False
                break
        if ok and not _red_between(geo.even.reds, p, q, at_left=True):
            out.append(tuple(sorted([pr for pr in f if pr[1] not in (p, q)] + [(a, q), (b, p)])))
    return out


def even_exchanges(g: PartialBijection, geo: PieceGeometry) -> list[PartialBijection]:
    """Exchanges of two even endpoints on W."""
    gmap = dict(g)
    out = []
    for p, q in combinations(geo.w, 2):
        if p not in gmap or q not in gmap:
            continue
        c, d = gmap[p], gmap[q]
        if not c < d:
            continue
        s1, s2 = (p, c), (q, d)
        ok = True
        for t in geo.w:
            if p < t < q:
                e = gmap.get(t)
                if e is None or _crosses((t, e), s1) or _crosses((t, e), s2):
                    ok = False
                    break
        if not ok:
            continue
        for r in _red_between(geo.even.reds, p, q, at_left=True):
            if not r.arc or r.crosses(*s1) or r.crosses(*s2):
                ok = False
                break
        if ok and not _red_between(geo.odd.reds, p, q, at_left=False):
            out.append(tuple(sorted([pr for pr in g if pr[0] not in (p, q)] + [(p, d), (q, c)])))
    return out


def odd_moves(f: PartialBijection, geo: PieceGeometry) -> list[tuple[int, int, PartialBijection]]:
    """Odd half of a mixed exchange: the odd endpoint po moves to a free point qe.
    Returns (po, qe, new f) for every move that creates no new crossing."""
    used = strand.image(f)
    out = []
    for a, po in f:
        old_o = (a, po)
        for qe in geo.w:
            if qe in used:
                continue
            new_o = (a, qe)
            if any(_crosses(new_o, s) and not _crosses(old_o, s) for s in f if s[1] != po):
                continue
            if any(r.crosses(*new_o) and not r.crosses(*old_o) for r in geo.odd.reds):
                continue
            out.append((po, qe, tuple(sorted([s for s in f if s[1] != po] + [new_o]))))
    return out


def even_moves(g: PartialBijection, geo: PieceGeometry) -> dict[tuple[int, int], PartialBijection]:
    """Even half of a mixed exchange: the even endpoint qe moves to po.
    Keyed by (po, qe); kept when no crossing is lost."""
    used = strand.domain(g)
    out = {}
    for qe, c in g:
        old_e = (qe, c)
        for po in geo.w:
            if po in used:
                continue
            new_e = (po, c)
            if any(_crosses(old_e, s) and not _crosses(new_e, s) for s in g if s[0] != qe):
                continue
            if any(r.crosses(*old_e) and not r.crosses(*new_e) for r in geo.even.reds):
                continue
            out[(po, qe)] = tuple(sorted([s for s in g if s[0] != qe] + [new_e]))
    return out


def exchanges(x: CTGen, geo: PieceGeometry) -> list[CTGen]:
    """Endpoint exchanges on the interior line W, before the grading filter."""
    f, g = x
    out: list[CTGen] = [(f2, g) for f2 in odd_exchanges(f, geo)]
    out += [(f, g2) for g2 in even_exchanges(g, geo)]
    em = even_moves(g, geo)
    for po, qe, f2 in odd_moves(f, geo):
        g2 = em.get((po, qe))
        if g2 is not None:
            out.append((f2, g2))
    return out


def left_moves(f: PartialBijection, geo: PieceGeometry, left_idem: frozenset[int]) -> list[tuple[PartialBijection, PartialBijection]]:
    """Terms of delta^L before the grading filter: (algebra pairs, new odd half)."""
    out = []
    for p in sorted(left_idem):
        for q, w in f:
            new_o, old_o = (p, w), (q, w)
            if any(_crosses(new_o, s) and not _crosses(old_o, s) for s in f if s[0] != q):
                continue
            if any(r.crosses(*new_o) and not r.crosses(*old_o) for r in geo.odd.reds):
                continue
            a = strand.pb([(s, s) for s in left_idem if s != p] + [(p, q)])
            out.append((a, tuple(sorted([s for s in f if s[0] != q] + [new_o]))))
    return out


def left_exchanges(x: CTGen, geo: PieceGeometry, left_idem: frozenset[int]) -> list[tuple[PartialBijection, CTGen]]:
    f, g = x
    return [(a, (f2, g)) for a, f2 in left_moves(f, geo, left_idem)]


# action tables depend only on the even half; pieces that share it share the table
_TABLES: "OrderedDict[tuple, object]" = OrderedDict()


class CTPiece:
    """All data of the bimodule of one elementary tangle, before packaging."""

    def __init__(self, t: ElementaryTangle) -> None:
        self.tangle = t
        self.geo = geometry(t)
        self.left: StrandAlgebra = build_algebra(t.in_signs)
        self.right: StrandAlgebra = build_algebra(t.out_signs)
        self.gens = enumerate_generators(self.geo)
        self.index = {x: i for i, x in enumerate(self.gens)}
        v0 = frozenset(self.geo.v0)
        self.left_idem = [v0 - strand.domain(x[0]) for x in self.gens]
        self.right_idem = [strand.image(x[1]) for x in self.gens]
        # even halves get integer ids; the right action only ever touches them
        self.g_list: list[PartialBijection] = []
        self.g_id: dict[PartialBijection, int] = {}
        self.f_list: list[PartialBijection] = []
        self.f_id: dict[PartialBijection, int] = {}
        self.gen_f: list[int] = []
        self.gen_g: list[int] = []
        for f, g in self.gens:
            if g not in self.g_id:
                self.g_id[g] = len(self.g_list)
                self.g_list.append(g)
            if f not in self.f_id:
                self.f_id[f] = len(self.f_list)
                self.f_list.append(f)
            self.gen_f.append(self.f_id[f])
            self.gen_g.append(self.g_id[g])
        self.g_crossings = [strand.total_crossings(g, self.geo.even) for g in self.g_list]
        self.g_image = [strand.image(g) for g in self.g_list]
        self.f_grade = [strand.grade_piece(f, self.geo.odd) for f in self.f_list]
        self.g_grade = [strand.grade_piece(g, self.geo.even) for g in self.g_list]
        self.gradings: list[Grading] = [
            (self.f_grade[fi][0] + self.g_grade[gi][0], self.f_grade[fi][1] + self.g_grade[gi][1])
            for fi, gi in zip(self.gen_f, self.gen_g)
        ]
        self._pair = {(self.gen_f[i], self.gen_g[i]): i for i in range(len(self.gens))}
        self._gact: dict[tuple[int, int], int] = {}
        self._arrays = None
        self._fside: dict[int, tuple] = {}
        self._delta1: list[frozenset] | None = None
        self._csr: tuple | None = None
        self._pairs: np.ndarray | None = None
        self._gside: dict[int, tuple] = {}

    def weight(self, i: int) -> int:
        return len(self.right_idem[i])

    def _f_data(self, fi: int) -> tuple:
        """Per odd half: d-terms that move f alone, mixed moves, and delta^L terms."""
        res = self._fside.get(fi)
        if res is None:
            geo, f = self.geo, self.f_list[fi]
            m, a = self.f_grade[fi]
            fid = self.f_id
            alone = [fid[f2] for f2 in strand.introductions(f, geo.odd)]
            alone += [fid[f2] for f2 in odd_exchanges(f, geo) if self.f_grade[fid[f2]] == (m - 1, a)]
            moves = [(po, qe, fid[f2]) for po, qe, f2 in odd_moves(f, geo)]
            L = self.left
            left = []
            for alg, f2 in left_moves(f, geo, frozenset(geo.v0) - strand.domain(f)):
                ai, j = L.index[alg], fid[f2]
                ma, aa = L.grading[ai]
                mf, af = self.f_grade[j]
                if (ma + mf, aa + af) == (m - 1, a):
                    left.append((ai, j))
            res = (alone, moves, left)
            self._fside[fi] = res
        return res

    def _g_data(self, gi: int) -> tuple:
        res = self._gside.get(gi)
        if res is None:
            geo, g = self.geo, self.g_list[gi]
            m, a = self.g_grade[gi]
            gid = self.g_id
            alone = [gid[g2] for g2 in strand.resolutions(g, geo.even)]
            alone += [gid[g2] for g2 in even_exchanges(g, geo) if self.g_grade[gid[g2]] == (m - 1, a)]
            moves = {k: gid[g2] for k, g2 in even_moves(g, geo).items()}
            res = (alone, moves)
            self._gside[gi] = res
        return res

    def differential(self, i: int) -> list[int]:
        """Indices of the terms of d = d_plus + d_minus + d_mixed on generator i."""
        fi, gi = self.gen_f[i], self.gen_g[i]
        f_alone, f_moves, _ = self._f_data(fi)
        g_alone, g_moves = self._g_data(gi)
        pair = self._pair
        out = [pair[(f2, gi)] for f2 in f_alone]
        out += [pair[(fi, g2)] for g2 in g_alone]
        m, a = self.gradings[i]
        for po, qe, f2 in f_moves:
            g2 = g_moves.get((po, qe))
            if g2 is not None:
                mf, af = self.f_grade[f2]
                mg, ag = self.g_grade[g2]
                if (mf + mg, af + ag) == (m - 1, a):
                    out.append(pair[(f2, g2)])
        return out

    def delta_left(self, i: int) -> list[tuple[int, int]]:
        gi = self.gen_g[i]
        return [(ai, self._pair[(f2, gi)]) for ai, f2 in self._f_data(self.gen_f[i])[2]]

    def g_act(self, gi: int, c: int) -> int:
        """Id of the even half g.c, or -1 when the product vanishes."""
        key = (gi, c)
        res = self._gact.get(key)
        if res is None:
            A = self.right
            if A.source[c] != self.g_image[gi]:
                res = -1
            elif A.is_idem[c]:
                res = gi
            else:
                g2 = strand.compose(self.g_list[gi], A.gens[c])
                if strand.total_crossings(g2, self.geo.even) != self.g_crossings[gi] + A.crossings[c]:
                    res = -1
                else:
                    res = self.g_id.get(g2, -1)
            self._gact[key] = res
        return res

    def act(self, i: int, c: int) -> int | None:
        """x . c for a right algebra generator c, or None."""
        g2 = self.g_act(self.gen_g[i], c)
        if g2 < 0:
            return None
        return self.index[(self.gens[i][0], self.g_list[g2])]

    def _action_table(self):
        """Dense g.c table over even halves with a -1 sentinel row and column."""
        A = self.right
        ng = len(self.g_list)
        table = np.full((len(A) + 1, ng + 1), -1, dtype=np.int32)
        by_image: dict[frozenset, list[int]] = defaultdict(list)
        for gi, im in enumerate(self.g_image):
            by_image[im].append(gi)
        g_list, g_id, g_cr, cr = self.g_list, self.g_id, self.g_crossings, self.geo.even
        for c in range(len(A)):
            gis = by_image.get(A.source[c])
            if not gis:
                continue
            if A.is_idem[c]:
                table[c, gis] = gis
                continue
            cmap, cc = dict(A.gens[c]), A.crossings[c]
            for gi in gis:
                g2 = tuple([(w, cmap[v]) for w, v in g_list[gi]])
                if strand.total_crossings(g2, cr) == g_cr[gi] + cc:
                    table[c, gi] = g_id.get(g2, -1)
        table.setflags(write=False)
        return table

    def act_array(self, xs, cs):
        """Vectorised right action: generators xs times algebra generators cs
        (a scalar or an array; -1 entries stand for zero).  Returns -1 for zero."""
        if self._arrays is None:
            A = self.right
            ng = len(self.g_list)
            # one extra row and column hold -1, so a -1 index reads "zero"
            key = (self.geo.v0, self.geo.w, self.geo.v1, self.geo.even, A.signs)
            table = _TABLES.get(key)
            if table is None:
                table = self._action_table()
                _TABLES[key] = table
                while len(_TABLES) > 3:
                    _TABLES.popitem(last=False)
            else:
                _TABLES.move_to_end(key)
            pair = self.pair_array()
            gf = np.array(self.gen_f + [0], dtype=np.int64)
            gg = np.array(self.gen_g + [ng], dtype=np.int64)
            self._arrays = (pair, table, gf, gg)
        pair, table, gf, gg = self._arrays
        xs = np.asarray(xs, dtype=np.int64)
        return pair[gf[xs], table[cs, gg[xs]]]

    def delta1_arrays(self) -> tuple:
        """delta^1_1 of every generator in CSR form (indptr, algebra ids, generator ids)."""
        if self._csr is None:
            self._csr = self._build_delta1()
        return self._csr

    def _build_delta1(self) -> tuple:
        n, nf = len(self.gens), len(self.f_list)
        gen_f = np.array(self.gen_f, dtype=np.int64)
        gen_g = np.array(self.gen_g, dtype=np.int64)
        pair = self.pair_array()
        e = np.array([self.left.idem[s] for s in self.left_idem], dtype=np.int64)
        fdata = [self._f_data(fi) for fi in range(nf)]
        gdata = [self._g_data(gi) for gi in range(len(self.g_list))]

        def csr(rows):
            ptr = np.zeros(len(rows) + 1, dtype=np.int64)
            ptr[1:] = np.cumsum([len(r) for r in rows])
            return ptr

        xs, as_, ys = [], [], []
        # odd half alone
        ptr = csr([d[0] for d in fdata])
        idx = np.array([v for d in fdata for v in d[0]], dtype=np.int64)
        pos, own = _gather(ptr, gen_f)
        xs.append(own)
        as_.append(e[own])
        ys.append(pair[idx[pos], gen_g[own]])
        # even half alone
        ptr = csr([d[0] for d in gdata])
        idx = np.array([v for d in gdata for v in d[0]], dtype=np.int64)
        pos, own = _gather(ptr, gen_g)
        xs.append(own)
        as_.append(e[own])
        ys.append(pair[gen_f[own], idx[pos]])
        # mixed exchanges: an odd move and an even move with the same endpoints
        h = np.int64(max(self.geo.w, default=0) + 1)
        ptr = csr([d[1] for d in fdata])
        mv = np.array([v for d in fdata for v in d[1]], dtype=np.int64).reshape(-1, 3)
        gkeys, gvals = [], []
        for gi, d in enumerate(gdata):
            for (po, qe), g2 in d[1].items():
                gkeys.append((gi * h + po) * h + qe)
                gvals.append(g2)
        order = np.argsort(np.array(gkeys, dtype=np.int64))
        gkeys_a = np.array(gkeys, dtype=np.int64)[order]
        gvals_a = np.array(gvals, dtype=np.int64)[order]
        pos, own = _gather(ptr, gen_f)
        if len(pos) and len(gkeys_a):
            key = (gen_g[own] * h + mv[pos, 0]) * h + mv[pos, 1]
            j = np.minimum(np.searchsorted(gkeys_a, key), len(gkeys_a) - 1)
            hit = gkeys_a[j] == key
            own, f2, g2 = own[hit], mv[pos[hit], 2], gvals_a[j[hit]]
            fg = np.array(self.f_grade, dtype=np.int64).reshape(-1, 2)
            gg = np.array(self.g_grade, dtype=np.int64).reshape(-1, 2)
            xg = np.array(self.gradings, dtype=np.int64).reshape(-1, 2)
            tot = fg[f2] + gg[g2]
            ok = (tot[:, 0] == xg[own, 0] - 1) & (tot[:, 1] == xg[own, 1])
            xs.append(own[ok])
            as_.append(e[own[ok]])
            ys.append(pair[f2[ok], g2[ok]])
        # delta^L: algebra element on the left, odd half moves
        ptr = csr([d[2] for d in fdata])
        lm = np.array([v for d in fdata for v in d[2]], dtype=np.int64).reshape(-1, 2)
        pos, own = _gather(ptr, gen_f)
        xs.append(own)
        as_.append(lm[pos, 0])
        ys.append(pair[lm[pos, 1], gen_g[own]])
        x = np.concatenate(xs)
        a = np.concatenate(as_)
        y = np.concatenate(ys)
        # reduce mod 2 and sort by generator
        na = np.int64(len(self.left) + 1)
        keys, counts = np.unique((x * na + a) * n + y, return_counts=True)
        keys = keys[counts % 2 == 1]
        x, rest = keys // (na * n), keys % (na * n)
        a, y = rest // n, rest % n
        indptr = np.searchsorted(x, np.arange(n + 1)).astype(np.int64)
        return indptr, a, y

    def pair_array(self) -> np.ndarray:
        """Generator id of (f id, g id), -1 when not a generator; sentinel row and column."""
        if self._pairs is None:
            pair = np.full((len(self.f_list) + 1, len(self.g_list) + 1), -1, dtype=np.int64)
            pair[np.array(self.gen_f), np.array(self.gen_g)] = np.arange(len(self.gens))
            self._pairs = pair
        return self._pairs

    def full_delta1(self) -> list[frozenset]:
        """delta^1_1 of every generator, as frozensets of (algebra id, generator id)."""
        if self._delta1 is None:
            indptr, a, y = self.delta1_arrays()
            terms = list(zip(a.tolist(), y.tolist()))
            b = indptr.tolist()
            self._delta1 = [frozenset(terms[b[i]:b[i + 1]]) for i in range(len(self.gens))]
        return self._delta1

    def bimodule(self, weight: int | None = None) -> DABimodule:
        L = self.left
        csr = None
        delta1 = None
        if weight is None:
            keep = list(range(len(self.gens)))
            new = {i: i for i in keep}
            csr = self.delta1_arrays()
        else:
            # delta^1_1 preserves the right idempotent, hence the weight
            full = self.full_delta1()
            keep = [i for i in range(len(self.gens)) if self.weight(i) == weight]
            new = {old: k for k, old in enumerate(keep)}
            delta1 = [frozenset((a, new[j]) for a, j in full[i]) for i in keep]

        def d2(k: int, c: int) -> frozenset:
            i = keep[k]
            j = self.act(i, c)
            if j is None or j not in new:
                return frozenset()
            return frozenset({(L.idem[self.left_idem[i]], new[j])})

        action = self.act_array if weight is None else None
        classes = None
        if weight is None:
            self.act_array([0], 0)
            classes = (self._arrays[3][:-1], self._arrays[1])
        return DABimodule(
            L,
            self.right,
            [self.gens[i] for i in keep],
            [self.gradings[i] for i in keep],
            [self.left_idem[i] for i in keep],
            [self.right_idem[i] for i in keep],
            delta1,
            d2,
            action,
            classes,
            csr,
        )

    def g_representatives(self) -> list[int]:
        """One generator per distinct even half; the right action only sees g."""
        seen: dict[int, int] = {}
        for i, gi in enumerate(self.gen_g):
            seen.setdefault(gi, i)
        return sorted(seen.values())


@lru_cache(maxsize=None)
def ct_piece(t: ElementaryTangle) -> CTPiece:
    return CTPiece(t)


def build_ct(t: ElementaryTangle, weight: int | None = None) -> DABimodule:
    """The type DA bimodule of one elementary tangle (optionally one weight)."""
    return ct_piece(t).bimodule(weight)


def weight_piece(m: DABimodule, k: int) -> DABimodule:
    """Restriction to generators whose right idempotent has k elements."""
    return m.restrict(i for i in range(len(m)) if len(m.right_idem[i]) == k)


class WordTooLarge(ValueError):
    pass


def _tensor_size(m: DABimodule, n: DABimodule) -> int:
    counts = Counter(n.left_idem)
    return sum(counts[t] for t in m.right_idem)


def build_ct_word(word: TangleWord, max_generators: int | None = None) -> DABimodule:
    """Left-to-right box tensor fold over the pieces of a word.

    With ``max_generators`` the fold stops with WordTooLarge before building
    any intermediate bimodule with more generators than that.
    """
    if not word.pieces:
        from .homcore import identity_bimodule

        return identity_bimodule(build_algebra(word.boundary0))
    m = build_ct(word.pieces[0])
    for k, t in enumerate(word.pieces[1:], 2):
        n = build_ct(t)
        if max_generators is not None:
            count = _tensor_size(m, n)
            if count > max_generators:
                raise WordTooLarge(f"after {k} pieces the bimodule would have {count} generators (limit {max_generators})")
        m = box_tensor(m, n)
    return m


def direct_two_piece_dims(t1: ElementaryTangle, t2: ElementaryTangle) -> dict:
    """Graded dimensions per idempotent pair from global generator enumeration of a
    two-piece word (independent of the box tensor)."""
    g1, g2 = geometry(t1), geometry(t2)
    v0, v1, v2 = frozenset(g1.v0), frozenset(g1.v1), frozenset(g2.v1)
    assert g1.v1 == g2.v0
    out: dict = defaultdict(int)
    xs = enumerate_generators(g1)
    ys = enumerate_generators(g2)
    ys_by_dom: dict = defaultdict(list)
    for y in ys:
        ys_by_dom[strand.domain(y[0])].append(y)
    for x in xs:
        used = strand.image(x[1])
        mx, ax = grade_generator(x, g1)
        s = v0 - strand.domain(x[0])
        for y in ys_by_dom.get(v1 - used, []):
            my, ay = grade_generator(y, g2)
            out[(s, strand.image(y[1]), mx + my, ax + ay)] += 1
    return dict(out)


def bimodule_dims(m: DABimodule) -> dict:
    out: dict = defaultdict(int)
    for i in range(len(m)):
        out[(m.left_idem[i], m.right_idem[i], *m.gradings[i])] += 1
    return dict(out)


# ---------------------------------------------------------------------------
# closed words: fold into a chain complex


def _max_prefix(pieces: Sequence[CTPiece], best_fn) -> list[dict[frozenset, int]]:
    """For each j, the extreme total 2A over generator tuples of pieces[:j] by right idempotent."""
    out: list[dict[frozenset, int]] = [{}]
    cur: dict[frozenset, int] | None = None
    for pc in pieces:
        nxt: dict[frozenset, int] = {}
        for i in range(len(pc.gens)):
            s, t = pc.left_idem[i], pc.right_idem[i]
            base = 0 if cur is None else cur.get(s)
            if base is None:
                continue
            val = base + pc.gradings[i][1]
            old = nxt.get(t)
            if old is None or best_fn(val, old) == val:
                nxt[t] = val
        cur = nxt
        out.append(nxt)
    return out


def fold_closed(
    word: TangleWord,
    weight: int,
    window: tuple[int | None, int | None] = (None, None),
    jobs: int = 1,
) -> TypeD:
    """CT_k of a closed word as a reduced type D structure over A(()), i.e. a complex.

    Folds from the right, cancelling idempotent arrows after every step.  With a
    window (lo, hi) on 2A, generators that cannot contribute to a final generator
    with lo <= 2A <= hi are discarded early.
    """
    if word.boundary1:
        raise ValueError("fold_closed expects a word with empty right boundary")
    pieces = [ct_piece(t) for t in word.pieces]
    lo, hi = window
    upper = _max_prefix(pieces, max)
    lower = _max_prefix(pieces, min)

    def keeper(j: int):
        if lo is None and hi is None:
            return None
        up, dn = upper[j], lower[j]

        def keep(g: Grading, idem: frozenset) -> bool:
            if j == 0:
                u = d = 0
            else:
                u, d = up.get(idem), dn.get(idem)
                if u is None:
                    return False
            if lo is not None and g[1] + u < lo:
                return False
            if hi is not None and g[1] + d > hi:
                return False
            return True

        return keep

    last = pieces[-1].bimodule(weight)
    k = keeper(len(pieces) - 1)
    keep_idx = [i for i in range(len(last)) if k is None or k(last.gradings[i], last.left_idem[i])]
    n = TypeD.from_da(last, keep_idx).cancel()
    for j in range(len(pieces) - 2, -1, -1):
        m = pieces[j].bimodule()
        n = box_da_d(m, n, keeper(j)).cancel()
    return n


def check_piece(t: ElementaryTangle) -> dict | None:
    """Structure equations for one piece; associativity is checked once per even half."""
    from .homcore import check_structure

    pc = ct_piece(t)
    return check_structure(pc.bimodule(), assoc_gens=pc.g_representatives())


def _share_key(t: ElementaryTangle) -> tuple:
    # xo and trivial pieces with equal right boundary have the same even half
    if t.kind in ("xo", "trivial"):
        return (0, t.out_signs, t.kind, t.position)
    return (1, t.kind, t.in_signs, t.position)


def check_pieces(pieces: Iterable[ElementaryTangle]) -> dict[ElementaryTangle, dict | None]:
    """check_piece over many pieces, ordered so that shared data is reused."""
    out = {}
    for t in sorted(pieces, key=_share_key):
        out[t] = check_piece(t)
        ct_piece.cache_clear()
    return out


# ---------------------------------------------------------------------------
# knot Floer homology of closed words


class StripFailed(ArithmeticError):
    """The homology is not divisible by the stabilisation factor."""


def _div_one_plus_minv(p: dict[int, int]) -> dict[int, int]:
    """Exact quotient of a Laurent polynomial in m (dict exp->coeff) by 1 + m^-1."""
    if not p:
        return {}
    rem = dict(p)
    out: dict[int, int] = {}
    for e in range(max(rem), min(rem), -1):
        c = rem.get(e, 0)
        if c:
            out[e] = c
            rem[e - 1] = rem.get(e - 1, 0) - c
    if rem.get(min(p), 0):
        raise StripFailed(f"not divisible by 1+m^-1: {p}")
    return out


def _term(c: int, shift: int, h: dict[int, int]) -> dict[int, int]:
    """c * m^shift * (1 + m^-1) * h."""
    out: dict[int, int] = defaultdict(int)
    for e, v in h.items():
        out[e + shift] += c * v
        out[e + shift - 1] += c * v
    return out


def _sub(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    out = defaultdict(int, p)
    for e, v in q.items():
        out[e] -= v
    return {e: v for e, v in out.items() if v}


def _by_a(dims: dict[Grading, int]) -> dict[int, dict[int, int]]:
    out: dict[int, dict[int, int]] = defaultdict(dict)
    for (m, a), r in dims.items():
        out[a][m] = r
    return out


def strip_from_top(dims: dict[Grading, int], e: int, top: int, lo: int) -> dict[int, dict[int, int]]:
    """H with P = H (1 + m^-1 a^-2)^e (1 + m^-1), given P exactly on lo <= 2A <= top
    and P = 0 above top.  Returns H for 2A in [lo, top]."""
    from math import comb

    p = _by_a(dims)
    h: dict[int, dict[int, int]] = {}
    for d in range(top, lo - 1, -1):
        rhs = p.get(d, {})
        for i in range(1, e + 1):
            if d + 2 * i in h:
                rhs = _sub(rhs, _term(comb(e, i), -i, h[d + 2 * i]))
        h[d] = _div_one_plus_minv(rhs)
    return h


def strip_from_bottom(dims: dict[Grading, int], e: int, bottom: int, hi: int) -> dict[int, dict[int, int]]:
    """As strip_from_top, given P exactly on bottom <= 2A <= hi and 0 below.
    Returns H for 2A in [bottom + 2e, hi + 2e]."""
    from math import comb

    p = _by_a(dims)
    h: dict[int, dict[int, int]] = {}
    for c in range(bottom, hi + 1):
        rhs = p.get(c, {})
        for i in range(e):
            if c + 2 * i in h:
                rhs = _sub(rhs, _term(comb(e, i), -i, h[c + 2 * i]))
        q = _div_one_plus_minv(rhs)
        h[c + 2 * e] = {m + e: v for m, v in q.items()}
    return h


def _flatten(h: dict[int, dict[int, int]], lo: int, hi: int) -> dict[Grading, int]:
    out = {}
    for a, poly in h.items():
        if lo <= a <= hi:
            for m, v in poly.items():
                if v < 0:
                    raise StripFailed(f"negative rank at {(m, a)}")
                if v:
                    out[(m, a)] = v
    return out


def hfk(word: TangleWord, weight: int = 0, margin: int = 2) -> dict:
    """Stripped homology of CT_weight of a closed word.

    The complex splits along 2A, so it is computed in a top and a bottom 2A
    window only, each deep enough that the two stripped halves overlap by
    ``margin``.  The overlap must agree.  The result is shifted by the number
    of components so that the unknot sits at (0, 0).
    """
    from .tanglelang import components, size

    if not word.closed:
        raise ValueError("hfk expects a closed word")
    pieces = [ct_piece(t) for t in word.pieces]
    top = _max_prefix(pieces, max)[-1][frozenset()]
    bottom = _max_prefix(pieces, min)[-1][frozenset()]
    ncomp = components(word)
    e = size(word) - ncomp
    depth = max(0, -(-(top - bottom - 2 * e) // 2)) + margin
    hi_dims = homology(fold_closed(word, weight, window=(top - depth, None)).to_complex())
    lo_dims = homology(fold_closed(word, weight, window=(None, bottom + depth)).to_complex())
    h_top = strip_from_top(hi_dims, e, top, top - depth)
    h_bot = strip_from_bottom(lo_dims, e, bottom, bottom + depth)
    ov_lo, ov_hi = top - depth, bottom + depth + 2 * e
    a = _flatten(h_top, ov_lo, ov_hi)
    b = _flatten(h_bot, ov_lo, ov_hi)
    if a != b:
        raise StripFailed(f"top and bottom windows disagree on the overlap: {a} vs {b}")
    merged = {**_flatten(h_bot, bottom + 2 * e, ov_hi), **_flatten(h_top, ov_lo, top)}
    shifted = {(m, s + ncomp): r for (m, s), r in merged.items()}
    return {
        "homology": shifted,
        "components": ncomp,
        "exponent": e,
        "window": {"top": top, "bottom": bottom, "depth": depth},
        "symmetric": shifted == {(m - s, -s): r for (m, s), r in shifted.items()},
    }


def graded_euler(dims: dict[Grading, int]):
    """sum (-1)^M rank q^(2A)."""
    from .laurent import LaurentPoly

    out: dict[int, int] = defaultdict(int)
    for (m, a), r in dims.items():
        out[a] += (-1) ** m * r
    return LaurentPoly(out)
