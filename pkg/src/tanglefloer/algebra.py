"""The dg algebra A(P) over F_2 spanned by strand diagrams."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from . import strand
from .strand import PartialBijection


def subset_key(s: Iterable[int]) -> int:
    """Sort key realising the reverse lexicographic order on subsets (a bitmask)."""
    return sum(1 << i for i in s)


def primitive_order(n: int) -> list[frozenset[int]]:
    """All subsets of [n] = {0..n}, in reverse lexicographic order."""
    return [frozenset(i for i in range(n + 1) if mask >> i & 1) for mask in range(1 << (n + 1))]


def subsets_of_size(n: int, k: int) -> list[frozenset[int]]:
    return sorted((frozenset(c) for c in combinations(range(n + 1), k)), key=subset_key)


class StrandAlgebra:
    """A(P) for a sign sequence P of length n: all partial bijections of [n] = {0..n}.

    Generators carry stable integer ids ordered by weight, then source subset in
    reverse lexicographic order, then target tuple lexicographically.  Sums over F_2
    are represented as frozensets of ids.
    """

    def __init__(self, p: Sequence[int]) -> None:
        self.signs = tuple(p)
        self.n = len(self.signs)
        self.ctx = strand.algebra_context(self.signs)
        gens: list[PartialBijection] = []
        for k in range(self.n + 2):
            for src in subsets_of_size(self.n, k):
                srcs = sorted(src)
                for tgt in permutations(range(self.n + 1), k):
                    gens.append(tuple(zip(srcs, tgt)))
        self.gens: list[PartialBijection] = gens
        self.index: dict[PartialBijection, int] = {g: i for i, g in enumerate(gens)}
        self.source = [strand.domain(g) for g in gens]
        self.target = [strand.image(g) for g in gens]
        self.weight = [len(g) for g in gens]
        self.crossings = [strand.total_crossings(g, self.ctx) for g in gens]
        self.grading = [strand.grade_algebra(g, self.ctx) for g in gens]
        self.idem: dict[frozenset[int], int] = {
            frozenset(s): self.index[strand.identity(s)] for s in primitive_order(self.n)
        }
        self.is_idem = [g == strand.identity(strand.domain(g)) for g in gens]
        self._mul: dict[tuple[int, int], int | None] = {}
        self._d: dict[int, frozenset[int]] = {}
        self._by_source: dict[frozenset[int], list[int]] = {}
        self._by_target: dict[frozenset[int], list[int]] = {}
        for i in range(len(gens)):
            self._by_source.setdefault(self.source[i], []).append(i)
            self._by_target.setdefault(self.target[i], []).append(i)

    def __len__(self) -> int:
        return len(self.gens)

    def __repr__(self) -> str:
        return f"StrandAlgebra({self.signs}, dim={len(self)})"

    def dims_by_weight(self) -> list[int]:
        out = [0] * (self.n + 2)
        for w in self.weight:
            out[w] += 1
        return out

    @staticmethod
    def expected_dim(n: int, k: int) -> int:
        return comb(n + 1, k) ** 2 * factorial(k)

    def starting_at(self, s: frozenset[int]) -> list[int]:
        """Generators a with e_s a = a."""
        return self._by_source.get(frozenset(s), [])

    def ending_at(self, s: frozenset[int]) -> list[int]:
        return self._by_target.get(frozenset(s), [])

    def multiply(self, i: int, j: int) -> int | None:
        """Product of generators i then j (y o x), or None for zero."""
        key = (i, j)
        if key in self._mul:
            return self._mul[key]
        res = None
        if self.target[i] == self.source[j]:
            if self.is_idem[i]:
                res = j
            elif self.is_idem[j]:
                res = i
            else:
                z = strand.compose(self.gens[i], self.gens[j])
                zi = self.index[z]
                if self.crossings[zi] == self.crossings[i] + self.crossings[j]:
                    res = zi
        self._mul[key] = res
        return res

    def differential(self, i: int) -> frozenset[int]:
        if i not in self._d:
            self._d[i] = frozenset(self.index[y] for y in strand.resolutions(self.gens[i], self.ctx))
        return self._d[i]

    def composable_pairs(self, s: frozenset[int]):
        """Arrays (c, c', cc') over non-idempotent c starting at s and non-idempotent
        c' starting where c ends; cc' is -1 when the product vanishes."""
        key = frozenset(s)
        cache = self.__dict__.setdefault("_pairs", {})
        if key not in cache:
            cs, c3s, ccs = [], [], []
            for c in self.starting_at(key):
                if self.is_idem[c]:
                    continue
                for c3 in self.starting_at(self.target[c]):
                    if self.is_idem[c3]:
                        continue
                    cc = self.multiply(c, c3)
                    cs.append(c)
                    c3s.append(c3)
                    ccs.append(-1 if cc is None else cc)
            cache[key] = tuple(np.array(v, dtype=np.int64) for v in (cs, c3s, ccs))
        return cache[key]

    def product_table(self):
        """Dense product table with a sentinel: entry [i, j] is the id of i*j or -1;
        row and column -1 are all -1."""
        cache = self.__dict__.setdefault("_tables", {})
        if "mul" not in cache:
            n = len(self)
            t = np.full((n + 1, n + 1), -1, dtype=np.int32)
            for i in range(n):
                js = self.starting_at(self.target[i])
                t[i, js] = [-1 if (k := self.multiply(i, j)) is None else k for j in js]
            cache["mul"] = t
        return cache["mul"]

    def differential_csr(self):
        """The differential as CSR arrays (indptr, indices)."""
        cache = self.__dict__.setdefault("_tables", {})
        if "d" not in cache:
            lens = [len(self.differential(i)) for i in range(len(self))]
            indptr = np.zeros(len(self) + 1, dtype=np.int64)
            indptr[1:] = np.cumsum(lens)
            idx = np.array([j for i in range(len(self)) for j in sorted(self.differential(i))], dtype=np.int64)
            cache["d"] = (indptr, idx)
        return cache["d"]

    def mul_sums(self, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for i in a:
            for j in b:
                k = self.multiply(i, j)
                if k is not None:
                    out ^= {k}
        return frozenset(out)

    def d_sum(self, a: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for i in a:
            out ^= self.differential(i)
        return frozenset(out)

    def generator_of(self, pairs: Iterable[tuple[int, int]]) -> int:
        return self.index[strand.pb(pairs)]

    def to_json(self, tables: bool = False) -> dict:
        data: dict = {
            "signs": list(self.signs),
            "dimension": len(self),
            "dims_by_weight": self.dims_by_weight(),
        }
        if tables:
            data["generators"] = [
                {"id": i, "map": [list(p) for p in g], "M": m, "2A": a}
                for i, (g, (m, a)) in enumerate(zip(self.gens, self.grading))
            ]
            data["differential"] = {str(i): sorted(self.differential(i)) for i in range(len(self))}
            data["products"] = [
                [i, j, k]
                for i in range(len(self))
                for j in self.starting_at(self.target[i])
                if (k := self.multiply(i, j)) is not None
            ]
        return data


@lru_cache(maxsize=None)
def build_algebra(p: tuple[int, ...]) -> StrandAlgebra:
    """Cached constructor; algebras are immutable once built."""
    return StrandAlgebra(tuple(p))


def check_algebra(A: StrandAlgebra, associativity: bool = True) -> dict | None:
    """First failure of d^2 = 0, Leibniz, associativity or grading additivity, else None."""
    for i in range(len(A)):
        m, a = A.grading[i]
        if any(A.grading[j] != (m - 1, a) for j in A.differential(i)):
            return {"law": "grading of d", "gen": A.gens[i]}
        if A.d_sum(A.differential(i)):
            return {"law": "d^2", "gen": A.gens[i]}
    for i in range(len(A)):
        di = A.differential(i)
        for j in A.starting_at(A.target[i]):
            ij = A.multiply(i, j)
            if ij is not None:
                g, h = A.grading[i], A.grading[j]
                if A.grading[ij] != (g[0] + h[0], g[1] + h[1]):
                    return {"law": "grading of product", "gens": (A.gens[i], A.gens[j])}
            lhs = A.differential(ij) if ij is not None else frozenset()
            rhs = A.mul_sums(di, [j]) ^ A.mul_sums([i], A.differential(j))
            if lhs != rhs:
                return {"law": "Leibniz", "gens": (A.gens[i], A.gens[j])}
            if not associativity or A.is_idem[i] or A.is_idem[j]:
                continue
            for k in A.starting_at(A.target[j]):
                if A.is_idem[k]:
                    continue
                jk = A.multiply(j, k)
                l = None if ij is None else A.multiply(ij, k)
                r = None if jk is None else A.multiply(i, jk)
                if l != r:
                    return {"law": "associativity", "gens": (A.gens[i], A.gens[j], A.gens[k])}
    return None


def check_adjoint(A: StrandAlgebra) -> dict | None:
    """y is a resolution of x exactly when x is an introduction of y, with M shifted by one."""
    for i, x in enumerate(A.gens):
        res = set(strand.resolutions(x, A.ctx))
        intro = set(strand.introductions(x, A.ctx))
        for y in res:
            if x not in strand.introductions(y, A.ctx):
                return {"law": "resolution without introduction", "gens": (x, y)}
        for y in intro:
            if x not in strand.resolutions(y, A.ctx):
                return {"law": "introduction without resolution", "gens": (x, y)}
            m, a = A.grading[i]
            if A.grading[A.index[y]] != (m + 1, a):
                return {"law": "grading of introduction", "gens": (x, y)}
    return None
