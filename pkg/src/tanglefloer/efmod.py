"""The dg bimodules E(P) and F(P) and the test objects built from them.

An F generator is a partial bijection {-1} u [n] -> [n] with -1 in its domain; the
extra black height -1 sits below every red strand.  E(P) is the opposite of
F(-P): every diagram is reflected, so E generators map [n] into {-1} u [n] with
-1 in the image.  Both are graded by the algebra formulas.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Sequence

from . import strand
from .algebra import StrandAlgebra, build_algebra, primitive_order, subset_key
from .homcore import BigradedComplex, DgModuleData, Grading, bits, cone, homology, tensor_over_algebra
from .laurent import LaurentMatrix, LaurentPoly, NotDivisible, ONE, ZERO, det
from .strand import PartialBijection

NEG = -1
PAD = ((NEG, NEG),)


def _transpose(x: PartialBijection) -> PartialBijection:
    return strand.pb((b, a) for a, b in x)


def _neg(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(-s for s in p)


def lowering_generators(n: int) -> list[PartialBijection]:
    """All partial bijections {-1} u [n] -> [n] whose domain contains -1."""
    out = []
    for k in range(1, n + 2):
        for rest in combinations(range(n + 1), k - 1):
            src = (NEG, *rest)
            for tgt in permutations(range(n + 1), k):
                out.append(tuple(zip(src, tgt)))
    return out


@dataclass
class EFBimodule:
    """E(P) or F(P) as a dg bimodule over (A(P), A(P)) on a basis of diagrams."""

    side: str
    signs: tuple[int, ...]
    gens: list[PartialBijection]
    gradings: list[Grading]
    algebra: StrandAlgebra = field(repr=False)

    def __post_init__(self) -> None:
        self.index = {g: i for i, g in enumerate(self.gens)}
        self.ctx = self.algebra.ctx
        if self.side == "F":
            self.left_idem = [strand.domain(g) - {NEG} for g in self.gens]
            self.right_idem = [strand.image(g) for g in self.gens]
        else:
            self.left_idem = [strand.domain(g) for g in self.gens]
            self.right_idem = [strand.image(g) - {NEG} for g in self.gens]
        self._d: dict[int, frozenset[int]] = {}

    def __len__(self) -> int:
        return len(self.gens)

    @property
    def n(self) -> int:
        return len(self.signs)

    def weight(self, i: int) -> int:
        """Size of the domain (the F weight; for E the weight of the opposite)."""
        return len(self.gens[i])

    def _glue(self, x: PartialBijection, y: PartialBijection) -> int | None:
        z = strand.concat(x, y, self.ctx, self.ctx)
        return None if z is None else self.index[z]

    def left_act(self, a: int, i: int) -> int | None:
        A = self.algebra
        if A.target[a] != self.left_idem[i]:
            return None
        if A.is_idem[a]:
            return i
        g = A.gens[a]
        return self._glue(PAD + g if self.side == "F" else g, self.gens[i])

    def right_act(self, i: int, b: int) -> int | None:
        A = self.algebra
        if A.source[b] != self.right_idem[i]:
            return None
        if A.is_idem[b]:
            return i
        g = A.gens[b]
        return self._glue(self.gens[i], g if self.side == "F" else PAD + g)

    def differential(self, i: int) -> frozenset[int]:
        if i not in self._d:
            self._d[i] = frozenset(self.index[y] for y in strand.resolutions(self.gens[i], self.ctx))
        return self._d[i]

    def complex(self, left: frozenset[int] | None = None, right: frozenset[int] | None = None) -> BigradedComplex:
        """The underlying complex, optionally cut down to e_left . M . e_right."""
        keep = [
            i for i in range(len(self))
            if (left is None or self.left_idem[i] == left) and (right is None or self.right_idem[i] == right)
        ]
        pos = {i: k for k, i in enumerate(keep)}
        d = [sum(1 << pos[j] for j in self.differential(i)) for i in keep]
        return BigradedComplex([self.gradings[i] for i in keep], d, [self.gens[i] for i in keep])

    def as_right_module(self) -> DgModuleData:
        return DgModuleData(
            list(self.gradings), [_mask(self.differential(i)) for i in range(len(self))],
            list(self.right_idem), self.right_act, list(self.gens),
        )

    def as_left_module(self) -> DgModuleData:
        return DgModuleData(
            list(self.gradings), [_mask(self.differential(i)) for i in range(len(self))],
            list(self.left_idem), lambda j, a: self.left_act(a, j), list(self.gens),
        )

    def chi(self) -> LaurentMatrix:
        """Entry (s, t) is the graded Euler characteristic of e_s M e_t."""
        return _chi_matrix(self.n, zip(self.left_idem, self.right_idem, self.gradings))

    def check(self) -> dict | None:
        """First failure of d^2 = 0, grading, Leibniz or associativity, else None."""
        A = self.algebra
        for i in range(len(self)):
            m, a = self.gradings[i]
            for j in self.differential(i):
                if self.gradings[j] != (m - 1, a):
                    return {"law": "grading of d", "gen": self.gens[i]}
            if _xor_all(self.differential(j) for j in self.differential(i)):
                return {"law": "d^2", "gen": self.gens[i]}
        for i in range(len(self)):
            for a in A.ending_at(self.left_idem[i]):
                ax = self.left_act(a, i)
                if ax is not None and self.gradings[ax] != _add(A.grading[a], self.gradings[i]):
                    return {"law": "grading of left action", "gen": self.gens[i], "a": A.gens[a]}
                lhs = self.differential(ax) if ax is not None else frozenset()
                rhs = _xor_all(
                    [_opt(self.left_act(a2, i)) for a2 in A.differential(a)]
                    + [_opt(self.left_act(a, j)) for j in self.differential(i)]
                )
                if lhs != rhs:
                    return {"law": "left Leibniz", "gen": self.gens[i], "a": A.gens[a]}
                for b in A.starting_at(self.right_idem[i]):
                    l = None if ax is None else self.right_act(ax, b)
                    xb = self.right_act(i, b)
                    r = None if xb is None else self.left_act(a, xb)
                    if l != r:
                        return {"law": "bimodule associativity", "gen": self.gens[i], "a": A.gens[a], "b": A.gens[b]}
                for a0 in A.ending_at(A.source[a]):
                    a0a = A.multiply(a0, a)
                    l = None if a0a is None else self.left_act(a0a, i)
                    r = None if ax is None else self.left_act(a0, ax)
                    if l != r:
                        return {"law": "left associativity", "gen": self.gens[i]}
            for b in A.starting_at(self.right_idem[i]):
                xb = self.right_act(i, b)
                if xb is not None and self.gradings[xb] != _add(self.gradings[i], A.grading[b]):
                    return {"law": "grading of right action", "gen": self.gens[i], "b": A.gens[b]}
                lhs = self.differential(xb) if xb is not None else frozenset()
                rhs = _xor_all(
                    [_opt(self.right_act(j, b)) for j in self.differential(i)]
                    + [_opt(self.right_act(i, b2)) for b2 in A.differential(b)]
                )
                if lhs != rhs:
                    return {"law": "right Leibniz", "gen": self.gens[i], "b": A.gens[b]}
                for b2 in A.starting_at(A.target[b]):
                    bb = A.multiply(b, b2)
                    l = None if xb is None else self.right_act(xb, b2)
                    r = None if bb is None else self.right_act(i, bb)
                    if l != r:
                        return {"law": "right associativity", "gen": self.gens[i]}
        return None


def _mask(s) -> int:
    return sum(1 << j for j in s)


def _opt(i: int | None) -> frozenset[int]:
    return frozenset() if i is None else frozenset((i,))


def _xor_all(sets) -> frozenset[int]:
    out: set[int] = set()
    for s in sets:
        out ^= set(s)
    return frozenset(out)


def _add(g: Grading, h: Grading) -> Grading:
    return g[0] + h[0], g[1] + h[1]


def _chi_matrix(n: int, entries) -> LaurentMatrix:
    size = 1 << (n + 1)
    terms: dict = defaultdict(lambda: defaultdict(int))
    for s, t, (m, a) in entries:
        terms[(subset_key(s), subset_key(t))][a] += -1 if m % 2 else 1
    return LaurentMatrix.from_function(size, size, lambda i, j: LaurentPoly(terms.get((i, j), {})))


@lru_cache(maxsize=None)
def build_F(p: tuple[int, ...]) -> EFBimodule:
    p = tuple(p)
    A = build_algebra(p)
    gens = lowering_generators(len(p))
    return EFBimodule("F", p, gens, [strand.grade_algebra(g, A.ctx) for g in gens], A)


def reflect_grading(g: Grading) -> Grading:
    """Bigrading of a diagram after reflection, which swaps left and right reds."""
    m, a = g
    return m - a, -a


@lru_cache(maxsize=None)
def build_E(p: tuple[int, ...]) -> EFBimodule:
    """The opposite of F(-P): reflected diagrams, graded through the reflection."""
    p = tuple(p)
    f = build_F(_neg(p))
    gens = [_transpose(g) for g in f.gens]
    return EFBimodule("E", p, gens, [reflect_grading(g) for g in f.gradings], build_algebra(p))


def direct_E_gradings(p: Sequence[int]) -> list[Grading]:
    """E(P) gradings recomputed from the algebra formulas on the E diagrams."""
    e = build_E(tuple(p))
    return [strand.grade_algebra(g, e.ctx) for g in e.gens]


def build(p: Sequence[int], side: str) -> EFBimodule:
    if side not in ("E", "F"):
        raise ValueError("side must be 'E' or 'F'")
    return build_E(tuple(p)) if side == "E" else build_F(tuple(p))


# ---------------------------------------------------------------------------
# Grothendieck group


def cartan(p: Sequence[int]) -> LaurentMatrix:
    """chi(e_s A e_u) on the primitive basis."""
    A = build_algebra(tuple(p))
    return _chi_matrix(A.n, zip(A.source, A.target, A.grading))


def _inverse_times(c: LaurentMatrix, x: LaurentMatrix) -> LaurentMatrix:
    """C^-1 X for C block diagonal by subset size; raises NotDivisible if not integral."""
    n = c.rows.bit_length() - 2
    out = [[ZERO] * x.cols for _ in range(x.rows)]
    for k in range(n + 2):
        idx = [subset_key(s) for s in primitive_order(n) if len(s) == k]
        blk = c.submatrix(idx, idx)
        d = det(blk)
        m = len(idx)
        adj = [[ZERO] * m for _ in range(m)]
        for i in range(m):
            for j in range(m):
                minor = blk.submatrix([r for r in range(m) if r != j], [q for q in range(m) if q != i])
                adj[i][j] = det(minor) * (1 if (i + j) % 2 == 0 else -1)
        for i in range(m):
            for col in range(x.cols):
                acc = ZERO
                for j in range(m):
                    if adj[i][j] and x[idx[j], col]:
                        acc = acc + adj[i][j] * x[idx[j], col]
                try:
                    out[idx[i]][col] = acc.divexact(d)
                except NotDivisible:
                    raise NotDivisible(f"class matrix is not integral at row {idx[i]}, column {col}") from None
    return LaurentMatrix(x.rows, x.cols, out)


def class_matrix(p: Sequence[int], side: str) -> LaurentMatrix:
    """K_0 matrix of E(P) or F(P) acting on [A e_t]: the Cartan inverse times chi."""
    return _inverse_times(cartan(p), build(p, side).chi())


def displayed_matrix(p: Sequence[int], side: str) -> LaurentMatrix:
    """The class matrix times (1 - q^-2)^|P|."""
    return class_matrix(p, side) * (ONE - LaurentPoly.monomial(-2)) ** len(p)


def y_generator_matrix(p: Sequence[int]) -> LaurentMatrix:
    """Class matrix of F read off the generators y_{i,s} = id_s plus -1 -> i."""
    n = len(p)
    f = build_F(tuple(p))
    size = 1 << (n + 1)
    data = [[ZERO] * size for _ in range(size)]
    for s in primitive_order(n):
        for i in range(n + 1):
            if i in s:
                continue
            y = f.index[strand.pb([(NEG, i), *((a, a) for a in s)])]
            m, a = f.gradings[y]
            data[subset_key(s)][subset_key(s | {i})] = LaurentPoly.monomial(a, -1 if m % 2 else 1)
    return LaurentMatrix(size, size, data)


# ---------------------------------------------------------------------------
# derived relations


def tensor(p: Sequence[int], first: str, second: str) -> tuple[BigradedComplex, list[tuple[int, int]]]:
    """first (x)_A second as a complex; labels are pairs of generator indices."""
    a, b = build(p, first), build(p, second)
    return tensor_over_algebra(a.as_right_module(), b.as_left_module(), a.algebra)


def _pair_idems(p: Sequence[int], first: str, second: str, labels) -> list[tuple[frozenset, frozenset]]:
    a, b = build(p, first), build(p, second)
    return [(a.left_idem[i], b.right_idem[j]) for i, j in labels]


def algebra_complex(p: Sequence[int]) -> BigradedComplex:
    A = build_algebra(tuple(p))
    return BigradedComplex(list(A.grading), [_mask(A.differential(i)) for i in range(len(A))], list(A.gens))


def splice(z: PartialBijection, x: PartialBijection, ctx) -> PartialBijection | None:
    """f on a pair (E generator z, F generator x): join the strand through -1 when it
    leaves or re-enters at height 0 and the joined diagram stays minimal, else None."""
    xm = dict(x)
    i = next(a for a, b in z if b == NEG)
    j = xm[NEG]
    if i != 0 and j != 0:
        return None
    y = strand.pb([(i, j)] + [(a, xm[b]) for a, b in z if b != NEG])
    if strand.total_crossings(y, ctx) != strand.total_crossings(z, ctx) + strand.total_crossings(x, ctx):
        return None
    return y


@dataclass
class Triangle:
    ef: BigradedComplex
    algebra: BigradedComplex
    f: list[int]
    cone: BigradedComplex
    ef_idems: list[tuple[frozenset, frozenset]]


def ef_triangle(p: Sequence[int]) -> Triangle:
    """E (x)_A F, the splice map f into A, and its cone; raises NotChainMap if f is not
    a chain map."""
    p = tuple(p)
    e, fm = build_E(p), build_F(p)
    A = build_algebra(p)
    ef, _ = tensor(p, "E", "F")
    _check_well_defined(e, fm, A)
    f = []
    for i, j in ef.labels:
        y = splice(e.gens[i], fm.gens[j], A.ctx)
        f.append(0 if y is None else 1 << A.index[y])
    alg = algebra_complex(p)
    return Triangle(ef, alg, f, cone(ef, alg, f), _pair_idems(p, "E", "F", ef.labels))


def _check_well_defined(e: EFBimodule, fm: EFBimodule, A: StrandAlgebra) -> None:
    """f(z.a (x) x) = f(z (x) a.x) for every relation of the tensor product."""
    def value(i: int | None, j: int | None):
        if i is None or j is None:
            return None
        return splice(e.gens[i], fm.gens[j], A.ctx)

    for i in range(len(e)):
        for a in A.starting_at(e.right_idem[i]):
            if A.is_idem[a]:
                continue
            za = e.right_act(i, a)
            for j in range(len(fm)):
                if fm.left_idem[j] != A.target[a]:
                    continue
                if value(za, j) != value(i, fm.left_act(a, j)):
                    raise ArithmeticError(f"f is not balanced at {e.gens[i]}, {A.gens[a]}, {fm.gens[j]}")


def blocked_chi(n: int, idems, gradings, sign: int = 1) -> LaurentMatrix:
    return _chi_matrix(n, ((s, t, (m + (0 if sign > 0 else 1), a)) for (s, t), (m, a) in zip(idems, gradings)))


def triangle_check(p: Sequence[int]) -> dict:
    """chi(E (x) F) + chi(C(f)) against chi(A), per idempotent block, and the cone basis
    count against the diagram description."""
    p = tuple(p)
    n = len(p)
    tri = ef_triangle(p)
    A = build_algebra(p)
    a_idems = list(zip(A.source, A.target))
    cone_idems = tri.ef_idems + a_idems
    chi_ef = blocked_chi(n, tri.ef_idems, tri.ef.gradings)
    chi_cone = blocked_chi(n, cone_idems, tri.cone.gradings)
    chi_a = blocked_chi(n, a_idems, A.grading)
    model = _cone_model_counts(n)
    counts: dict = defaultdict(int)
    for idem in cone_idems:
        counts[idem] += 1
    return {
        "chi_identity": chi_ef + chi_cone == chi_a,
        "basis_matches": dict(counts) == model,
        "ef_size": len(tri.ef),
        "cone_size": len(tri.cone),
    }


def _cone_model_counts(n: int) -> dict:
    """Counts per idempotent pair of partial bijections of {-1} u [n] with -1 in both
    domain and image."""
    out: dict = defaultdict(int)
    pts = [NEG, *range(n + 1)]
    for k in range(1, n + 3):
        for rest in combinations(range(n + 1), k - 1):
            for tgt in permutations(pts, k):
                if NEG not in tgt:
                    continue
                src = (NEG, *rest)
                out[(frozenset(rest), frozenset(t for t in tgt if t != NEG))] += 1
    return dict(out)


def acyclic_squares(p: Sequence[int]) -> dict[str, dict]:
    """Homology of F (x) F and E (x) E."""
    return {side * 2: homology(tensor(p, side, side)[0]) for side in ("F", "E")}


def cancellation_matching(p: Sequence[int]) -> bool:
    """On F (x) F, resolving the crossing between the two strands that start at -1
    matches the basis elements where they cross with those where they do not."""
    ff, _ = tensor(p, "F", "F")
    f = build_F(tuple(p))
    where = {lab: k for k, lab in enumerate(ff.labels)}
    crossed, uncrossed = [], set()
    for k, (i, j) in enumerate(ff.labels):
        mid = dict(f.gens[i])[NEG]
        x2 = dict(f.gens[j])
        if x2[mid] < x2[NEG]:
            crossed.append(k)
        else:
            uncrossed.add(k)
    hit = set()
    for k in crossed:
        i, j = ff.labels[k]
        mid = dict(f.gens[i])[NEG]
        x2 = dict(f.gens[j])
        y2 = strand.pb((a, x2[NEG] if a == mid else x2[mid] if a == NEG else b) for a, b in f.gens[j])
        t = where.get((i, f.index.get(y2)))
        if t is None or t not in uncrossed or t in hit or not ff.d[k] >> t & 1:
            return False
        hit.add(t)
    return hit == uncrossed


def projective_check(p: Sequence[int]) -> dict:
    """e_t F is acyclic when 0 in t and matches e_{t u {0}} A otherwise."""
    p = tuple(p)
    f = build_F(p)
    A = build_algebra(p)
    alg = algebra_complex(p)
    out = {"acyclic": True, "isomorphic": True}
    for t in primitive_order(len(p)):
        c = f.complex(left=t)
        if not len(c):
            continue
        if 0 in t:
            out["acyclic"] &= not homology(c)
        else:
            u = t | {0}
            keep = [i for i in range(len(A)) if A.source[i] == u]
            pos = {i: k for k, i in enumerate(keep)}
            sub = BigradedComplex([alg.gradings[i] for i in keep],
                                  [sum(1 << pos[j] for j in bits(alg.d[i])) for i in keep])
            out["isomorphic"] &= c.dims() == sub.dims() and homology(c) == homology(sub)
    return out


def filtration_check(p: Sequence[int]) -> bool:
    """Graded dims of F e_t equal the sum of A e_{t - t_i} shifted by the y generators."""
    p = tuple(p)
    f = build_F(p)
    A = build_algebra(p)
    for t in primitive_order(len(p)):
        lhs: dict = defaultdict(int)
        for i in range(len(f)):
            if f.right_idem[i] == t:
                lhs[f.gradings[i]] += 1
        rhs: dict = defaultdict(int)
        for ti in t:
            s = t - {ti}
            y = f.index[strand.pb([(NEG, ti), *((a, a) for a in s)])]
            for a in A.ending_at(s):
                rhs[_add(A.grading[a], f.gradings[y])] += 1
        if dict(lhs) != dict(rhs):
            return False
    return True


def commutes_with(k: LaurentMatrix, p_in: Sequence[int], p_out: Sequence[int], side: str = "E") -> bool:
    """[X(P_in)] K == K [X(P_out)] for a matrix K from K_0(A(P_out)) to K_0(A(P_in))."""
    return class_matrix(p_in, side) @ k == k @ class_matrix(p_out, side)
