"""Euler-characteristic matrices of bimodules on the primitive basis."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import primitive_order, subset_key
from .homcore import DABimodule
from .laurent import LaurentMatrix, LaurentPoly, NotDivisible, STAB, exact_divide
from .tanglelang import ElementaryTangle, TangleWord, size


@dataclass(frozen=True)
class PrimitiveBasis:
    """Subsets of [n] = {0..n} in reverse lexicographic order."""

    n: int

    @property
    def subsets(self) -> list[frozenset[int]]:
        return primitive_order(self.n)

    def __len__(self) -> int:
        return 1 << (self.n + 1)

    def index(self, s: Iterable[int]) -> int:
        return subset_key(s)

    def of_size(self, k: int) -> list[frozenset[int]]:
        return [s for s in self.subsets if len(s) == k]


def _chi_entries(m: DABimodule) -> dict[tuple[frozenset, frozenset], dict[int, int]]:
    out: dict = defaultdict(lambda: defaultdict(int))
    for i in range(len(m)):
        mm, a = m.gradings[i]
        out[(m.left_idem[i], m.right_idem[i])][a] += -1 if mm % 2 else 1
    return out


def k0_matrix(m: DABimodule, weight: int | None = None) -> LaurentMatrix:
    """Entry (s, t) is the graded Euler characteristic of e_s m e_t.

    Rows and columns follow the primitive bases of the left and right algebras.
    With a weight k the columns are the subsets of size k and the rows the
    subsets of size k + (n_left - n_right) / 2.
    """
    left, right = PrimitiveBasis(m.left.n), PrimitiveBasis(m.right.n)
    rows, cols = left.subsets, right.subsets
    if weight is not None:
        cols = right.of_size(weight)
        rows = left.of_size(weight + (m.left.n - m.right.n) // 2)
    chi = _chi_entries(m)
    data = [[LaurentPoly(chi.get((s, t), {})) for t in cols] for s in rows]
    if weight is not None:
        for (s, t), poly in chi.items():
            if len(t) == weight and s not in rows and LaurentPoly(poly):
                raise ValueError(f"weight {weight} block leaks into row {sorted(s)}")
    return LaurentMatrix(len(rows), len(cols), data)


def weight_blocks(mat: LaurentMatrix, n_left: int, n_right: int) -> list[LaurentMatrix]:
    """Split a full primitive-basis matrix into its weight blocks (k = 0..n_right+1)."""
    left, right = PrimitiveBasis(n_left), PrimitiveBasis(n_right)
    shift = (n_left - n_right) // 2
    out = []
    for k in range(n_right + 2):
        rows = [left.index(s) for s in left.of_size(k + shift)]
        cols = [right.index(t) for t in right.of_size(k)]
        out.append(mat.submatrix(rows, cols))
    return out


def normalize(mat: LaurentMatrix, word: TangleWord | ElementaryTangle | int) -> LaurentMatrix:
    """Divide every entry by (1 - q^-2)^size(word)."""
    if isinstance(word, int):
        k = word
    elif isinstance(word, ElementaryTangle):
        k = word.size
    else:
        k = size(word)
    try:
        return mat.exact_divide(k)
    except NotDivisible as exc:
        raise NotDivisible(f"normalisation by (1-q^-2)^{k} failed: {exc}") from None


def piece_matrix(t: ElementaryTangle) -> LaurentMatrix:
    from .ctmod import build_ct

    return k0_matrix(build_ct(t))


def word_matrix(word: TangleWord) -> LaurentMatrix:
    """Product of the per-piece matrices; by multiplicativity this is the matrix
    of the whole word's bimodule."""
    from .ctmod import ct_piece

    n = len(word.boundary0)
    out = LaurentMatrix.identity(1 << (n + 1))
    for t in word.pieces:
        out = out @ k0_matrix(ct_piece(t).bimodule())
    return out


def addstrand_transform(mat: LaurentMatrix, side: str = "above", orientation: int = 1) -> LaurentMatrix:
    """Matrix of the decomposition with one extra horizontal strand.

    ``side`` is "above" (new top height) or "below" (new height 0).  Both
    orientations give the same matrix; the argument is validated only.
    """
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    if side not in ("above", "below"):
        raise ValueError("side must be 'above' or 'below'")
    m = _log2(mat.rows) - 1
    n = _log2(mat.cols) - 1
    old_r, old_c = PrimitiveBasis(m), PrimitiveBasis(n)
    new_r, new_c = PrimitiveBasis(m + 1), PrimitiveBasis(n + 1)
    data = [[LaurentPoly() for _ in range(len(new_c))] for _ in range(len(new_r))]

    def lift(s: frozenset[int], top: int, extra: bool) -> frozenset[int]:
        if side == "above":
            return s | {top + 1} if extra else s
        shifted = frozenset(x + 1 for x in s)
        return shifted | {0} if extra else shifted

    for s in old_r.subsets:
        for t in old_c.subsets:
            v = mat[old_r.index(s), old_c.index(t)]
            if not v:
                continue
            for extra in (False, True):
                i = new_r.index(lift(s, m, extra))
                j = new_c.index(lift(t, n, extra))
                data[i][j] = v * STAB
    return LaurentMatrix(len(new_r), len(new_c), data)


def _log2(x: int) -> int:
    k = x.bit_length() - 1
    if x != 1 << k:
        raise ValueError(f"{x} is not a power of two")
    return k


def scalar_identity(n: int, c: LaurentPoly) -> LaurentMatrix:
    return LaurentMatrix.identity(1 << (n + 1)).scale(c)


def matrix_json(mat: LaurentMatrix, n_left: int, n_right: int) -> dict:
    left, right = PrimitiveBasis(n_left), PrimitiveBasis(n_right)
    out = mat.to_json()
    out["row_labels"] = [sorted(s) for s in left.subsets]
    out["col_labels"] = [sorted(t) for t in right.subsets]
    return out


def exponent_check(mat: LaurentMatrix, k: int) -> bool:
    """True when every entry is divisible by (1 - q^-2)^k."""
    try:
        for r in mat.tolist():
            for x in r:
                exact_divide(x, k)
    except NotDivisible:
        return False
    return True


def block_sum(blocks: Sequence[LaurentMatrix]) -> LaurentMatrix:
    return LaurentMatrix.direct_sum(list(blocks))
