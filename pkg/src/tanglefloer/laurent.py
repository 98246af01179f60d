"""Exact arithmetic in Z[q, q^-1]: scalars and dense matrices."""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

Scalar = Union["LaurentPoly", int]


class NotDivisible(ArithmeticError):
    """Raised when an exact division in Z[q^{+-1}] leaves a remainder."""


class LaurentPoly:
    """An element of Z[q^{+-1}], stored as a sparse exponent -> coefficient map."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None) -> None:
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    clean[int(e)] = int(c)
        self._terms: dict[int, int] = dict(sorted(clean.items()))
        self._hash: int | None = None

    # construction -------------------------------------------------------

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def coerce(cls, x: Scalar) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")

    @classmethod
    def qint(cls, n: int) -> "LaurentPoly":
        """Quantum integer [n]_q = (q^n - q^-n)/(q - q^-1)."""
        if n == 0:
            return cls()
        sign = 1 if n > 0 else -1
        m = abs(n)
        return cls({m - 1 - 2 * j: sign for j in range(m)})

    # inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def min_exp(self) -> int:
        return next(iter(self._terms))

    def max_exp(self) -> int:
        return next(reversed(self._terms))

    def coeff(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def evaluate(self, q: int | float | complex) -> int | float | complex:
        return sum(c * q**e for e, c in self._terms.items())

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and abs(next(iter(self._terms.values()))) == 1

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: Scalar) -> "LaurentPoly":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Scalar) -> "LaurentPoly":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "LaurentPoly":
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other: Scalar) -> "LaurentPoly":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_unit():
                raise NotDivisible(f"{self} is not a unit")
            (e, c), = self._terms.items()
            return LaurentPoly({e * n: c ** (-n)})
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    def bar(self) -> "LaurentPoly":
        """The involution q -> q^-1."""
        return LaurentPoly({-e: c for e, c in self._terms.items()})

    def divexact(self, other: Scalar) -> "LaurentPoly":
        """Exact quotient self / other in Z[q^{+-1}]; raises NotDivisible otherwise."""
        other = LaurentPoly.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return LaurentPoly()
        lo_a, lo_b = self.min_exp(), other.min_exp()
        a = [self.coeff(lo_a + i) for i in range(self.max_exp() - lo_a + 1)]
        b = [other.coeff(lo_b + i) for i in range(other.max_exp() - lo_b + 1)]
        if len(a) < len(b):
            raise NotDivisible(f"{self} is not divisible by {other}")
        quot = [0] * (len(a) - len(b) + 1)
        lead = b[-1]
        for i in range(len(quot) - 1, -1, -1):
            top = a[i + len(b) - 1]
            if top % lead:
                raise NotDivisible(f"{self} is not divisible by {other}")
            c = top // lead
            quot[i] = c
            if c:
                for j, bj in enumerate(b):
                    a[i + j] -= c * bj
        if any(a):
            raise NotDivisible(f"{self} is not divisible by {other}")
        return LaurentPoly({lo_a - lo_b + i: c for i, c in enumerate(quot)})

    # comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # text and json ------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            parts.append(str(c) if e == 0 else f"{c}*q^{e}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"

    def to_json(self) -> dict:
        return {"poly": [[e, c] for e, c in self._terms.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentPoly":
        return cls({int(e): int(c) for e, c in data["poly"]})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Inverse of ``str``; also accepts ``q``, ``-q^2`` and bare integers."""
        text = text.strip()
        if text == "0":
            return cls()
        out: dict[int, int] = {}
        for raw in text.split(" + "):
            term = raw.strip()
            if "q" not in term:
                out[0] = out.get(0, 0) + int(term)
                continue
            coeff_part, _, exp_part = term.partition("q")
            coeff_part = coeff_part.rstrip("*")
            coeff = {"": 1, "-": -1}.get(coeff_part)
            if coeff is None:
                coeff = int(coeff_part)
            exp = int(exp_part[1:]) if exp_part.startswith("^") else 1
            out[exp] = out.get(exp, 0) + coeff
        return cls(out)


def _coerce_or_none(x: object) -> LaurentPoly | None:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x)
    return None


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
q = LaurentPoly.monomial(1)
qinv = LaurentPoly.monomial(-1)
STAB = ONE - LaurentPoly.monomial(-2)  # 1 - q^-2


def lp_arith(a: Scalar, b: Scalar, op: str) -> LaurentPoly:
    a, b = LaurentPoly.coerce(a), LaurentPoly.coerce(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def exact_divide(a: Scalar, k: int) -> LaurentPoly:
    """a / (1 - q^-2)^k, raising NotDivisible if the quotient is not a Laurent polynomial."""
    if k < 0:
        raise ValueError("k must be non-negative")
    result = LaurentPoly.coerce(a)
    for _ in range(k):
        try:
            result = result.divexact(STAB)
        except NotDivisible:
            raise NotDivisible(f"{a} is not divisible by (1-q^-2)^{k}") from None
    return result


def equal_up_to_unit(a: Scalar, b: Scalar) -> tuple[bool, tuple[int, int] | None]:
    """Decide whether a = sign * q^k * b; the witness is (sign, k)."""
    a, b = LaurentPoly.coerce(a), LaurentPoly.coerce(b)
    if a.is_zero() or b.is_zero():
        return (a.is_zero() and b.is_zero(), (1, 0) if a.is_zero() and b.is_zero() else None)
    k = a.min_exp() - b.min_exp()
    for sign in (1, -1):
        if a == b.shift(k) * sign:
            return True, (sign, k)
    return False, None


def symmetrize(p: Scalar) -> LaurentPoly:
    """Representative of p up to units, centred at exponent 0 with positive top coefficient."""
    p = LaurentPoly.coerce(p)
    if p.is_zero():
        return p
    span = p.min_exp() + p.max_exp()
    if span % 2:
        # odd span cannot be centred in Z[q^{+-1}]; move the lowest exponent to match
        p = p.shift(-(span - 1) // 2)
    else:
        p = p.shift(-span // 2)
    return -p if p.coeff(p.max_exp()) < 0 else p


class LaurentMatrix:
    """Dense immutable matrix over Z[q^{+-1}]."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable[Scalar]] | None = None) -> None:
        if rows < 0 or cols < 0:
            raise ValueError("dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        if data is None:
            self._data = tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows))
        else:
            grid = tuple(tuple(LaurentPoly.coerce(x) for x in row) for row in data)
            if len(grid) != rows or any(len(r) != cols for r in grid):
                raise ValueError(f"data does not match shape {rows}x{cols}")
            self._data = grid

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[Scalar]]) -> "LaurentMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def identity(cls, n: int) -> "LaurentMatrix":
        return cls(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "LaurentMatrix":
        return cls(rows, cols)

    @classmethod
    def from_function(cls, rows: int, cols: int, fn: Callable[[int, int], Scalar]) -> "LaurentMatrix":
        return cls(rows, cols, [[fn(i, j) for j in range(cols)] for i in range(rows)])

    @classmethod
    def block(cls, blocks: Sequence[Sequence["LaurentMatrix"]]) -> "LaurentMatrix":
        out = []
        for brow in blocks:
            height = brow[0].rows
            for i in range(height):
                line: list[LaurentPoly] = []
                for b in brow:
                    if b.rows != height:
                        raise ValueError("block heights disagree")
                    line.extend(b._data[i])
                out.append(line)
        return cls.from_rows(out)

    @classmethod
    def direct_sum(cls, mats: Sequence["LaurentMatrix"]) -> "LaurentMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        data = [[ZERO] * cols for _ in range(rows)]
        r0 = c0 = 0
        for m in mats:
            for i in range(m.rows):
                for j in range(m.cols):
                    data[r0 + i][c0 + j] = m._data[i][j]
            r0 += m.rows
            c0 += m.cols
        return cls(rows, cols, data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx: tuple[int, int]) -> LaurentPoly:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index {idx} out of range for {self.rows}x{self.cols}")
        return self._data[i][j]

    def row(self, i: int) -> tuple[LaurentPoly, ...]:
        return self._data[i]

    def tolist(self) -> list[list[LaurentPoly]]:
        return [list(r) for r in self._data]

    def map(self, fn: Callable[[LaurentPoly], Scalar]) -> "LaurentMatrix":
        return LaurentMatrix(self.rows, self.cols, [[fn(x) for x in r] for r in self._data])

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(self.cols, self.rows, [[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    @property
    def T(self) -> "LaurentMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "LaurentMatrix":
        return LaurentMatrix(len(rows), len(cols), [[self._data[i][j] for j in cols] for i in rows])

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._check_same(other)
        return LaurentMatrix(self.rows, self.cols, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)])

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._check_same(other)
        return LaurentMatrix(self.rows, self.cols, [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)])

    def __neg__(self) -> "LaurentMatrix":
        return self.map(lambda x: -x)

    def scale(self, c: Scalar) -> "LaurentMatrix":
        c = LaurentPoly.coerce(c)
        return self.map(lambda x: c * x)

    def __mul__(self, c: Scalar) -> "LaurentMatrix":
        if isinstance(c, LaurentMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.cols != other.rows:
            raise ValueError(f"inner dimensions disagree: {self.shape} @ {other.shape}")
        out = []
        ocols = [[other._data[k][j] for k in range(other.rows)] for j in range(other.cols)]
        for r in self._data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            line = []
            for col in ocols:
                acc = ZERO
                for k, a in nz:
                    b = col[k]
                    if b:
                        acc = acc + a * b
                line.append(acc)
            out.append(line)
        return LaurentMatrix(self.rows, other.cols, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def is_zero(self) -> bool:
        return all(not x for r in self._data for x in r)

    def exact_divide(self, k: int) -> "LaurentMatrix":
        return self.map(lambda x: exact_divide(x, k))

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._data)

    def __repr__(self) -> str:
        return f"LaurentMatrix({self.rows}x{self.cols})"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[x.to_json()["poly"] for x in r] for r in self._data],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentMatrix":
        return cls(
            data["rows"],
            data["cols"],
            [[LaurentPoly({e: c for e, c in x}) for x in r] for r in data["entries"]],
        )

    def _check_same(self, other: "LaurentMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")


def mat(rows: Sequence[Sequence[Scalar]]) -> LaurentMatrix:
    return LaurentMatrix.from_rows(rows)


def det(m: LaurentMatrix) -> LaurentPoly:
    """Determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return ONE
    a = m.tolist()
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).divexact(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def inverse_unimodular(m: LaurentMatrix) -> LaurentMatrix:
    """Inverse of a matrix whose determinant is a unit, via the adjugate."""
    n = m.rows
    d = det(m)
    if not d.is_unit():
        raise NotDivisible(f"determinant {d} is not a unit")
    dinv = d ** -1
    idx = list(range(n))
    data = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = m.submatrix([r for r in idx if r != j], [c for c in idx if c != i])
            cof = det(minor) * (1 if (i + j) % 2 == 0 else -1)
            data[i][j] = cof * dinv
    return LaurentMatrix(n, n, data)
