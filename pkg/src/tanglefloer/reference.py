"""Reference values for the small elementary tangles and the E/F bimodules.

Every matrix here is given without its overall power of (1 - q^-2); the exponent
is stored alongside.
"""

from __future__ import annotations

from .laurent import LaurentMatrix, LaurentPoly

_Q = {"q": 1, "-q": -1, "1/q": 1, "-1/q": -1, "q2": 1, "-q2": -1, "1/q2": 1, "-1/q2": -1}
_E = {"q": 1, "-q": 1, "1/q": -1, "-1/q": -1, "q2": 2, "-q2": 2, "1/q2": -2, "-1/q2": -2}


def _entry(x: int | str) -> LaurentPoly:
    if isinstance(x, int):
        return LaurentPoly.const(x)
    return LaurentPoly.monomial(_E[x], _Q[x])


def _m(rows) -> LaurentMatrix:
    return LaurentMatrix.from_rows([[_entry(x) for x in r] for r in rows])


# e-crossings, keyed by the boundary label P of e_P, weight blocks k = 0..3;
# each carries (1 - q^-2)^2
CROSSING_BLOCKS: dict[tuple[int, int], list[LaurentMatrix]] = {
    (1, 1): [
        _m([["-q"]]),
        _m([["-q", 1, 0], [0, "1/q", 0], [0, 1, "-q"]]),
        _m([["1/q", 0, 0], [1, "-q", 1], [0, 0, "1/q"]]),
        _m([["1/q"]]),
    ],
    (-1, 1): [
        _m([[1]]),
        _m([[1, "q", 0], [0, 1, 0], [0, "-1/q", 1]]),
        _m([[1, 0, 0], ["q", 1, "-1/q"], [0, 0, 1]]),
        _m([[1]]),
    ],
    (1, -1): [
        _m([[1]]),
        _m([[1, "-1/q", 0], [0, 1, 0], [0, "q", 1]]),
        _m([[1, 0, 0], ["-1/q", 1, "q"], [0, 0, 1]]),
        _m([[1]]),
    ],
    (-1, -1): [
        _m([["1/q"]]),
        _m([["1/q", 1, 0], [0, "-q", 0], [0, 1, "1/q"]]),
        _m([["-q", 0, 0], [1, "1/q", 1], [0, 0, "-q"]]),
        _m([["-q"]]),
    ],
}
CROSSING_EXPONENT = 2

# cups keyed by the signs of the cup end, caps by the signs of the cap end;
# each carries (1 - q^-2)^1
CUP_BLOCKS: dict[tuple[int, int], dict[int, LaurentMatrix]] = {
    (-1, 1): {0: _m([[1], [0], [1]]), 1: _m([[0], [1], [0]])},
    (1, -1): {0: _m([[1], [0], [1]]), 1: _m([[0], [1], [0]])},
}
CAP_BLOCKS: dict[tuple[int, int], dict[int, LaurentMatrix]] = {
    (1, -1): {1: _m([[0, 1, 0]]), 2: _m([[1, 0, 1]])},
    (-1, 1): {1: _m([[0, 1, 0]]), 2: _m([[1, 0, 1]])},
}
CUP_CAP_EXPONENT = 1

# generators of e_{0,2} CT(e_{++}) e_{1,2}
CALIBRATION_GRADINGS = sorted([(-1, -2)] * 3 + [(-2, -4), (0, 0), (0, -2)])

# the F matrices for |P| <= 2, each carrying (1 - q^-2)^|P|
F_MATRICES: dict[tuple[int, ...], LaurentMatrix] = {
    (): _m([[0, 1], [0, 0]]),
    (1,): _m([[0, 1, "-1/q", 0], [0, 0, 0, "1/q"], [0, 0, 0, 1], [0, 0, 0, 0]]),
    (-1,): _m([[0, 1, "q", 0], [0, 0, 0, "-q"], [0, 0, 0, 1], [0, 0, 0, 0]]),
    (1, 1): _m([
        [0, 1, "-1/q", 0, "1/q2", 0, 0, 0],
        [0, 0, 0, "1/q", 0, "-1/q2", 0, 0],
        [0, 0, 0, 1, 0, 0, "-1/q2", 0],
        [0, 0, 0, 0, 0, 0, 0, "1/q2"],
        [0, 0, 0, 0, 0, 1, "-1/q", 0],
        [0, 0, 0, 0, 0, 0, 0, "1/q"],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ]),
    (1, -1): _m([
        [0, 1, "-1/q", 0, -1, 0, 0, 0],
        [0, 0, 0, "1/q", 0, 1, 0, 0],
        [0, 0, 0, 1, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, -1],
        [0, 0, 0, 0, 0, 1, "-1/q", 0],
        [0, 0, 0, 0, 0, 0, 0, "1/q"],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ]),
    (-1, 1): _m([
        [0, 1, "q", 0, -1, 0, 0, 0],
        [0, 0, 0, "-q", 0, 1, 0, 0],
        [0, 0, 0, 1, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, -1],
        [0, 0, 0, 0, 0, 1, "q", 0],
        [0, 0, 0, 0, 0, 0, 0, "-q"],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ]),
    (-1, -1): _m([
        [0, 1, "q", 0, "q2", 0, 0, 0],
        [0, 0, 0, "-q", 0, "-q2", 0, 0],
        [0, 0, 0, 1, 0, 0, "-q2", 0],
        [0, 0, 0, 0, 0, 0, 0, "q2"],
        [0, 0, 0, 0, 0, 1, "q", 0],
        [0, 0, 0, 0, 0, 0, 0, "-q"],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ]),
}

E_EMPTY = _m([[0, 0], [1, 0]])


def e_matrix(n: int) -> LaurentMatrix:
    """Block diagonal with 2^n copies of the |P| = 0 matrix."""
    return LaurentMatrix.direct_sum([E_EMPTY] * (1 << n))
