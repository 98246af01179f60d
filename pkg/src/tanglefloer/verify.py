"""End-to-end acceptance checks; each returns a JSON-ready record."""

from __future__ import annotations

import time
from itertools import product
from typing import Callable

from . import efmod, reference, uqgl11
from .algebra import build_algebra, check_adjoint, check_algebra
from .ctmod import bimodule_dims, build_ct, check_pieces, direct_two_piece_dims, hfk
from .homcore import BigradedComplex, box_tensor, cone, dims_euler, homology
from .k0 import addstrand_transform, k0_matrix, normalize, piece_matrix, weight_blocks, word_matrix
from .laurent import LaurentMatrix, LaurentPoly, STAB, equal_up_to_unit
from .tanglelang import (
    TREFOIL,
    TangleWord,
    cap,
    crossing,
    cup,
    cut_plat,
    elementary_tangles,
    parse,
)

TWO = list(product((1, -1), repeat=2))
TREFOIL_POLY = LaurentPoly({2: 1, 0: -1, -2: 1})


def e_crossing(p: tuple[int, int]):
    """e_P: the e-crossing whose outgoing boundary reads P."""
    return crossing("xe", 1, (p[1], p[0]))


def o_crossing(p: tuple[int, int]):
    return crossing("xo", 1, p)


def _record(name: str, fn: Callable[[], tuple[bool, dict]]) -> dict:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure with its message as the counterexample
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return {"name": name, "passed": bool(ok), "seconds": round(time.perf_counter() - t0, 2), "detail": detail}


# ---------------------------------------------------------------------------
# criteria


def crossing_tables() -> tuple[bool, dict]:
    bad = []
    for p, blocks in reference.CROSSING_BLOCKS.items():
        m = build_ct(e_crossing(p))
        for k, ref in enumerate(blocks):
            if k0_matrix(m, weight=k) != ref * STAB ** reference.CROSSING_EXPONENT:
                bad.append({"P": list(p), "weight": k})
    return not bad, {"mismatches": bad, "checked": 16}


def cup_cap_tables() -> tuple[bool, dict]:
    bad = []
    for p, blocks in reference.CUP_BLOCKS.items():
        m = build_ct(cup(1, p))
        for k, ref in blocks.items():
            if k0_matrix(m, weight=k) != ref * STAB:
                bad.append({"cup": list(p), "weight": k})
    for p, blocks in reference.CAP_BLOCKS.items():
        m = build_ct(cap(1, (), p))
        for k, ref in blocks.items():
            if k0_matrix(m, weight=k) != ref * STAB:
                bad.append({"cap": list(p), "weight": k})
    return not bad, {"mismatches": bad, "checked": 8}


def calibration() -> tuple[bool, dict]:
    m = build_ct(e_crossing((1, 1)))
    s, t = frozenset({0, 2}), frozenset({1, 2})
    gr = sorted(m.gradings[i] for i in range(len(m)) if m.left_idem[i] == s and m.right_idem[i] == t)
    chi = dims_euler({g: gr.count(g) for g in set(gr)})
    ok = gr == reference.CALIBRATION_GRADINGS and chi == STAB * STAB
    return ok, {"gradings": [list(g) for g in gr], "euler": str(chi)}


def structure_suite(max_strands: int = 4) -> tuple[bool, dict]:
    fails: dict = {}
    for n in range(4):
        for p in product((1, -1), repeat=n):
            A = build_algebra(p)
            r = check_algebra(A) or check_adjoint(A)
            if r:
                fails[f"algebra {p}"] = str(r)
    pieces = elementary_tangles(max_strands)
    res = check_pieces(pieces)
    for t, r in res.items():
        if r:
            fails[t.token() + " " + str(t.in_signs)] = str(r)
    shift = _shift_invariants()
    if shift:
        fails["grading shifts"] = shift
    return not fails, {"failures": fails, "pieces": len(pieces)}


def _shift_invariants() -> str | None:
    """The cone of the identity is acyclic and the cone of zero shifts the source up by one."""
    A = build_algebra((1, -1))
    c = BigradedComplex(list(A.grading), [sum(1 << j for j in A.differential(i)) for i in range(len(A))])
    ident = cone(c, c, [1 << i for i in range(len(c))])
    if homology(ident):
        return "cone of the identity is not acyclic"
    zero = cone(c, c, [0] * len(c))
    h = homology(c)
    want: dict = {}
    for (m, a), r in h.items():
        want[(m + 1, a)] = want.get((m + 1, a), 0) + r
        want[(m, a)] = want.get((m, a), 0) + r
    if homology(zero) != want:
        return "cone of zero is not the shifted direct sum"
    return None


def pairing_invariance() -> tuple[bool, dict]:
    bad = []
    four = STAB ** 4
    for p in TWO:
        e, o = piece_matrix(e_crossing(p)), piece_matrix(o_crossing(p))
        prod_ = e @ o
        for k, blk in enumerate(weight_blocks(prod_, 2, 2)):
            if blk != LaurentMatrix.identity(blk.rows) * four:
                bad.append({"pairing": list(p), "weight": k})
    pairs = 0
    two = elementary_tangles(2)
    for t1 in two:
        for t2 in two:
            if t1.out_signs != t2.in_signs or (t1.kind == "trivial" and t2.kind == "trivial"):
                continue
            pairs += 1
            if bimodule_dims(box_tensor(build_ct(t1), build_ct(t2))) != direct_two_piece_dims(t1, t2):
                bad.append({"box": [t1.token(), t2.token(), list(t1.in_signs)]})
    r3 = 0
    for p in product((1, -1), repeat=3):
        for lhs, rhs in _r3_words(p):
            r3 += 1
            if word_matrix(lhs) != word_matrix(rhs):
                bad.append({"R3": [str(lhs), str(rhs)]})
    return not bad, {"mismatches": bad, "box_pairs": pairs, "r3_pairs": r3}


def _r3_words(p: tuple[int, ...]) -> list[tuple[TangleWord, TangleWord]]:
    head = "sign:" + " ".join("+" if s > 0 else "-" for s in p) + "\n"
    out = []
    for a, b in (("xe", "xe"), ("xo", "xo")):
        out.append((parse(head + f"{a} 1 ; {a} 2 ; {a} 1"), parse(head + f"{b} 2 ; {b} 1 ; {b} 2")))
    out.append((parse(head + "xo 1 ; xe 2 ; xe 1"), parse(head + "xe 2 ; xe 1 ; xo 2")))
    return out


def table_tangles():
    return [e_crossing(p) for p in TWO] + [cup(1, p) for p in reference.CUP_BLOCKS] + [
        cap(1, (), p) for p in reference.CAP_BLOCKS
    ]


def quantum_comparison() -> tuple[bool, dict]:
    bad = []
    for t in table_tangles():
        word = TangleWord.from_pieces([t])
        if normalize(piece_matrix(t), t) != uqgl11.rt_evaluate(word):
            bad.append(t.token() + " " + str(t.in_signs))
    return not bad, {"mismatches": bad, "checked": len(table_tangles())}


def add_strand() -> tuple[bool, dict]:
    bad = []
    checked = 0
    for kind in ("xe", "xo"):
        for p in TWO:
            t = crossing(kind, 1, p)
            mat = piece_matrix(t)
            for s in (1, -1):
                for side in ("above", "below"):
                    big = crossing(kind, 1, p + (s,)) if side == "above" else crossing(kind, 2, (s,) + p)
                    checked += 1
                    if addstrand_transform(mat, side, s) != piece_matrix(big):
                        bad.append({"tangle": kind, "P": list(p), "side": side, "sign": s})
    return not bad, {"mismatches": bad, "checked": checked}


def quantum_identities() -> tuple[bool, dict]:
    bad = []
    z = LaurentPoly.monomial(1) - LaurentPoly.monomial(-1)
    for n in range(4):
        for p in product((1, -1), repeat=n):
            try:
                e, f = uqgl11.ef_matrices(p)
            except ArithmeticError:
                bad.append({"ef model": list(p)})
                continue
            ident = LaurentMatrix.identity(e.rows)
            if not (e @ e).is_zero() or not (f @ f).is_zero():
                bad.append({"nilpotent": list(p)})
            if e @ f + f @ e != ident:
                bad.append({"EF+FE": list(p)})
            for i in range(1, n):
                sp = uqgl11._swap(p, i)
                r, ri = uqgl11.r_matrices(p, i)
                if r @ ri != LaurentMatrix.identity(r.rows) or ri @ r != LaurentMatrix.identity(r.rows):
                    bad.append({"R inverse": list(p), "i": i})
                diff = r - uqgl11.r_matrices(sp, i)[1]
                if p[i - 1] == p[i]:
                    ok = diff == LaurentMatrix.identity(r.rows) * z
                else:
                    ok = diff == _antiparallel(p, i) * (-z)
                if not ok:
                    bad.append({"skein": list(p), "i": i})
    for p in product((1, -1), repeat=3):
        s1 = lambda q: uqgl11._swap(q, 1)  # noqa: E731
        s2 = lambda q: uqgl11._swap(q, 2)  # noqa: E731
        r1 = lambda q: uqgl11.r_matrices(q, 1)[0]  # noqa: E731
        r2 = lambda q: uqgl11.r_matrices(q, 2)[0]  # noqa: E731
        if r1(s2(s1(p))) @ r2(s1(p)) @ r1(p) != r2(s1(s2(p))) @ r1(s2(p)) @ r2(p):
            bad.append({"braid": list(p)})
    for w in ZIGZAGS:
        m = uqgl11.rt_evaluate(parse(w))
        if m != LaurentMatrix.identity(m.rows):
            bad.append({"zigzag": w})
    return not bad, {"mismatches": bad}


ZIGZAGS = [
    "sign:+\ncap 2 -+ ; cup 1",
    "sign:+\ncap 1 +- ; cup 2",
    "sign:-\ncap 2 +- ; cup 1",
    "sign:-\ncap 1 -+ ; cup 2",
]


def _antiparallel(p: tuple[int, ...], i: int) -> LaurentMatrix:
    """cup o cap at position i: V_p -> V_(swapped p) through the shorter sequence."""
    sp = uqgl11._swap(p, i)
    kcap = "rcap" if p[i - 1] > 0 else "lcap"
    kcup = "lcup" if sp[i - 1] > 0 else "rcup"
    return uqgl11.capcup_matrix(sp, i, kcup) @ uqgl11.capcup_matrix(p, i, kcap)


def ef_bimodules() -> tuple[bool, dict]:
    bad = []
    for n in range(3):
        for p in product((1, -1), repeat=n):
            stab = STAB ** n
            if efmod.displayed_matrix(p, "F") != reference.F_MATRICES[p] * stab:
                bad.append({"F matrix": list(p)})
            if efmod.displayed_matrix(p, "E") != reference.e_matrix(n) * stab:
                bad.append({"E matrix": list(p)})
            sq = efmod.acyclic_squares(p)
            if any(sq.values()):
                bad.append({"squares": list(p), "homology": {k: str(v) for k, v in sq.items()}})
            tri = efmod.triangle_check(p)
            if not (tri["chi_identity"] and tri["basis_matches"]):
                bad.append({"triangle": list(p), **tri})
    commuting = 0
    for t in elementary_tangles(2):
        k = piece_matrix(t)
        for side in ("E", "F"):
            commuting += 1
            if not efmod.commutes_with(k, t.in_signs, t.out_signs, side):
                bad.append({"commutation": t.token(), "signs": list(t.in_signs), "side": side})
    return not bad, {"mismatches": bad, "commutations": commuting}


def trefoil() -> tuple[bool, dict]:
    word = parse(TREFOIL)
    cut = cut_plat(word)
    alex = uqgl11.alexander(word)
    mat = normalize(word_matrix(cut), cut)
    scalar = mat[0, 0]
    scalar_ok = mat == LaurentMatrix.identity(mat.rows) * scalar
    h0, h1 = hfk(word, 0), hfk(word, 1)
    chi = dims_euler(h0["homology"])
    checks = {
        "alexander": equal_up_to_unit(alex, TREFOIL_POLY)[0],
        "k0 scalar": scalar_ok and equal_up_to_unit(scalar, TREFOIL_POLY)[0],
        "hfk euler": equal_up_to_unit(chi, TREFOIL_POLY)[0],
        "weights agree": h0["homology"] == h1["homology"],
    }
    return all(checks.values()), {
        "checks": checks,
        "alexander": str(alex),
        "k0": str(scalar),
        "hfk": [[m, a, r] for (m, a), r in sorted(h0["homology"].items())],
    }


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, dict]]]] = [
    (1, "crossing matrices", crossing_tables),
    (2, "cup and cap vectors", cup_cap_tables),
    (3, "calibration block", calibration),
    (4, "structure suite", structure_suite),
    (5, "pairing and invariance", pairing_invariance),
    (6, "quantum comparison", quantum_comparison),
    (7, "add-strand", add_strand),
    (8, "quantum identities", quantum_identities),
    (9, "E and F bimodules", ef_bimodules),
    (10, "trefoil", trefoil),
]


def quick_structure() -> tuple[bool, dict]:
    """Structure equations for every elementary tangle with at most two strands."""
    return structure_suite(2)


def run(level: str = "quick", only: list[int] | None = None) -> list[dict]:
    if level == "quick":
        plan = [c for c in CRITERIA if c[0] in (1, 2, 3)] + [(4, "structure suite, 2 strands", quick_structure)]
    elif level == "full":
        plan = CRITERIA
    else:
        raise ValueError("level must be 'quick' or 'full'")
    if only:
        plan = [c for c in plan if c[0] in only]
    out = []
    for num, name, fn in plan:
        rec = _record(name, fn)
        rec["criterion"] = num
        out.append(rec)
    return out
