"""Command-line entry point; every command prints one JSON document."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import efmod, uqgl11, verify
from .algebra import build_algebra, check_algebra
from .ctmod import WordTooLarge, bimodule_dims, build_ct_word, ct_piece, graded_euler, hfk
from .homcore import check_structure
from .k0 import matrix_json, normalize, weight_blocks, word_matrix
from .laurent import LaurentMatrix, LaurentPoly
from .tanglelang import HOPF, TREFOIL, UNKNOT, TangleError, TangleWord, parse, signs, size

NAMED = {"trefoil": TREFOIL, "hopf": HOPF, "unknot": UNKNOT}


class UsageError(ValueError):
    pass


def read_word(arg: str, max_strands: int) -> TangleWord:
    """A named word, a file path, or literal text with ``|`` in place of newlines."""
    if arg in NAMED:
        text = NAMED[arg]
    elif Path(arg).is_file():
        text = Path(arg).read_text()
    else:
        text = arg.replace("|", "\n")
    word = parse(text)
    widest = max(word.boundary_sizes())
    if widest > max_strands:
        raise UsageError(f"word has {widest} strands, more than --max-strands {max_strands}")
    return word


def _poly(p: LaurentPoly) -> dict:
    return {"text": str(p), **p.to_json()}


def _matrix(m: LaurentMatrix) -> dict:
    return {**m.to_json(), "text": [[str(x) for x in r] for r in m.tolist()]}


def _dims(dims: dict) -> list:
    return [[m, a, r] for (m, a), r in sorted(dims.items()) if r]


def cmd_algebra(args) -> tuple[dict, bool]:
    A = build_algebra(signs(args.signs))
    if A.n > args.max_strands:
        raise UsageError("sign sequence longer than --max-strands")
    failure = check_algebra(A, associativity=A.n <= 3)
    out = A.to_json(tables=args.tables)
    out["structure"] = failure or "ok"
    return out, failure is None


def cmd_ct(args) -> tuple[dict, bool]:
    word = read_word(args.word, args.max_strands)
    m = build_ct_word(word, args.max_generators)
    if args.weight is not None:
        m = m.restrict(i for i in range(len(m)) if len(m.right_idem[i]) == args.weight)
    out: dict[str, Any] = {
        "word": str(word),
        "generators": len(m),
        "dims": [
            [sorted(s), sorted(t), mm, a, r] for (s, t, mm, a), r in sorted(
                bimodule_dims(m).items(), key=lambda kv: (sorted(kv[0][0]), sorted(kv[0][1]), kv[0][2:])
            )
        ],
    }
    ok = True
    if args.check:
        if len(word.pieces) == 1:
            failure = check_structure(ct_piece(word.pieces[0]).bimodule())
        else:
            failure = check_structure(m)
        out["structure"] = failure or "ok"
        ok = failure is None
    return out, ok


def cmd_k0(args) -> tuple[dict, bool]:
    word = read_word(args.word, args.max_strands)
    n_left, n_right = len(word.boundary0), len(word.boundary1)
    raw = word_matrix(word)
    if args.weight is not None:
        blocks = weight_blocks(raw, n_left, n_right)
        if not 0 <= args.weight < len(blocks):
            raise UsageError(f"weight must lie in 0..{len(blocks) - 1}")
        raw = blocks[args.weight]
    out = {"word": str(word), "size": size(word), "raw": _matrix(raw)}
    if args.weight is None:
        out["labels"] = {k: v for k, v in matrix_json(raw, n_left, n_right).items() if k.endswith("labels")}
    if args.normalize:
        out["normalized"] = _matrix(normalize(raw, word))
    return out, True


def cmd_rt(args) -> tuple[dict, bool]:
    word = read_word(args.word, args.max_strands)
    return {"word": str(word), "matrix": _matrix(uqgl11.rt_evaluate(word))}, True


def cmd_alexander(args) -> tuple[dict, bool]:
    word = read_word(args.word, args.max_strands)
    return {"word": str(word), "alexander": _poly(uqgl11.alexander(word))}, True


def cmd_hfk(args) -> tuple[dict, bool]:
    word = read_word(args.word, args.max_strands)
    if not word.closed:
        raise UsageError("hfk needs a closed word")
    res = hfk(word, args.weight)
    return {
        "word": str(word),
        "weight": args.weight,
        "homology": _dims(res["homology"]),
        "euler": _poly(graded_euler(res["homology"])),
        "components": res["components"],
        "stabilisations": res["exponent"],
        "symmetric": res["symmetric"],
    }, res["symmetric"]


def cmd_ef(args) -> tuple[dict, bool]:
    p = signs(args.signs)
    if len(p) > args.max_strands:
        raise UsageError("sign sequence longer than --max-strands")
    bim = efmod.build(p, args.side)
    cls = efmod.class_matrix(p, args.side)
    failure = bim.check() if len(p) <= 3 else None
    e, f = uqgl11.ef_matrices(p)
    agrees = cls == (e if args.side == "E" else f)
    out = {
        "signs": list(p),
        "side": args.side,
        "generators": len(bim),
        "raw": _matrix(cls),
        "normalized": _matrix(efmod.displayed_matrix(p, args.side)),
        "euler": _matrix(bim.chi()),
        "matches_quantum": agrees,
        "structure": failure or "ok",
    }
    return out, agrees and failure is None


def cmd_verify(args) -> tuple[dict, bool]:
    results = verify.run(args.level, args.only)
    return {"level": args.level, "results": results}, all(r["passed"] for r in results)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-strands", type=int, default=6, help="largest boundary allowed (default 6)")
    common.add_argument("--jobs", type=int, default=1, help="worker count; results never depend on it")
    common.add_argument("--format", choices=("json", "text"), default="json")

    ap = argparse.ArgumentParser(prog="tanglefloer", description=__doc__, parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", parents=[common], help="the strand algebra of a sign sequence")
    p.add_argument("signs", help='e.g. "+-"; use "" for the empty sequence')
    p.add_argument("--tables", action="store_true", help="include generators, differential and products")
    p.set_defaults(fn=cmd_algebra)

    word_help = "word text (| for newline), a file, or one of: " + ", ".join(NAMED)
    p = sub.add_parser("ct", parents=[common], help="generators of the tangle bimodule")
    p.add_argument("word", help=word_help)
    p.add_argument("--weight", type=int)
    p.add_argument("--check", action="store_true", help="verify the structure equations")
    p.add_argument("--max-generators", type=int, default=200_000, help="refuse larger intermediate bimodules")
    p.set_defaults(fn=cmd_ct)

    p = sub.add_parser("k0", parents=[common], help="Euler characteristic matrix")
    p.add_argument("word", help=word_help)
    p.add_argument("--weight", type=int)
    p.add_argument("--normalize", action="store_true", help="divide by (1-q^-2)^size")
    p.set_defaults(fn=cmd_k0)

    p = sub.add_parser("rt", parents=[common], help="quantum invariant matrix")
    p.add_argument("word", help=word_help)
    p.set_defaults(fn=cmd_rt)

    p = sub.add_parser("alexander", parents=[common], help="Alexander polynomial of a closed word")
    p.add_argument("word", help=word_help)
    p.set_defaults(fn=cmd_alexander)

    p = sub.add_parser("hfk", parents=[common], help="knot Floer homology of a closed word")
    p.add_argument("word", help=word_help)
    p.add_argument("--weight", type=int, default=0, choices=(0, 1))
    p.set_defaults(fn=cmd_hfk)

    p = sub.add_parser("ef", parents=[common], help="class matrices of the E and F bimodules")
    p.add_argument("signs")
    p.add_argument("--side", choices=("E", "F"), default="F")
    p.set_defaults(fn=cmd_ef)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("level", choices=("quick", "full"))
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    p.set_defaults(fn=cmd_verify)
    return ap


def _text(obj: Any, indent: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{indent}{k}:")
                lines.extend(_text(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict):
                lines.extend(_text(v, indent + "- "))
            else:
                lines.append(f"{indent}{json.dumps(v)}")
    else:
        lines.append(f"{indent}{obj}")
    return lines


def _flat(v: Any) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_strands < 1 or args.jobs < 1:
        print(json.dumps({"error": "--max-strands and --jobs must be positive"}))
        return 2
    try:
        out, ok = args.fn(args)
    except (UsageError, TangleError, WordTooLarge) as exc:
        print(json.dumps({"error": str(exc)}))
        return 2
    except ArithmeticError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}))
        return 1
    out["ok"] = ok
    if args.format == "json":
        print(json.dumps(out, default=str))
    else:
        print("\n".join(_text(json.loads(json.dumps(out, default=str)))))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
