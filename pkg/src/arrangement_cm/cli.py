"""Command-line front end.

Exit codes: 0 success, 2 invalid input (or a refused size cap), 3 an
invariant check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

from .chains import ComplexError
from .corpus import random_lattices
from .dcp import IdealNotClosed, TruncationOverflow
from .lattice import BUILTIN_HELP, LabeledLattice, LatticeError, Partition, builtin, load_lattice
from .ring import LocalCohomology, betti_cm, betti_gm, integral_betti_experimental, ring_structure

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVARIANT = 3


class InvariantViolation(RuntimeError):
    pass


# JSON schemas of the command outputs (draft 2020-12)
_BETTI_MAP = {"type": "object", "patternProperties": {"^-?[0-9]+$": {"type": "integer", "minimum": 0}},
              "additionalProperties": False}

SCHEMAS: Dict[str, dict] = {
    "lattice": {
        "type": "object",
        "required": ["lattice"],
        "properties": {
            "lattice": {
                "type": "object",
                "required": ["dims", "leq_pairs"],
                "properties": {
                    "dims": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "leq_pairs": {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                                             "minItems": 2, "maxItems": 2}},
                },
            }
        },
    },
    "betti": {
        "type": "object",
        "required": ["elements", "gm", "cm", "equal", "poincare"],
        "properties": {
            "elements": {"type": "integer"},
            "gm": _BETTI_MAP,
            "cm": _BETTI_MAP,
            "equal": {"type": "boolean"},
            "poincare": {"type": "array", "items": {"type": "integer"}},
            "by_rank": {"type": "object"},
            "integral": {"type": "object"},
        },
    },
    "ring": {
        "type": "object",
        "required": ["betti", "components", "products", "poincare", "image_ranks"],
        "properties": {
            "betti": _BETTI_MAP,
            "components": {"type": "array", "items": {
                "type": "object", "required": ["element", "q", "dim"],
                "properties": {"element": {"type": "integer"}, "q": {"type": "integer"},
                               "dim": {"type": "integer"}}}},
            "products": {"type": "array", "items": {
                "type": "object", "required": ["i", "j", "coords"],
                "properties": {"i": {"type": "integer"}, "j": {"type": "integer"},
                               "coords": {"type": "object", "additionalProperties": {"type": "string"}}}}},
            "poincare": {"type": "array", "items": {"type": "integer"}},
            "image_ranks": {"type": "array", "items": {
                "type": "object", "required": ["q1", "q2", "rank"]}},
        },
    },
    "verify": {
        "type": "object",
        "required": ["pass", "checks"],
        "properties": {
            "pass": {"type": "boolean"},
            "checks": {"type": "object", "additionalProperties": {
                "type": "object", "required": ["pass", "failures"],
                "properties": {"pass": {"type": "boolean"},
                               "failures": {"type": "array", "items": {"type": "string"}}}}},
        },
    },
    "dcp-check": {
        "type": "object",
        "required": ["pass", "degrees", "checks"],
        "properties": {
            "pass": {"type": "boolean"},
            "degrees": {"type": "array", "items": {
                "type": "object", "required": ["q", "M", "CM", "independent", "ok"]}},
            "checks": {"type": "object"},
        },
    },
    "present": {
        "type": "object",
        "required": ["generators", "betti_presentation", "betti_moebius", "betti_ring", "ok"],
    },
    "kequal": {
        "type": "object",
        "required": ["n", "k", "betti", "table", "checks"],
        "properties": {"table": {"type": "array", "items": {
            "type": "object", "required": ["dimU", "size", "p", "rank", "s", "n", "q", "dim"]}}},
    },
    "random-check": {
        "type": "object",
        "required": ["count", "seed", "pass", "failures"],
    },
}


# ---------------------------------------------------------------------------
# helpers


def _load(args) -> LabeledLattice:
    if args.input:
        return load_lattice(args.input)
    return builtin(args.builtin)


def _bmap(b: Dict[int, int]) -> Dict[str, int]:
    return {str(q): v for q, v in sorted(b.items())}


def _tsv(header: List[str], rows: List[List]) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(str(x) for x in r) for r in rows]
    return "\n".join(lines)


def _rank_split(L: LabeledLattice, local: LocalCohomology) -> Optional[Dict[int, Dict[int, int]]]:
    if not L.labels or not all(isinstance(x, Partition) for x in L.labels):
        return None
    out: Dict[int, Dict[int, int]] = {}
    for A in L.nonbottom():
        r = len(L.labels[A].nontrivial_blocks)
        for q, b in local.betti(A).items():
            out.setdefault(q, {})
            out[q][r] = out[q].get(r, 0) + b
    return {q: dict(sorted(v.items())) for q, v in sorted(out.items())}


def _check_map(results: Dict[str, List[str]], keep: int = 5) -> Dict[str, dict]:
    return {k: {"pass": not v, "failures": list(v[:keep])} for k, v in results.items()}


# ---------------------------------------------------------------------------
# commands; each returns (json object, tsv text)


def cmd_betti(args):
    L = _load(args)
    local = LocalCohomology(L)
    gm, cm = betti_gm(L), betti_cm(L, local)
    top = max(cm)
    obj = {
        "elements": L.n,
        "gm": _bmap(gm),
        "cm": _bmap(cm),
        "equal": gm == cm,
        "poincare": [cm.get(q, 0) for q in range(top + 1)],
    }
    rows = [[q, gm.get(q, 0), cm.get(q, 0)] for q in sorted(set(gm) | set(cm))]
    text = _tsv(["q", "gm", "cm"], rows)
    split = _rank_split(L, local)
    if split is not None:
        obj["by_rank"] = {str(q): {str(r): d for r, d in v.items()} for q, v in split.items()}
        text += "\n\n" + _tsv(["q", "rank", "dim"], [[q, r, d] for q, v in split.items() for r, d in v.items()])
    if args.integral:
        ib = integral_betti_experimental(L)
        obj["integral"] = {str(q): {"free": f, "torsion": list(t)} for q, (f, t) in ib.items()}
        text += "\n\n" + _tsv(["q", "free", "torsion"],
                              [[q, f, ",".join(map(str, t)) or "-"] for q, (f, t) in ib.items()])
    if gm != cm:
        raise InvariantViolation(("betti", obj, text))
    return obj, text


def cmd_ring(args):
    L = _load(args)
    R = ring_structure(L)
    obj = R.to_json()
    obj["poincare"] = R.poincare
    degs = [q for q in R.betti if q > 0]
    ranks = []
    for i, q1 in enumerate(degs):
        for q2 in degs[i:]:
            if (q1 + q2) in R.betti:
                ranks.append({"q1": q1, "q2": q2, "rank": R.image_rank(q1, q2)})
    obj["image_ranks"] = ranks
    text = _tsv(["q", "dim"], [[q, b] for q, b in R.betti.items()])
    text += "\n\n" + _tsv(["q1", "q2", "image_rank"], [[r["q1"], r["q2"], r["rank"]] for r in ranks])
    return obj, text


def cmd_verify(args):
    from .verify import passed, run_suite

    L = _load(args)
    res = run_suite(L, seed=args.seed, dcp_degree=args.dcp_degree)
    obj = {"pass": passed(res), "checks": _check_map(res)}
    text = _tsv(["check", "result", "first_failure"],
                [[k, "pass" if not v else "FAIL", v[0] if v else "-"] for k, v in res.items()])
    if not obj["pass"]:
        raise InvariantViolation(("verify", obj, text))
    return obj, text


def cmd_dcp_check(args):
    from .dcp import DCPModel, quasi_iso_check
    from .verify import dcp_suite, passed

    if args.max_degree < 2:
        raise LatticeError("--max-degree must be at least 2")
    L = _load(args)
    model = DCPModel(L, args.max_degree)
    qi = quasi_iso_check(L, args.max_degree, model)
    res = dcp_suite(L, args.max_degree, model, qi)
    degrees = [dict(q=q, **r) for q, r in sorted(qi.items())]
    obj = {"pass": passed(res), "degrees": degrees, "checks": _check_map(res)}
    text = _tsv(["q", "M", "CM", "independent", "ok"],
                [[d["q"], d["M"], d["CM"], d["independent"], d["ok"]] for d in degrees])
    text += "\n\n" + _tsv(["check", "result"], [[k, "pass" if not v else "FAIL"] for k, v in res.items()])
    if not obj["pass"]:
        raise InvariantViolation(("dcp-check", obj, text))
    return obj, text


def cmd_present(args):
    from .presentations import geometric_presentation

    L = _load(args)
    rep = geometric_presentation(L)
    obj = rep.to_json()
    qs = sorted(set(rep.betti_presentation) | set(rep.betti_moebius) | set(rep.betti_ring))
    text = _tsv(["q", "presentation", "moebius", "ring"],
                [[q, rep.betti_presentation.get(q, 0), rep.betti_moebius.get(q, 0), rep.betti_ring.get(q, 0)]
                 for q in qs])
    if not rep.ok:
        raise InvariantViolation(("present", obj, text))
    return obj, text


def cmd_kequal(args):
    from .presentations import kequal_analysis

    if args.k < 2 or args.n < args.k:
        raise LatticeError("need 2 <= k <= n")
    ells = (args.ell,) if args.ell is not None else (1, 2)
    rep = kequal_analysis(args.n, args.k, ells=ells, full=args.full_report, max_atoms=args.max_atoms)
    obj = rep.to_json()
    if not args.full_report:
        obj.pop("details", None)
    cols = ["dimU", "size", "p", "rank", "s", "n", "q", "dim"]
    text = _tsv(cols, [[row[c] for c in cols] for row in rep.table])
    text += "\n\n" + _tsv(["check", "result"], [[k, "pass" if v else "FAIL"] for k, v in rep.checks.items()])
    if not rep.ok:
        raise InvariantViolation(("kequal", obj, text))
    return obj, text


def cmd_lattice(args):
    L = _load(args)
    obj = L.to_json()
    rows = []
    for a in range(L.n):
        lab = L.labels[a] if L.labels is not None else ""
        if isinstance(lab, tuple):
            lab = ""
        rows.append([a, L.dim(a), lab, ",".join(str(b) for x, b in L.covers() if x == a) or "-"])
    return obj, _tsv(["element", "dim", "label", "covers"], rows)


def cmd_random_check(args):
    fails = []
    for i, L in enumerate(random_lattices(args.count, seed=args.seed, max_elements=args.max_elements)):
        gm, cm = betti_gm(L), betti_cm(L)
        if gm != cm:
            fails.append(f"lattice {i}: {L.to_json()}")
    obj = {"count": args.count, "seed": args.seed, "pass": not fails, "failures": fails}
    text = _tsv(["count", "seed", "failures"], [[args.count, args.seed, len(fails)]])
    if fails:
        raise InvariantViolation(("random-check", obj, text))
    return obj, text


# ---------------------------------------------------------------------------
# parser


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="lattice or arrangement JSON file")
    src.add_argument("--builtin", metavar="NAME", help=f"one of {BUILTIN_HELP}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled or randomized checks")
    common.add_argument("--max-atoms", type=int, default=8, help="cap on independent atom set size")

    ap = argparse.ArgumentParser(prog="arrangement-cm",
                                 description="Cohomology rings of subspace arrangement complements.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("betti", parents=[common], help="Betti numbers by two independent methods")
    _add_input(p)
    p.add_argument("--integral", action="store_true", help="experimental integral report")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("ring", parents=[common], help="cohomology ring structure constants")
    _add_input(p)
    p.set_defaults(func=cmd_ring)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    _add_input(p)
    p.add_argument("--dcp-degree", type=int, default=None, help="also check the truncated full model")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dcp-check", parents=[common], help="truncated full model against the small model")
    _add_input(p)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(func=cmd_dcp_check)

    p = sub.add_parser("present", parents=[common], help="ring presentations")
    p.add_argument("kind", choices=("geometric",))
    _add_input(p)
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("kequal", parents=[common], help="k-equal lattice analysis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--full-report", action="store_true")
    p.set_defaults(func=cmd_kequal)

    p = sub.add_parser("lattice", parents=[common], help="print the lattice")
    _add_input(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("random-check", parents=[common], help="GM against CM on random lattices")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-elements", type=int, default=10)
    p.set_defaults(func=cmd_random_check)
    return ap


def _emit(obj, text, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, indent=2) + "\n")
    else:
        out.write(text + "\n")


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        obj, text = args.func(args)
    except InvariantViolation as e:
        _, obj, text = e.args[0]
        _emit(obj, text, args.format, out)
        print(f"error: invariant violation in {args.command}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ComplexError, IdealNotClosed) as e:
        print(f"error: invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (LatticeError, ValueError, OSError, TruncationOverflow) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    _emit(obj, text, args.format, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
