"""Command line entry point: ``orbit-atlas classify | scan-simplex | verify``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import classify as _classify
from . import oracle, topology
from .lie import GroupSpec, Variant
from .states import CCState, PureSeparableSpec, StateError, format_scalar, parse_state

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_AMBIGUOUS = 0, 1, 2, 3
SIMPLEX_COLUMNS = ("p11", "p12", "p21", "p22", "dim", "rank", "degeneracy", "euler",
                   "symplectic", "kahler", "magic")


def default_seed() -> int:
    raw = os.environ.get("ORBIT_ATLAS_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise StateError(f"ORBIT_ATLAS_SEED must be an integer, got {raw!r}") from None


def _group(state, name: str | None) -> GroupSpec | None:
    if name is None:
        return None
    return GroupSpec(Variant(name), state.n1, state.n2)


def _write_csv(rows, header, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _csv_value(v):
    if isinstance(v, bool):
        return int(v)
    if v is None:
        return ""
    return v


# --- classify ------------------------------------------------------------------

def classification_document(state, group_name=None, tol=_classify.DEFAULT_TOL) -> dict:
    if isinstance(state, PureSeparableSpec):
        return {"kind": "pure_sep", "dims": list(state.dims),
                "euler": topology.euler_pure_separable(state),
                "stabilizer_weyl_order": topology.pure_separable_stabilizer_weyl(state)}
    cls = _classify.classify_state(state, _group(state, group_name), tol)
    return {
        "kind": "cc" if isinstance(state, CCState) else "cq",
        "group": cls.group.variant.value,
        "n1": state.n1,
        "n2": state.n2,
        "source": cls.source,
        "report": cls.report.as_dict(),
        "partitions": cls.partitions.sizes() if cls.partitions is not None else None,
        "stabilizer": cls.stabilizer.as_dict() if cls.stabilizer is not None else None,
        "euler": cls.report.euler,
        "notes": list(cls.notes),
    }


def cmd_classify(args, out) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            state = parse_state(fh.read())
        doc = classification_document(state, args.group, args.tolerance)
    except (OSError, StateError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "csv":
        flat = {k: v for k, v in doc.items() if not isinstance(v, (dict, list))}
        flat.update({k: v for k, v in doc.get("report", {}).items() if k != "warnings"})
        _write_csv([[_csv_value(v) for v in flat.values()]], list(flat), out)
    else:
        json.dump(doc, out, indent=2)
        out.write("\n")
    warnings = doc.get("report", {}).get("warnings", [])
    if args.strict and warnings:
        print(f"ambiguous: {'; '.join(warnings)}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    return EXIT_OK


# --- scan-simplex --------------------------------------------------------------

@dataclass(frozen=True)
class SimplexGridRow:
    p11: Fraction
    p12: Fraction
    p21: Fraction
    p22: Fraction
    dim: int
    rank: int
    degeneracy: int
    euler: int
    symplectic: bool
    kahler: bool
    magic: bool

    def __post_init__(self):
        if self.p11 + self.p12 + self.p21 + self.p22 != 1:
            raise ValueError("grid weights do not sum to 1")
        if self.degeneracy != self.dim - self.rank or self.symplectic != (self.degeneracy == 0):
            raise ValueError("inconsistent grid row")

    def fields(self) -> list:
        return [format_scalar(self.p11), format_scalar(self.p12), format_scalar(self.p21),
                format_scalar(self.p22), self.dim, self.rank, self.degeneracy, self.euler,
                int(self.symplectic), int(self.kahler), int(self.magic)]


def simplex_grid(resolution: int):
    """Barycentric points (a, b, c, d)/R, a + b + c + d = R, in lexicographic order."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    r = resolution
    for a, b, c in product(range(r + 1), repeat=3):
        if a + b + c <= r:
            yield tuple(Fraction(x, r) for x in (a, b, c, r - a - b - c))


def simplex_row(point, tol=_classify.DEFAULT_TOL) -> SimplexGridRow:
    s = CCState((point[:2], point[2:]))
    rep = _classify.classify_state(s, tol=tol).report
    return SimplexGridRow(*point, dim=rep.dim, rank=rep.rank, degeneracy=rep.degeneracy,
                          euler=rep.euler, symplectic=rep.symplectic, kahler=rep.kahler,
                          magic=rep.magic_rectangle)


def scan_simplex(resolution: int, tol=_classify.DEFAULT_TOL) -> list:
    return [simplex_row(p, tol) for p in simplex_grid(resolution)]


def cmd_scan_simplex(args, out) -> int:
    if args.group not in (None, "lu"):
        print("error: the simplex scan classifies two-qubit CC states under SU(2) x SU(2) only",
              file=sys.stderr)
        return EXIT_INPUT
    try:
        rows = scan_simplex(args.resolution, args.tolerance)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    buf = io.StringIO()
    if args.format == "json":
        json.dump([dict(zip(SIMPLEX_COLUMNS, r.fields())) for r in rows], buf, indent=1)
        buf.write("\n")
    else:
        _write_csv([r.fields() for r in rows], SIMPLEX_COLUMNS, buf)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


# --- verify --------------------------------------------------------------------

CC_SIZES = tuple(product((2, 3, 4), (2, 3, 4)))
CQ_SIZES = tuple(product((2, 3, 4), (2, 3)))


def parse_sizes(text: str) -> tuple:
    """``"2x2,3x4"`` -> ((2, 2), (3, 4))."""
    sizes = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        try:
            n1, n2 = (int(x) for x in tok.lower().split("x"))
        except ValueError:
            raise StateError(f"bad size {tok!r}, expected N1xN2") from None
        if n1 < 2 or n2 < 2 or n1 * n2 > 16:
            raise StateError(f"size {tok} outside the supported range (N1, N2 >= 2, N1*N2 <= 16)")
        sizes.append((n1, n2))
    if not sizes:
        raise StateError("empty size list")
    return tuple(sizes)


def run_verification(cc_sizes, cq_sizes, samples: int, seed: int, families: bool,
                     tol=_classify.DEFAULT_TOL) -> dict:
    agree = {k: 0 for k in oracle.FIELDS}
    total, mismatches, warned = 0, [], 0
    jobs = []
    if families:
        jobs += [(f"family: {c.family} / {c.name}", c.state) for c in oracle.reference_families()]
    for kind, sizes in (("cc", cc_sizes), ("cq", cq_sizes)):
        for n1, n2 in sizes:
            jobs += [(f"{kind} {n1}x{n2} #{k}", s)
                     for k, s in enumerate(oracle.corpus(kind, n1, n2, samples, seed))]
    for name, state in jobs:
        rec = oracle.verify_formulas(state, tol=tol)
        total += 1
        warned += bool(rec.warnings)
        for k, ok in rec.matches.items():
            agree[k] += ok
        if not rec.ok:
            mismatches.append({"state": name, "diff": {k: {"formula": f, "oracle": o}
                                                       for k, (f, o) in rec.diff().items()}})
    return {"seed": seed, "samples": samples, "states": total,
            "families": sum(1 for n, _ in jobs if n.startswith("family:")),
            "agreement": agree, "warnings": warned, "mismatches": mismatches}


def cmd_verify(args, out) -> int:
    try:
        seed = args.seed if args.seed is not None else default_seed()
        if args.sizes:
            cc_sizes = cq_sizes = parse_sizes(args.sizes)
        else:
            cc_sizes, cq_sizes = CC_SIZES, CQ_SIZES
        if args.samples < 0:
            raise StateError("--samples must be non-negative")
    except StateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    summary = run_verification(cc_sizes, cq_sizes, args.samples, seed,
                               args.families == "paper", args.tolerance)
    if args.format == "csv":
        _write_csv([[k, v, summary["states"]] for k, v in summary["agreement"].items()],
                   ("field", "agree", "total"), out)
    else:
        json.dump(summary, out, indent=2)
        out.write("\n")
    if summary["mismatches"]:
        for m in summary["mismatches"]:
            print(f"mismatch {m['state']}: {m['diff']}", file=sys.stderr)
        return EXIT_MISMATCH
    if args.strict and summary["warnings"]:
        return EXIT_AMBIGUOUS
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", choices=("lu", "left"), default=None,
                        help="SU(N1) x SU(N2) or SU(N1) x I (default: lu for CC, left for CQ)")
    common.add_argument("--tolerance", type=float, default=_classify.DEFAULT_TOL)
    common.add_argument("--strict", action="store_true", help="exit 3 on ambiguity warnings")

    p = argparse.ArgumentParser(prog="orbit-atlas", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="classify a state from a JSON file")
    c.add_argument("file")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("scan-simplex", parents=[common], help="sweep the two-qubit CC simplex")
    s.add_argument("--resolution", type=int, required=True)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.set_defaults(func=cmd_scan_simplex)

    v = sub.add_parser("verify", parents=[common], help="formula vs oracle sweep")
    v.add_argument("--sizes", help="comma separated N1xN2 list, e.g. 2x2,3x3")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=None, help="default: $ORBIT_ATLAS_SEED or 0")
    v.add_argument("--families", choices=("paper", "none"), default="paper")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args, out or sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
