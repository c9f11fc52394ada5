"""Command-line front end.

Exit codes: 0 when the checked property holds, 1 when it fails, 2 on usage,
input or resource errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from gmpy2 import mpq

from .errors import DomainError, ResourceError
from .hamiltonian import ChainSpec, build_hamiltonian, random_cone_spec
from .qalg import parse_q
from .sparse import SparseOperator
from .spectra import CSV_HEADER, foel_verify
from .suite import FAMILIES, run_identity_suite, suite_report
from .urnsim import UrnModel, gap_spread, sector_gaps

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
TRIPLET_HEADER = "%%matrix coordinate real symmetric-general"


class UsageError(Exception):
    pass


def _rat(x) -> str:
    x = mpq(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_spec(path: str, q: str | None) -> ChainSpec:
    spec = ChainSpec.from_json(Path(path).read_text())
    return spec.with_q(q) if q is not None else spec


# matrix files

def write_triplet(M: SparseOperator) -> str:
    """Coordinate text: header, a ``%`` size comment, then ``row col value`` (1-indexed)."""
    lines = [TRIPLET_HEADER, f"% {M.shape[0]} {M.shape[1]} {M.nnz}"]
    lines += [f"{i + 1} {j + 1} {float(v)!r}" for i, j, v in M.entries()]
    return "\n".join(lines) + "\n"


def read_triplet(text: str) -> SparseOperator:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRIPLET_HEADER:
        raise DomainError("missing coordinate header")
    shape = None
    entries = []
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if shape is None and len(parts) == 3:
                shape = (int(parts[0]), int(parts[1]))
            continue
        i, j, v = line.split()
        entries.append((int(i) - 1, int(j) - 1, float(v)))
    if shape is None:
        raise DomainError("missing size comment")
    return SparseOperator.from_entries(shape, entries)


def write_matrix_json(M: SparseOperator, k: int | None = None) -> str:
    """Exact JSON: entries as ``[row, col, "p/q"]`` with 1-indexed positions."""
    labels = [lab.label() if hasattr(lab, "label") else str(lab) for lab in (M.row_labels or [])]
    return json.dumps({
        "shape": list(M.shape),
        "sector_k": k,
        "labels": labels,
        "entries": [[i + 1, j + 1, _rat(v)] for i, j, v in M.entries()],
    }) + "\n"


def read_matrix_json(text: str) -> SparseOperator:
    d = json.loads(text)
    entries = [(i - 1, j - 1, mpq(Fraction(v))) for i, j, v in d["entries"]]
    return SparseOperator.from_entries(tuple(d["shape"]), entries)


# commands

def cmd_identities(args) -> int:
    if args.max_n < 0:
        raise UsageError("--max-n must be >= 0")
    results = run_identity_suite(args.max_n, fault=args.fault)
    report = suite_report(results, args.max_n)
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    for name in report["failures"]:
        print(f"FAILED {name}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_foel(args) -> int:
    spec = _load_spec(args.spec, args.q)
    verdict = foel_verify(spec, tol=args.tol)
    lines = [CSV_HEADER] + [s.csv_row() for s in sorted(verdict.sectors, key=lambda s: s.total_spin)]
    lines.append(f"# foel_holds={str(verdict.foel_holds).lower()} slack={verdict.slack!r} "
                 f"cone={str(spec.foel_cone).lower()} nondegenerate={str(spec.nondegenerate).lower()}")
    _emit("\n".join(lines) + "\n", args.out)
    if verdict.theorem_violation:
        print("theorem violation: cone couplings but FOEL fails", file=sys.stderr)
    return EXIT_OK if verdict.foel_holds else EXIT_FAIL


def cmd_export(args) -> int:
    spec = _load_spec(args.spec, args.q)
    k = args.sector
    if k is None or not 0 <= 2 * k <= spec.N:
        raise UsageError(f"--sector must satisfy 0 <= 2k <= {spec.N}")
    H = build_hamiltonian(spec, ("hw_sector", k))
    if H.shape[0] == 0:
        raise UsageError(f"sector k={k} is empty")
    fmt = args.format or "triplet"
    if fmt == "triplet":
        text = write_triplet(H)
    elif fmt == "json":
        text = write_matrix_json(H, k)
    else:
        raise UsageError(f"export supports triplet or json, not {fmt}")
    _emit(text, args.out)
    return EXIT_OK


def cmd_urn(args) -> int:
    model = UrnModel.from_json(Path(args.model).read_text())
    gaps = sector_gaps(model)
    spread = gap_spread(gaps)
    lines = ["k,gamma"] + [f"{k},{g!r}" for k, g in gaps]
    lines.append(f"# spread={spread!r} hypergeometric={str(model.hypergeometric).lower()}")
    _emit("\n".join(lines) + "\n", args.out)
    if model.hypergeometric and spread > args.tol:
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.seed is None:
        raise UsageError("sweep needs --seed")
    rng = random.Random(args.seed)
    qs = [args.q] if args.q else ["1/2", "1", "2"]
    specs = [random_cone_spec(rng) for _ in range(args.count)]
    lines = ["index,q,weights,foel_holds,slack"]
    failures = 0
    t0 = time.perf_counter()
    for i, spec in enumerate(specs):
        for q in qs:
            v = foel_verify(spec.with_q(q), tol=args.tol)
            failures += not v.foel_holds
            w = " ".join(map(str, spec.site_weights))
            lines.append(f"{i},{q},{w},{str(v.foel_holds).lower()},{v.slack!r}")
    lines.append(f"# specs={len(specs)} failures={failures} seconds={time.perf_counter() - t0:.1f}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if failures == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uqfoel", description="Cascade-basis spin chains: identities, FOEL checks, urn gaps.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", help="override q as a positive rational, e.g. 1/2")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int)
    common.add_argument("--max-n", type=int, default=6)
    common.add_argument("--format", choices=["csv", "triplet", "json"])
    common.add_argument("--out")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("identities", parents=[common], help="exact TL identity suite")
    s.add_argument("--fault", choices=FAMILIES, help="corrupt one identity family (self-test)")
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("foel", parents=[common], help="sector ground energies and FOEL verdict")
    s.add_argument("spec")
    s.set_defaults(func=cmd_foel)

    s = sub.add_parser("export", parents=[common], help="write a sector matrix")
    s.add_argument("spec")
    s.add_argument("--sector", type=int, required=True)
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("urn", parents=[common], help="urn-model sector gaps")
    s.add_argument("model")
    s.set_defaults(func=cmd_urn)

    s = sub.add_parser("sweep", parents=[common], help="FOEL on random cone specs")
    s.add_argument("--count", type=int, default=100)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.q is not None:
            parse_q(args.q)
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        return args.func(args)
    except (UsageError, DomainError, ResourceError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
