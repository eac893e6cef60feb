"""Command line interface: ``hwopsip study`` and ``hwopsip audit``."""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .geometry import write_audit_csv
from .mesh import Family, MeshFamily, generate
from .study import (
    StudyConfig,
    compare_reference,
    emit_table,
    reference_table_path,
    run_study,
)

EXIT_OK = 0
EXIT_COMPARE_FAILED = 1
EXIT_SOLVER_FAILED = 2

FAMILY_CHOICES = [f.value for f in Family]


def _n_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N list {text!r}")


def _real(text: str) -> float:
    # accepts fractions such as 1/128
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad number {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hwopsip",
        description="Hybrid WOPSIP convergence studies on anisotropic meshes.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("study", help="run a convergence study")
    st.add_argument("--family", required=True, choices=FAMILY_CHOICES)
    st.add_argument("--n", type=_n_list, default=[32, 64, 128],
                    help="comma separated division counts (default 32,64,128)")
    st.add_argument("--delta", type=_real, default=1.0 / 128.0)
    st.add_argument("--beta", type=_real, default=1.0)
    st.add_argument("--cg-tol", type=float, default=1e-10)
    st.add_argument("--max-iter", type=int, default=None)
    st.add_argument("--norm-quad", type=int, choices=(5, 7), default=5)
    st.add_argument("--out", type=Path, default=None, help="CSV output path")
    st.add_argument("--format", choices=("csv", "markdown"), default="csv",
                    help="format for standard output")
    st.add_argument("--compare", default=None,
                    help="reference CSV, or 'builtin' for the vendored table of the family")
    st.add_argument("--dump-mesh", action="store_true")
    st.add_argument("--dump-matrix", action="store_true")

    au = sub.add_parser("audit", help="per-element geometry CSV")
    au.add_argument("--family", required=True, choices=FAMILY_CHOICES)
    au.add_argument("--n", type=int, required=True)
    au.add_argument("--delta", type=_real, default=1.0 / 128.0)
    au.add_argument("--out", type=Path, default=None)
    return parser


def _study(args) -> int:
    config = StudyConfig(
        family=args.family, n_list=args.n, delta=args.delta, beta=args.beta,
        cg_tol=args.cg_tol, norm_quad=args.norm_quad, max_iter=args.max_iter,
        out=args.out, dump_mesh=args.dump_mesh, dump_matrix=args.dump_matrix,
    )
    rows = run_study(config)
    if args.out:
        args.out.write_text(emit_table(rows, "csv"))
    sys.stdout.write(emit_table(rows, args.format))
    if not all(r.converged for r in rows):
        sys.stderr.write("solver failure: CG did not converge for some N\n")
        return EXIT_SOLVER_FAILED
    if args.compare:
        ref = reference_table_path(config.family) if args.compare == "builtin" else args.compare
        report = compare_reference(rows, ref)
        sys.stderr.write(report.summary() + "\n")
        if not report.passed:
            return EXIT_COMPARE_FAILED
    return EXIT_OK


def _audit(args) -> int:
    mesh = generate(MeshFamily(args.family, args.n, args.delta))
    if args.out:
        with open(args.out, "w") as fh:
            write_audit_csv(mesh, fh)
    else:
        write_audit_csv(mesh, sys.stdout)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(message)s")
    try:
        if args.command == "study":
            return _study(args)
        return _audit(args)
    except ValueError as err:
        sys.stderr.write(f"error: {err}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
