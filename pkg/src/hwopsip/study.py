"""Convergence studies: mesh -> assemble -> solve -> errors, tabulated per N."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .assembly import PenaltyParams, assemble_system
from .errors import (
    DiscreteSolution,
    convergence_indicator,
    energy_error,
    hwop_norm,
    l2_error,
    reference_norms,
    source_l2_norm,
)
from .exact import ExactSolution, boundary_layer
from .mesh import Family, MeshFamily, generate, mesh_size, write_mesh
from .solver import CgBreakdown, cg_solve

__all__ = [
    "StudyConfig",
    "StudyRow",
    "run_study",
    "run_case",
    "emit_table",
    "read_table",
    "compare_reference",
    "ComparisonReport",
    "reference_table_path",
    "study_reference_norms",
    "E_REL_TOL",
    "R_ABS_TOL",
]

log = logging.getLogger(__name__)

E_REL_TOL = 0.03
R_ABS_TOL = 0.05

CSV_COLUMNS = ["N", "Np", "h", "E_H1", "r_H1", "E_L2", "r_L2", "iters", "seconds"]

_REFERENCE_FILES = {
    Family.STANDARD: "table1_standard.csv",
    Family.SHISHKIN: "table2_shishkin.csv",
    Family.COSINE: "table3_cosine.csv",
    Family.QUADRATIC: "table4_quadratic.csv",
}


@dataclass
class StudyConfig:
    family: Family
    n_list: list[int]
    delta: float = 1.0 / 128.0
    beta: float = 1.0
    cg_tol: float = 1e-10
    norm_quad: int = 5
    max_iter: int | None = None
    out: Path | None = None
    dump_mesh: bool = False
    dump_matrix: bool = False

    def __post_init__(self):
        if isinstance(self.family, str):
            self.family = Family.parse(self.family)
        self.n_list = [int(n) for n in self.n_list]
        if not self.n_list:
            raise ValueError("empty N list")
        if self.n_list != sorted(set(self.n_list)):
            raise ValueError("N list must be strictly ascending")
        for n in self.n_list:
            if n < 4 or n % 2:
                raise ValueError(f"each N must be even and >= 4, got {n}")
        if self.norm_quad not in (5, 7):
            raise ValueError("norm quadrature degree must be 5 or 7")


@dataclass
class StudyRow:
    N: int
    Np: int
    h: float
    E_H1: float
    E_L2: float
    r_H1: float | None = None
    r_L2: float | None = None
    iters: int = 0
    seconds: float = 0.0
    converged: bool = True
    cg_residual: float = 0.0
    # |u_h^H|_{hwop(1)} / ||f||_{L2}, degree-7 source norm
    stability_ratio: float = math.nan
    extras: dict = field(default_factory=dict)


@lru_cache(maxsize=None)
def _cached_reference_norms(name: str, N: int) -> tuple[float, float]:
    exact = boundary_layer() if name == "boundary_layer" else None
    if exact is None:  # pragma: no cover
        raise KeyError(name)
    norms = reference_norms(exact, generate(MeshFamily(Family.QUADRATIC, N)), degree=7)
    return norms["h1"], norms["l2"]


def study_reference_norms(exact: ExactSolution, N: int = 256) -> dict[str, float]:
    """Denominators ``|u|_{H1}``, ``||u||_{L2}``: degree-7 quadrature on a
    quadratic-graded mesh with ``N`` divisions, shared by all families."""
    if exact.name == "boundary_layer":
        h1, l2 = _cached_reference_norms(exact.name, N)
        return {"h1": h1, "l2": l2}
    return reference_norms(exact, generate(MeshFamily(Family.QUADRATIC, N)), degree=7)


def run_case(family: MeshFamily, exact: ExactSolution, beta: float = 1.0,
             cg_tol: float = 1e-10, norm_quad: int = 5, max_iter: int | None = None,
             dump_dir: Path | None = None, dump_mesh: bool = False,
             dump_matrix: bool = False):
    """Solve one mesh; returns ``(row, solution)`` with relative errors unset."""
    start = time.perf_counter()
    mesh = generate(family)
    system = assemble_system(mesh, exact.f, PenaltyParams(beta))
    stem = f"{family.tag.value}_{family.N}"
    if dump_mesh and dump_dir is not None:
        with open(dump_dir / f"mesh_{stem}.txt", "w") as fh:
            write_mesh(mesh, fh)
    if dump_matrix and dump_dir is not None:
        with open(dump_dir / f"matrix_{stem}.mtx", "w") as fh:
            system.matrix.write_matrix_market(fh)
    converged = True
    try:
        x, report = cg_solve(system.matrix, system.rhs, tol=cg_tol, max_iter=max_iter,
                             log_every=10000)
        converged = report.converged
    except CgBreakdown as err:
        log.error("N=%d: %s", family.N, err)
        raise
    sol = DiscreteSolution.from_reduced(mesh, system.dofmap, x, beta)
    row = StudyRow(
        N=family.N,
        Np=system.dofmap.n_total,
        h=mesh_size(mesh),
        E_H1=energy_error(sol, exact, norm_quad),
        E_L2=l2_error(sol, exact, norm_quad),
        iters=report.iterations,
        converged=converged,
        cg_residual=report.residual,
        stability_ratio=hwop_norm(sol) / source_l2_norm(exact.f, mesh, 7),
    )
    row.seconds = time.perf_counter() - start
    return row, sol


def run_study(config: StudyConfig, exact: ExactSolution | None = None,
              keep_solutions: bool = False) -> list[StudyRow]:
    """Run every ``N`` of the study in ascending order.

    A row whose CG solve does not reach the tolerance is kept and flagged
    with ``converged=False``.  With ``keep_solutions`` the discrete solution
    is stored in ``row.extras["solution"]``.
    """
    exact = exact or boundary_layer()
    ref = study_reference_norms(exact)
    dump_dir = Path(config.out).parent if config.out else Path.cwd()
    rows: list[StudyRow] = []
    for N in config.n_list:
        fam = MeshFamily(config.family, N, config.delta)
        log.info("solving %s N=%d", fam.tag.value, N)
        try:
            row, sol = run_case(fam, exact, config.beta, config.cg_tol, config.norm_quad,
                              config.max_iter, dump_dir, config.dump_mesh,
                              config.dump_matrix)
        except CgBreakdown:
            row = StudyRow(N, 0, math.nan, math.nan, math.nan, converged=False)
            rows.append(row)
            continue
        if keep_solutions:
            row.extras["solution"] = sol
        row.E_H1 /= ref["h1"]
        row.E_L2 /= ref["l2"]
        if rows and rows[-1].N * 2 == N and rows[-1].converged and row.converged:
            row.r_H1 = convergence_indicator(rows[-1].E_H1, row.E_H1)
            row.r_L2 = convergence_indicator(rows[-1].E_L2, row.E_L2)
        if not row.converged:
            log.warning("N=%d: CG did not converge (rel. residual %.3e)", N, row.cg_residual)
        rows.append(row)
    return rows


def _fmt(v, spec=".6g") -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-"
    return format(v, spec)


def emit_table(rows: list[StudyRow], fmt: str = "csv") -> str:
    """Render rows as CSV (6 significant digits) or a markdown table."""
    if not rows:
        raise ValueError("no rows to emit")
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for r in rows:
            buf.write(",".join([
                str(r.N), str(r.Np), _fmt(r.h), _fmt(r.E_H1), _fmt(r.r_H1),
                _fmt(r.E_L2), _fmt(r.r_L2), str(r.iters), _fmt(r.seconds),
            ]) + "\n")
    elif fmt == "markdown":
        buf.write("| N | #Np | h | E_H1 | r | E_L2 | r |\n")
        buf.write("|---|---|---|---|---|---|---|\n")
        for r in rows:
            buf.write(
                f"| {r.N} | {r.Np} | {_fmt(r.h, '.2e')} | {_fmt(r.E_H1, '.5e')} | "
                f"{_fmt(r.r_H1, '.2f')} | {_fmt(r.E_L2, '.5e')} | {_fmt(r.r_L2, '.2f')} |\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return buf.getvalue()


def _parse(v: str):
    v = v.strip()
    if v in ("", "-"):
        return None
    return float(v)


def read_table(source) -> list[StudyRow]:
    """Parse a table CSV (``#`` comment lines allowed)."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        text = Path(source).read_text()
    else:
        text = str(source)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        rows.append(StudyRow(
            N=int(rec["N"]), Np=int(rec["Np"]), h=_parse(rec["h"]),
            E_H1=_parse(rec["E_H1"]), E_L2=_parse(rec["E_L2"]),
            r_H1=_parse(rec["r_H1"]), r_L2=_parse(rec["r_L2"]),
            iters=int(rec.get("iters") or 0), seconds=_parse(rec.get("seconds") or "") or 0.0,
        ))
    return rows


def reference_table_path(family) -> Path:
    """Vendored reference table for a mesh family."""
    fam = Family.parse(family) if isinstance(family, str) else family
    return Path(str(resources.files("hwopsip") / "data" / _REFERENCE_FILES[fam]))


@dataclass
class ComparisonReport:
    passed: bool
    cells: list[dict]
    max_rel_E: float
    max_abs_r: float

    def failures(self) -> list[dict]:
        return [c for c in self.cells if not c["ok"]]

    def summary(self) -> str:
        lines = [f"{'PASS' if self.passed else 'FAIL'}: max rel. dev. E = {self.max_rel_E:.3e}, "
                 f"max abs. dev. r = {self.max_abs_r:.3f}"]
        for c in self.failures():
            lines.append(f"  N={c['N']} {c['column']}: got {c['value']:.6g}, "
                         f"reference {c['reference']:.6g} (dev {c['deviation']:.3g})")
        return "\n".join(lines)


def compare_reference(rows: list[StudyRow], reference, e_tol: float = E_REL_TOL,
                      r_tol: float = R_ABS_TOL) -> ComparisonReport:
    """Compare study rows with a reference table.

    E columns use relative deviation, r columns absolute deviation.  Rows
    without a computed value (first ``N``) skip the r comparison.

    Raises
    ------
    ValueError
        If a study ``N`` is missing from the reference table.
    """
    ref_rows = reference if isinstance(reference, list) else read_table(reference)
    by_n = {r.N: r for r in ref_rows}
    missing = [r.N for r in rows if r.N not in by_n]
    if missing:
        raise ValueError(f"reference table has no rows for N = {missing}")
    cells = []
    max_e = max_r = 0.0
    for row in rows:
        ref = by_n[row.N]
        for col in ("E_H1", "E_L2"):
            got, want = getattr(row, col), getattr(ref, col)
            dev = abs(got - want) / abs(want) if got is not None and math.isfinite(got) else math.inf
            ok = dev <= e_tol
            max_e = max(max_e, dev)
            cells.append(dict(N=row.N, column=col, value=got, reference=want,
                              deviation=dev, ok=ok))
        for col in ("r_H1", "r_L2"):
            got, want = getattr(row, col), getattr(ref, col)
            if got is None or want is None:
                continue
            dev = abs(got - want)
            ok = dev <= r_tol
            max_r = max(max_r, dev)
            cells.append(dict(N=row.N, column=col, value=got, reference=want,
                              deviation=dev, ok=ok))
    passed = all(c["ok"] for c in cells)
    return ComparisonReport(passed, cells, max_e, max_r)
