"""Command line interface.

Subcommands
-----------
pointwise       exact fiberwise identity suite (rational arithmetic)
compute         full decomposition report for one structure
lemma21         splitting residuals of random closed self-dual inputs
dump-structure  sample a structure and write it to an npz container

Exit codes: 0 all checks pass, 1 a check failed, 2 inconclusive result or
usage error, 3 an iterative solver did not converge.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_NO_CONVERGENCE = 3


def _add_structure_args(q):
    q.add_argument(
        "--structure",
        choices=("flat", "perturbed"),
        default="flat",
        help="structure family (default flat)",
    )
    q.add_argument("--grid", type=int, default=8, help="even grid size >= 4")
    q.add_argument("--seed", type=int, default=1, help="perturbation seed")
    q.add_argument(
        "--amplitude", type=float, default=0.3, help="perturbation amplitude"
    )
    q.add_argument(
        "--modes", type=int, default=2, help="perturbation mode cutoff"
    )


def _add_run_args(q):
    q.add_argument("--tol-zero", type=float, default=None)
    q.add_argument(
        "--tol-solve", type=float, default=None, help="linear solve tolerance"
    )
    q.add_argument("--threads", type=int, default=None)
    q.add_argument(
        "--deterministic",
        action="store_true",
        help="omit wall-clock fields so repeated runs emit identical bytes",
    )
    q.add_argument("--json", metavar="PATH", default=None)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tkhodge",
        description="certified cohomology splittings of contact structures "
        "over a four-torus base",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pw = sub.add_parser(
        "pointwise", help="exact fiberwise identity suite (rational arithmetic)"
    )
    pw.add_argument("--json", metavar="PATH", default=None)
    pw.add_argument("--tamper-star", action="store_true", help=argparse.SUPPRESS)

    cp = sub.add_parser("compute", help="decomposition report for one structure")
    _add_structure_args(cp)
    _add_run_args(cp)
    cp.add_argument(
        "--complex",
        dest="with_complex",
        action="store_true",
        help="include the complexified bidegree section",
    )
    cp.add_argument(
        "--spectra",
        metavar="PATH",
        default=None,
        help="write every certified spectrum as CSV",
    )

    lm = sub.add_parser(
        "lemma21", help="splitting residuals of random closed self-dual inputs"
    )
    _add_structure_args(lm)
    _add_run_args(lm)
    lm.add_argument("--count", type=int, default=20, help="number of inputs")

    ds = sub.add_parser("dump-structure", help="sample a structure to npz")
    _add_structure_args(ds)
    ds.add_argument("path", help="output npz path")

    return p


def _emit(payload: dict, path: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def _limit_threads(n: int | None):
    if n is None:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except ImportError:  # pragma: no cover - depends on environment
        import os

        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _validate_grid(parser: argparse.ArgumentParser, grid: int):
    if grid < 4 or grid % 2:
        parser.error(f"--grid must be even and at least 4, got {grid}")


def _make_structure(args):
    from . import geometry

    if args.structure == "flat":
        return geometry.make_flat_structure(args.grid)
    return geometry.make_perturbed_structure(
        args.grid, seed=args.seed, amplitude=args.amplitude,
        mode_cutoff=args.modes,
    )


def _solver_options(args):
    from .config import SolverOptions

    overrides = {}
    if getattr(args, "tol_zero", None) is not None:
        overrides["tol_zero"] = args.tol_zero
    if getattr(args, "tol_solve", None) is not None:
        overrides["cg_rtol"] = args.tol_solve
    return SolverOptions(**overrides)


def _run_config(args, opts):
    from .config import RunConfig

    return RunConfig(
        structure=args.structure,
        grid=args.grid,
        seed=args.seed,
        amplitude=args.amplitude if args.structure == "perturbed" else 0.0,
        mode_cutoff=args.modes,
        with_complex=getattr(args, "with_complex", False),
        deterministic=args.deterministic,
        threads=args.threads,
        solver=opts,
    )


def cmd_pointwise(args) -> int:
    t0 = time.time()
    from . import frame_algebra as fa

    star = None
    if args.tamper_star:
        star = [[-x for x in row] for row in fa.STAR2]
    results = fa.verify_span_identities(star_matrix=star)
    results += fa.bidegree_bases()
    checks = []
    for r in results:
        entry = {"identity": r.name, "pass": r.passed}
        if r.detail:
            entry["detail"] = r.detail
        checks.append(entry)
    ok = all(r.passed for r in results)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "pointwise",
        "arithmetic": "exact-rational",
        "checks": checks,
        "pass": ok,
        "elapsed_s": round(time.time() - t0, 6),
    }
    _emit(payload, args.json)
    return EXIT_PASS if ok else EXIT_FAIL


def _write_spectra(path: str, report, s, opts):
    import numpy as np

    from . import cohomology, hodge

    rows = []
    for degree in (0, 1, 2):
        if degree == 2:
            _, hb = cohomology.harmonic_two_basis(s, opts)
        else:
            hb = hodge.harmonic_basis(degree, s, opts)
        for idx, val in enumerate(np.asarray(hb.eigenvalues, dtype=float)):
            rows.append((f"pencil_degree_{degree}", idx, val))
    for which in ("phi+", "phi-"):
        sub = cohomology.subgroup_dimension(s, which, opts)
        for idx, val in enumerate(np.asarray(sub.eigenvalues, dtype=float)):
            rows.append((f"gram_{which}", idx, val))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("section,index,eigenvalue\n")
        for section, idx, val in rows:
            fh.write(f"{section},{idx},{val:.17e}\n")


def cmd_compute(args) -> int:
    t0 = time.time()
    _limit_threads(args.threads)
    from . import cohomology
    from .errors import NoConvergence

    opts = _solver_options(args)
    s = _make_structure(args)
    config = _run_config(args, opts).as_dict()
    try:
        report = cohomology.decomposition_report(
            s, opts, with_complex=args.with_complex
        )
    except NoConvergence as exc:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "compute",
            "config": config,
            "error": "no-convergence",
            "message": str(exc),
        }
        _emit(payload, args.json)
        return EXIT_NO_CONVERGENCE

    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "compute",
        "config": config,
        **report.as_dict(),
    }
    if not args.deterministic:
        payload["elapsed_s"] = round(time.time() - t0, 3)
    if args.spectra:
        _write_spectra(args.spectra, report, s, opts)
    _emit(payload, args.json)
    if report.verdict == "pass":
        return EXIT_PASS
    if report.verdict == "fail":
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE


def cmd_lemma21(args) -> int:
    t0 = time.time()
    _limit_threads(args.threads)
    from . import forms, hodge
    from .errors import NoConvergence

    opts = _solver_options(args)
    s = _make_structure(args)
    config = _run_config(args, opts).as_dict()
    tol = 1e-8 if args.structure == "flat" else 1e-7

    worst: dict[str, float] = {}
    defect_max = 0.0
    try:
        for i in range(args.count):
            raw = forms.random_form(s.n, 2, kmax=2, seed=1000 + i)
            a = forms.project_field(forms.nyquist_project(raw), s, "g+")
            rep = hodge.refined_selfdual_decompose(a, s, opts)
            for name, val in rep.residuals.items():
                worst[name] = max(worst.get(name, 0.0), float(val))
            defect_max = max(defect_max, float(rep.input_projection_defect))
    except NoConvergence as exc:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "lemma21",
            "config": config,
            "error": "no-convergence",
            "message": str(exc),
        }
        _emit(payload, args.json)
        return EXIT_NO_CONVERGENCE

    max_residual = max(worst.values()) if worst else 0.0
    ok = max_residual <= tol
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "lemma21",
        "config": config,
        "count": args.count,
        "tolerance": tol,
        "max_residuals": worst,
        "max_residual": max_residual,
        "input_projection_defect_max": defect_max,
        "pass": ok,
    }
    if not args.deterministic:
        payload["elapsed_s"] = round(time.time() - t0, 3)
    _emit(payload, args.json)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_dump_structure(args) -> int:
    from . import geometry

    s = _make_structure(args)
    geometry.save_structure(s, args.path)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "dump-structure",
        "path": args.path,
        "structure": args.structure,
        "grid": args.grid,
    }
    _emit(payload, None)
    return EXIT_PASS


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if hasattr(args, "grid"):
        _validate_grid(parser, args.grid)
    handler = {
        "pointwise": cmd_pointwise,
        "compute": cmd_compute,
        "lemma21": cmd_lemma21,
        "dump-structure": cmd_dump_structure,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
