"""Solver and run configuration.

Every tolerance used by the numeric modules lives here so call sites never
bake in magic numbers; tests and the CLI construct these dataclasses
explicitly when they need non-default values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and iteration limits for the linear/eigen solvers."""

    #: eigenvalues below this count as numerically zero (kernel members)
    tol_zero: float = 1e-8
    #: required ratio between first kept and last discarded eigenvalue
    gap_min: float = 100.0
    #: residual tolerance for the iterative eigensolver
    eig_tol: float = 1e-9
    eig_maxiter: int = 4000
    #: extra block vectors beyond the expected kernel dimension
    block_extra: int = 2
    #: conjugate gradient tolerances for least-squares / potential solves
    cg_rtol: float = 1e-11
    cg_atol: float = 0.0
    cg_maxiter: int = 20000
    #: conjugate gradient tolerances for the mass (Gram) solves inside the
    #: adjoint codifferential
    mass_rtol: float = 1e-13
    mass_maxiter: int = 400
    #: structure validation tolerance
    tol_structure: float = 1e-10
    #: threshold on the representability Gram eigenvalues (squared scale)
    tol_subgroup: float = 1e-12
    #: minimum principal angle (degrees) certifying subspace independence
    min_angle_deg: float = 10.0
    #: odd working grid for star-route solves: n_star = factor * n + 1
    star_grid_factor: int = 1
    #: deterministic seed for solver-internal random starts
    solver_seed: int = 20240901

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RunConfig:
    """One CLI computation request."""

    structure: str = "flat"  # "flat" or "perturbed"
    grid: int = 8
    seed: int = 1
    amplitude: float = 0.0
    mode_cutoff: int = 2
    with_complex: bool = False
    deterministic: bool = False
    threads: int | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["solver"] = self.solver.as_dict()
        return d
