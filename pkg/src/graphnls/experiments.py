"""Parameter scans and mass-threshold bracketing.

A scan varies one parameter (frequency, mass, a coupling strength, or the
number of star halflines) and records one row per grid point; points whose
solve fails keep a status string and empty numeric fields, so every number in
the table traces back to a completed solve.

Bracketing uses the constrained-minimizer existence test on star graphs: a
ground state exists at mass mu iff some competitor beats the line-soliton
energy level at that mass.  The numerical predicate requires a converged
solve that undercuts the level by a small relative margin (ties at the level
are resolution-limited and count as "no").
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .graphs import (
    ConfigError,
    Delta,
    DeltaPrime,
    Dipole,
    FulopTsutsui,
    NonlinearDelta,
    ProblemSpec,
    star_graph,
)
from .oracle import soliton_energy_at_mass
from .solver import (
    DegenerateQuadraticFormError,
    GroundStateReport,
    SolverOptions,
    ThresholdError,
    minimize_action_nehari,
    minimize_energy_mass,
)

SCAN_PARAMETERS = ("omega", "mu", "alpha", "beta", "tau", "v", "N")
EXISTENCE_MARGIN = 1e-6


@dataclass(frozen=True)
class ScanRow:
    param: str
    x: float
    value: float | None
    mass: float | None
    omega: float | None
    residual: float | None
    asymmetry: float | None
    branch: str
    converged: bool
    status: str


def _with_parameter(problem: ProblemSpec, param: str, value: float) -> ProblemSpec:
    if param == "N":
        n = int(round(value))
        if abs(value - n) > 1e-12:
            raise ConfigError("N must be an integer")
        graph = problem.graph
        if len(graph.vertices) != 1 or not all(e.is_halfline for e in graph.edges):
            raise ConfigError("N-scan requires a star of halflines")
        center = graph.vertices[0]
        cond = problem.condition(center)
        return ProblemSpec(graph=star_graph(n), conditions={"v0": cond}, p=problem.p)

    kinds = {"alpha": Delta, "beta": DeltaPrime, "tau": (Dipole, FulopTsutsui),
             "v": FulopTsutsui}
    kind = kinds[param]
    conditions = dict(problem.conditions)
    hits = 0
    for vid, cond in conditions.items():
        if isinstance(cond, kind):
            conditions[vid] = replace(cond, **{param: value})
            hits += 1
    if hits == 0:
        raise ConfigError(f"no vertex coupling carries parameter {param!r}")
    return ProblemSpec(graph=problem.graph, conditions=conditions, p=problem.p)


def _scan_point(args) -> ScanRow:
    problem, param, value, mu, omega, opts = args
    try:
        prob = problem
        mode_mu, mode_omega = mu, omega
        if param == "omega":
            mode_omega = value
        elif param == "mu":
            mode_mu = value
        else:
            prob = _with_parameter(problem, param, value)
        if mode_omega is not None and param != "mu":
            rep = minimize_action_nehari(prob, mode_omega, opts)
        elif mode_mu is not None:
            rep = minimize_energy_mass(prob, mode_mu, opts)
        else:
            raise ConfigError("scan needs a base mass or frequency")
    except (ThresholdError, DegenerateQuadraticFormError, ConfigError) as exc:
        return ScanRow(param, value, None, None, None, None, None,
                       branch="", converged=False, status=f"error: {exc}")
    return ScanRow(
        param=param, x=value, value=rep.value, mass=rep.mass, omega=rep.omega,
        residual=rep.stationarity_residual, asymmetry=rep.asymmetry,
        branch=rep.branch_label, converged=rep.converged, status=rep.status)


def scan(problem: ProblemSpec, param: str, values, mu: float | None = None,
         omega: float | None = None, opts: SolverOptions | None = None,
         workers: int = 1) -> list[ScanRow]:
    """One solve per grid value; rows come back in grid order."""
    if param not in SCAN_PARAMETERS:
        raise ConfigError(f"unknown scan parameter {param!r}; "
                          f"choose from {SCAN_PARAMETERS}")
    opts = opts or SolverOptions()
    jobs = [(problem, param, float(v), mu, omega, opts) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_point, jobs))
    return [_scan_point(job) for job in jobs]


# ---------------------------------------------------------------------------
# existence predicate and mass-threshold bracketing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExistenceProbe:
    mu: float
    exists: bool
    value: float
    level: float
    converged: bool


def beats_soliton_level(problem: ProblemSpec, mu: float,
                        opts: SolverOptions | None = None) -> ExistenceProbe:
    """Numerical existence test: does the minimizer beat the soliton level?

    True requires a converged solve whose energy undercuts the line-soliton
    level at the same mass by a relative margin, which keeps borderline ties
    from being misread as existence.
    """
    level = soliton_energy_at_mass(problem.p, mu)
    rep = minimize_energy_mass(problem, mu, opts)
    margin = EXISTENCE_MARGIN * abs(level)
    exists = bool(rep.converged and rep.value <= level - margin)
    return ExistenceProbe(mu=mu, exists=exists, value=rep.value,
                          level=level, converged=rep.converged)


@dataclass
class BracketResult:
    orientation: str                 # exists-below | exists-above | constant
    interval: tuple[float, float] | None
    probes: list[ExistenceProbe]
    note: str = ""


def bracket_mass_threshold(problem: ProblemSpec, mu_lo: float, mu_hi: float,
                           steps: int,
                           opts: SolverOptions | None = None) -> BracketResult:
    """Bisect the existence predicate over [mu_lo, mu_hi].

    Assumes the predicate is monotone on the range (it flips once at the
    threshold mass).  When both endpoints agree there is no threshold in
    range and the common verdict is reported instead.
    """
    if not (0 < mu_lo < mu_hi):
        raise ConfigError("need 0 < mu_lo < mu_hi")
    if steps < 1:
        raise ConfigError("need at least one bisection step")
    probes = []
    p_lo = beats_soliton_level(problem, mu_lo, opts)
    p_hi = beats_soliton_level(problem, mu_hi, opts)
    probes += [p_lo, p_hi]
    if p_lo.exists == p_hi.exists:
        verdict = "existence" if p_lo.exists else "non-existence"
        return BracketResult(
            orientation="constant", interval=None, probes=probes,
            note=f"no threshold in range: predicate is constant ({verdict})")
    orientation = "exists-below" if p_lo.exists else "exists-above"
    lo, hi = mu_lo, mu_hi
    lo_exists = p_lo.exists
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        p_mid = beats_soliton_level(problem, mid, opts)
        probes.append(p_mid)
        if p_mid.exists == lo_exists:
            lo = mid
        else:
            hi = mid
    return BracketResult(orientation=orientation, interval=(lo, hi), probes=probes)
