"""Ground-state solvers: mass-constrained energy descent and Nehari descent.

Both solvers run a preconditioned projected gradient flow.  The descent
direction is the gradient lifted through (stiffness + c * mass) -- an H1-type
metric -- so steps of order one stay useful on fine meshes; a backtracking
line search (halving from 0.5, Armijo constant 1e-4) keeps the objective
monotone, and each accepted step is projected back onto its constraint:

* fixed mass: rescale to |u|^2 = mu exactly;
* Nehari: rescale by the unique t* > 0 with I_omega(t* u) = 0.

Convergence is declared on the sup norm of the discrete L2 gradient of the
action (with the recovered multiplier in the mass-constrained case), which is
the pointwise defect of the discrete stationary equation.

In critical regimes (p = 6 or a pointwise power q = 4) the constrained
infimum can be -infinity; `detect_unboundedness` certifies this with a
mass-preserving concentration family evaluated in closed form, and the mass
solver refuses to chase it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from .discretization import Discretization, GraphFunction, Grid
from .graphs import (
    ConfigError,
    Delta,
    DeltaPrime,
    Dipole,
    FulopTsutsui,
    NonlinearDelta,
    ProblemSpec,
)
from .oracle import (
    CRITICAL_MASS_P6,
    Soliton,
    delta_prime_bifurcation,
    omega_at_mass,
    omega_min_delta,
    omega_min_ft,
)


class ThresholdError(ValueError):
    """Frequency at or below the linear threshold: no stationary state expected."""


class DegenerateQuadraticFormError(RuntimeError):
    """The quadratic part of the action is not positive on the trial state."""


class InvalidRegimeError(ValueError):
    """Operation only defined in a critical regime (p = 6 or q = 4)."""


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 4000
    gradient_tolerance: float = 1e-6
    step_init: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-14
    initial_guess: object = "soliton"  # "soliton" | "random" | GraphFunction
    seed: int = 0
    h: float = 0.01
    halfline_length: float | None = None
    symmetrize: bool = False
    divergence_floor: float = -1e6

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("need at least one iteration")
        if self.gradient_tolerance <= 0 or self.step_init <= 0:
            raise ConfigError("tolerances and step sizes must be positive")

    def with_(self, **kw) -> "SolverOptions":
        return replace(self, **kw)


@dataclass
class GroundStateReport:
    profile: GraphFunction | None
    value: float
    mass: float
    omega: float
    stationarity_residual: float
    vertex_residuals: dict[str, float]
    converged: bool
    iterations: int
    seed: int
    status: str
    functional: str
    branch_label: str = "ground"
    nehari_residual: float | None = None
    self_consistency_gap: float | None = None
    asymmetry: float = 0.0
    objective_history: list = field(default_factory=list, repr=False)
    alternates: tuple = ()

    def to_text(self) -> str:
        lines = [
            f"status = {self.status}",
            f"converged = {self.converged}",
            f"functional = {self.functional}",
            f"branch = {self.branch_label}",
            f"value = {self.value:.12g}",
            f"mass = {self.mass:.12g}",
            f"omega = {self.omega:.12g}",
            f"stationarity_residual = {self.stationarity_residual:.6g}",
            f"asymmetry = {self.asymmetry:.6g}",
            f"iterations = {self.iterations}",
            f"seed = {self.seed}",
        ]
        if self.nehari_residual is not None:
            lines.append(f"nehari_residual = {self.nehari_residual:.6g}")
        if self.self_consistency_gap is not None:
            lines.append(f"self_consistency_gap = {self.self_consistency_gap:.6g}")
        for v, r in sorted(self.vertex_residuals.items()):
            lines.append(f"vertex_residual.{v} = {r:.6g}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# seeds
# ---------------------------------------------------------------------------

def _mass_frequency_hint(p: float, mu: float) -> float:
    if p == 6:
        return 1.0
    return min(1e3, max(1e-3, omega_at_mass(p, mu)))


def _raw_seed(problem: ProblemSpec, grid: Grid, omega_hint: float,
              kind, rng: np.random.Generator, asym: bool = False) -> dict[str, np.ndarray]:
    if isinstance(kind, GraphFunction):
        return {k: v.copy() for k, v in kind.values.items()}
    vals = {}
    sol = Soliton(problem.p, omega_hint)
    for e in problem.graph.edges:
        x = grid.coords(e.id)
        if kind == "random":
            center = rng.uniform(0.5, 0.25 * x[-1] + 0.5)
            width = rng.uniform(0.5, 2.0)
            amp = rng.uniform(0.5, 1.5)
            vals[e.id] = amp * np.exp(-((x - center) ** 2) / (2 * width * width))
        else:
            vals[e.id] = np.asarray(sol(x + 1.0))
    for v, cond in problem.special_vertices():
        inc = problem.graph.incidences(v)
        if isinstance(cond, DeltaPrime):
            scale = -2.0 if asym else -1.0
            vals[inc[0][0].id] = scale * vals[inc[0][0].id]
        elif isinstance(cond, (Dipole, FulopTsutsui)):
            vals[inc[1][0].id] = cond.tau * vals[inc[1][0].id]
    return vals


def _seed_dofs(disc: Discretization, problem: ProblemSpec, omega_hint: float,
               opts: SolverOptions, asym: bool = False) -> np.ndarray:
    rng = np.random.default_rng(opts.seed)
    raw = _raw_seed(problem, disc.grid, omega_hint, opts.initial_guess, rng, asym=asym)
    gf = GraphFunction(disc.grid, raw)
    if isinstance(opts.initial_guess, GraphFunction):
        return disc.pack(gf)  # user profiles must already satisfy the constraints
    return disc.pack(gf, check=False)


def _symmetrizer(disc: Discretization):
    """Average a state over the halfline permutations of a single-vertex star.

    Implements the even-subspace restriction used for repulsive couplings;
    only available when every edge is a halfline at one common vertex with a
    common grid.
    """
    graph = disc.grid.graph
    if len(graph.vertices) != 1 or not all(e.is_halfline for e in graph.edges):
        raise ConfigError("symmetrize requires a single-vertex star of halflines")
    ns = {disc.grid.edge_grids[e.id].n for e in graph.edges}
    if len(ns) != 1:
        raise ConfigError("symmetrize requires a common grid on all halflines")

    def apply(x: np.ndarray) -> np.ndarray:
        gf = disc.unpack(x)
        arrays = [gf.values[e.id] for e in graph.edges]
        avg = np.mean(arrays, axis=0)
        return disc.pack(GraphFunction(disc.grid, {e.id: avg for e in graph.edges}),
                         check=False)

    return apply


# ---------------------------------------------------------------------------
# residual diagnostics
# ---------------------------------------------------------------------------

def _one_sided_derivative(vals: np.ndarray, h: float, endpoint: int) -> float:
    """Second-order one-sided derivative at an edge endpoint, in edge coords."""
    if endpoint == 0:
        return float((-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * h))
    return float((3.0 * vals[-1] - 4.0 * vals[-2] + vals[-3]) / (2.0 * h))


def _vertex_derivatives(u: GraphFunction, vertex: str):
    """Toward-vertex derivative sum D(v) plus the two line-oriented
    derivatives (minus side first) at a degree-2 vertex."""
    grid = u.grid
    inward_sum = 0.0
    oriented = []
    for e, endpoint in grid.graph.incidences(vertex):
        h = grid.edge_grids[e.id].h
        d = _one_sided_derivative(u.values[e.id], h, endpoint)
        inward_sum += d if endpoint == 1 else -d
        # line orientation: first incidence extends to the left of the vertex
        if len(oriented) == 0:
            oriented.append(d if endpoint == 1 else -d)
        else:
            oriented.append(d if endpoint == 0 else -d)
    return inward_sum, oriented


def vertex_condition_residuals(u: GraphFunction, problem: ProblemSpec) -> dict[str, float]:
    """Defect of each vertex coupling, from one-sided differences of u."""
    out = {}
    for v in problem.graph.vertices:
        cond = problem.condition(v)
        inward, oriented = _vertex_derivatives(u, v)
        traces = [u.trace(e.id, ep) for e, ep in problem.graph.incidences(v)]
        if isinstance(cond, DeltaPrime):
            d_minus, d_plus = oriented
            deriv = 0.5 * (d_minus + d_plus)
            out[v] = max(abs(d_plus - d_minus),
                         abs((traces[0] - traces[1]) - cond.beta * deriv))
        elif isinstance(cond, Dipole):
            d_minus, d_plus = oriented
            out[v] = abs(d_minus - cond.tau * d_plus)
        elif isinstance(cond, FulopTsutsui):
            d_minus, d_plus = oriented
            out[v] = abs(d_minus - cond.tau * d_plus - cond.v * traces[0])
        elif isinstance(cond, Delta):
            out[v] = abs(inward - cond.alpha * traces[0])
        elif isinstance(cond, NonlinearDelta):
            t = traces[0]
            out[v] = abs(inward - abs(t) ** (cond.q - 2.0) * t)
        else:
            out[v] = abs(inward)
    return out


def stationary_residual(u: GraphFunction, problem: ProblemSpec, omega: float) -> float:
    """Sup defect of -u'' - |u|^(p-2) u + omega u = 0 plus vertex defects."""
    p = problem.p
    worst = 0.0
    for e in problem.graph.edges:
        h = u.grid.edge_grids[e.id].h
        vals = u.values[e.id]
        interior = vals[1:-1]
        second = (vals[2:] - 2.0 * interior + vals[:-2]) / (h * h)
        res = -second - np.abs(interior) ** (p - 2.0) * interior + omega * interior
        if res.size:
            worst = max(worst, float(np.max(np.abs(res))))
    vres = vertex_condition_residuals(u, problem)
    if vres:
        worst = max(worst, max(vres.values()))
    return worst


# ---------------------------------------------------------------------------
# unboundedness detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivergenceWitness:
    """Concentration scale at which the energy of u_lam = sqrt(lam) u0(lam x)
    drops below the divergence floor."""

    lam: float
    energy: float
    mass: float
    seed_label: str


def _unboundedness_seed(problem: ProblemSpec, grid: Grid, mu: float):
    p = problem.p
    q4_vertices = [v for v, c in problem.special_vertices()
                   if isinstance(c, NonlinearDelta) and c.q == 4.0]
    if p == 6 and q4_vertices and mu < 0.999 * CRITICAL_MASS_P6:
        # corner family: soliton tails phi(|x| + a) matched so the glued state
        # has mass mu; its energy sign flips exactly at the doubly critical mass
        sol = Soliton(6.0, 1.0)
        a = 0.5 * math.atanh(math.sin(math.pi / 2.0 - mu / math.sqrt(3.0)))
        vals = {e.id: np.asarray(sol(grid.coords(e.id) + a)) for e in problem.graph.edges}
        return vals, "soliton-corner"
    if p == 6:
        sol = Soliton(6.0, 1.0)
        vals = {e.id: np.asarray(sol(grid.coords(e.id))) for e in problem.graph.edges}
        return vals, "soliton-bump"
    # pointwise-critical regime: the even exponential saturates the trace
    # inequality |u(0)|^4 <= 2 mu K on the line
    vals = {e.id: np.exp(-grid.coords(e.id)) for e in problem.graph.edges}
    return vals, "exponential-bump"


def detect_unboundedness(problem: ProblemSpec, mu: float,
                         opts: SolverOptions | None = None) -> DivergenceWitness | None:
    """Search the concentration family u_lam(x) = sqrt(lam) u0(lam x).

    The family preserves the discrete mass exactly when the grid is rescaled
    along with the profile, so each term of the discrete energy obeys its
    continuum scaling law and E(lam) can be evaluated in closed form:

        E(lam) = lam^2 K - lam^(p/2-1) P/p + lam V2 - sum_v lam^(q/2) |u0(v)|^q / q

    Returns the first ladder scale lam = 2^k with E(lam) below the divergence
    floor, or None when the energy is increasing past lam = 2^20 ("bounded").
    Only meaningful in a critical regime (p = 6 or some pointwise q = 4).
    """
    opts = opts or SolverOptions()
    if mu <= 0:
        raise ConfigError("mass must be positive")
    q4 = any(isinstance(c, NonlinearDelta) and c.q == 4.0
             for _, c in problem.special_vertices())
    if problem.p != 6.0 and not q4:
        raise InvalidRegimeError(
            "unboundedness detection applies only in a critical regime (p=6 or q=4)")
    grid = Grid.build(problem.graph, h=opts.h,
                      halfline_length=opts.halfline_length, omega_min=1.0)
    disc = Discretization(problem, grid)
    vals, label = _unboundedness_seed(problem, grid, mu)
    x = disc.pack(GraphFunction(grid, vals), check=False)
    x *= math.sqrt(mu / disc.mass_x(x))

    p = problem.p
    kin = disc.kinetic_x(x)
    ppow = disc.lp_x(x, p)
    v2 = disc.quadratic_vertex_terms_x(x)
    qterms = []
    for vd in disc.vertex_dofs:
        if isinstance(vd.condition, NonlinearDelta):
            qterms.append((vd.condition.q, abs(x[vd.dofs[0]]) ** vd.condition.q))

    def energy_at(lam: float) -> float:
        val = lam * lam * kin - lam ** (p / 2.0 - 1.0) * ppow / p + lam * v2
        for q, tq in qterms:
            val -= lam ** (q / 2.0) * tq / q
        return val

    for k in range(0, 21):
        lam = 2.0 ** k
        e = energy_at(lam)
        if e < opts.divergence_floor:
            return DivergenceWitness(lam=lam, energy=e, mass=mu, seed_label=label)
    if energy_at(2.0 ** 21) > energy_at(2.0 ** 20):
        return None
    # still descending but above the floor at 2^20: extend the ladder
    for k in range(21, 200):
        lam = 2.0 ** k
        e = energy_at(lam)
        if e < opts.divergence_floor:
            return DivergenceWitness(lam=lam, energy=e, mass=mu, seed_label=label)
        if energy_at(2.0 * lam) > e:
            return None
    raise RuntimeError("scaling ladder exhausted without a verdict")


# ---------------------------------------------------------------------------
# shared descent machinery
# ---------------------------------------------------------------------------

def _preconditioner(disc: Discretization, shift: float):
    h_mat = (disc.stiffness + shift * sp.diags(disc.dof_weights)).tocsc()
    return splu(h_mat)


def _edge_mass_asymmetry(disc: Discretization, x: np.ndarray) -> float:
    per_edge = list(disc.edge_masses(x).values())
    total = sum(per_edge)
    if total <= 0:
        return 0.0
    return (max(per_edge) - min(per_edge)) / total


def _finish_report(disc, x, omega, opts, *, functional, value, converged,
                   iterations, status, history, label) -> GroundStateReport:
    profile = disc.unpack(x)
    # solver-controlled optimality defect: sup norm of the discrete L2
    # gradient of the action at the (given or recovered) frequency
    resid = float(np.max(np.abs(disc.grad_l2(disc.grad_action_coef(x, omega)))))
    return GroundStateReport(
        profile=profile,
        value=value,
        mass=disc.mass_x(x),
        omega=omega,
        stationarity_residual=resid,
        vertex_residuals=vertex_condition_residuals(profile, disc.problem),
        converged=converged,
        iterations=iterations,
        seed=opts.seed,
        status=status,
        functional=functional,
        branch_label=label,
        asymmetry=_edge_mass_asymmetry(disc, x),
        objective_history=history,
    )


def minimize_energy_mass(problem: ProblemSpec, mu: float,
                         opts: SolverOptions | None = None) -> GroundStateReport:
    """Minimize the energy at fixed mass mu by projected descent.

    The frequency is recovered as the constraint multiplier
    omega = <-grad E(u), u> / mass(u) and convergence is measured by the sup
    norm of grad E(u) + omega u, the discrete stationary-equation defect.
    In a critical regime the scaling test runs first and, on a witness, the
    solve is refused with status ``unbounded-suspected``.
    """
    opts = opts or SolverOptions()
    if mu <= 0:
        raise ConfigError("mass must be positive")
    p = problem.p
    omega_hint = _mass_frequency_hint(p, mu)
    grid = Grid.build(problem.graph, h=opts.h, halfline_length=opts.halfline_length,
                      omega_min=min(1.0, 0.5 * omega_hint))
    disc = Discretization(problem, grid)

    q4 = any(isinstance(c, NonlinearDelta) and c.q == 4.0
             for _, c in problem.special_vertices())
    if p >= 6.0 or q4:
        witness = detect_unboundedness(problem, mu, opts) if (p == 6.0 or q4) else None
        if witness is not None:
            x0 = _seed_dofs(disc, problem, omega_hint, opts)
            x0 *= math.sqrt(mu / disc.mass_x(x0))
            rep = _finish_report(
                disc, x0, omega_hint, opts, functional="energy",
                value=disc.energy_x(x0).total, converged=False, iterations=0,
                status="unbounded-suspected", history=[], label="ground")
            return rep

    x = _seed_dofs(disc, problem, omega_hint, opts)
    x *= math.sqrt(mu / disc.mass_x(x))
    sym = _symmetrizer(disc) if opts.symmetrize else None
    if sym is not None:
        x = sym(x)
        x *= math.sqrt(mu / disc.mass_x(x))
    lu = _preconditioner(disc, 1.0)

    energy_val = disc.energy_x(x).total
    history = [energy_val]
    status, converged = "max-iterations", False
    omega = omega_hint
    iterations = 0

    for iterations in range(1, opts.max_iterations + 1):
        gcoef = disc.grad_energy_coef(x)
        omega = -float(np.dot(gcoef, x)) / mu
        resid = disc.grad_l2(gcoef) + omega * x
        if float(np.max(np.abs(resid))) <= opts.gradient_tolerance:
            status, converged = "converged", True
            break

        # steepest descent in the H-metric restricted to the mass-tangent
        # space: H d = -g + nu W x with <W x, d> = 0, so <g, d> = -<d, H d> < 0
        wx = disc.dof_weights * x
        y = lu.solve(gcoef)
        z = lu.solve(wx)
        nu = float(np.dot(wx, y)) / float(np.dot(wx, z))
        d = -(y - nu * z)
        slope = float(np.dot(gcoef, d))
        if slope >= 0.0:
            d = -disc.grad_l2(gcoef)
            d -= (float(np.dot(wx, d)) / mu) * x
            slope = float(np.dot(gcoef, d))
            if slope >= 0.0:
                status, converged = "stalled", False
                break

        eta = opts.step_init
        accepted = False
        noise = 1e-13 * (1.0 + abs(energy_val))
        while eta >= opts.min_step:
            xn = x + eta * d
            if sym is not None:
                xn = sym(xn)
            xn *= math.sqrt(mu / disc.mass_x(xn))
            e_new = disc.energy_x(xn).total
            predicted = opts.armijo * eta * slope
            # once the predicted decrease is below evaluation roundoff, any
            # non-increase (to roundoff) counts as an accepted step
            if e_new <= energy_val + predicted or (
                    predicted > -noise and e_new <= energy_val + noise):
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            status = "stalled"
            break
        assert e_new <= energy_val + 1e-12 * (1.0 + abs(energy_val)), \
            "descent step increased the energy"
        x, energy_val = xn, e_new
        history.append(energy_val)
        if energy_val < opts.divergence_floor:
            status = "unbounded-suspected"
            break

    gcoef = disc.grad_energy_coef(x)
    omega = -float(np.dot(gcoef, x)) / mu
    return _finish_report(
        disc, x, omega, opts, functional="energy", value=disc.energy_x(x).total,
        converged=converged, iterations=iterations, status=status,
        history=history, label="ground")


# ---------------------------------------------------------------------------
# Nehari solver
# ---------------------------------------------------------------------------

def frequency_threshold(problem: ProblemSpec) -> float:
    """Least admissible frequency for the action problem on this graph."""
    thr = 0.0
    for v, cond in problem.special_vertices():
        if isinstance(cond, Delta):
            thr = max(thr, omega_min_delta(cond.alpha))
        elif isinstance(cond, DeltaPrime):
            thr = max(thr, 4.0 / cond.beta**2)
        elif isinstance(cond, FulopTsutsui):
            thr = max(thr, omega_min_ft(cond.tau, cond.v))
    return thr


def _nehari_rescale(disc: Discretization, x: np.ndarray, omega: float) -> np.ndarray:
    p = disc.problem.p
    q_form = disc.quadratic_form_x(x, omega)
    ppow = disc.lp_x(x, p)
    if q_form <= 0.0:
        raise DegenerateQuadraticFormError(
            "quadratic part of the action is nonpositive on the trial state")
    if ppow <= 0.0:
        raise DegenerateQuadraticFormError("trial state vanishes")
    qterms = [(vd.condition.q, abs(x[vd.dofs[0]]) ** vd.condition.q)
              for vd in disc.vertex_dofs if isinstance(vd.condition, NonlinearDelta)]
    if not qterms:
        t = (q_form / ppow) ** (1.0 / (p - 2.0))
    else:
        def constraint(t):
            val = q_form - t ** (p - 2.0) * ppow
            for q, tq in qterms:
                val -= t ** (q - 2.0) * tq
            return val
        hi = 1.0
        while constraint(hi) > 0.0:
            hi *= 2.0
        t = brentq(constraint, 1e-12, hi, xtol=1e-15, rtol=1e-15)
    return t * x


def _nehari_descent(disc: Discretization, omega: float, opts: SolverOptions,
                    asym: bool) -> GroundStateReport:
    problem = disc.problem
    x = _seed_dofs(disc, problem, omega, opts, asym=asym)
    sym = _symmetrizer(disc) if opts.symmetrize else None
    if sym is not None:
        x = sym(x)
    x = _nehari_rescale(disc, x, omega)
    lu = _preconditioner(disc, omega)

    s_val = disc.action_x(x, omega)
    history = [s_val]
    status, converged = "max-iterations", False
    iterations = 0

    for iterations in range(1, opts.max_iterations + 1):
        gcoef = disc.grad_action_coef(x, omega)
        if float(np.max(np.abs(disc.grad_l2(gcoef)))) <= opts.gradient_tolerance:
            status, converged = "converged", True
            break
        d = -lu.solve(gcoef)
        slope = float(np.dot(gcoef, d))
        if slope >= 0.0:
            d = -disc.grad_l2(gcoef)
            slope = float(np.dot(gcoef, d))
            if slope >= 0.0:
                status = "stalled"
                break
        eta = opts.step_init
        accepted = False
        noise = 1e-13 * (1.0 + abs(s_val))
        while eta >= opts.min_step:
            xn = x + eta * d
            if sym is not None:
                xn = sym(xn)
            try:
                xn = _nehari_rescale(disc, xn, omega)
            except DegenerateQuadraticFormError:
                eta *= 0.5
                continue
            s_new = disc.action_x(xn, omega)
            predicted = opts.armijo * eta * slope
            if s_new <= s_val + predicted or (
                    predicted > -noise and s_new <= s_val + noise):
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            status = "stalled"
            break
        assert s_new <= s_val + 1e-12 * (1.0 + abs(s_val)), \
            "descent step increased the action"
        x, s_val = xn, s_new
        history.append(s_val)

    x = _nehari_rescale(disc, x, omega)
    s_val = disc.action_x(x, omega)
    p = problem.p
    gap = abs(s_val - (p - 2.0) / (2.0 * p) * disc.lp_x(x, p))
    rep = _finish_report(
        disc, x, omega, opts, functional="action", value=s_val,
        converged=converged, iterations=iterations, status=status,
        history=history, label="even")
    rep.nehari_residual = abs(disc.nehari_x(x, omega))
    rep.self_consistency_gap = gap
    return rep


def minimize_action_nehari(problem: ProblemSpec, omega: float,
                           opts: SolverOptions | None = None) -> GroundStateReport:
    """Minimize the action S_omega on the Nehari constraint I_omega(u) = 0.

    Refuses frequencies at or below the linear threshold of the coupling
    (alpha^2/4 for Delta, 4/beta^2 for DeltaPrime, v^2/(tau^2+1)^2 for the
    weighted delta).  For DeltaPrime above its symmetry-breaking frequency a
    second descent runs from an asymmetric seed (left amplitude doubled); the
    lower branch is returned with the other attached in ``alternates``, and
    neither is dropped when their actions agree to 1e-9.
    """
    opts = opts or SolverOptions()
    thr = frequency_threshold(problem)
    if omega <= thr:
        raise ThresholdError(
            f"no stationary state expected: omega = {omega:.6g} is at or below "
            f"the linear threshold {thr:.6g}")
    grid = Grid.build(problem.graph, h=opts.h, halfline_length=opts.halfline_length,
                      omega_min=omega)
    disc = Discretization(problem, grid)

    dp = [c for _, c in problem.special_vertices() if isinstance(c, DeltaPrime)]
    primary = _nehari_descent(disc, omega, opts, asym=False)
    if dp:
        primary.branch_label = "odd" if primary.asymmetry < 1e-4 else "asymmetric"
        if omega > delta_prime_bifurcation(dp[0].beta, problem.p):
            second = _nehari_descent(disc, omega, opts, asym=True)
            second.branch_label = "odd" if second.asymmetry < 1e-4 else "asymmetric"
            best, other = ((second, primary) if second.value < primary.value
                           else (primary, second))
            if abs(primary.value - second.value) <= 1e-9:
                best.status += "+degenerate-pair"
            best.alternates = (other,)
            return best
    return primary
