"""Branch curves d(omega) and the d''-sign stability surrogate.

Orbital stability of a standing-wave branch is approximated here by the
convexity of the ground-state action level omega -> d(omega): positive second
differences are reported "stable", negative "unstable".  This is a surrogate
for the full spectral criterion, so verdicts are labelled as such and come
with the companion diagnostic d'(omega) = mass/2 (checked, not assumed) and
the slope of the mass curve omega -> |u_omega|^2.

Branch states come from the closed-form constructions where one exists
(delta and delta-prime on stars of halflines) and from the Nehari solver
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .graphs import ConfigError, Delta, DeltaPrime, Kirchhoff, ProblemSpec
from .oracle import (
    SecularSolution,
    delta_prime_branches,
    delta_shift,
    delta_threshold,
)
from .solver import SolverOptions, ThresholdError, minimize_action_nehari

GSS_SURROGATE_NOTE = "GSS-surrogate"


@dataclass
class BranchCurve:
    omegas: np.ndarray
    d_values: np.ndarray
    masses: np.ndarray
    label: str
    nehari_residuals: np.ndarray
    notes: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.omegas)


def _oracle_route(problem: ProblemSpec):
    """(kind, condition, n_halflines) when a closed-form branch is available."""
    graph = problem.graph
    if len(graph.vertices) != 1 or not all(e.is_halfline for e in graph.edges):
        return None
    center = graph.vertices[0]
    cond = problem.condition(center)
    n = graph.degree(center)
    if isinstance(cond, Kirchhoff):
        return ("delta", Delta(0.0), n)
    if isinstance(cond, Delta):
        return ("delta", cond, n)
    if isinstance(cond, DeltaPrime):
        return ("delta_prime", cond, n)
    return None


def _quad_nehari_defect(problem: ProblemSpec, state: SecularSolution, omega: float) -> float:
    """|I_omega| of a closed-form state, assembled from tail quadratures."""
    sol = state.soliton
    kin = 0.0
    for a in state.shifts:
        val, _ = quad(lambda x: float(sol.derivative(x + a)) ** 2, 0.0,
                      60.0 / sol.inverse_width, epsabs=1e-12, epsrel=1e-12, limit=200)
        kin += val
    mass_val = state.mass()
    ppow = state.lp_norm_pp()
    traces = state.traces()
    vertex2 = 0.0
    center = problem.graph.vertices[0]
    cond = problem.condition(center)
    if isinstance(cond, Delta):
        vertex2 = -cond.alpha * traces[0] ** 2
    elif isinstance(cond, DeltaPrime):
        jump = traces[1] - traces[0]
        vertex2 = -jump * jump / cond.beta
    return abs(kin + omega * mass_val + vertex2 - ppow)


def _oracle_states(kind, cond, n, problem, omega, branch):
    if kind == "delta":
        state = delta_shift(cond.alpha, n, problem.p, omega)
        if not state.exists:
            return []
        return [state] if branch in ("auto", "even", "ntail") else []
    states = delta_prime_branches(cond.beta, problem.p, omega)
    if branch == "odd":
        return [s for s in states if s.label == "odd"]
    if branch == "asymmetric":
        return [s for s in states if s.label == "asymmetric"][:1]
    # ground branch: lowest action
    return sorted(states, key=lambda s: s.action())[:1]


def action_curve(problem: ProblemSpec, omega_range: tuple[float, float],
                 samples: int, branch: str = "auto",
                 opts: SolverOptions | None = None,
                 use_oracle: bool = True) -> BranchCurve:
    """Sample (omega, d(omega), mass(omega)) for one branch on a uniform grid.

    Frequencies where the requested branch does not exist are dropped and the
    truncation is recorded in ``notes``.
    """
    lo, hi = omega_range
    if not (hi > lo):
        raise ConfigError("empty frequency range")
    if samples < 5:
        raise ConfigError("need at least 5 samples")
    omegas = np.linspace(lo, hi, samples)
    route = _oracle_route(problem) if use_oracle else None

    kept, dvals, masses, resids, notes = [], [], [], [], []
    label = branch
    for w in omegas:
        if route is not None:
            kind, cond, n = route
            states = _oracle_states(kind, cond, n, problem, float(w), branch)
            if not states:
                notes.append(f"branch {branch!r} absent at omega={w:.6g}; truncated")
                continue
            state = states[0]
            label = state.label if branch == "auto" else branch
            kept.append(float(w))
            dvals.append(state.action())
            masses.append(state.mass())
            resids.append(_quad_nehari_defect(problem, state, float(w)))
        else:
            try:
                rep = minimize_action_nehari(problem, float(w), opts)
            except (ThresholdError, ConfigError) as exc:
                notes.append(f"omega={w:.6g}: {exc}")
                continue
            if not rep.converged:
                notes.append(f"omega={w:.6g}: solver did not converge; truncated")
                continue
            label = rep.branch_label if branch == "auto" else branch
            kept.append(float(w))
            dvals.append(rep.value)
            masses.append(rep.mass)
            resids.append(rep.nehari_residual or 0.0)
    return BranchCurve(
        omegas=np.array(kept), d_values=np.array(dvals), masses=np.array(masses),
        label=label, nehari_residuals=np.array(resids), notes=notes)


@dataclass
class Classification:
    omegas: np.ndarray       # interior sample frequencies
    d2: np.ndarray           # second central differences of d
    verdicts: list[str]      # stable | unstable | undecided (surrogate)
    transitions: list[tuple[float, str, str]]
    note: str = GSS_SURROGATE_NOTE


def _uniform_spacing(omegas: np.ndarray) -> float:
    if len(omegas) < 3:
        raise ConfigError("need at least 3 samples")
    diffs = np.diff(omegas)
    if np.any(diffs <= 0):
        raise ConfigError("frequencies must be strictly increasing")
    if np.max(diffs) - np.min(diffs) > 1e-9 * np.max(diffs):
        raise ConfigError("classification requires a uniform frequency grid")
    return float(diffs[0])


def classify(curve: BranchCurve) -> Classification:
    """Per-sample stability verdict from the sign of d''(omega).

    tol scales with the curve magnitude so the call is invariant under
    rescaling d by a positive constant.
    """
    if len(curve) < 5:
        raise ConfigError("need at least 5 samples to classify")
    dw = _uniform_spacing(curve.omegas)
    d = curve.d_values
    d2 = (d[:-2] - 2.0 * d[1:-1] + d[2:]) / (dw * dw)
    tol = 1e-6 * float(np.max(np.abs(d))) if np.max(np.abs(d)) > 0 else 1e-30
    verdicts = ["stable" if v > tol else ("unstable" if v < -tol else "undecided")
                for v in d2]
    omegas = curve.omegas[1:-1]
    transitions = []
    for i in range(len(d2) - 1):
        a, b = d2[i], d2[i + 1]
        if verdicts[i] == "undecided" or verdicts[i + 1] == "undecided":
            continue
        if verdicts[i] != verdicts[i + 1]:
            w = omegas[i] + (omegas[i + 1] - omegas[i]) * (a / (a - b))
            transitions.append((float(w), verdicts[i], verdicts[i + 1]))
    return Classification(omegas=omegas, d2=d2, verdicts=verdicts,
                          transitions=transitions)


@dataclass
class MassSlope:
    midpoints: np.ndarray
    slopes: np.ndarray
    signs: list[int]          # +1 / -1 / 0 per interval
    sign_changes: list[float]  # interpolated frequencies where the slope flips


def mass_curve_slope(curve: BranchCurve) -> MassSlope:
    """Finite-difference slope signs of omega -> mass(omega).

    A located sign change is the candidate frequency where the branch sheds
    (or regains) the mass-monotonicity that underpins the d''-criterion.
    """
    if len(curve) < 3:
        raise ConfigError("need at least 3 samples")
    w = curve.omegas
    m = curve.masses
    slopes = np.diff(m) / np.diff(w)
    mid = 0.5 * (w[:-1] + w[1:])
    tol = 1e-6 * float(np.max(np.abs(m))) / max(w[-1] - w[0], 1e-30)
    signs = [1 if s > tol else (-1 if s < -tol else 0) for s in slopes]
    changes = []
    for i in range(len(slopes) - 1):
        if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]:
            a, b = slopes[i], slopes[i + 1]
            changes.append(float(mid[i] + (mid[i + 1] - mid[i]) * (a / (a - b))))
    return MassSlope(midpoints=mid, slopes=slopes, signs=signs, sign_changes=changes)
