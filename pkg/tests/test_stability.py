import numpy as np
import pytest

from graphnls import (
    BranchCurve,
    ConfigError,
    Delta,
    DeltaPrime,
    FulopTsutsui,
    ProblemSpec,
    SolverOptions,
    action_curve,
    classify,
    line_graph,
    mass_curve_slope,
)
from graphnls.oracle import delta_prime_bifurcation

LINE = line_graph()


def line_problem(cond=None, p=4.0):
    return ProblemSpec(LINE, {} if cond is None else {"v0": cond}, p=p)


def test_delta_attractive_all_stable_and_gss_identity():
    curve = action_curve(line_problem(Delta(1.0)), (0.3, 5.0), 20)
    assert len(curve) == 20
    assert np.all(np.diff(curve.omegas) > 0)
    assert curve.nehari_residuals.max() <= 1e-8
    cls = classify(curve)
    assert all(v == "stable" for v in cls.verdicts)
    assert cls.transitions == []
    # d'(omega) = mass/2 within 3 percent at interior samples
    dw = curve.omegas[1] - curve.omegas[0]
    dprime = (curve.d_values[2:] - curve.d_values[:-2]) / (2 * dw)
    rel = np.abs(dprime - 0.5 * curve.masses[1:-1]) / (0.5 * curve.masses[1:-1])
    assert rel.max() <= 0.03


def test_delta_p7_single_transition():
    curve = action_curve(line_problem(Delta(1.0), p=7.0), (0.3, 6.0), 25)
    cls = classify(curve)
    stable_to_unstable = [t for t in cls.transitions if t[1] == "stable"]
    assert len(stable_to_unstable) == 1
    w, _, _ = stable_to_unstable[0]
    assert w > 0.25  # above the linear threshold; no closed-form target exists


def test_curve_truncated_below_existence_threshold():
    # alpha=1: tail state needs omega > 0.25
    curve = action_curve(line_problem(Delta(1.0)), (0.1, 1.0), 10)
    assert len(curve) < 10
    assert curve.notes
    assert np.all(curve.omegas > 0.25)


def test_delta_prime_branches_across_bifurcation():
    prob = line_problem(DeltaPrime(1.0))
    wstar = delta_prime_bifurcation(1.0, 4.0)
    odd = action_curve(prob, (4.5, 12.0), 16, branch="odd")
    assert len(odd) == 16  # the odd branch crosses omega* intact
    asym = action_curve(prob, (4.5, 12.0), 16, branch="asymmetric")
    assert len(asym) < 16
    assert np.all(asym.omegas > wstar)
    # ground branch: asymmetric action below odd action above omega*
    for w, d in zip(asym.omegas, asym.d_values):
        k = np.argmin(np.abs(odd.omegas - w))
        assert d < odd.d_values[k]


def test_classify_needs_enough_samples():
    curve = BranchCurve(np.array([1.0, 2.0, 3.0]), np.zeros(3), np.ones(3),
                        "even", np.zeros(3))
    with pytest.raises(ConfigError):
        classify(curve)


def test_classify_constant_curve_undecided():
    w = np.linspace(1, 2, 9)
    curve = BranchCurve(w, np.full(9, 3.7), np.ones(9), "even", np.zeros(9))
    cls = classify(curve)
    assert all(v == "undecided" for v in cls.verdicts)
    assert cls.transitions == []


def test_classify_scale_invariance():
    curve = action_curve(line_problem(Delta(1.0)), (0.5, 3.0), 9)
    base = classify(curve).verdicts
    scaled = BranchCurve(curve.omegas, 1e6 * curve.d_values, curve.masses,
                         curve.label, curve.nehari_residuals)
    assert classify(scaled).verdicts == base


def test_empty_range_rejected():
    with pytest.raises(ConfigError):
        action_curve(line_problem(Delta(1.0)), (2.0, 2.0), 10)
    with pytest.raises(ConfigError):
        action_curve(line_problem(Delta(1.0)), (0.5, 3.0), 4)


def test_mass_slope_kirchhoff_line():
    # p=4: mass 4 sqrt(w) increases; p=6: mass is frequency-independent
    p4 = action_curve(line_problem(), (0.5, 3.0), 8)
    assert all(s == 1 for s in mass_curve_slope(p4).signs)
    p6 = action_curve(line_problem(p=6.0), (0.5, 3.0), 8)
    assert all(s == 0 for s in mass_curve_slope(p6).signs)


def test_mass_slope_needs_samples():
    curve = BranchCurve(np.array([1.0, 2.0]), np.zeros(2), np.ones(2),
                        "even", np.zeros(2))
    with pytest.raises(ConfigError):
        mass_curve_slope(curve)


@pytest.mark.slow
def test_ft_p7_mass_curve_solver_route():
    # solver-backed curve for the discontinuous coupling at p=7; the located
    # slope sign change is a conjectured stability boundary, not a theorem
    prob = line_problem(FulopTsutsui(2.0, 1.0), p=7.0)
    curve = action_curve(prob, (0.5, 6.0), 8, opts=SolverOptions(h=0.02),
                         use_oracle=False)
    assert len(curve) >= 5
    slope = mass_curve_slope(curve)
    assert len(slope.signs) == len(curve) - 1
