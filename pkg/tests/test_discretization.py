import io
import math

import numpy as np
import pytest

from graphnls import (
    ConfigError,
    Delta,
    DeltaPrime,
    Dipole,
    Discretization,
    FulopTsutsui,
    GraphFunction,
    Grid,
    Kirchhoff,
    NonlinearDelta,
    ProblemSpec,
    Soliton,
    action,
    delta_shift,
    energy,
    gradient,
    inner,
    line_graph,
    mass,
    nehari,
    soliton_energy,
    star_graph,
    stationary_residual,
)

LINE = line_graph()


def line_problem(cond=None, p=4.0):
    conds = {} if cond is None else {"v0": cond}
    return ProblemSpec(LINE, conds, p=p)


def soliton_on_line(grid, p=4.0, omega=1.0):
    sol = Soliton(p, omega)
    return GraphFunction.from_callables(grid, {"minus": sol, "plus": sol})


def random_state(problem, grid, rng):
    """Random smooth decaying profile canonicalized into the constraint space."""
    disc = Discretization(problem, grid)
    vals = {}
    for e in grid.graph.edges:
        x = grid.coords(e.id)
        c, w, a = rng.uniform(0.3, 2.0), rng.uniform(0.5, 2.0), rng.uniform(-1.5, 1.5)
        vals[e.id] = a * np.exp(-((x - c) ** 2) / (2 * w * w))
    x = disc.pack(GraphFunction(grid, vals), check=False)
    return disc, x


# ---------------------------------------------------------------------------
# mass
# ---------------------------------------------------------------------------

def test_mass_zero_function():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    assert mass(GraphFunction(grid)) == 0.0


def test_mass_cubic_soliton():
    grid = Grid.build(LINE, h=0.01, halfline_length=20)
    assert mass(soliton_on_line(grid)) == pytest.approx(4.0, abs=1e-4)


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_mass_p6_soliton_omega_independent(omega):
    grid = Grid.build(LINE, h=0.01, halfline_length=24 / math.sqrt(omega))
    u = soliton_on_line(grid, p=6.0, omega=omega)
    assert mass(u) == pytest.approx(math.sqrt(3) / 2 * math.pi, abs=1e-4)


def test_mass_sign_flip_and_permutation_invariance():
    grid = Grid.build(star_graph(3), h=0.02, halfline_length=12)
    rng = np.random.default_rng(3)
    prob = ProblemSpec(star_graph(3), {"v0": Delta(1.0)}, p=4)
    disc, x = random_state(prob, grid, rng)
    u = disc.unpack(x)
    flipped = GraphFunction(grid, {k: -v for k, v in u.values.items()})
    assert mass(flipped) == mass(u)
    perm = GraphFunction(grid, {"e1": u.values["e2"], "e2": u.values["e3"],
                                "e3": u.values["e1"]})
    assert mass(perm) == pytest.approx(mass(u), rel=1e-14)


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def test_energy_zero_function():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    assert energy(GraphFunction(grid), line_problem()).total == 0.0


def test_energy_soliton_vs_closed_form():
    grid = Grid.build(LINE, h=0.01, halfline_length=20)
    val = energy(soliton_on_line(grid), line_problem()).total
    ref = soliton_energy(4, 1.0)
    assert val == pytest.approx(ref, rel=1e-4)


def test_energy_delta_term_is_exact_trace_shift():
    grid = Grid.build(LINE, h=0.01, halfline_length=20)
    u = soliton_on_line(grid)
    free = energy(u, line_problem()).total
    held = energy(u, line_problem(Delta(1.0))).total
    # u(0)^2 = 2 for the omega=1 cubic soliton, so the shift is exactly -1
    assert held - free == pytest.approx(-1.0, abs=1e-12)


def test_energy_delta_zero_equals_kirchhoff_exactly():
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    rng = np.random.default_rng(11)
    for _ in range(5):
        disc, x = random_state(line_problem(), grid, rng)
        u = disc.unpack(x)
        assert energy(u, line_problem(Delta(0.0))).total == \
            energy(u, line_problem(Kirchhoff())).total


def test_energy_rejects_invalid_problem():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    u = GraphFunction(grid)
    with pytest.raises(ConfigError):
        energy(u, line_problem(p=2.0))


def test_energy_rejects_broken_trace_constraint():
    prob = line_problem(FulopTsutsui(2.0, 1.0))
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    vals = {"minus": np.exp(-grid.coords("minus")),
            "plus": np.exp(-grid.coords("plus"))}  # ratio 1, not tau=2
    with pytest.raises(ConfigError):
        energy(GraphFunction(grid, vals), prob)


def test_kirchhoff_line_equals_single_interval():
    # graph energy of a continuous profile == plain interval energy,
    # same quadrature nodes
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    rng = np.random.default_rng(5)
    disc, x = random_state(line_problem(), grid, rng)
    u = disc.unpack(x)
    got = energy(u, line_problem())

    left = u.values["minus"][::-1]
    full = np.concatenate([left[:-1], u.values["plus"]])
    h = grid.edge_grids["minus"].h
    d = np.diff(full) / h
    kin = 0.5 * h * np.dot(d, d)
    w = np.full(len(full), h)
    w[0] = w[-1] = h / 2
    lp = np.dot(w, np.abs(full) ** 4) / 4
    assert got.kinetic == pytest.approx(kin, rel=1e-13)
    assert got.lp_term == pytest.approx(lp, rel=1e-13)


def test_dipole_tau_to_one_approaches_continuity():
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    sol = Soliton(4, 1.0)
    base = GraphFunction.from_callables(grid, {"minus": sol, "plus": sol})
    free = energy(base, line_problem()).total
    for tau in (1 + 1e-6, 1 - 1e-6):
        prob = line_problem(Dipole(tau))
        disc = Discretization(prob, grid)
        vals = {"minus": np.asarray(sol(grid.coords("minus"))),
                "plus": tau * np.asarray(sol(grid.coords("plus")))}
        val = energy(GraphFunction(grid, vals), prob).total
        assert val == pytest.approx(free, rel=1e-4)


def test_ft_tau_to_one_approaches_delta():
    # the weighted delta with tau -> 1 degenerates to a plain delta of
    # strength v (tau = 1 itself is outside the parameter domain)
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    sol = Soliton(4, 1.0)
    u = GraphFunction.from_callables(grid, {"minus": sol, "plus": sol})
    ref = energy(u, line_problem(Delta(1.0))).total
    tau = 1 + 1e-9
    prob = line_problem(FulopTsutsui(tau, 1.0))
    vals = {"minus": np.asarray(sol(grid.coords("minus"))),
            "plus": tau * np.asarray(sol(grid.coords("plus")))}
    val = energy(GraphFunction(grid, vals), prob).total
    assert val == pytest.approx(ref, rel=1e-6)


# ---------------------------------------------------------------------------
# action / Nehari
# ---------------------------------------------------------------------------

def test_action_at_zero_frequency_is_energy():
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    rng = np.random.default_rng(7)
    for _ in range(5):
        disc, x = random_state(line_problem(Delta(0.7)), grid, rng)
        u = disc.unpack(x)
        assert action(u, line_problem(Delta(0.7)), 0.0) == \
            energy(u, line_problem(Delta(0.7))).total


def test_action_soliton_nehari_identity():
    # at a stationary state, I = 0 and S = (p-2)/(2p) |u|_p^p
    grid = Grid.build(LINE, h=0.01, halfline_length=20)
    u = soliton_on_line(grid)
    prob = line_problem()
    assert abs(nehari(u, prob, 1.0)) <= 1e-3
    from graphnls.discretization import lp_norm_pp
    s = action(u, prob, 1.0)
    assert abs(s - 0.25 * lp_norm_pp(u, 4.0)) <= 1e-3


def test_nehari_zero_function():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    assert nehari(GraphFunction(grid), line_problem(), 1.0) == 0.0


def test_nehari_of_analytic_delta_state():
    grid = Grid.build(LINE, h=0.005, halfline_length=20)
    st = delta_shift(1.0, 2, 4, 1.0)
    u = GraphFunction.from_callables(
        grid, {"minus": lambda x: st.edge_profile(0, x),
               "plus": lambda x: st.edge_profile(1, x)})
    assert abs(nehari(u, line_problem(Delta(1.0)), 1.0)) <= 1e-3


@pytest.mark.parametrize("cond", [None, Delta(1.3), DeltaPrime(0.8),
                                  FulopTsutsui(2.0, 1.0)])
def test_nehari_scaling_homogeneity(cond):
    # I(t u) = t^2 Q - t^p P for purely quadratic vertex couplings
    prob = line_problem(cond)
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    rng = np.random.default_rng(13)
    disc, x = random_state(prob, grid, rng)
    q_form = disc.quadratic_form_x(x, 1.5)
    ppow = disc.lp_x(x, 4.0)
    for t in (0.5, 2.0):
        direct = disc.nehari_x(t * x, 1.5)
        predicted = t * t * q_form - t**4 * ppow
        assert direct == pytest.approx(predicted, rel=1e-12)


def test_nehari_nonlinear_delta_extension():
    # pointwise powers enter with their own exponent
    prob = line_problem(NonlinearDelta(3.0))
    grid = Grid.build(LINE, h=0.02, halfline_length=12)
    rng = np.random.default_rng(17)
    disc, x = random_state(prob, grid, rng)
    q_form = disc.quadratic_form_x(x, 1.5)
    ppow = disc.lp_x(x, 4.0)
    rq = disc.pointwise_powers_x(x)
    for t in (0.5, 2.0):
        direct = disc.nehari_x(t * x, 1.5)
        predicted = t * t * q_form - t**4 * ppow - t**3 * rq
        assert direct == pytest.approx(predicted, rel=1e-12)


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

CONDITIONS = [None, Delta(1.0), Delta(-0.8), DeltaPrime(1.0), Dipole(2.0),
              FulopTsutsui(2.0, 1.0), NonlinearDelta(3.0)]


def test_gradient_zero_function():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    g = gradient(GraphFunction(grid), line_problem(), omega=1.0)
    assert all(np.all(v == 0) for v in g.values.values())


def test_gradient_matches_directional_derivative():
    # 20 random (state, direction) pairs across the coupling zoo;
    # centered finite differences with step 1e-6
    rng = np.random.default_rng(23)
    checked = 0
    for cond in CONDITIONS:
        prob = line_problem(cond)
        grid = Grid.build(LINE, h=0.05, halfline_length=10)
        disc = Discretization(prob, grid)
        for _ in range(3):
            _, x = random_state(prob, grid, rng)
            d = rng.standard_normal(len(x))
            for omega in (None, 1.3):
                gc = (disc.grad_energy_coef(x) if omega is None
                      else disc.grad_action_coef(x, omega))
                eps = 1e-6
                if omega is None:
                    fp = disc.energy_x(x + eps * d).total
                    fm = disc.energy_x(x - eps * d).total
                else:
                    fp = disc.action_x(x + eps * d, omega)
                    fm = disc.action_x(x - eps * d, omega)
                fd = (fp - fm) / (2 * eps)
                got = float(np.dot(gc, d))
                assert got == pytest.approx(fd, rel=1e-5, abs=1e-9)
                checked += 1
    assert checked >= 20


def test_gradient_l2_pairing_matches_inner_product():
    # <grad, d>_{L2} equals the coefficient pairing for admissible directions
    prob = line_problem(Delta(1.0))
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    rng = np.random.default_rng(29)
    disc, x = random_state(prob, grid, rng)
    _, dx = random_state(prob, grid, rng)
    g = gradient(disc.unpack(x), prob, omega=1.0)
    lhs = inner(g, disc.unpack(dx))
    rhs = float(np.dot(disc.grad_action_coef(x, 1.0), dx))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_gradient_small_at_analytic_stationary_state():
    # the L2-lifted action gradient of the sampled analytic state vanishes
    # linearly in h: interior components are O(h^2) but the vertex trace
    # carries the lumped-mass defect (h/3) |phi'''(a)| ~ 0.71 h
    st = delta_shift(1.0, 2, 4, 1.0)
    sups = {}
    for h in (0.01, 0.005):
        grid = Grid.build(LINE, h=h, halfline_length=24)
        u = GraphFunction.from_callables(
            grid, {"minus": lambda x: st.edge_profile(0, x),
                   "plus": lambda x: st.edge_profile(1, x)})
        g = gradient(u, line_problem(Delta(1.0)), omega=1.0)
        sups[h] = max(np.max(np.abs(v)) for v in g.values.values())
        assert sups[h] <= 1.0 * h
    assert sups[0.005] <= 0.6 * sups[0.01]
    # the unlifted (coefficient) pairing defect is O(h^2) and meets 1e-3
    grid = Grid.build(LINE, h=0.005, halfline_length=24)
    u = GraphFunction.from_callables(
        grid, {"minus": lambda x: st.edge_profile(0, x),
               "plus": lambda x: st.edge_profile(1, x)})
    disc = Discretization(line_problem(Delta(1.0)), grid)
    gc = disc.grad_action_coef(disc.pack(u), 1.0)
    assert np.max(np.abs(gc)) <= 1e-3


# ---------------------------------------------------------------------------
# residual consistency
# ---------------------------------------------------------------------------

def test_stationary_residual_zero_function():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    assert stationary_residual(GraphFunction(grid), line_problem(), 1.0) == 0.0


def test_stationary_residual_second_order_consistency():
    prob = line_problem()
    res = {}
    for h in (0.02, 0.01):
        grid = Grid.build(LINE, h=h, halfline_length=20)
        res[h] = stationary_residual(soliton_on_line(grid), prob, 1.0)
        assert res[h] <= 10.0 * h * h
    assert res[0.01] <= 0.35 * res[0.02]  # ~4x reduction when halving h


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_graph_function_csv_roundtrip(tmp_path):
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    u = soliton_on_line(grid)
    path = tmp_path / "profile.csv"
    u.to_csv(path)
    back = GraphFunction.from_csv(path, grid)
    assert u.sup_distance(back) <= 1e-15


def test_graph_function_csv_header_metadata():
    grid = Grid.build(LINE, h=0.05, halfline_length=10)
    buf = io.StringIO()
    soliton_on_line(grid).to_csv(buf)
    text = buf.getvalue()
    assert text.splitlines()[2] == "edge,x,value"
    assert "# grid edge=minus h=0.05" in text
