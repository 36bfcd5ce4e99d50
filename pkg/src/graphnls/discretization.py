"""Mesh, graph functions, and the discrete energy/action/constraint machinery.

Each edge is sampled on a uniform grid; halflines are truncated at a length L
with a homogeneous Dirichlet value at the cut (ground states decay like
exp(-sqrt(omega) x), so the default L = 24/sqrt(omega_min) leaves a tail below
1e-10).  Derivatives are forward differences on cells and integrals use the
trapezoid rule, which makes the discrete energy exactly the P1 finite-element
energy: minimizing it is a well-posed finite-dimensional problem.

Vertex coupling enters twice:

* through the function space -- continuous couplings share one trace value,
  Dipole/FulopTsutsui eliminate the plus trace as tau * (minus trace),
  DeltaPrime leaves both traces free;
* through vertex energy terms -- -(alpha/2) u(v)^2 for Delta,
  -(1/(2 beta)) (u(+) - u(-))^2 for DeltaPrime, -(v/2) u(-)^2 for
  FulopTsutsui, -(1/q) |u(v)|^q for NonlinearDelta, nothing for Kirchhoff
  and Dipole.

The tau-weighted derivative matching of the Dipole coupling is not imposed;
it emerges as the natural condition of this discrete energy.  Functions with
jumps live in the broken space (edge-wise H1); no cross-vertex regularity is
assumed beyond the trace constraints above.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .graphs import (
    ConfigError,
    Delta,
    DeltaPrime,
    Dipole,
    FulopTsutsui,
    Kirchhoff,
    MetricGraph,
    NonlinearDelta,
    ProblemSpec,
    validate,
)

DEFAULT_SPACING = 0.01
DECAY_BUDGET = 24.0  # exp(-24) ~ 4e-11 tail at the truncated end


@dataclass(frozen=True)
class EdgeGrid:
    h: float
    n: int  # intervals; n+1 nodes
    length: float
    truncated: bool  # halfline cut at `length`, Dirichlet 0 there


class Grid:
    """Per-edge uniform grids for a metric graph."""

    def __init__(self, graph: MetricGraph, edge_grids: dict[str, EdgeGrid]):
        self.graph = graph
        self.edge_grids = dict(edge_grids)
        for e in graph.edges:
            if e.id not in self.edge_grids:
                raise ConfigError(f"no grid for edge {e.id!r}")
        self._offsets = {}
        total = 0
        for e in graph.edges:
            self._offsets[e.id] = total
            total += self.edge_grids[e.id].n + 1
        self.total_nodes = total

    @classmethod
    def build(cls, graph: MetricGraph, h: float = DEFAULT_SPACING,
              halfline_length: float | None = None, omega_min: float = 1.0) -> "Grid":
        """Uniform grids with spacing ~h; halflines truncated by the decay budget."""
        if h <= 0:
            raise ConfigError("spacing must be positive")
        if halfline_length is None:
            if omega_min <= 0:
                raise ConfigError("omega_min must be positive")
            halfline_length = DECAY_BUDGET / math.sqrt(omega_min)
        grids = {}
        for e in graph.edges:
            length = halfline_length if e.is_halfline else e.length
            n = max(8, int(round(length / h)))
            grids[e.id] = EdgeGrid(h=length / n, n=n, length=length, truncated=e.is_halfline)
        return cls(graph, grids)

    def offset(self, edge_id: str) -> int:
        return self._offsets[edge_id]

    def coords(self, edge_id: str) -> np.ndarray:
        eg = self.edge_grids[edge_id]
        return np.linspace(0.0, eg.length, eg.n + 1)

    def endpoint_node(self, edge_id: str, endpoint: int) -> int:
        """Global node index of an edge endpoint (0 = start, 1 = end)."""
        eg = self.edge_grids[edge_id]
        return self._offsets[edge_id] + (eg.n if endpoint else 0)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.zeros(self.total_nodes)
        for e in self.graph.edges:
            eg = self.edge_grids[e.id]
            off = self._offsets[e.id]
            w[off:off + eg.n + 1] = eg.h
            w[off] *= 0.5
            w[off + eg.n] *= 0.5
        return w


@dataclass
class GraphFunction:
    """Real-valued function on a graph grid: one sample array per edge.

    Endpoint samples are the vertex traces; validity (equal traces at
    continuous vertices, u(+) = tau u(-) at scaled-jump vertices) is
    enforced when the function is pushed through a Discretization.
    """

    grid: Grid
    values: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for e in self.grid.graph.edges:
            eg = self.grid.edge_grids[e.id]
            arr = np.asarray(self.values.get(e.id, np.zeros(eg.n + 1)), dtype=float)
            if arr.shape != (eg.n + 1,):
                raise ConfigError(
                    f"edge {e.id!r}: expected {eg.n + 1} samples, got {arr.shape}")
            vals[e.id] = arr.copy()
        self.values = vals

    def flat(self) -> np.ndarray:
        out = np.zeros(self.grid.total_nodes)
        for e in self.grid.graph.edges:
            off = self.grid.offset(e.id)
            out[off:off + len(self.values[e.id])] = self.values[e.id]
        return out

    @classmethod
    def from_flat(cls, grid: Grid, flat: np.ndarray) -> "GraphFunction":
        vals = {}
        for e in grid.graph.edges:
            eg = grid.edge_grids[e.id]
            off = grid.offset(e.id)
            vals[e.id] = np.array(flat[off:off + eg.n + 1])
        return cls(grid, vals)

    @classmethod
    def from_callables(cls, grid: Grid, fns: dict) -> "GraphFunction":
        vals = {}
        for e in grid.graph.edges:
            fn = fns[e.id]
            vals[e.id] = np.asarray(fn(grid.coords(e.id)), dtype=float)
        return cls(grid, vals)

    def copy(self) -> "GraphFunction":
        return GraphFunction(self.grid, {k: v.copy() for k, v in self.values.items()})

    def trace(self, edge_id: str, endpoint: int) -> float:
        return float(self.values[edge_id][-1 if endpoint else 0])

    def sup_distance(self, other: "GraphFunction") -> float:
        return max(
            float(np.max(np.abs(self.values[e.id] - other.values[e.id])))
            for e in self.grid.graph.edges
        )

    # -- serialization -------------------------------------------------------

    def to_csv(self, path: str | Path | io.TextIOBase) -> None:
        """CSV columns (edge, x, value); grid metadata in leading comments."""
        own = isinstance(path, (str, Path))
        fh = open(path, "w", encoding="utf-8") if own else path
        try:
            for e in self.grid.graph.edges:
                eg = self.grid.edge_grids[e.id]
                fh.write(f"# grid edge={e.id} h={eg.h:.17g} L={eg.length:.17g} "
                         f"n={eg.n} truncated={int(eg.truncated)}\n")
            fh.write("edge,x,value\n")
            for e in self.grid.graph.edges:
                xs = self.grid.coords(e.id)
                for x, val in zip(xs, self.values[e.id]):
                    fh.write(f"{e.id},{x:.12g},{val:.17g}\n")
        finally:
            if own:
                fh.close()

    @classmethod
    def from_csv(cls, path: str | Path, grid: Grid) -> "GraphFunction":
        vals = {e.id: [] for e in grid.graph.edges}
        meta = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line.startswith("#"):
                    m = re.match(r"# grid edge=(\S+) h=(\S+) L=(\S+) n=(\d+)", line)
                    if m:
                        meta[m.group(1)] = (float(m.group(2)), int(m.group(4)))
                    continue
                if not line or line.startswith("edge,"):
                    continue
                eid, _, val = line.split(",")
                if eid not in vals:
                    raise ConfigError(f"profile references unknown edge {eid!r}")
                vals[eid].append(float(val))
        for eid, (h, n) in meta.items():
            eg = grid.edge_grids[eid]
            if eg.n != n or abs(eg.h - h) > 1e-12 * (1 + eg.h):
                raise ConfigError(f"edge {eid!r}: profile grid does not match")
        return cls(grid, {k: np.array(v) for k, v in vals.items()})


@dataclass(frozen=True)
class FunctionalValue:
    kinetic: float
    lp_term: float
    vertex_term: float

    @property
    def total(self) -> float:
        return self.kinetic - self.lp_term + self.vertex_term


@dataclass(frozen=True)
class _VertexDofs:
    vertex: str
    condition: object
    dofs: tuple[int, ...]  # one for continuous/scaled, (minus, plus) for DeltaPrime
    tau: float | None = None


class Discretization:
    """Couples a ProblemSpec to a Grid: degrees of freedom and functionals.

    Unknowns are the reduced vector x (interior nodes plus free traces).
    A sparse scatter matrix A maps x to the full per-edge sample vector,
    carrying the trace constraints (shared trace -> repeated rows,
    u(+) = tau u(-) -> a tau entry).  Truncated halfline ends stay 0.
    """

    def __init__(self, problem: ProblemSpec, grid: Grid):
        errors = validate(problem)
        if errors:
            raise ConfigError("invalid problem: " + "; ".join(errors))
        if grid.graph is not problem.graph and grid.graph != problem.graph:
            raise ConfigError("grid was built for a different graph")
        self.problem = problem
        self.grid = grid
        graph = problem.graph

        rows, cols, coefs = [], [], []
        rep_full: list[int] = []
        self.vertex_dofs: list[_VertexDofs] = []
        ndof = 0

        def new_dof(full_idx: int) -> int:
            nonlocal ndof
            rows.append(full_idx)
            cols.append(ndof)
            coefs.append(1.0)
            rep_full.append(full_idx)
            ndof += 1
            return ndof - 1

        for v in graph.vertices:
            inc = graph.incidences(v)
            cond = problem.condition(v)
            nodes = [grid.endpoint_node(e.id, ep) for e, ep in inc]
            if isinstance(cond, DeltaPrime):
                d_minus = new_dof(nodes[0])
                d_plus = new_dof(nodes[1])
                self.vertex_dofs.append(_VertexDofs(v, cond, (d_minus, d_plus)))
            elif isinstance(cond, (Dipole, FulopTsutsui)):
                d_minus = new_dof(nodes[0])
                rows.append(nodes[1])
                cols.append(d_minus)
                coefs.append(cond.tau)
                self.vertex_dofs.append(_VertexDofs(v, cond, (d_minus,), tau=cond.tau))
            else:
                d = new_dof(nodes[0])
                for node in nodes[1:]:
                    rows.append(node)
                    cols.append(d)
                    coefs.append(1.0)
                if not isinstance(cond, Kirchhoff):
                    self.vertex_dofs.append(_VertexDofs(v, cond, (d,)))

        for e in graph.edges:
            eg = grid.edge_grids[e.id]
            off = grid.offset(e.id)
            for i in range(1, eg.n):
                new_dof(off + i)
            # the far end of a truncated halfline stays fixed at 0

        self.ndof = ndof
        self.rep_full = np.array(rep_full, dtype=int)
        self.scatter = sp.csr_matrix(
            (coefs, (rows, cols)), shape=(grid.total_nodes, ndof))

        self.node_weights = grid.trapezoid_weights()
        m_diag = sp.diags(self.node_weights)
        self.stiffness_full = self._assemble_stiffness()
        self.stiffness = (self.scatter.T @ self.stiffness_full @ self.scatter).tocsr()
        self.dof_weights = np.asarray(
            (self.scatter.T @ m_diag @ self.scatter).diagonal())
        owned = np.asarray(np.abs(self.scatter).sum(axis=1)).ravel() > 0
        self.fixed_nodes = ~owned  # truncated halfline ends, held at 0

    def _assemble_stiffness(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for e in self.grid.graph.edges:
            eg = self.grid.edge_grids[e.id]
            off = self.grid.offset(e.id)
            inv_h = 1.0 / eg.h
            idx = np.arange(off, off + eg.n)
            rows.extend([idx, idx, idx + 1, idx + 1])
            cols.extend([idx, idx + 1, idx, idx + 1])
            vals.extend([np.full(eg.n, inv_h), np.full(eg.n, -inv_h),
                         np.full(eg.n, -inv_h), np.full(eg.n, inv_h)])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        n = self.grid.total_nodes
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    # -- dof packing ---------------------------------------------------------

    def pack(self, u: GraphFunction, check: bool = True) -> np.ndarray:
        flat = u.flat()
        x = flat[self.rep_full]
        if check:
            recon = self.scatter @ x
            scale = 1.0 + (float(np.max(np.abs(flat))) if flat.size else 0.0)
            mismatch = np.abs(recon - flat)
            if np.any(mismatch[~self.fixed_nodes] > 1e-9 * scale):
                raise ConfigError(
                    "graph function violates its vertex trace constraints "
                    "(unequal traces at a continuous vertex or broken tau scaling)")
            # truncated ends only need to sit inside the decay budget
            if np.any(mismatch[self.fixed_nodes] > 1e-4 * scale):
                raise ConfigError(
                    "graph function is not negligible at a truncated halfline end; "
                    "increase the truncation length")
        return x

    def unpack(self, x: np.ndarray) -> GraphFunction:
        return GraphFunction.from_flat(self.grid, self.scatter @ x)

    # -- functionals on the reduced vector -----------------------------------

    def mass_x(self, x: np.ndarray) -> float:
        return float(np.dot(self.dof_weights, x * x))

    def kinetic_x(self, x: np.ndarray) -> float:
        return 0.5 * float(np.dot(x, self.stiffness @ x))

    def lp_x(self, x: np.ndarray, power: float) -> float:
        u = self.scatter @ x
        return float(np.dot(self.node_weights, np.abs(u) ** power))

    def vertex_terms_x(self, x: np.ndarray) -> float:
        total = 0.0
        for vd in self.vertex_dofs:
            c = vd.condition
            if isinstance(c, Delta):
                total -= 0.5 * c.alpha * x[vd.dofs[0]] ** 2
            elif isinstance(c, DeltaPrime):
                jump = x[vd.dofs[1]] - x[vd.dofs[0]]
                total -= jump * jump / (2.0 * c.beta)
            elif isinstance(c, FulopTsutsui):
                total -= 0.5 * c.v * x[vd.dofs[0]] ** 2
            elif isinstance(c, NonlinearDelta):
                total -= abs(x[vd.dofs[0]]) ** c.q / c.q
        return total

    def quadratic_vertex_terms_x(self, x: np.ndarray) -> float:
        """Only the quadratic vertex contributions (enter the Nehari form doubled)."""
        total = 0.0
        for vd in self.vertex_dofs:
            c = vd.condition
            if isinstance(c, Delta):
                total -= 0.5 * c.alpha * x[vd.dofs[0]] ** 2
            elif isinstance(c, DeltaPrime):
                jump = x[vd.dofs[1]] - x[vd.dofs[0]]
                total -= jump * jump / (2.0 * c.beta)
            elif isinstance(c, FulopTsutsui):
                total -= 0.5 * c.v * x[vd.dofs[0]] ** 2
        return total

    def pointwise_powers_x(self, x: np.ndarray) -> float:
        """sum over NonlinearDelta vertices of |u(v)|^q."""
        total = 0.0
        for vd in self.vertex_dofs:
            if isinstance(vd.condition, NonlinearDelta):
                total += abs(x[vd.dofs[0]]) ** vd.condition.q
        return total

    def energy_x(self, x: np.ndarray) -> FunctionalValue:
        p = self.problem.p
        return FunctionalValue(
            kinetic=self.kinetic_x(x),
            lp_term=self.lp_x(x, p) / p,
            vertex_term=self.vertex_terms_x(x),
        )

    def action_x(self, x: np.ndarray, omega: float) -> float:
        return self.energy_x(x).total + 0.5 * omega * self.mass_x(x)

    def nehari_x(self, x: np.ndarray, omega: float) -> float:
        q = (2.0 * self.kinetic_x(x) + omega * self.mass_x(x)
             + 2.0 * self.quadratic_vertex_terms_x(x))
        return q - self.lp_x(x, self.problem.p) - self.pointwise_powers_x(x)

    def quadratic_form_x(self, x: np.ndarray, omega: float) -> float:
        """Q(u): kinetic + omega mass + doubled quadratic vertex terms."""
        return (2.0 * self.kinetic_x(x) + omega * self.mass_x(x)
                + 2.0 * self.quadratic_vertex_terms_x(x))

    def grad_energy_coef(self, x: np.ndarray) -> np.ndarray:
        """Coefficient gradient dE/dx (pair with dx directly, no metric)."""
        p = self.problem.p
        u = self.scatter @ x
        g = self.stiffness @ x
        g -= self.scatter.T @ (self.node_weights * np.abs(u) ** (p - 2.0) * u)
        for vd in self.vertex_dofs:
            c = vd.condition
            if isinstance(c, Delta):
                g[vd.dofs[0]] -= c.alpha * x[vd.dofs[0]]
            elif isinstance(c, DeltaPrime):
                jump = x[vd.dofs[1]] - x[vd.dofs[0]]
                g[vd.dofs[0]] += jump / c.beta
                g[vd.dofs[1]] -= jump / c.beta
            elif isinstance(c, FulopTsutsui):
                g[vd.dofs[0]] -= c.v * x[vd.dofs[0]]
            elif isinstance(c, NonlinearDelta):
                t = x[vd.dofs[0]]
                g[vd.dofs[0]] -= abs(t) ** (c.q - 2.0) * t
        return g

    def grad_action_coef(self, x: np.ndarray, omega: float) -> np.ndarray:
        return self.grad_energy_coef(x) + omega * self.dof_weights * x

    def grad_l2(self, gcoef: np.ndarray) -> np.ndarray:
        """Riesz-lift a coefficient gradient to the discrete L2 metric."""
        return gcoef / self.dof_weights

    def edge_masses(self, x: np.ndarray) -> dict[str, float]:
        u = self.unpack(x)
        out = {}
        for e in self.grid.graph.edges:
            eg = self.grid.edge_grids[e.id]
            w = np.full(eg.n + 1, eg.h)
            w[0] = w[-1] = 0.5 * eg.h
            out[e.id] = float(np.dot(w, u.values[e.id] ** 2))
        return out


# ---------------------------------------------------------------------------
# functional API on GraphFunctions
# ---------------------------------------------------------------------------

def mass(u: GraphFunction) -> float:
    """Trapezoid value of the squared L2 norm over all edges."""
    total = 0.0
    for e in u.grid.graph.edges:
        eg = u.grid.edge_grids[e.id]
        vals = u.values[e.id] ** 2
        total += eg.h * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    return total


def lp_norm_pp(u: GraphFunction, p: float) -> float:
    total = 0.0
    for e in u.grid.graph.edges:
        eg = u.grid.edge_grids[e.id]
        vals = np.abs(u.values[e.id]) ** p
        total += eg.h * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    return total


def kinetic(u: GraphFunction) -> float:
    total = 0.0
    for e in u.grid.graph.edges:
        eg = u.grid.edge_grids[e.id]
        d = np.diff(u.values[e.id]) / eg.h
        total += 0.5 * eg.h * float(np.dot(d, d))
    return total


def inner(u: GraphFunction, v: GraphFunction) -> float:
    """Discrete L2 pairing (trapezoid weights)."""
    total = 0.0
    for e in u.grid.graph.edges:
        eg = u.grid.edge_grids[e.id]
        prod = u.values[e.id] * v.values[e.id]
        total += eg.h * (prod.sum() - 0.5 * (prod[0] + prod[-1]))
    return total


def energy(u: GraphFunction, problem: ProblemSpec) -> FunctionalValue:
    disc = Discretization(problem, u.grid)
    return disc.energy_x(disc.pack(u))


def action(u: GraphFunction, problem: ProblemSpec, omega: float) -> float:
    disc = Discretization(problem, u.grid)
    return disc.action_x(disc.pack(u), omega)


def nehari(u: GraphFunction, problem: ProblemSpec, omega: float) -> float:
    disc = Discretization(problem, u.grid)
    return disc.nehari_x(disc.pack(u), omega)


def gradient(u: GraphFunction, problem: ProblemSpec,
             omega: float | None = None) -> GraphFunction:
    """Discrete L2 gradient of the energy (omega=None) or the action."""
    disc = Discretization(problem, u.grid)
    x = disc.pack(u)
    gcoef = (disc.grad_energy_coef(x) if omega is None
             else disc.grad_action_coef(x, omega))
    return disc.unpack(disc.grad_l2(gcoef))
