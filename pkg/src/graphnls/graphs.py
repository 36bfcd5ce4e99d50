"""Metric graphs and the vertex-coupling zoo.

A metric graph is a set of 1D edges (bounded intervals or halflines) glued at
vertices; it carries lengths but no embedding.  Each edge has a coordinate
running from its start vertex, so a halfline is an edge whose far end is open.

Vertex couplings supported at a vertex v, written in terms of the trace
values u_e(v) and of the derivative sum

    D(v) = sum over edges ending at v of u_e'(l_e)
         - sum over edges starting at v of u_e'(0)

(the one-sided derivatives signed toward the vertex):

* Kirchhoff          : u continuous at v,  D(v) = 0
* Delta(alpha)       : u continuous at v,  D(v) = alpha * u(v)
* DeltaPrime(beta)   : derivative continuous, jump u(-) - u(+) = beta * u'(v)
* Dipole(tau)        : u(+) = tau * u(-),  u'(-) = tau * u'(+)
* FulopTsutsui(tau,v): u(+) = tau * u(-),  u'(-) - tau * u'(+) = v * u(-)
* NonlinearDelta(q)  : u continuous at v,  D(v) = |u(v)|^(q-2) u(v)

The jump couplings (DeltaPrime, Dipole, FulopTsutsui) are defined only at
degree-2 vertices; the "minus" side is the incident edge that appears first
in the graph's edge list, the "plus" side the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Malformed graph, coupling parameters, or problem description."""


# ---------------------------------------------------------------------------
# vertex couplings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Kirchhoff:
    pass


@dataclass(frozen=True)
class Delta:
    alpha: float  # attractive for alpha > 0

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ConfigError("delta coupling strength must be finite")


@dataclass(frozen=True)
class DeltaPrime:
    beta: float

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError("delta-prime coupling requires beta > 0")


@dataclass(frozen=True)
class Dipole:
    tau: float

    def __post_init__(self):
        if not math.isfinite(self.tau) or self.tau in (0.0, 1.0):
            raise ConfigError("dipole coupling requires tau outside {0, 1}")


@dataclass(frozen=True)
class FulopTsutsui:
    tau: float
    v: float

    def __post_init__(self):
        if not math.isfinite(self.tau) or self.tau in (0.0, 1.0):
            raise ConfigError("weighted-delta coupling requires tau outside {0, 1}")
        if not (self.v > 0 and math.isfinite(self.v)):
            raise ConfigError("weighted-delta coupling requires v > 0")


@dataclass(frozen=True)
class NonlinearDelta:
    q: float  # pointwise power; q = 4 is the critical value

    def __post_init__(self):
        if not (self.q > 2 and math.isfinite(self.q)):
            raise ConfigError("nonlinear delta coupling requires q > 2")


VertexCondition = Kirchhoff | Delta | DeltaPrime | Dipole | FulopTsutsui | NonlinearDelta

#: couplings with a single continuous trace at the vertex
CONTINUOUS_CONDITIONS = (Kirchhoff, Delta, NonlinearDelta)
#: couplings that prescribe (or allow) a jump; defined at degree-2 vertices only
JUMP_CONDITIONS = (DeltaPrime, Dipole, FulopTsutsui)


def condition_name(cond: VertexCondition) -> str:
    return {
        Kirchhoff: "kirchhoff",
        Delta: "delta",
        DeltaPrime: "delta_prime",
        Dipole: "dipole",
        FulopTsutsui: "fulop_tsutsui",
        NonlinearDelta: "nonlinear_delta",
    }[type(cond)]


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    """One edge; ``end is None`` marks the open end of a halfline."""

    id: str
    start: str
    end: str | None
    length: float

    def __post_init__(self):
        if self.end is None:
            if not math.isinf(self.length):
                raise ConfigError(f"edge {self.id!r}: a halfline must have infinite length")
        else:
            if not (self.length > 0 and math.isfinite(self.length)):
                raise ConfigError(f"edge {self.id!r}: finite edge needs length > 0")

    @property
    def is_halfline(self) -> bool:
        return self.end is None


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ConfigError("duplicate vertex ids")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise ConfigError("duplicate edge ids")
        vs = set(self.vertices)
        for e in self.edges:
            for v in (e.start, e.end):
                if v is not None and v not in vs:
                    raise ConfigError(f"edge {e.id!r} references unknown vertex {v!r}")

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def incidences(self, vertex: str) -> list[tuple[Edge, int]]:
        """(edge, endpoint) pairs at a vertex; endpoint 0 = start, 1 = end.

        Listed in edge order, which fixes the minus/plus sides at degree-2
        jump vertices.
        """
        out = []
        for e in self.edges:
            if e.start == vertex:
                out.append((e, 0))
            if e.end == vertex:
                out.append((e, 1))
        return out

    def degree(self, vertex: str) -> int:
        return len(self.incidences(vertex))

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        frontier = [self.vertices[0]]
        while frontier:
            v = frontier.pop()
            for e, _ in self.incidences(v):
                for w in (e.start, e.end):
                    if w is not None and w not in seen:
                        seen.add(w)
                        frontier.append(w)
        return len(seen) == len(self.vertices)


def line_graph() -> MetricGraph:
    """The real line as a graph: one degree-2 vertex joining two halflines."""
    return MetricGraph(
        vertices=("v0",),
        edges=(Edge("minus", "v0", None, math.inf), Edge("plus", "v0", None, math.inf)),
    )


def star_graph(n: int) -> MetricGraph:
    """Star with ``n`` halflines attached to a single central vertex."""
    if not isinstance(n, int) or n < 2:
        raise ConfigError("a star graph needs at least 2 halflines")
    return MetricGraph(
        vertices=("v0",),
        edges=tuple(Edge(f"e{k}", "v0", None, math.inf) for k in range(1, n + 1)),
    )


# ---------------------------------------------------------------------------
# problem description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """Graph + per-vertex coupling + standard power p of the edge nonlinearity."""

    graph: MetricGraph
    conditions: dict[str, VertexCondition] = field(default_factory=dict)
    p: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "conditions", dict(self.conditions))

    def condition(self, vertex: str) -> VertexCondition:
        return self.conditions.get(vertex, Kirchhoff())

    def special_vertices(self) -> list[tuple[str, VertexCondition]]:
        return [(v, c) for v, c in self.conditions.items() if not isinstance(c, Kirchhoff)]

    @property
    def p_regime(self) -> str:
        return "subcritical" if self.p < 6 else ("critical" if self.p == 6 else "supercritical")

    def q_regime(self) -> str | None:
        qs = [c.q for c in self.conditions.values() if isinstance(c, NonlinearDelta)]
        if not qs:
            return None
        q = max(qs)
        return "subcritical" if q < 4 else ("critical" if q == 4 else "supercritical")


def validate(problem: ProblemSpec) -> list[str]:
    """All invariant violations of a problem; empty list iff well posed.

    Violations are reported, not raised, so one pass surfaces every defect.
    """
    g = problem.graph
    out = []
    if not g.vertices:
        out.append("graph has no vertices")
        return out
    for v in g.vertices:
        if g.degree(v) == 0:
            out.append(f"vertex {v!r} is isolated (degree 0)")
    if not g.is_connected():
        out.append("graph is not connected")
    for v in problem.conditions:
        if v not in g.vertices:
            out.append(f"condition given for unknown vertex {v!r}")
    for v in g.vertices:
        cond = problem.condition(v)
        if isinstance(cond, JUMP_CONDITIONS) and g.degree(v) != 2:
            out.append(
                f"{condition_name(cond)} at {v!r} requires degree 2, got {g.degree(v)}"
            )
    if not (problem.p > 2 and math.isfinite(problem.p)):
        out.append("p>2 required")
    return out
