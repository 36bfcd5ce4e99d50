"""Line-oriented text description of a problem.

Grammar (one record per line; blank lines and ``#`` comments ignored)::

    edge <id> <start-vertex> <end-vertex|open> <length|inf>
    vertex <id> kirchhoff
    vertex <id> delta alpha=<float>
    vertex <id> delta_prime beta=<float>
    vertex <id> dipole tau=<float>
    vertex <id> fulop_tsutsui tau=<float> v=<float>
    vertex <id> nonlinear_delta [q=<float>]
    problem p=<float> [q=<float>]

``open`` as the end vertex marks a halfline (length must then be ``inf``).
A ``problem`` record must appear exactly once; its optional ``q`` supplies
the default pointwise power for ``nonlinear_delta`` records written without
one.  Vertices without a ``vertex`` record get Kirchhoff coupling.

Parse errors report the offending line number.
"""

from __future__ import annotations

import math
from pathlib import Path

from .graphs import (
    ConfigError,
    Delta,
    DeltaPrime,
    Dipole,
    Edge,
    FulopTsutsui,
    Kirchhoff,
    MetricGraph,
    NonlinearDelta,
    ProblemSpec,
)


def _err(lineno: int, msg: str) -> ConfigError:
    return ConfigError(f"line {lineno}: {msg}")


def _parse_float(tok: str, lineno: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise _err(lineno, f"bad {what}: {tok!r}") from None


def _parse_params(tokens: list[str], lineno: int) -> dict[str, float]:
    params = {}
    for tok in tokens:
        if "=" not in tok:
            raise _err(lineno, f"expected key=value, got {tok!r}")
        key, _, val = tok.partition("=")
        params[key] = _parse_float(val, lineno, f"value for {key!r}")
    return params


def parse_problem(text: str) -> ProblemSpec:
    """Parse a problem description; raises ConfigError with line numbers."""
    edges: list[Edge] = []
    vertex_records: list[tuple[int, str, str, dict[str, float]]] = []
    problem_params: dict[str, float] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, rest = tokens[0], tokens[1:]
        if kind == "edge":
            if len(rest) != 4:
                raise _err(lineno, "edge record needs: id start end|open length|inf")
            eid, start, end, length_tok = rest
            end_v = None if end == "open" else end
            length = math.inf if length_tok == "inf" else _parse_float(length_tok, lineno, "length")
            try:
                edges.append(Edge(eid, start, end_v, length))
            except ConfigError as exc:
                raise _err(lineno, str(exc)) from None
        elif kind == "vertex":
            if len(rest) < 2:
                raise _err(lineno, "vertex record needs: id condition [params]")
            vid, cname = rest[0], rest[1]
            vertex_records.append((lineno, vid, cname, _parse_params(rest[2:], lineno)))
        elif kind == "problem":
            if problem_params is not None:
                raise _err(lineno, "duplicate problem record")
            problem_params = _parse_params(rest, lineno)
            if "p" not in problem_params:
                raise _err(lineno, "problem record needs p=<float>")
        else:
            raise _err(lineno, f"unknown record type {kind!r}")

    if problem_params is None:
        raise ConfigError("missing problem record")
    if not edges:
        raise ConfigError("no edges defined")

    vertices = []
    for e in edges:
        for v in (e.start, e.end):
            if v is not None and v not in vertices:
                vertices.append(v)
    graph = MetricGraph(tuple(vertices), tuple(edges))

    default_q = problem_params.get("q")
    conditions = {}
    for lineno, vid, cname, params in vertex_records:
        if vid not in vertices:
            raise _err(lineno, f"vertex {vid!r} not attached to any edge")
        if vid in conditions:
            raise _err(lineno, f"duplicate condition for vertex {vid!r}")
        try:
            if cname == "kirchhoff":
                cond = Kirchhoff()
            elif cname == "delta":
                cond = Delta(alpha=params.pop("alpha"))
            elif cname == "delta_prime":
                cond = DeltaPrime(beta=params.pop("beta"))
            elif cname == "dipole":
                cond = Dipole(tau=params.pop("tau"))
            elif cname == "fulop_tsutsui":
                cond = FulopTsutsui(tau=params.pop("tau"), v=params.pop("v"))
            elif cname == "nonlinear_delta":
                q = params.pop("q", default_q)
                if q is None:
                    raise _err(lineno, "nonlinear_delta needs q= here or on the problem record")
                cond = NonlinearDelta(q=q)
            else:
                raise _err(lineno, f"unknown condition {cname!r}")
        except KeyError as exc:
            raise _err(lineno, f"{cname} is missing parameter {exc.args[0]}") from None
        except ConfigError as exc:
            if str(exc).startswith("line "):
                raise
            raise _err(lineno, str(exc)) from None
        if params:
            raise _err(lineno, f"unexpected parameters for {cname}: {sorted(params)}")
        conditions[vid] = cond

    return ProblemSpec(graph=graph, conditions=conditions, p=problem_params["p"])


def load_problem(path: str | Path) -> ProblemSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        return parse_problem(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
