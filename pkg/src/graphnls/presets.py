"""Named experiment presets.

Each preset is a plain config text (parsed through the same reader as user
files) plus default run parameters, covering the regimes the library is built
to reproduce: attractive/repulsive delta on the line and on stars, the
delta-prime symmetry-breaking scan, weighted-delta (discontinuous) couplings,
nonlinear point couplings in each trichotomy orientation, and the three
critical-mass setups.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import parse_problem
from .graphs import ConfigError, ProblemSpec
from .oracle import CRITICAL_MASS_P6, MU_STAR_DOUBLY_CRITICAL

_LINE = """
edge minus v0 open inf
edge plus v0 open inf
{vertex}
problem {problem}
"""

_STAR3 = """
edge e1 v0 open inf
edge e2 v0 open inf
edge e3 v0 open inf
{vertex}
problem {problem}
"""


def _line(vertex: str, problem: str) -> str:
    return _LINE.format(vertex=vertex, problem=problem)


def _star3(vertex: str, problem: str) -> str:
    return _STAR3.format(vertex=vertex, problem=problem)


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    config: str
    mass: float | None = None
    omega: float | None = None
    scan: dict = field(default_factory=dict)

    def problem(self) -> ProblemSpec:
        return parse_problem(self.config)


PRESETS: dict[str, Preset] = {}


def _register(preset: Preset) -> None:
    PRESETS[preset.name] = preset


_register(Preset(
    "kirchhoff-line",
    "free line; mass solve recovers the cubic soliton",
    _line("vertex v0 kirchhoff", "p=4"), mass=4.0))
_register(Preset(
    "delta-line-attractive",
    "attractive point coupling on the line; even tail state",
    _line("vertex v0 delta alpha=1", "p=4"), omega=1.0,
    scan={"param": "omega", "grid": "0.3:5:20"}))
_register(Preset(
    "delta-line-repulsive",
    "repulsive point coupling; even-subspace state",
    _line("vertex v0 delta alpha=-1", "p=4"), omega=1.0))
_register(Preset(
    "delta-line-p7",
    "attractive point coupling at a supercritical edge power",
    _line("vertex v0 delta alpha=1", "p=7"), omega=1.0,
    scan={"param": "omega", "grid": "0.3:6:25"}))
_register(Preset(
    "delta-prime-line",
    "delta-prime coupling; symmetry breaking above omega* = 8",
    _line("vertex v0 delta_prime beta=1", "p=4"), omega=9.0,
    scan={"param": "omega", "grid": "5:12:29"}))
_register(Preset(
    "dipole-line",
    "dipole (tau-scaled) coupling, no vertex energy term",
    _line("vertex v0 dipole tau=2", "p=4"), omega=1.0))
_register(Preset(
    "ft-line",
    "weighted delta with a jump u(+) = 2 u(-)",
    _line("vertex v0 fulop_tsutsui tau=2 v=1", "p=4"), omega=1.0))
_register(Preset(
    "ft-line-p7",
    "weighted delta at a supercritical edge power (mass-curve diagnostic)",
    _line("vertex v0 fulop_tsutsui tau=2 v=1", "p=7"), omega=1.0,
    scan={"param": "omega", "grid": "0.5:6:12"}))
_register(Preset(
    "star3-delta",
    "attractive point coupling on a 3-star; radial 3-tail state",
    _star3("vertex v0 delta alpha=1", "p=4"), mass=1.0))
_register(Preset(
    "star3-nld-weak",
    "pointwise power below the balance line (q < p/2 + 1): exists at small mass",
    _star3("vertex v0 nonlinear_delta q=2.5", "p=4"), mass=1.0,
    scan={"param": "mu", "grid": "0.6:6:8"}))
_register(Preset(
    "star3-nld-strong",
    "pointwise power above the balance line (q > p/2 + 1): exists at large mass",
    _star3("vertex v0 nonlinear_delta q=3.5", "p=4"), mass=4.0,
    scan={"param": "mu", "grid": "0.6:6:8"}))
_register(Preset(
    "star3-nld-balanced",
    "balanced powers q = p/2 + 1: existence independent of the mass",
    _star3("vertex v0 nonlinear_delta q=3", "p=4"), mass=2.0,
    scan={"param": "mu", "grid": "0.5:5:6"}))
_register(Preset(
    "star-balanced-nscan",
    "balanced powers, varying the number of halflines",
    _star3("vertex v0 nonlinear_delta q=3", "p=4"), mass=2.0,
    scan={"param": "N", "grid": "2:6:5"}))
_register(Preset(
    "line-p6-critical",
    "critical edge power p=6; bounded below iff mass under (sqrt3/2) pi",
    _line("vertex v0 kirchhoff", "p=6"), mass=0.9 * CRITICAL_MASS_P6))
_register(Preset(
    "line-q4-critical",
    "critical pointwise power q=4; bounded below iff mass under 2",
    _line("vertex v0 nonlinear_delta q=4", "p=4"), mass=1.8))
_register(Preset(
    "line-doubly-critical",
    "doubly critical p=6, q=4; bounded below iff mass under mu*",
    _line("vertex v0 nonlinear_delta q=4", "p=6"),
    mass=0.9 * MU_STAR_DOUBLY_CRITICAL))


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}") from None
