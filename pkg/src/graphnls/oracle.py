"""Closed-form stationary profiles, secular equations, and threshold constants.

The free stationary equation on an edge is

    -phi'' - |phi|^(p-2) phi + omega phi = 0,   p > 2, omega > 0,

solved on the whole line by the soliton

    phi(x) = a * sech(b x)^(2/(p-2)),
    a = ((p/2) omega)^(1/(p-2)),   b = ((p-2)/2) sqrt(omega).

Tails of translated solitons glued at a vertex give every explicit
stationary state used here; the glue condition reduces to a scalar secular
equation because (-phi'/phi)(y) = sqrt(omega) * tanh(b y) for every p.

Everything in this module is pure and analytic (Gauss-type integrals use the
Gamma function; remaining 1D integrals use adaptive quadrature to ~1e-12),
so it can serve as ground truth for the mesh-based solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma

from .graphs import ConfigError

_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-12, limit=200)


@dataclass(frozen=True)
class Soliton:
    """The sech-power stationary profile of the focusing NLS on the line."""

    p: float
    omega: float

    def __post_init__(self):
        if not self.p > 2:
            raise ConfigError("soliton requires p > 2")
        if not self.omega > 0:
            raise ConfigError("soliton requires omega > 0")

    @property
    def exponent(self) -> float:
        return 2.0 / (self.p - 2.0)

    @property
    def amplitude(self) -> float:
        return ((self.p / 2.0) * self.omega) ** (1.0 / (self.p - 2.0))

    @property
    def inverse_width(self) -> float:
        return ((self.p - 2.0) / 2.0) * math.sqrt(self.omega)

    def __call__(self, x):
        b = self.inverse_width
        return self.amplitude * np.cosh(b * np.asarray(x, dtype=float)) ** (-self.exponent)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        b = self.inverse_width
        return -self.exponent * b * np.tanh(b * x) * self(x)

    def second_derivative(self, x):
        # phi'' = a s b^2 sech^s(bx) (s - (1+s) sech^2(bx)), s = 2/(p-2)
        x = np.asarray(x, dtype=float)
        s, b = self.exponent, self.inverse_width
        sech2 = np.cosh(b * x) ** (-2.0)
        return s * b * b * self(x) * (s - (1.0 + s) * sech2)

    def residual(self, x):
        """Pointwise defect in -phi'' - phi^(p-1) + omega phi = 0."""
        phi = self(x)
        return np.abs(-self.second_derivative(x) - phi ** (self.p - 1.0) + self.omega * phi)

    def log_slope(self, y: float) -> float:
        """(-phi'/phi)(y) = sqrt(omega) tanh(b y); the tail matching quantity."""
        return math.sqrt(self.omega) * math.tanh(self.inverse_width * y)

    def tail_integral(self, power: float, shift: float, upper: float = math.inf) -> float:
        """integral over (shift, upper) of phi(x)^power, adaptive quadrature."""
        b = self.inverse_width
        cutoff = 60.0 / (self.exponent * b * power) + abs(shift)
        hi = min(upper, cutoff) if math.isfinite(cutoff) else upper
        if hi <= shift:
            return 0.0
        val, _ = quad(lambda x: self(x) ** power, shift, hi, **_QUAD_OPTS)
        return val


def _sech_moment(m: float) -> float:
    """integral over R of sech(y)^m dy = sqrt(pi) Gamma(m/2) / Gamma((m+1)/2)."""
    return math.sqrt(math.pi) * gamma(m / 2.0) / gamma((m + 1.0) / 2.0)


def soliton_mass(p: float, omega: float) -> float:
    """L2 norm squared of the soliton; scales as omega^((6-p)/(2(p-2)))."""
    sol = Soliton(p, omega)
    s, a, b = sol.exponent, sol.amplitude, sol.inverse_width
    return (a * a / b) * _sech_moment(2.0 * s)


def soliton_energy(p: float, omega: float) -> float:
    """Free energy (1/2)|phi'|^2 - (1/p)|phi|_p^p of the soliton.

    Vanishes identically at p = 6, for every omega.
    """
    sol = Soliton(p, omega)
    s, a, b = sol.exponent, sol.amplitude, sol.inverse_width
    i_low = _sech_moment(2.0 * s)
    i_high = _sech_moment(2.0 * s + 2.0)
    kinetic = 0.5 * a * a * s * s * b * (i_low - i_high)
    lp = (a**p / (p * b)) * i_high
    return kinetic - lp


def omega_at_mass(p: float, mu: float) -> float:
    """Invert mu = soliton_mass(p, omega); undefined at p = 6."""
    if mu <= 0:
        raise ConfigError("mass must be positive")
    if p == 6:
        raise ConfigError("soliton mass is omega-independent at p = 6")
    gamma_exp = (6.0 - p) / (2.0 * (p - 2.0))
    c = soliton_mass(p, 1.0)
    return (mu / c) ** (1.0 / gamma_exp)


def soliton_energy_at_mass(p: float, mu: float) -> float:
    """Soliton energy level at fixed mass; the comparison level on star graphs."""
    if not 2 < p < 6:
        raise ConfigError("mass-to-frequency map is invertible only for 2 < p < 6")
    return soliton_energy(p, omega_at_mass(p, mu))


# ---------------------------------------------------------------------------
# secular solutions: glued soliton tails
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecularSolution:
    """A stationary state assembled from translated soliton pieces.

    Each halfline edge (in graph edge order) carries sign_k * phi(x + shift_k)
    with phi the soliton of the stored (p, omega).  A negative shift puts the
    soliton bump inside the edge; a positive shift leaves a monotone tail.
    """

    p: float
    omega: float
    shifts: tuple[float, ...]
    signs: tuple[float, ...]
    exists: bool = True
    label: str = "even"
    params: dict = field(default_factory=dict)

    @property
    def soliton(self) -> Soliton:
        return Soliton(self.p, self.omega)

    def edge_profile(self, k: int, x):
        return self.signs[k] * self.soliton(np.asarray(x, dtype=float) + self.shifts[k])

    def traces(self) -> tuple[float, ...]:
        return tuple(float(self.edge_profile(k, 0.0)) for k in range(len(self.shifts)))

    def mass(self) -> float:
        sol = self.soliton
        return sum(sol.tail_integral(2.0, a) for a in self.shifts)

    def lp_norm_pp(self) -> float:
        sol = self.soliton
        return sum(sol.tail_integral(self.p, a) for a in self.shifts)

    def action(self) -> float:
        """S_omega at the state; stationarity gives S = (p-2)/(2p) * |u|_p^p."""
        return (self.p - 2.0) / (2.0 * self.p) * self.lp_norm_pp()

    def asymmetry(self) -> float:
        """Mass imbalance between the heaviest and lightest edge, relative."""
        sol = self.soliton
        per_edge = [sol.tail_integral(2.0, a) for a in self.shifts]
        total = sum(per_edge)
        return (max(per_edge) - min(per_edge)) / total if total > 0 else 0.0


def delta_threshold(alpha: float, n: int) -> float:
    """Least frequency with a radial tail state at a strength-alpha delta vertex."""
    return alpha * alpha / (n * n)


def delta_shift(alpha: float, n: int, p: float, omega: float) -> SecularSolution:
    """Radial state on a star of n halflines with a delta vertex.

    All tails equal: u_e(x) = phi(x + a) with n * sqrt(omega) * tanh(b a) = alpha.
    Attractive alpha > 0 gives a > 0 (corner pointing up); repulsive alpha < 0
    gives a < 0 (each tail carries an interior bump), which is the even state
    of the repulsive problem.  No solution when omega <= (alpha/n)^2.
    """
    if n < 2:
        raise ConfigError("need at least 2 halflines")
    if omega <= 0:
        raise ConfigError("omega must be positive")
    sol = Soliton(p, omega)
    ratio = alpha / (n * math.sqrt(omega))
    if abs(ratio) >= 1.0:
        return SecularSolution(p, omega, (), (), exists=False, label="ntail",
                               params={"alpha": alpha, "n": n})
    a = math.atanh(ratio) / sol.inverse_width
    return SecularSolution(
        p, omega, shifts=(a,) * n, signs=(1.0,) * n,
        label="ntail" if n > 2 else "even", params={"alpha": alpha, "n": n, "shift": a},
    )


def delta_prime_threshold(beta: float) -> float:
    return 4.0 / (beta * beta)


def delta_prime_bifurcation(beta: float, p: float) -> float:
    """Frequency where the odd two-tail state sheds the asymmetric pair."""
    return (4.0 / (beta * beta)) * p / (p - 2.0)


def delta_prime_branches(beta: float, p: float, omega: float) -> list[SecularSolution]:
    """Stationary two-tail states for a strength-beta delta-prime vertex.

    States are u = -phi(x + a_minus) on the first halfline, +phi(x + a_plus)
    on the second, subject to

        phi'(a_minus) = phi'(a_plus)                      (derivative continuity)
        phi(a_minus) + phi(a_plus) = -beta * phi'(a_plus) (jump condition)

    The odd branch a_minus = a_plus solves tanh(b a) = 2/(beta sqrt(omega)) and
    exists for omega > 4/beta^2.  Above the pitchfork frequency
    (4/beta^2) p/(p-2) -- where phi'' vanishes at the odd shift -- a mirror
    pair of asymmetric roots appears; both are returned.
    """
    if beta <= 0:
        raise ConfigError("beta must be positive")
    out: list[SecularSolution] = []
    if omega <= delta_prime_threshold(beta):
        return out
    sol = Soliton(p, omega)
    b = sol.inverse_width
    a_odd = math.atanh(2.0 / (beta * math.sqrt(omega))) / b
    out.append(SecularSolution(
        p, omega, shifts=(a_odd, a_odd), signs=(-1.0, 1.0),
        label="odd", params={"beta": beta, "shift": a_odd},
    ))

    if omega <= delta_prime_bifurcation(beta, p):
        return out

    # Asymmetric pair: parameterize by the common derivative value d < 0.
    # phi' on (0, inf) dips to its minimum at y_m (the inflection point of
    # phi) and returns to 0, so each admissible d has one preimage on each
    # side of y_m.
    y_m = math.atanh(math.sqrt((p - 2.0) / p)) / b
    d_min = float(sol.derivative(y_m))
    y_far = y_m + 60.0 / (sol.exponent * b)

    def preimages(d: float) -> tuple[float, float]:
        near = brentq(lambda y: float(sol.derivative(y)) - d, 0.0, y_m, xtol=1e-14)
        far = brentq(lambda y: float(sol.derivative(y)) - d, y_m, y_far, xtol=1e-14)
        return near, far

    def glue_defect(d: float) -> float:
        near, far = preimages(d)
        return float(sol(near) + sol(far)) + beta * d

    lo, hi = d_min * (1.0 - 1e-12), -1e-12 * abs(d_min)
    if glue_defect(lo) >= 0.0:
        return out
    d_root = brentq(glue_defect, lo, hi, xtol=1e-14)
    a_near, a_far = preimages(d_root)
    for shifts in ((a_near, a_far), (a_far, a_near)):
        out.append(SecularSolution(
            p, omega, shifts=shifts, signs=(-1.0, 1.0),
            label="asymmetric",
            params={"beta": beta, "shift_minus": shifts[0], "shift_plus": shifts[1]},
        ))
    return out


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

def omega_min_delta(alpha: float) -> float:
    """Existence threshold for the delta ground state on the line."""
    return alpha * alpha / 4.0


def omega_star_delta_prime(beta: float, p: float) -> float:
    if beta <= 0 or p <= 2:
        raise ConfigError("need beta > 0 and p > 2")
    return delta_prime_bifurcation(beta, p)


def omega_min_ft(tau: float, v: float) -> float:
    if tau in (0.0, 1.0) or v <= 0:
        raise ConfigError("need tau outside {0,1} and v > 0")
    return v * v / (tau * tau + 1.0) ** 2


#: critical mass of the edge nonlinearity at p = 6 (mass of the p=6 soliton)
CRITICAL_MASS_P6 = math.sqrt(3.0) / 2.0 * math.pi
#: critical mass of the pointwise vertex nonlinearity at q = 4 on the line
CRITICAL_MASS_Q4 = 2.0
#: the unique ground-state mass in the doubly critical regime p=6, q=4
MU_STAR_DOUBLY_CRITICAL = math.sqrt(3.0) * (math.pi / 2.0 - math.asin(math.sqrt(3.0 / 7.0)))


def thresholds(alpha: float = 1.0, beta: float = 1.0, p: float = 4.0,
               tau: float = 2.0, v: float = 1.0) -> dict[str, float]:
    """Named threshold constants, evaluated at the given coupling parameters."""
    return {
        "omega_min_delta": omega_min_delta(alpha),
        "omega_star_delta_prime": omega_star_delta_prime(beta, p),
        "omega_min_ft": omega_min_ft(tau, v),
        "critical_mass_p6": CRITICAL_MASS_P6,
        "critical_mass_q4": CRITICAL_MASS_Q4,
        "mu_star_doubly_critical": MU_STAR_DOUBLY_CRITICAL,
    }
