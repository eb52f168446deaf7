"""Stable special functions and quadrature rules for hydrogen bound states.

Everything here is a pure function of its arguments.  Factorial ratios go
through log-gamma so that large quantum numbers never overflow; direct
integer products are used only where they are exact in double precision
(k <= 20).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_laguerre, roots_legendre

from .errors import ConfigurationError

__all__ = [
    "BasisIndex",
    "QuadratureRule",
    "log_factorial",
    "sqrt_binomial_weight",
    "spherical_harmonic",
    "spherical_harmonic_table",
    "confluent_polynomial",
    "confluent_polynomial_deriv",
    "radial_normalization",
    "radial_eigenfunction",
    "radial_eigenfunction_deriv",
    "make_quadrature",
    "exp_decay_rule",
]


@dataclass(frozen=True)
class BasisIndex:
    """Bound-state label (n, l, m) with 0-based shell index.

    ``n`` counts shells from 0, so the traditional principal quantum number
    is ``n + 1``.  Constraints 0 <= l <= n and |m| <= l are enforced at
    construction.
    """

    n: int
    l: int
    m: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"shell index must be >= 0, got n={self.n}")
        if not 0 <= self.l <= self.n:
            raise ValueError(f"need 0 <= l <= n, got l={self.l}, n={self.n}")
        if abs(self.m) > self.l:
            raise ValueError(f"need |m| <= l, got m={self.m}, l={self.l}")


@dataclass(frozen=True)
class QuadratureRule:
    """Immutable set of quadrature nodes and strictly positive weights."""

    kind: str
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        """Apply the rule to a callable: sum_i w_i f(x_i)."""
        return float(np.dot(self.weights, f(self.nodes)))


def log_factorial(k: int) -> float:
    """Natural log of k!, exact for k <= 20 and via lgamma above that."""
    if k < 0 or k != int(k):
        raise ValueError(f"factorial argument must be a nonnegative integer, got {k}")
    k = int(k)
    if k <= 20:
        return math.log(math.factorial(k)) if k > 1 else 0.0
    return math.lgamma(k + 1.0)


def sqrt_binomial_weight(l: int, m: int) -> float:
    """Square root of the central binomial ratio (2l)! / ((l+m)!(l-m)!).

    This is the amplitude attached to |l m> inside a spin coherent state;
    evaluated in log space so l of a few hundred is still finite.
    """
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l}")
    if abs(m) > l:
        raise ValueError(f"need |m| <= l, got m={m}, l={l}")
    # canonical subtraction order makes the m <-> -m symmetry exact
    hi, lo = l + abs(m), l - abs(m)
    return math.exp(0.5 * (log_factorial(2 * l) - log_factorial(hi) - log_factorial(lo)))


def _legendre_table(l_max: int, x: np.ndarray) -> np.ndarray:
    """Normalized associated Legendre values P[l, m] for m >= 0.

    Normalization is chosen so that Y_lm(theta, phi) = P[l, m](cos theta)
    * exp(i m phi) is orthonormal on the sphere, with the Condon-Shortley
    sign carried by the sectoral seed.  Returns shape (l_max+1, l_max+1,
    len(x)); entries with m > l stay zero.
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    table = np.zeros((l_max + 1, l_max + 1) + x.shape)
    table[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, l_max + 1):
        table[m, m] = -math.sqrt((2 * m + 1) / (2.0 * m)) * sin_t * table[m - 1, m - 1]
    for m in range(l_max):
        table[m + 1, m] = math.sqrt(2 * m + 3) * x * table[m, m]
    for m in range(l_max + 1):
        for l in range(m + 2, l_max + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            table[l, m] = a * (x * table[l - 1, m] - b * table[l - 2, m])
    return table


def spherical_harmonic(l: int, m: int, theta, phi):
    """Orthonormal spherical harmonic Y_lm with the Condon-Shortley phase.

    ``theta`` is the polar angle in [0, pi], ``phi`` the azimuth; both may
    be arrays (broadcast together).  Y_{l,-m} = (-1)^m conj(Y_{l,m}).
    """
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l}")
    if abs(m) > l:
        raise ValueError(f"need |m| <= l, got m={m}, l={l}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta_b, phi_b = np.broadcast_arrays(theta, phi)
    p = _legendre_table(l, np.cos(theta_b.ravel()))[l, abs(m)]
    p = p.reshape(theta_b.shape)
    if m >= 0:
        out = p * np.exp(1j * m * phi_b)
    else:
        out = (-1) ** (-m) * p * np.exp(1j * m * phi_b)
    if out.shape == ():
        return complex(out)
    return out


def spherical_harmonic_table(l_max: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """All Y_lm for l <= l_max at aligned angle samples.

    Returns a complex array of shape ((l_max+1)**2, npts) with flat channel
    index l*l + l + m (l ascending, m ascending within l).
    """
    theta = np.asarray(theta, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    p = _legendre_table(l_max, np.cos(theta))
    out = np.zeros(((l_max + 1) ** 2, theta.size), dtype=complex)
    for l in range(l_max + 1):
        for m in range(l + 1):
            pos = p[l, m] * np.exp(1j * m * phi)
            out[l * l + l + m] = pos
            if m > 0:
                out[l * l + l - m] = (-1) ** m * np.conj(pos)
    return out


def confluent_polynomial(n: int, l: int, z):
    """Terminating confluent series F(-n+l, 2l+2, z) of degree n - l.

    Evaluated by forward recurrence on the terms, term_j = term_{j-1} *
    (l - n + j - 1) / ((2l + 1 + j) j) * z, to keep every ratio O(1).
    """
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got l={l}, n={n}")
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    acc = np.ones_like(z)
    for j in range(1, n - l + 1):
        term = term * ((l - n + j - 1) / ((2 * l + 1 + j) * j)) * z
        acc = acc + term
    if acc.shape == ():
        return float(acc)
    return acc


def confluent_polynomial_deriv(n: int, l: int, z):
    """d/dz of confluent_polynomial(n, l, z), by the same term recurrence."""
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got l={l}, n={n}")
    z = np.asarray(z, dtype=float)
    acc = np.zeros_like(z)
    if n - l >= 1:
        term = np.full_like(z, (l - n) / (2.0 * l + 2.0))  # coefficient of z^1
        acc = acc + term
        for j in range(2, n - l + 1):
            term = term * ((l - n + j - 1) / ((2 * l + 1 + j) * j)) * z
            acc = acc + j * term
    if acc.shape == ():
        return float(acc)
    return acc


def radial_normalization(n: int, l: int) -> float:
    """Normalization constant of the bound-state radial eigenfunction.

    Equals [1/(2l+1)!] sqrt((n+l+1)! / (2(n+1)(n-l)!)) (2/(n+1))^(3/2),
    assembled in log space.
    """
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got l={l}, n={n}")
    lg = (
        -log_factorial(2 * l + 1)
        + 0.5 * (log_factorial(n + l + 1) - math.log(2.0 * (n + 1)) - log_factorial(n - l))
        + 1.5 * math.log(2.0 / (n + 1))
    )
    return math.exp(lg)


def radial_eigenfunction(n: int, l: int, r):
    """Radial eigenfunction u of the shell-n bound state, in Bohr units.

    u(r) = N [2r/(n+1)]^l F(-n+l, 2l+2, 2r/(n+1)) exp(-r/(n+1)), orthonormal
    under the measure r^2 dr.
    """
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got l={l}, n={n}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be >= 0")
    z = 2.0 * r / (n + 1)
    out = radial_normalization(n, l) * z**l * confluent_polynomial(n, l, z) * np.exp(-0.5 * z)
    if out.shape == ():
        return float(out)
    return out


def radial_eigenfunction_deriv(n: int, l: int, r):
    """d/dr of radial_eigenfunction, by term-wise analytic differentiation."""
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got l={l}, n={n}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be >= 0")
    z = 2.0 * r / (n + 1)
    f = confluent_polynomial(n, l, z)
    fp = confluent_polynomial_deriv(n, l, z)
    # d/dz [z^l F e^{-z/2}] = e^{-z/2} (l z^{l-1} F + z^l F' - z^l F / 2)
    if l == 0:
        dz = fp - 0.5 * f
    else:
        dz = l * z ** (l - 1) * f + z**l * (fp - 0.5 * f)
    out = radial_normalization(n, l) * np.exp(-0.5 * z) * dz * (2.0 / (n + 1))
    if out.shape == ():
        return float(out)
    return out


def make_quadrature(kind: str, m: int, **params) -> QuadratureRule:
    """Build a quadrature rule.

    kind 'legendre': Gauss-Legendre on [a, b] (defaults [-1, 1]); exact for
    polynomials of degree <= 2m-1.
    kind 'laguerre': Gauss-Laguerre on [0, inf) with weight e^{-u}; stable
    node/weight computation up to m = 128.
    kind 'trapezoid': uniform rule on one period (default 2*pi) of a
    periodic function, nodes k*period/m; exact for trigonometric
    polynomials of frequency < m.
    """
    if not isinstance(m, int) or m < 1:
        raise ConfigurationError(f"node count must be a positive integer, got {m!r}")
    if kind == "legendre":
        a = params.pop("a", -1.0)
        b = params.pop("b", 1.0)
        _reject_extra(kind, params)
        if not b > a:
            raise ConfigurationError(f"need b > a, got [{a}, {b}]")
        x, w = roots_legendre(m)
        nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
        weights = 0.5 * (b - a) * w
    elif kind == "laguerre":
        _reject_extra(kind, params)
        if m > 128:
            raise ConfigurationError(f"laguerre rule supported up to 128 nodes, got {m}")
        nodes, weights = roots_laguerre(m)
    elif kind == "trapezoid":
        period = params.pop("period", 2.0 * math.pi)
        _reject_extra(kind, params)
        if not period > 0:
            raise ConfigurationError(f"period must be positive, got {period}")
        nodes = period * np.arange(m) / m
        weights = np.full(m, period / m)
    else:
        raise ConfigurationError(f"unknown quadrature kind {kind!r}")
    return QuadratureRule(kind=kind, nodes=np.asarray(nodes), weights=np.asarray(weights))


def _reject_extra(kind: str, params: dict) -> None:
    if params:
        raise ConfigurationError(f"unknown parameters for {kind!r} rule: {sorted(params)}")


def exp_decay_rule(alpha: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integrals of e^{-alpha r}-decaying integrands.

    Maps an m-point Gauss-Laguerre rule through t = alpha * r so that
    int_0^inf f(r) dr ~= sum_i w_i f(r_i); exact whenever f is a polynomial
    times e^{-alpha r}.  Weights are exponentiated in log space because the
    raw factor w_i e^{t_i} would overflow for large rules.
    """
    if not alpha > 0:
        raise ConfigurationError(f"decay rate must be positive, got {alpha}")
    rule = make_quadrature("laguerre", m)
    t, w = rule.nodes, rule.weights
    return t / alpha, np.exp(np.log(w) + t - math.log(alpha))
