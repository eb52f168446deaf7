"""Moment-weight families: a positive weight rho on [0, inf) together with
its moments rho_n, the state normalization M, and the measure density k.

The three pieces are tied together by rho_n = int_0^inf u^n rho(u) du and
rho = M^2 * k; every coherent-state family in this package is generated by
one ``WeightFamily``.  Two built-ins are provided (``exponential`` with
rho_n = n! and ``sqrt-exponential`` with rho_n = (2n+1)!) plus tabulated
custom families loaded from JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import logsumexp

from .errors import ConfigurationError, NumericalError, TruncationError
from .specfun import log_factorial, make_quadrature

__all__ = [
    "WeightFamily",
    "CheckResult",
    "FamilyValidation",
    "builtin_family",
    "tabulated_family",
    "family_from_dict",
    "family_from_file",
    "validate_family",
]

BUILTIN_NAMES = ("exponential", "sqrt-exponential")

#: truncation order of normalization series when no closed form exists
DEFAULT_SERIES_N_MAX = 64

#: relative size below which a series tail is considered converged
SERIES_TAIL_TOL = 1e-14


class WeightFamily:
    """A weight rho(u) >= 0 on [0, inf) with moments, M^2 and k.

    Instances are immutable after construction apart from the internal
    moment memo, which is append-only; they are safe to share across
    threads once validated.
    """

    def __init__(
        self,
        name: str,
        rho: Callable[[np.ndarray], np.ndarray],
        *,
        moment_closed: Callable[[int], float] | None = None,
        log_moment_closed: Callable[[int], float] | None = None,
        m_squared_closed: Callable[[np.ndarray], np.ndarray] | None = None,
        k_closed: Callable[[np.ndarray], np.ndarray] | None = None,
        subst_power: int = 1,
        declared_moments: Sequence[float] | None = None,
        series_n_max: int = DEFAULT_SERIES_N_MAX,
        u_range: tuple[float, float] = (1e-3, 50.0),
        grid: tuple[np.ndarray, np.ndarray] | None = None,
    ):
        self.name = name
        self.rho = rho
        self._moment_closed = moment_closed
        self._log_moment_closed = log_moment_closed
        self._m_squared_closed = m_squared_closed
        self._k_closed = k_closed
        if subst_power not in (1, 2):
            raise ConfigurationError(f"substitution power must be 1 or 2, got {subst_power}")
        self._subst_power = subst_power
        self._declared = None
        if declared_moments is not None:
            declared = np.asarray(declared_moments, dtype=float)
            if declared.ndim != 1 or declared.size == 0:
                raise ConfigurationError("declared moments must be a nonempty sequence")
            self._declared = declared
        self.series_n_max = int(series_n_max)
        self.u_range = (float(u_range[0]), float(u_range[1]))
        self._grid = grid
        self._moment_memo: dict[int, float] = {}

    def __repr__(self):
        return f"WeightFamily({self.name!r})"

    # -- moments -----------------------------------------------------------

    def moment(self, n: int) -> float:
        """n-th moment rho_n, from the stored table or closed form when
        available, otherwise by quadrature (memoized)."""
        if n < 0:
            raise ValueError(f"moment order must be >= 0, got {n}")
        if self._declared is not None and n < self._declared.size:
            return float(self._declared[n])
        if self._moment_closed is not None:
            return self._moment_closed(n)
        if self._log_moment_closed is not None:
            return math.exp(self._log_moment_closed(n))
        if n not in self._moment_memo:
            self._moment_memo[n] = self.moment_by_quadrature(n)
        return self._moment_memo[n]

    def log_moment(self, n: int) -> float:
        """log rho_n; preferred over moment() in amplitude arithmetic."""
        if self._declared is not None and n < self._declared.size:
            value = float(self._declared[n])
            if value <= 0:
                raise NumericalError(f"{self.name}: declared moment rho_{n} = {value} is not positive")
            return math.log(value)
        if self._log_moment_closed is not None:
            return self._log_moment_closed(n)
        return math.log(self.moment(n))

    def moment_by_quadrature(self, n: int, nodes: int | None = None) -> float:
        """rho_n computed numerically, independent of any stored table."""
        if n < 0:
            raise ValueError(f"moment order must be >= 0, got {n}")
        if nodes is None:
            nodes = max(64, self._subst_power * n + 2)
        u, log_w = self.radial_log_rule(nodes)
        with np.errstate(divide="ignore"):
            log_rho = np.log(self.rho(u))
            log_u = np.log(u)
        terms = log_w + log_rho
        if n > 0:
            terms = terms + n * log_u
        value = float(np.exp(logsumexp(terms)))
        if not np.isfinite(value) or value <= 0:
            raise NumericalError(
                f"{self.name}: quadrature for rho_{n} returned {value} with {nodes} nodes"
            )
        return value

    # -- normalization and measure density ----------------------------------

    def M_squared(self, u):
        """M^2(u): closed form when available, else the truncated series
        [sum_n u^n / rho_n]^{-1}."""
        if self._m_squared_closed is not None:
            return self._m_squared_closed(np.asarray(u, dtype=float))
        return self._series_m_squared(u)

    def _series_m_squared(self, u):
        u = np.asarray(u, dtype=float)
        scalar = u.shape == ()
        log_s = self._log_norm_sum(np.atleast_1d(u), self.series_n_max)[0]
        out = np.exp(-log_s)
        return float(out[0]) if scalar else out.reshape(u.shape)

    def _log_norm_sum(self, u: np.ndarray, n_max: int):
        """log sum_{n<=n_max} u^n/rho_n and the log of its last term."""
        n = np.arange(n_max + 1)
        log_mom = np.array([self.log_moment(int(k)) for k in n])
        log_u = np.log(np.maximum(u, 1e-300))
        log_terms = n[None, :] * log_u[:, None] - log_mom[None, :]
        # u = 0 contributes only the n = 0 term
        log_terms[u == 0, 1:] = -np.inf
        log_terms[u == 0, 0] = -log_mom[0]
        return logsumexp(log_terms, axis=1), log_terms[:, -1]

    def normalization_m(self, u: float, n_max: int | None = None) -> float:
        """Truncated-series normalization [sum_{n<=n_max} u^n/rho_n]^{-1/2}.

        Raises TruncationError when the last retained term is not below
        SERIES_TAIL_TOL of the sum, i.e. the series has not converged at
        this truncation.
        """
        if u < 0:
            raise ValueError(f"argument must be >= 0, got u={u}")
        if n_max is None:
            n_max = self.series_n_max
        log_s, log_last = self._log_norm_sum(np.array([float(u)]), n_max)
        if u > 0 and log_last[0] - log_s[0] > math.log(SERIES_TAIL_TOL):
            raise TruncationError(
                f"{self.name}: normalization series tail at u={u} not converged "
                f"with n_max={n_max} (last term / sum = {math.exp(log_last[0] - log_s[0]):.3e})"
            )
        return math.exp(-0.5 * log_s[0])

    def m_value(self, u: float) -> float:
        """sqrt(M^2(u)), the amplitude prefactor used by state constructors."""
        return math.sqrt(float(self.M_squared(float(u))))

    def k_weight(self, u):
        """Measure density k(u) = rho(u) / M^2(u)."""
        if self._k_closed is not None:
            return self._k_closed(np.asarray(u, dtype=float))
        u = np.asarray(u, dtype=float)
        m2 = np.asarray(self.M_squared(u), dtype=float)
        if np.any(m2 <= 0):
            raise NumericalError(f"{self.name}: M^2 vanished where k(u) was requested")
        out = self.rho(u) / m2
        if out.shape == ():
            return float(out)
        return out

    # -- quadrature over u ---------------------------------------------------

    def radial_log_rule(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes u_i and log-weights for int_0^inf f(u) du.

        Built from Gauss-Laguerre through the family's substitution
        u = x^p, so that moment integrands reduce to polynomials for the
        built-ins; tabulated families integrate over their grid support
        with a composite Gauss-Legendre rule instead.
        """
        if self._grid is not None:
            return self._composite_grid_rule()
        rule = make_quadrature("laguerre", m)
        x, w = rule.nodes, rule.weights
        p = self._subst_power
        log_w = np.log(w) + x
        if p == 2:
            log_w = log_w + math.log(2.0) + np.log(x)
            return x * x, log_w
        return x, log_w

    def _composite_grid_rule(self, points_per_cell: int = 8):
        grid_u, _ = self._grid
        base = make_quadrature("legendre", points_per_cell)
        nodes, weights = [], []
        for a, b in zip(grid_u[:-1], grid_u[1:]):
            nodes.append(0.5 * (b - a) * base.nodes + 0.5 * (b + a))
            weights.append(0.5 * (b - a) * base.weights)
        return np.concatenate(nodes), np.log(np.concatenate(weights))


def builtin_family(name: str) -> WeightFamily:
    """One of the two built-in weight families.

    ``exponential``: rho = e^{-u}, rho_n = n!, M^2 = e^{-u}, k = 1.
    ``sqrt-exponential``: rho = e^{-sqrt(u)}/2, rho_n = (2n+1)!,
    M^2 = sqrt(u)/sinh(sqrt(u)).
    """
    if name == "exponential":
        return WeightFamily(
            "exponential",
            rho=lambda u: np.exp(-np.asarray(u, dtype=float)),
            moment_closed=lambda n: _float_factorial(n),
            log_moment_closed=lambda n: log_factorial(n),
            m_squared_closed=lambda u: np.exp(-np.asarray(u, dtype=float)),
            k_closed=lambda u: np.ones_like(np.asarray(u, dtype=float)),
            subst_power=1,
        )
    if name == "sqrt-exponential":
        return WeightFamily(
            "sqrt-exponential",
            rho=lambda u: 0.5 * np.exp(-np.sqrt(np.asarray(u, dtype=float))),
            moment_closed=lambda n: _float_factorial(2 * n + 1),
            log_moment_closed=lambda n: log_factorial(2 * n + 1),
            m_squared_closed=lambda u: _x_over_sinh(np.sqrt(np.asarray(u, dtype=float))),
            subst_power=2,
        )
    raise ConfigurationError(
        f"unknown weight family {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}"
    )


def _float_factorial(k: int) -> float:
    """k! as the nearest double; inf beyond the double range."""
    try:
        return float(math.factorial(k))
    except OverflowError:
        return math.inf


def _x_over_sinh(x: np.ndarray) -> np.ndarray:
    """x / sinh(x), continued through x = 0 by its Taylor series."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        out = np.where(small, 1.0 - x * x / 6.0, safe / np.sinh(safe))
    return out


def tabulated_family(
    name: str,
    grid_u: Sequence[float],
    rho_values: Sequence[float],
    n_max: int,
    moments: Sequence[float] | None = None,
) -> WeightFamily:
    """Custom family from a tabulated weight.

    The weight is interpolated monotonically (PCHIP) on the grid and treated
    as zero outside it; moments up to ``n_max`` are either taken from the
    declared table or computed by quadrature over the grid support.
    """
    grid = np.asarray(grid_u, dtype=float)
    vals = np.asarray(rho_values, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ConfigurationError("grid_u must hold at least two points")
    if np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ConfigurationError("grid_u must be strictly increasing and nonnegative")
    if vals.shape != grid.shape:
        raise ConfigurationError("rho table must match grid_u in length")
    if np.any(vals < 0):
        raise ConfigurationError("rho values must be nonnegative")
    if n_max < 0:
        raise ConfigurationError(f"n_max must be >= 0, got {n_max}")
    if moments is not None and len(moments) != n_max + 1:
        raise ConfigurationError(
            f"declared moment table must have n_max+1 = {n_max + 1} entries, got {len(moments)}"
        )
    interp = PchipInterpolator(grid, vals, extrapolate=False)

    def rho(u):
        u = np.asarray(u, dtype=float)
        out = interp(u)
        return np.where(np.isnan(out), 0.0, np.maximum(out, 0.0))

    family = WeightFamily(
        name,
        rho=rho,
        declared_moments=moments,
        series_n_max=n_max,
        u_range=(max(grid[0], 1e-3), float(grid[-1])),
        grid=(grid, vals),
    )
    if moments is None:
        declared = [family.moment_by_quadrature(n) for n in range(n_max + 1)]
        family._declared = np.asarray(declared, dtype=float)
    return family


def family_from_dict(payload: dict) -> WeightFamily:
    """Custom family from a parsed JSON object {name, grid_u, rho, n_max[, moments]}."""
    missing = [k for k in ("name", "grid_u", "rho", "n_max") if k not in payload]
    if missing:
        raise ConfigurationError(f"custom family is missing keys: {', '.join(missing)}")
    return tabulated_family(
        str(payload["name"]),
        payload["grid_u"],
        payload["rho"],
        int(payload["n_max"]),
        moments=payload.get("moments"),
    )


def family_from_file(path: str | Path) -> WeightFamily:
    """Load a custom family description from a JSON file."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read custom family file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigurationError(f"custom family file {path} must hold a JSON object")
    return family_from_dict(payload)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: float
    detail: str = ""


@dataclass(frozen=True)
class FamilyValidation:
    family: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def validate_family(family: WeightFamily, n_max: int = 10, tol: float = 1e-9) -> FamilyValidation:
    """Consistency report for a weight family.

    Checks (a) stored moments against independent quadrature for n <= n_max,
    (b) the factorization rho = M^2 k on a log-spaced grid, (c) positivity
    of rho, k and the moments.  Failures are report entries, not exceptions.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    checks = []

    worst = 0.0
    worst_n = 0
    for n in range(n_max + 1):
        stored = family.moment(n)
        quad = family.moment_by_quadrature(n)
        dev = abs(quad - stored) / abs(stored)
        if dev > worst:
            worst, worst_n = dev, n
    checks.append(
        CheckResult(
            name="moments",
            passed=worst <= tol,
            measured=worst,
            bound=tol,
            detail=f"worst relative deviation at moment n={worst_n}",
        )
    )

    u_grid = np.geomspace(family.u_range[0], family.u_range[1], 40)
    rho_vals = np.asarray(family.rho(u_grid), dtype=float)
    recon = np.asarray(family.M_squared(u_grid), dtype=float) * np.asarray(
        family.k_weight(u_grid), dtype=float
    )
    scale = np.maximum(np.abs(rho_vals), 1e-300)
    fact_dev = float(np.max(np.abs(recon - rho_vals) / scale))
    checks.append(
        CheckResult(
            name="factorization",
            passed=fact_dev <= 1e-10,
            measured=fact_dev,
            bound=1e-10,
            detail="max relative |rho - M^2 k| on log-spaced grid",
        )
    )

    k_vals = np.asarray(family.k_weight(u_grid), dtype=float)
    moments = np.array([family.moment(n) for n in range(n_max + 1)])
    neg = min(float(rho_vals.min()), float(k_vals.min()), float(moments.min()))
    checks.append(
        CheckResult(
            name="positivity",
            passed=neg > 0 or (rho_vals.min() >= 0 and k_vals.min() >= 0 and moments.min() > 0),
            measured=neg,
            bound=0.0,
            detail="min of rho, k on grid and of the moment table",
        )
    )

    return FamilyValidation(family=family.name, checks=tuple(checks))
