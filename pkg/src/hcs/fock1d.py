"""Single-degree-of-freedom coherent-state families over a number basis.

Three constructors cover the canonical states (label z), the generalized
states built on an arbitrary moment weight (label r, theta with periodic
phase), and the degenerate-spectrum states whose phase frequencies
1/(n+1)^2 live on the covering space of the circle (label s, gamma).
Spectral evolution and resolution-of-unity checks operate on the truncated
coefficient vectors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import ConfigurationError, TruncationError
from .weights import WeightFamily

__all__ = [
    "Spectrum",
    "FockExpansion",
    "ResolutionReport",
    "oscillator_cs",
    "generalized_cs",
    "degen_cs",
    "overlap",
    "evolve_spectral",
    "stability_residual",
    "resolution_check_1d",
    "radial_factor_matrix",
]

#: constructor tail-adequacy threshold: |c_{n_max}|^2 <= TAIL_TOL * norm^2
TAIL_TOL = 1e-16

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Spectrum:
    """Diagonal Hamiltonian spectrum: E_n = omega*n or E_n = -omega/(n+1)^2."""

    kind: str
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in ("oscillator", "inverse-square"):
            raise ConfigurationError(f"unknown spectrum kind {self.kind!r}")
        if not self.omega > 0:
            raise ConfigurationError(f"omega must be positive, got {self.omega}")

    def energy(self, n: int) -> float:
        if n < 0:
            raise ValueError(f"level index must be >= 0, got {n}")
        if self.kind == "oscillator":
            return self.omega * n
        return -self.omega / (n + 1.0) ** 2

    def energies(self, count: int) -> np.ndarray:
        n = np.arange(count)
        if self.kind == "oscillator":
            return self.omega * n
        return -self.omega / (n + 1.0) ** 2

    def evolution_phases(self, count: int, t: float) -> np.ndarray:
        """Phase factors e^{-i E_n t} for n < count.

        For the oscillator the angle omega*t is reduced mod 2*pi first, so
        evolution by an exact period is the exact identity on coefficients.
        """
        n = np.arange(count)
        if self.kind == "oscillator":
            w = math.remainder(self.omega * t, _TWO_PI)
            return np.exp(-1j * w * n)
        return np.exp(1j * ((self.omega * t) / (n + 1.0) ** 2))


@dataclass(frozen=True, eq=False)
class FockExpansion:
    """Truncated coefficient vector over number states 0..n_max."""

    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _check_tail(coeffs: np.ndarray, radius: float, n_max: int, what: str) -> None:
    # a zero label radius makes the expansion exact at any truncation
    if radius == 0.0:
        return
    total = float(np.sum(np.abs(coeffs) ** 2))
    tail = abs(coeffs[-1]) ** 2
    if tail > TAIL_TOL * total:
        raise TruncationError(
            f"{what}: truncation n_max={n_max} inadequate "
            f"(|c_last|^2 / norm^2 = {tail / total:.3e} > {TAIL_TOL:.0e})"
        )


def oscillator_cs(z: complex, n_max: int, check_tail: bool = True) -> FockExpansion:
    """Canonical coherent state: c_n = e^{-|z|^2/2} z^n / sqrt(n!).

    Amplitudes are assembled in log space; ``check_tail=False`` skips the
    truncation-adequacy guard for callers comparing identically truncated
    vectors.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    z = complex(z)
    n = np.arange(n_max + 1)
    if z == 0:
        coeffs = np.zeros(n_max + 1, dtype=complex)
        coeffs[0] = 1.0
    else:
        log_amp = -0.5 * abs(z) ** 2 + n * math.log(abs(z)) - 0.5 * gammaln(n + 1.0)
        coeffs = np.exp(log_amp + 1j * (n * cmath.phase(z)))
    if check_tail:
        _check_tail(coeffs, abs(z), n_max, "oscillator_cs")
    return FockExpansion(coeffs, meta={"kind": "oscillator", "z": z})


def _weighted_amplitudes(r: float, family: WeightFamily, n_max: int) -> np.ndarray:
    """Real amplitudes M(r^2) r^n / sqrt(rho_n) for n <= n_max."""
    n = np.arange(n_max + 1)
    log_mom = np.array([family.log_moment(int(k)) for k in n])
    if r == 0.0:
        amp = np.zeros(n_max + 1)
        amp[0] = family.m_value(0.0) * math.exp(-0.5 * log_mom[0])
        return amp
    log_m = math.log(family.m_value(r * r))
    return np.exp(log_m + n * math.log(r) - 0.5 * log_mom)


def generalized_cs(
    r: float, theta: float, family: WeightFamily, n_max: int, check_tail: bool = True
) -> FockExpansion:
    """Moment-weight coherent state: c_n = M(r^2) r^n e^{i n theta} / sqrt(rho_n)."""
    if r < 0:
        raise ValueError(f"radial label must be >= 0, got r={r}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    n = np.arange(n_max + 1)
    coeffs = _weighted_amplitudes(r, family, n_max) * np.exp(1j * n * theta)
    if check_tail:
        _check_tail(coeffs, r, n_max, "generalized_cs")
    return FockExpansion(
        coeffs, meta={"kind": "generalized", "r": r, "theta": theta, "family": family.name}
    )


def degen_cs(
    s: float, gamma: float, family: WeightFamily, n_max: int, check_tail: bool = True
) -> FockExpansion:
    """Degenerate-spectrum coherent state with covering-space phase label.

    c_n = M(s^2) s^n e^{i gamma/(n+1)^2} / sqrt(rho_n); gamma is unbounded
    because the frequencies 1/(n+1)^2 are incommensurate with 2*pi.
    """
    if s < 0:
        raise ValueError(f"radial label must be >= 0, got s={s}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    n = np.arange(n_max + 1)
    coeffs = _weighted_amplitudes(s, family, n_max) * np.exp(1j * (gamma / (n + 1.0) ** 2))
    if check_tail:
        _check_tail(coeffs, s, n_max, "degen_cs")
    return FockExpansion(
        coeffs, meta={"kind": "degenerate", "s": s, "gamma": gamma, "family": family.name}
    )


def overlap(a: FockExpansion, b: FockExpansion) -> complex:
    """Inner product <a|b> = sum conj(a_n) b_n, padding the shorter vector."""
    size = max(len(a.coeffs), len(b.coeffs))
    av = np.zeros(size, dtype=complex)
    bv = np.zeros(size, dtype=complex)
    av[: len(a.coeffs)] = a.coeffs
    bv[: len(b.coeffs)] = b.coeffs
    return complex(np.vdot(av, bv))


def evolve_spectral(x: FockExpansion, spectrum: Spectrum, t: float) -> FockExpansion:
    """Apply e^{-i E_n t} to each coefficient; pure phases, norm preserved."""
    phases = spectrum.evolution_phases(len(x.coeffs), t)
    meta = dict(x.meta)
    meta["evolved_t"] = meta.get("evolved_t", 0.0) + t
    return FockExpansion(x.coeffs * phases, meta=meta)


def stability_residual(
    kind: str,
    label,
    spectrum: Spectrum,
    t: float,
    family: WeightFamily | None = None,
    n_max: int = 48,
) -> float:
    """Max coefficient deviation between evolution and the label shift.

    kind 'oscillator' (label z, oscillator spectrum, shift z -> e^{-i w t} z),
    'generalized' (label (r, theta), oscillator spectrum, theta -> theta - w t),
    or 'degenerate' (label (s, gamma), inverse-square spectrum, gamma ->
    gamma + w t).  Raw coefficients are compared: the identities carry no
    extra global phase, so any residual beyond roundoff is a bug.  Roundoff
    itself scales like eps * |label angles + w t|; keep labels O(10) to
    resolve the 5e-15 contract.
    """
    if kind == "oscillator":
        if spectrum.kind != "oscillator":
            raise ConfigurationError("oscillator states are label-stable under the oscillator spectrum")
        z = complex(label)
        state = oscillator_cs(z, n_max, check_tail=False)
        shifted = oscillator_cs(z * cmath.exp(-1j * spectrum.omega * t), n_max, check_tail=False)
    elif kind == "generalized":
        if spectrum.kind != "oscillator":
            raise ConfigurationError("generalized states are label-stable under the oscillator spectrum")
        if family is None:
            raise ConfigurationError("generalized states need a weight family")
        r, theta = label
        state = generalized_cs(r, theta, family, n_max, check_tail=False)
        shifted = generalized_cs(r, theta - spectrum.omega * t, family, n_max, check_tail=False)
    elif kind == "degenerate":
        if spectrum.kind != "inverse-square":
            raise ConfigurationError("degenerate states are label-stable under the inverse-square spectrum")
        if family is None:
            raise ConfigurationError("degenerate states need a weight family")
        s, gamma = label
        state = degen_cs(s, gamma, family, n_max, check_tail=False)
        shifted = degen_cs(s, gamma + spectrum.omega * t, family, n_max, check_tail=False)
    else:
        raise ConfigurationError(f"unknown state kind {kind!r}")
    evolved = evolve_spectral(state, spectrum, t)
    return float(np.max(np.abs(evolved.coeffs - shifted.coeffs)))


def radial_factor_matrix(family: WeightFamily, n_max: int, radial_nodes: int = 64) -> np.ndarray:
    """Normalized radial overlap factors R[n, n'].

    R[n, n'] = int k(u) M^2(u) u^{(n+n')/2} du / sqrt(rho_n rho_n'),
    evaluated with the family's substitution rule; the diagonal reduces to
    the moment identity and equals 1 up to quadrature error.
    """
    u, log_w = family.radial_log_rule(radial_nodes)
    k_vals = np.asarray(family.k_weight(u), dtype=float)
    m2_vals = np.asarray(family.M_squared(u), dtype=float)
    with np.errstate(divide="ignore"):
        log_base = log_w + np.log(k_vals) + np.log(m2_vals)
        log_u = np.log(u)
    log_mom = np.array([family.log_moment(n) for n in range(n_max + 1)])
    n = np.arange(n_max + 1)
    half_power = 0.5 * (n[:, None] + n[None, :])
    log_integrals = logsumexp(log_base[None, None, :] + half_power[:, :, None] * log_u[None, None, :], axis=-1)
    return np.exp(log_integrals - 0.5 * (log_mom[:, None] + log_mom[None, :]))


@dataclass(frozen=True, eq=False)
class ResolutionReport:
    """Result of a resolution-of-unity check over a truncated basis."""

    mode: str
    matrix: np.ndarray
    diag_max_dev: float
    offdiag_max: float
    gamma_window: float | None = None
    certificate_bound: float | None = None
    certificate_matrix: np.ndarray | None = None


def resolution_check_1d(
    family: WeightFamily,
    phase: str,
    n_max: int,
    radial_nodes: int = 64,
    gamma_window: float | None = None,
) -> ResolutionReport:
    """Gram operator of the coherent-state measure over number states.

    phase 'periodic': the angular integral over one period is exact and
    kills all off-diagonals; the diagonal is the quadrature moment ratio
    int u^n rho(u) du / rho_n.

    phase 'covering': the unbounded phase average over [-G, G] is evaluated
    in closed form as sinc(G * D_{nn'}) with D_{nn'} = 1/(n+1)^2 -
    1/(n'+1)^2, never by numerical integration; off-diagonals carry the
    certificate bound radial/(G |D|) from |sinc(x)| <= 1/|x|.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    radial = radial_factor_matrix(family, n_max, radial_nodes)
    diag = np.diag(radial)
    diag_dev = float(np.max(np.abs(diag - 1.0)))
    if phase == "periodic":
        matrix = np.diag(diag.copy())
        return ResolutionReport(
            mode="periodic",
            matrix=matrix,
            diag_max_dev=diag_dev,
            offdiag_max=0.0,
        )
    if phase != "covering":
        raise ConfigurationError(f"phase mode must be 'periodic' or 'covering', got {phase!r}")
    if gamma_window is None or not gamma_window > 0:
        raise ConfigurationError("covering mode needs a positive gamma window")
    n = np.arange(n_max + 1)
    delta = 1.0 / (n[:, None] + 1.0) ** 2 - 1.0 / (n[None, :] + 1.0) ** 2
    matrix = radial * np.sinc(gamma_window * delta / math.pi)
    off = ~np.eye(n_max + 1, dtype=bool)
    offdiag_max = float(np.max(np.abs(matrix[off]))) if n_max > 0 else 0.0
    cert = np.full_like(radial, np.inf)
    if n_max > 0:
        cert[off] = radial[off] / (gamma_window * np.abs(delta[off]))
    bound = float(np.max(cert[off])) if n_max > 0 else 0.0
    return ResolutionReport(
        mode="covering",
        matrix=matrix,
        diag_max_dev=diag_dev,
        offdiag_max=offdiag_max,
        gamma_window=gamma_window,
        certificate_bound=bound,
        certificate_matrix=cert,
    )
