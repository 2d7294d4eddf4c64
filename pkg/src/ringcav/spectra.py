"""Quantum-noise spectra and the entanglement criteria built from them.

Linearising around a stable steady state and Fourier transforming gives
the fluctuation of the coupled mechanical momentum as a rational
function of frequency, driven by three noise channels: the squeezed
vacuum entering through the cavity (terms proportional to N and M), and
the thermal Langevin force on the mirrors.  Its stationary variance is
the frequency integral of a spectral density made of three pieces:

* an ``a`` piece, real, carrying the phase-insensitive vacuum/squeeze
  noise N and the thermal noise,
* ``b`` and ``c`` pieces, complex, carrying the phase-sensitive
  correlation M; they enter shifted by twice the mechanical frequency
  and only their symmetric combination over +/- frequency is real.

The variance of the orthogonal mechanical quadrature (the one decoupled
from the light) stays thermal.  A product of the two variances below 1,
or their sum below 2, witnesses entanglement between the two mirrors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import HBAR, KB
from .errors import InvalidParameter, NumericalFailure, UnstableOperatingPoint
from .model import DerivedParams, PhysicalParams
from .quadrature import integrate_adaptive
from .stability import drift_matrix, eigenvalues, stability_verdict
from .steady import SteadyState, steady_state_at_detuning

__all__ = [
    "QuadratureConfig",
    "IntegrandTerms",
    "EntanglementResult",
    "d_of_omega",
    "integrand_terms",
    "momentum_variance",
    "q_plus_variance",
    "entanglement_result",
]

# Acceptable imaginary leakage of the (mathematically real) variance
# integral, relative to its real part.
_IMAG_RESIDUAL = 1e-8


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the variance integral.

    Attributes
    ----------
    cutoff:
        Half-width of the integration window in units of the mechanical
        frequency; the integrand is cut off at +/- cutoff * omega_m.
        Must exceed 2 so the shifted correlation pieces are covered.
    rel_tol, abs_tol:
        Tolerances handed to the adaptive integrator.
    max_depth:
        Refinement-generation limit of the adaptive integrator.
    """

    cutoff: float = 50.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 40

    def __post_init__(self):
        if not (isinstance(self.cutoff, (int, float))
                and math.isfinite(self.cutoff) and self.cutoff > 2.0):
            raise InvalidParameter("cutoff", self.cutoff, "> 2")
        if not (self.rel_tol > 0.0 and math.isfinite(self.rel_tol)):
            raise InvalidParameter("rel_tol", self.rel_tol, "> 0 and finite")
        if not (self.abs_tol > 0.0 and math.isfinite(self.abs_tol)):
            raise InvalidParameter("abs_tol", self.abs_tol, "> 0 and finite")
        if not (isinstance(self.max_depth, int) and self.max_depth >= 1):
            raise InvalidParameter("max_depth", self.max_depth,
                                   "an integer >= 1")


def d_of_omega(omega, p: PhysicalParams, d: DerivedParams,
               s: SteadyState):
    """Response denominator of the driven mirror-field loop.

    Vanishing of this function on the real axis marks the instability
    threshold; its conjugation symmetry is d(-omega) = conj(d(omega)).
    Accepts a scalar or an array.
    """
    wm = p.mech_freq
    kappa = p.cavity_decay
    delta = s.detuning
    w = np.asarray(omega)
    out = (-4.0 * wm * delta * d.coupling_g ** 2 * s.photon_number
           * d.chi ** 2
           + (wm * wm - w * w - 1j * d.gamma_m * w)
           * ((kappa - 1j * w) ** 2 + delta * delta))
    return out if out.shape else complex(out)


def _thermal_weight(p: PhysicalParams) -> Callable[[np.ndarray], np.ndarray]:
    """omega * (1 + coth(hbar omega / 2 kB T)) as a vectorised function.

    Written as 2 omega / (1 - exp(-hbar omega / kB T)) to stay finite for
    negative arguments, continued by its limit 2 kB T / hbar at omega = 0.
    At T = 0 it degenerates to 2 omega for positive omega and 0 otherwise.
    """
    if p.bath_temp > 0.0:
        alpha = HBAR / (2.0 * KB * p.bath_temp)

        def weight(w: np.ndarray) -> np.ndarray:
            x = np.clip(alpha * w, -700.0, 700.0)
            with np.errstate(over="ignore"):
                return np.where(x == 0.0, 2.0 / alpha,
                                2.0 * w / -np.expm1(-2.0 * x))
    else:
        def weight(w: np.ndarray) -> np.ndarray:
            return np.where(w > 0.0, 2.0 * w, 0.0)

    return weight


def _raw_terms(w, p: PhysicalParams, d: DerivedParams, s: SteadyState,
               thermal: Callable[[np.ndarray], np.ndarray]):
    """The three spectral pieces a(w), b(w), c(w) on an array w."""
    wm = p.mech_freq
    kappa = p.cavity_decay
    delta = s.detuning
    n = s.photon_number
    pref = 8.0 * kappa * d.coupling_g ** 2 * d.chi ** 2
    nsq = d.n_squeeze
    msq = d.m_squeeze
    amp = s.amplitude

    dw = d_of_omega(w, p, d, s)
    dmw = np.conj(dw)  # d(-w)

    a = (pref * n * ((nsq + 1.0) * (kappa ** 2 + (delta + w) ** 2)
                     + nsq * (kappa ** 2 + (delta - w) ** 2))
         + 2.0 * d.gamma_m / wm * thermal(w)
         * ((delta ** 2 + kappa ** 2 - w * w) ** 2
            + 4.0 * kappa ** 2 * w * w)) / (dw * dmw)
    b = (pref * np.conj(amp) ** 2 * msq
         * (kappa - 1j * (delta + w))
         * (kappa - 1j * (delta + 2.0 * wm - w))
         / (dw * d_of_omega(2.0 * wm - w, p, d, s)))
    c = (pref * amp ** 2 * np.conj(msq)
         * (kappa + 1j * (delta - w))
         * (kappa + 1j * (delta + 2.0 * wm + w))
         / (dw * d_of_omega(-2.0 * wm - w, p, d, s)))
    return a, b, c


@dataclass(frozen=True)
class IntegrandTerms:
    """The spectral density at one frequency, split into its pieces.

    ``total`` is omega^2 a + omega (omega - 2 omega_m) b
    + omega (omega + 2 omega_m) c; it is complex pointwise and real only
    after combining +/- omega, since c(-omega) = conj(b(omega)).
    """

    omega: float
    a_term: float
    b_term: complex
    c_term: complex
    total: complex


def integrand_terms(omega: float, p: PhysicalParams, d: DerivedParams,
                    s: SteadyState) -> IntegrandTerms:
    """Evaluate the three spectral pieces at a single frequency (rad/s)."""
    w = np.asarray([float(omega)])
    thermal = _thermal_weight(p)
    a, b, c = _raw_terms(w, p, d, s, thermal)
    a_val = complex(a[0])
    if abs(a_val.imag) > 1e-10 * max(abs(a_val.real), 1e-300):
        raise NumericalFailure(
            f"phase-insensitive spectral piece came out complex: {a_val!r}")
    wm = p.mech_freq
    b_val = complex(b[0])
    c_val = complex(c[0])
    total = (omega ** 2 * a_val.real
             + omega * (omega - 2.0 * wm) * b_val
             + omega * (omega + 2.0 * wm) * c_val)
    return IntegrandTerms(omega=float(omega), a_term=a_val.real,
                          b_term=b_val, c_term=c_val, total=total)


def _breakpoints(p: PhysicalParams, d: DerivedParams, s: SteadyState,
                 cutoff: float) -> np.ndarray:
    """Initial integration mesh clustered on the known resonances.

    Eigenvalues of the drift matrix locate the poles of the response:
    each mode at +/- Omega with half-width |Re lambda| shows up in the
    spectrum at +/- Omega and, through the shifted correlation pieces,
    around +/- (2 omega_m -/+ Omega).  A geometric ladder of points is
    placed across every such line so the first partition already
    resolves features a thousand times narrower than the window.
    """
    wm = p.mech_freq
    lim = cutoff * wm
    delta = s.detuning

    pts = {0.0, -lim, lim}
    for marker in (wm, delta, 2.0 * wm - delta, 2.0 * wm + delta):
        pts.add(marker)
        pts.add(-marker)

    ev = eigenvalues(drift_matrix(p, d, s))
    for lam in ev:
        center = abs(lam.imag)
        if center == 0.0:
            continue
        width = max(2.0 * abs(lam.real), 1e-9 * wm)
        for base in (center, -center,
                     2.0 * wm - center, 2.0 * wm + center,
                     -2.0 * wm + center, -2.0 * wm - center):
            for step in (0.0, 2.0, -2.0, 6.0, -6.0, 18.0, -18.0,
                         54.0, -54.0):
                pts.add(base + step * width)

    mesh = np.array(sorted(x for x in pts if -lim <= x <= lim))
    keep = np.concatenate([[True], np.diff(mesh) > 1e-9 * wm])
    mesh = mesh[keep]
    if mesh[0] != -lim:
        mesh = np.concatenate([[-lim], mesh])
    if mesh[-1] != lim:
        mesh = np.concatenate([mesh, [lim]])
    return mesh


def momentum_variance(p: PhysicalParams, d: DerivedParams, s: SteadyState,
                      quad: QuadratureConfig | None = None) -> float:
    """Stationary variance of the light-coupled mechanical momentum.

    Integrates the spectral density over [-cutoff, cutoff] * omega_m
    with the batched adaptive rule, after checking that s is a stable
    operating point.

    Raises
    ------
    UnstableOperatingPoint
        If the drift matrix has an eigenvalue with non-negative real
        part; the stationary variance does not exist there.
    NumericalFailure
        If the integral does not converge, leaks a non-negligible
        imaginary part, or comes out non-positive.
    """
    if quad is None:
        quad = QuadratureConfig()
    verdict = stability_verdict(p, d, s)
    if not verdict.stable:
        raise UnstableOperatingPoint(
            f"no stationary state at detuning {s.detuning!r} rad/s "
            f"(stability margin {verdict.margin!r} rad/s)")

    wm = p.mech_freq
    thermal = _thermal_weight(p)

    def density(w: np.ndarray) -> np.ndarray:
        a, b, c = _raw_terms(w, p, d, s, thermal)
        return (w * w * a + w * (w - 2.0 * wm) * b
                + w * (w + 2.0 * wm) * c)

    mesh = _breakpoints(p, d, s, quad.cutoff)
    result = integrate_adaptive(density, mesh, rel_tol=quad.rel_tol,
                                abs_tol=quad.abs_tol,
                                max_depth=quad.max_depth)
    value = result.value / (2.0 * math.pi)
    if abs(value.imag) > _IMAG_RESIDUAL * abs(value.real):
        raise NumericalFailure(
            f"variance integral left imaginary residue {value!r}")
    if not value.real > 0.0:
        raise NumericalFailure(
            f"variance integral came out non-positive: {value.real!r}")
    return float(value.real)


def q_plus_variance(p: PhysicalParams, d: DerivedParams) -> float:
    """Variance of the mechanical quadrature decoupled from the light.

    It stays in thermal equilibrium with the mirror bath:
    1/2 + n_bar at temperature T, exactly 1/2 at T = 0.
    """
    if math.isinf(d.thermal_ratio):
        return 0.5
    return 0.5 + 1.0 / math.expm1(d.thermal_ratio)


@dataclass(frozen=True)
class EntanglementResult:
    """Both mirror-mirror entanglement criteria at one operating point.

    ``product_entangled`` is the product criterion var_q_plus *
    var_p_minus < 1; ``sum_entangled`` the additive criterion
    var_q_plus + var_p_minus < 2.  The roles of the two quadratures
    swap between the three- and four-mirror geometries, with identical
    numbers.
    """

    delta: float
    var_q_plus: float
    var_p_minus: float
    product: float
    sum: float
    product_entangled: bool
    sum_entangled: bool


def entanglement_result(p: PhysicalParams, d: DerivedParams, delta: float,
                        quad: QuadratureConfig | None = None
                        ) -> EntanglementResult:
    """Evaluate both criteria at the given effective detuning (rad/s)."""
    s = steady_state_at_detuning(p, d, delta)
    vp = momentum_variance(p, d, s, quad)
    vq = q_plus_variance(p, d)
    prod = vq * vp
    tot = vq + vp
    return EntanglementResult(
        delta=float(delta),
        var_q_plus=vq,
        var_p_minus=vp,
        product=prod,
        sum=tot,
        product_entangled=prod < 1.0,
        sum_entangled=tot < 2.0,
    )
