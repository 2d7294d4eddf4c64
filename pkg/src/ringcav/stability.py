"""Linearised dynamics around a steady state and its stability.

Small fluctuations of the coupled mechanical coordinate (Q, P) and the
field quadratures (x, y) obey d/dt u = A u + noise with the 4x4 drift
matrix built here.  Stability is decided two independent ways, by the
eigenvalues of A and by closed-form Routh-Hurwitz inequalities on its
characteristic polynomial, and the two verdicts are cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistency, NumericalFailure
from .model import DerivedParams, PhysicalParams
from .steady import SteadyState

__all__ = [
    "DriftMatrix",
    "StabilityVerdict",
    "drift_matrix",
    "eigenvalues",
    "eigen_stable",
    "routh_hurwitz_stable",
    "stability_verdict",
]

# Routh-Hurwitz and eigenvalue tests may legitimately disagree when the
# slowest eigenvalue sits within this band (relative to omega_m) of the
# imaginary axis; outside it a disagreement is a bug.
_BOUNDARY_BAND = 1e-9


@dataclass(frozen=True, eq=False)
class DriftMatrix:
    """Drift matrix of the linearised dynamics.

    ``entries`` is a real 4x4 array in the basis named by ``basis``.
    The matrix is written for the coordinate that couples to the light;
    in the four-mirror (total-coordinate) arrangement the four coupling
    entries change sign, which flips no eigenvalue real part and no
    spectrum, so the same representative form is used for both
    geometries.
    """

    entries: np.ndarray
    basis: tuple[str, str, str, str] = ("dQ", "dP", "dx", "dy")


def drift_matrix(p: PhysicalParams, d: DerivedParams,
                 s: SteadyState) -> DriftMatrix:
    """Drift matrix at steady state s."""
    wm = p.mech_freq
    kappa = p.cavity_decay
    gchi2 = 2.0 * d.coupling_g * d.chi
    u = s.amplitude.real
    v = s.amplitude.imag
    a = np.array([
        [0.0, wm, 0.0, 0.0],
        [-wm, -d.gamma_m, -gchi2 * u, -gchi2 * v],
        [gchi2 * v, 0.0, -kappa, s.detuning],
        [-gchi2 * u, 0.0, -s.detuning, -kappa],
    ])
    return DriftMatrix(entries=a)


def eigenvalues(a: DriftMatrix) -> np.ndarray:
    """The four eigenvalues, sorted by descending real part."""
    try:
        ev = np.linalg.eigvals(a.entries)
    except np.linalg.LinAlgError as err:
        raise NumericalFailure(f"eigenvalue computation failed: {err}") from err
    order = np.lexsort((ev.imag, ev.real))[::-1]
    return ev[order]


def eigen_stable(a: DriftMatrix) -> bool:
    """True when every eigenvalue has a strictly negative real part."""
    return bool(np.max(eigenvalues(a).real) < 0.0)


def routh_hurwitz_stable(p: PhysicalParams, d: DerivedParams,
                         s: SteadyState) -> bool:
    """Stability from the Routh-Hurwitz conditions on the quartic.

    For the characteristic polynomial of the drift matrix all but two of
    the Hurwitz conditions hold automatically for positive rates; the two
    below are the ones that can fail.
    """
    kappa = p.cavity_decay
    wm = p.mech_freq
    gm = d.gamma_m
    delta = s.detuning
    g2c2n = d.coupling_g ** 2 * d.chi ** 2 * s.photon_number
    k2d2 = kappa * kappa + delta * delta

    rh1 = kappa * gm * (
        k2d2 * k2d2
        + (2.0 * kappa * gm + gm * gm - 2.0 * wm * wm) * k2d2
        + wm * wm * (4.0 * kappa * kappa + wm * wm + 2.0 * kappa * gm)
    ) + 2.0 * wm * delta * g2c2n * (2.0 * kappa + gm) ** 2
    rh2 = wm * k2d2 - 4.0 * delta * g2c2n
    return rh1 > 0.0 and rh2 > 0.0


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of the dual stability check.

    ``margin`` is minus the largest eigenvalue real part (rad/s): positive
    when stable, with magnitude the decay rate of the slowest mode.
    ``stable`` follows the eigenvalue test; ``routh_hurwitz`` and
    ``eigenvalue`` record the two independent answers.
    """

    stable: bool
    routh_hurwitz: bool
    eigenvalue: bool
    margin: float


def stability_verdict(p: PhysicalParams, d: DerivedParams,
                      s: SteadyState) -> StabilityVerdict:
    """Run both stability tests and cross-check them.

    Raises
    ------
    InternalInconsistency
        If the two tests disagree while the slowest eigenvalue is not
        within 1e-9 * omega_m of the imaginary axis.
    """
    a = drift_matrix(p, d, s)
    ev = eigenvalues(a)
    max_re = float(np.max(ev.real))
    eig_ok = max_re < 0.0
    rh_ok = routh_hurwitz_stable(p, d, s)
    if rh_ok != eig_ok and abs(max_re) > _BOUNDARY_BAND * p.mech_freq:
        raise InternalInconsistency(
            "Routh-Hurwitz and eigenvalue stability tests disagree away "
            f"from the boundary: rh={rh_ok}, eigen={eig_ok}, "
            f"max Re(lambda) = {max_re!r}")
    return StabilityVerdict(
        stable=eig_ok,
        routh_hurwitz=rh_ok,
        eigenvalue=eig_ok,
        margin=-max_re,
    )
