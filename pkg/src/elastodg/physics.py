"""Characteristics, hat-variable solves and flux fluctuations.

All face quantities are computed from the element traces by solving a small
Riemann-like problem that keeps the outgoing characteristics and enforces
the physical condition at the face exactly:

* external boundaries: ``q = r p`` at the left end, ``p = r q`` at the right,
* interior faces: force balance plus a friction law ``sigma = alpha [[v]]``.

Every function broadcasts over numpy arrays so a whole set of faces can be
solved in one call.

Sign conventions: ``p = (Z v + sigma)/2`` travels left, ``q = (Z v - sigma)/2``
travels right.  At an interior face the ``-`` side is the element on the
left, ``+`` the element on the right, and ``[[v]] = v+ - v-``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

LEFT = "left"
RIGHT = "right"

BISECT_MAXITER = 200


class HatSolveError(RuntimeError):
    """The slip-rate equation at a face could not be solved."""

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class Characteristics(NamedTuple):
    p: np.ndarray
    q: np.ndarray


class StressTransfer(NamedTuple):
    phi: np.ndarray
    eta: np.ndarray


@dataclass(frozen=True)
class HatData:
    """Constrained Riemann solution at a face.

    External boundaries populate one side only: the ``+`` side at the left
    end of the domain, the ``-`` side at the right end.
    """

    v_minus: Optional[np.ndarray] = None
    sigma_minus: Optional[np.ndarray] = None
    v_plus: Optional[np.ndarray] = None
    sigma_plus: Optional[np.ndarray] = None
    slip_rate: Optional[np.ndarray] = None
    phi: Optional[np.ndarray] = None
    eta: Optional[np.ndarray] = None

    @property
    def jump(self):
        """``[[v_hat]]``; taken from the friction solve when available so its
        sign matches ``sigma_hat`` exactly."""
        if self.slip_rate is not None and self.phi is not None:
            return np.sign(self.phi) * self.slip_rate
        if self.v_minus is None or self.v_plus is None:
            return None
        return self.v_plus - self.v_minus


# --- face conditions -------------------------------------------------------


@dataclass(frozen=True)
class ExternalBoundary:
    """Linear boundary condition with reflection coefficient ``r``.

    ``r = 1`` free surface, ``r = 0`` absorbing, ``r = -1`` clamped.  The
    optional ``data(t) -> (v, sigma)`` makes the condition inhomogeneous:
    the condition is then imposed on the difference between the solution and
    the data.
    """

    r: float = 1.0
    data: Optional[Callable] = None

    def __post_init__(self):
        if not abs(self.r) <= 1.0:
            raise ValueError(f"reflection coefficient must satisfy |r| <= 1, got {self.r}")


class FrictionLaw:
    """Base class for interior face laws."""

    #: True when the face carries an evolving slip variable in the state.
    tracks_slip = False
    #: True when the hat data depend linearly on the traces.
    linear = True


@dataclass(frozen=True)
class Locked(FrictionLaw):
    """Infinite frictional strength, velocity is continuous."""


@dataclass(frozen=True)
class Frictionless(FrictionLaw):
    """Zero traction on the face."""


@dataclass(frozen=True)
class LinearShearResistance(FrictionLaw):
    """``sigma = alpha [[v]]`` with a constant ``alpha >= 0`` (Pa s/m)."""

    alpha: float

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")


@dataclass(frozen=True)
class SlipWeakening(FrictionLaw):
    """Linear slip-weakening: strength drops from ``f_s sn`` to ``f_d sn`` over ``d_c``."""

    f_s: float
    f_d: float
    d_c: float
    sigma_n: float

    tracks_slip = True
    linear = False

    def __post_init__(self):
        if not (self.f_s >= self.f_d >= 0.0):
            raise ValueError("slip weakening requires f_s >= f_d >= 0")
        if not self.d_c > 0.0:
            raise ValueError("critical slip distance d_c must be positive")
        if not self.sigma_n > 0.0:
            raise ValueError("normal stress sigma_n must be positive (compressive)")

    def coefficient(self, slip):
        slip = np.asarray(slip, dtype=float)
        return np.where(
            slip < self.d_c, self.f_s - (self.f_s - self.f_d) * slip / self.d_c, self.f_d
        )

    def strength(self, slip):
        return self.sigma_n * self.coefficient(slip)

    @property
    def peak_strength(self) -> float:
        return self.f_s * self.sigma_n

    @property
    def residual_strength(self) -> float:
        return self.f_d * self.sigma_n


@dataclass(frozen=True)
class RateDependent(FrictionLaw):
    """Generic ``sigma_n f(V)`` strength with ``f >= 0``.

    ``f`` must accept numpy arrays.  The slip-rate equation is solved by
    bisection.
    """

    f: Callable
    sigma_n: float

    tracks_slip = True
    linear = False

    def __post_init__(self):
        if not self.sigma_n > 0.0:
            raise ValueError("normal stress sigma_n must be positive (compressive)")


# --- characteristic algebra -----------------------------------------------


def characteristics(v, sigma, Z) -> Characteristics:
    Z = np.asarray(Z, dtype=float)
    if np.any(Z <= 0.0):
        raise ValueError("impedance must be positive")
    return Characteristics(0.5 * (Z * v + sigma), 0.5 * (Z * v - sigma))


def boundary_hat(outgoing, Z, r, side, v_data=0.0, sigma_data=0.0) -> HatData:
    """Boundary data preserving the outgoing characteristic.

    ``outgoing`` is ``p`` at the left boundary and ``q`` at the right one.
    Non-zero ``v_data``/``sigma_data`` shift the condition to act on the
    deviation from that state.
    """
    if np.any(np.abs(r) > 1.0):
        raise ValueError("reflection coefficient must satisfy |r| <= 1")
    Z = np.asarray(Z, dtype=float)
    if np.any(Z <= 0.0):
        raise ValueError("impedance must be positive")
    return _boundary_hat(outgoing, Z, r, side, v_data, sigma_data)


def _boundary_hat(outgoing, Z, r, side, v_data, sigma_data) -> HatData:
    if side == LEFT:
        w = outgoing - 0.5 * (Z * v_data + sigma_data)
        return HatData(
            v_plus=v_data + (1.0 + r) * w / Z,
            sigma_plus=sigma_data + (1.0 - r) * w,
        )
    if side == RIGHT:
        w = outgoing - 0.5 * (Z * v_data - sigma_data)
        return HatData(
            v_minus=v_data + (1.0 + r) * w / Z,
            sigma_minus=sigma_data - (1.0 - r) * w,
        )
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def stress_transfer(q_minus, p_plus, Z_minus, Z_plus) -> StressTransfer:
    eta = Z_minus * Z_plus / (Z_plus + Z_minus)
    phi = eta * (2.0 * p_plus / Z_plus - 2.0 * q_minus / Z_minus)
    return StressTransfer(phi, eta)


def _bisect_slip_rate(phi_abs, eta, law: RateDependent):
    lo = np.zeros_like(phi_abs)
    hi = phi_abs / eta
    tol = 1.0e-12 * np.maximum(1.0, hi)

    def residual(V):
        return law.sigma_n * law.f(V) + eta * V - phi_abs

    r_hi = residual(hi)
    if np.any(r_hi < 0.0):
        bad = np.flatnonzero(np.atleast_1d(r_hi < 0.0))
        raise HatSolveError(
            f"slip-rate residual negative at upper bracket V=|phi|/eta for entries {bad[:5]}"
            " (friction coefficient must be non-negative)"
        )
    for _ in range(BISECT_MAXITER):
        mid = 0.5 * (lo + hi)
        pos = residual(mid) > 0.0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
        if np.all(hi - lo <= tol):
            return 0.5 * (lo + hi)
    width = np.max(hi - lo)
    raise HatSolveError(
        f"slip-rate bisection did not converge in {BISECT_MAXITER} iterations "
        f"(bracket width {width:.3e})"
    )


def solve_slip_rate(phi, eta, law: FrictionLaw, slip=0.0):
    """Solve the face friction problem for ``(V, sigma_hat)``.

    ``V >= 0`` is the absolute slip-rate and ``sigma_hat`` the signed
    traction; the velocity jump is ``sign(phi) V``.
    """
    phi = np.asarray(phi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0.0):
        raise ValueError("radiation damping eta must be positive")
    sgn = np.sign(phi)
    phi_abs = np.abs(phi)

    if isinstance(law, Locked):
        return np.zeros_like(phi), phi.copy()
    if isinstance(law, Frictionless):
        return phi_abs / eta, np.zeros_like(phi)
    if isinstance(law, LinearShearResistance):
        denom = eta + law.alpha
        return phi_abs / denom, law.alpha * phi / denom
    if isinstance(law, SlipWeakening):
        tau_s = law.strength(slip)
        sliding = phi_abs > tau_s
        V = np.where(sliding, (phi_abs - tau_s) / eta, 0.0)
        tau = np.where(sliding, sgn * tau_s, phi)
        return V, tau
    if isinstance(law, RateDependent):
        # static strength sigma_n f(0) not exceeded: the face sticks
        stuck = phi_abs <= law.sigma_n * law.f(np.zeros_like(phi_abs))
        V = np.where(stuck, 0.0, _bisect_slip_rate(np.where(stuck, 0.0, phi_abs), eta, law))
        # traction from the radiation-damping balance keeps the outgoing
        # characteristics exact; the friction law holds to bisection tolerance
        return V, np.where(stuck, phi, sgn * np.maximum(phi_abs - eta * V, 0.0))
    raise TypeError(f"unsupported friction law {law!r}")


def interface_hat(q_minus, p_plus, Z_minus, Z_plus, law: FrictionLaw, slip=0.0) -> HatData:
    phi, eta = stress_transfer(q_minus, p_plus, Z_minus, Z_plus)
    V, sigma_hat = solve_slip_rate(phi, eta, law, slip)
    jump = np.sign(phi) * V
    v_plus = (2.0 * q_minus + sigma_hat) / Z_minus + jump
    v_minus = (2.0 * p_plus - sigma_hat) / Z_plus - jump
    return HatData(
        v_minus=v_minus,
        sigma_minus=sigma_hat,
        v_plus=v_plus,
        sigma_plus=sigma_hat,
        slip_rate=V,
        phi=phi,
        eta=eta,
    )


def effective_alpha(phi, eta, law: FrictionLaw, slip=0.0):
    """Secant frictional strength ``alpha = sigma_hat / [[v_hat]]``.

    Locked faces return ``inf``.
    """
    phi = np.asarray(phi, dtype=float)
    if isinstance(law, Locked):
        return np.full_like(phi, np.inf)
    if isinstance(law, Frictionless):
        return np.zeros_like(phi)
    if isinstance(law, LinearShearResistance):
        return np.full_like(phi, law.alpha)
    V, tau = solve_slip_rate(phi, eta, law, slip)
    with np.errstate(divide="ignore"):
        return np.where(V > 0.0, np.abs(tau) / np.where(V > 0.0, V, 1.0), np.inf)


def friction_power(phi, eta, law: FrictionLaw, slip=0.0):
    """Rate of frictional work ``alpha |phi|^2 / (eta + alpha)^2`` (W/m^2)."""
    phi = np.asarray(phi, dtype=float)
    alpha = effective_alpha(phi, eta, law, slip)
    finite = np.isfinite(alpha)
    a = np.where(finite, alpha, 0.0)
    return np.where(finite, a / (eta + a) ** 2 * phi**2, 0.0)


def fluctuation(v, sigma, Z, v_hat, sigma_hat, face):
    """Penalty on the incoming characteristic at an element face.

    ``face='left'`` gives ``F = q - q_hat``, ``face='right'`` gives
    ``G = p - p_hat``.
    """
    dv = 0.5 * Z * (v - v_hat)
    ds = 0.5 * (sigma - sigma_hat)
    if face == LEFT:
        return dv - ds
    if face == RIGHT:
        return dv + ds
    raise ValueError(f"face must be 'left' or 'right', got {face!r}")


def verify_interface_identities(q_minus, p_plus, Z_minus, Z_plus, hat: HatData, power):
    """Relative defects of the interface hat identities.

    ``power`` is the expected frictional work ``alpha |phi|^2/(eta+alpha)^2``
    computed independently of ``hat``.  Returns a dict of max relative
    defects plus the minimum of ``sigma_hat [[v_hat]]``.
    """
    sig = hat.sigma_plus
    p_hat_plus = 0.5 * (Z_plus * hat.v_plus + sig)
    q_hat_minus = 0.5 * (Z_minus * hat.v_minus - hat.sigma_minus)
    q_hat_plus = 0.5 * (Z_plus * hat.v_plus - sig)
    p_hat_minus = 0.5 * (Z_minus * hat.v_minus + hat.sigma_minus)

    scale_c = np.maximum(1.0, np.maximum(np.abs(p_plus), np.abs(q_minus)))
    lhs_plus = p_plus**2 - q_hat_plus**2
    rhs_plus = Z_plus * sig * hat.v_plus
    lhs_minus = q_minus**2 - p_hat_minus**2
    rhs_minus = -Z_minus * sig * hat.v_minus
    scale_sq = np.maximum.reduce(
        [np.ones_like(scale_c), p_plus**2, q_minus**2, q_hat_plus**2, p_hat_minus**2]
    )
    work = sig * hat.jump
    trace_jump = hat.v_plus - hat.v_minus
    scale_v = scale_c / np.minimum(Z_plus, Z_minus)
    summed = lhs_plus / Z_plus + lhs_minus / Z_minus
    scale_w = scale_sq / np.minimum(Z_plus, Z_minus)

    def mx(a):
        return float(np.max(np.abs(a)))

    return {
        "characteristics": mx(
            np.maximum(np.abs(p_hat_plus - p_plus), np.abs(q_hat_minus - q_minus)) / scale_c
        ),
        "force_balance": mx((hat.sigma_plus - hat.sigma_minus) / scale_c),
        "jump": mx((trace_jump - hat.jump) / scale_v),
        "power_plus": mx((lhs_plus - rhs_plus) / scale_sq),
        "power_minus": mx((lhs_minus - rhs_minus) / scale_sq),
        "dissipation": mx((summed - work) / scale_w),
        "friction_work": mx((work - power) / scale_w),
        "min_work": float(np.min(work)),
    }


def verify_boundary_identities(outgoing, Z, r, side, hat: HatData):
    """Relative defects of the boundary hat identities (homogeneous data)."""
    if side == LEFT:
        v, s = hat.v_plus, hat.sigma_plus
        kept = 0.5 * (Z * v + s)
        other = 0.5 * (Z * v - s)
        power = s * v
        expected = (1.0 - r**2) * outgoing**2 / Z
        lhs = outgoing**2 - other**2
        rhs = Z * power
    else:
        v, s = hat.v_minus, hat.sigma_minus
        kept = 0.5 * (Z * v - s)
        other = 0.5 * (Z * v + s)
        power = s * v
        expected = -(1.0 - r**2) * outgoing**2 / Z
        lhs = outgoing**2 - other**2
        rhs = -Z * power
    scale = np.maximum(1.0, np.abs(outgoing))
    scale_sq = np.maximum(1.0, outgoing**2)
    return {
        "characteristics": float(np.max(np.abs(kept - outgoing) / scale)),
        "power": float(np.max(np.abs(lhs - rhs) / scale_sq)),
        "work": float(np.max(np.abs(power - expected) * Z / scale_sq)),
        "signed_work": float(np.min(power) if side == LEFT else -np.max(power)),
    }
