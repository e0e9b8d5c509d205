"""Discrete energy, energy-rate audit, manufactured solutions and error norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .domain import GlobalState, MaterialField, Mesh1D
from .physics import friction_power
from .solver import PHYSICS, SemiDiscreteSystem
from .spectral import QuadratureRule


def discrete_energy(state: GlobalState, material: MaterialField, mesh: Mesh1D, rule: QuadratureRule) -> float:
    """Mechanical energy of the nodal solution, per unit cross-section."""
    dens = rule.weights * (material.rho * state.v**2 + state.sigma**2 / material.mu)
    return float(np.sum(0.5 * mesh.dx * 0.5 * np.sum(dens, axis=1)))


@dataclass(frozen=True)
class EnergyRateAudit:
    rate_rhs: float
    rate_formula: float

    @property
    def defect(self) -> float:
        return abs(self.rate_rhs - self.rate_formula)

    @property
    def relative_defect(self) -> float:
        return self.defect / max(1.0, abs(self.rate_rhs), abs(self.rate_formula))


def energy_rate_from_rhs(system: SemiDiscreteSystem, state: GlobalState, t: float) -> float:
    rate = system.rhs(state, t)
    w = system.ops.rule.weights
    mat = system.material
    dens = w * (mat.rho * state.v * rate.v + state.sigma * rate.sigma / mat.mu)
    return float(np.sum(0.5 * system.mesh.dx * np.sum(dens, axis=1)))


def energy_rate_from_faces(system: SemiDiscreteSystem, state: GlobalState, t: float) -> float:
    """Energy rate assembled from fluctuations, friction work and boundary losses."""
    fs = system.face_solution(state, t)
    ZL, ZR = system.Z_left, system.Z_right
    rate = -np.sum(fs.F**2 / ZL) - np.sum(fs.G**2 / ZR)
    for law, fidx in system.law_groups:
        m = fidx - 1
        rate -= np.sum(friction_power(fs.phi[m], fs.eta[m], law, fs.slip[m]))
    r0, rL = system.faces.left.r, system.faces.right.r
    rate -= (1.0 - r0**2) * fs.p0**2 / ZL[0]
    rate -= (1.0 - rL**2) * fs.qL**2 / ZR[-1]
    return float(rate)


def energy_rate_audit(system: SemiDiscreteSystem, state: GlobalState, t: float) -> EnergyRateAudit:
    """Compare the two evaluations of the semi-discrete energy rate.

    Only meaningful for the physics flux without sources or boundary data.
    """
    if system.flux != PHYSICS:
        raise ValueError("the energy audit applies to the physics flux only")
    return EnergyRateAudit(
        energy_rate_from_rhs(system, state, t), energy_rate_from_faces(system, state, t)
    )


@dataclass
class EnergyReport:
    t: List[float] = field(default_factory=list)
    E: List[float] = field(default_factory=list)
    rate_rhs: List[float] = field(default_factory=list)
    rate_formula: List[float] = field(default_factory=list)
    defect: List[float] = field(default_factory=list)

    def record(self, system: SemiDiscreteSystem, state: GlobalState, t: float, audit=True):
        self.t.append(t)
        self.E.append(discrete_energy(state, system.material, system.mesh, system.ops.rule))
        if audit:
            a = energy_rate_audit(system, state, t)
            self.rate_rhs.append(a.rate_rhs)
            self.rate_formula.append(a.rate_formula)
            self.defect.append(a.relative_defect)
        else:
            self.rate_rhs.append(math.nan)
            self.rate_formula.append(math.nan)
            self.defect.append(math.nan)

    @property
    def max_defect(self) -> float:
        d = [x for x in self.defect if not math.isnan(x)]
        return max(d) if d else math.nan

    def rows(self):
        return list(zip(self.t, self.E, self.rate_rhs, self.rate_formula, self.defect))


# --- manufactured solution -------------------------------------------------


@dataclass(frozen=True)
class MmsSpec:
    """Standing-wave manufactured solution.

    ``v = cos(k pi t) sin(kx pi x + a0)``,
    ``sigma = (kx / k) sin(k pi t) cos(kx pi x + a0)`` with ``kx = n / L``.
    """

    k: float = 2.0
    wavenumber: float = 2.0
    a0: float = 10.0

    def __post_init__(self):
        if self.k == 0.0:
            raise ValueError("temporal wavenumber k must be non-zero")

    def fields(self, x, t):
        th = self.wavenumber * np.pi * np.asarray(x, dtype=float) + self.a0
        kt = self.k * np.pi * t
        v = np.cos(kt) * np.sin(th)
        s = (self.wavenumber / self.k) * np.sin(kt) * np.cos(th)
        return v, s

    def derivatives(self, x, t):
        """Return ``(dv/dt, dv/dx, dsigma/dt, dsigma/dx)``."""
        kx, k = self.wavenumber, self.k
        th = kx * np.pi * np.asarray(x, dtype=float) + self.a0
        kt = k * np.pi * t
        v_t = -k * np.pi * np.sin(kt) * np.sin(th)
        v_x = kx * np.pi * np.cos(kt) * np.cos(th)
        s_t = kx * np.pi * np.cos(kt) * np.cos(th)
        s_x = -(kx**2 / k) * np.pi * np.sin(kt) * np.sin(th)
        return v_t, v_x, s_t, s_x

    def forcing(self, rho, mu, x, t):
        """Sources ``(s_v, s_sigma)`` making the fields exact for ``rho(x)``, ``mu(x)``."""
        v_t, v_x, s_t, s_x = self.derivatives(x, t)
        return rho(x) * v_t - s_x, s_t / mu(x) - v_x

    def source(self, rho, mu):
        """Source callable ``(x, t) -> (s_v, s_sigma)``.

        The forcing separates into a time factor times a spatial profile; the
        profile is cached for the last ``x`` array seen.
        """
        kx, k = self.wavenumber, self.k
        cache = {}

        def src(x, t):
            if cache.get("x") is not x:
                th = kx * np.pi * np.asarray(x, dtype=float) + self.a0
                cache["x"] = x
                cache["sv"] = -np.pi * np.sin(th) * (rho(x) * k - kx**2 / k)
                cache["ss"] = kx * np.pi * np.cos(th) * (1.0 / mu(x) - 1.0)
            kt = k * np.pi * t
            return np.sin(kt) * cache["sv"], np.cos(kt) * cache["ss"]

        return src

    def boundary_data(self, x0):
        def data(t):
            v, s = self.fields(x0, t)
            return float(v), float(s)

        return data


def relative_error(v, sigma, v_exact, sigma_exact, denominator: float) -> float:
    """Discrete relative error; ``nan`` when the denominator vanishes."""
    if not denominator > 0.0:
        return math.nan
    num = np.sqrt(np.sum((v - v_exact) ** 2 + (sigma - sigma_exact) ** 2))
    return float(num / denominator)


class ErrorTracker:
    """Relative error with the denominator kept as a running maximum over time."""

    def __init__(self):
        self.denominator = 0.0
        self.times: List[float] = []
        self.errors: List[float] = []

    def update(self, v, sigma, v_exact, sigma_exact, t: float) -> float:
        norm = float(np.sqrt(np.sum(v_exact**2 + sigma_exact**2)))
        self.denominator = max(self.denominator, norm)
        err = relative_error(v, sigma, v_exact, sigma_exact, self.denominator)
        self.times.append(t)
        self.errors.append(err)
        return err

    @property
    def final(self) -> float:
        return self.errors[-1]


def convergence_rates(errors) -> List[float]:
    """Observed orders ``log2(e_{i-1}/e_i)`` for factor-two refinements.

    A zero or non-finite error makes the affected rates ``nan``.
    """
    errors = [float(e) for e in errors]
    if len(errors) < 2:
        raise ValueError("need at least two refinement levels")
    rates = []
    for a, b in zip(errors[:-1], errors[1:]):
        if a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b):
            rates.append(math.log2(a / b))
        else:
            rates.append(math.nan)
    return rates
