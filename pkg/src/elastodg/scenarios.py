"""Standard problem setups shared by the CLI and the test-suite.

The manufactured-solution problem is posed in km, s, g/cm^3 and GPa (the
exact solution is defined with ``x`` in km); the rupture problem uses SI.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .diagnostics import ErrorTracker, MmsSpec
from .domain import (
    FaceRegistry,
    GlobalState,
    build_uniform_mesh,
    constant_profile,
    sample_material,
    sinusoidal_profile,
)
from .physics import FrictionLaw, SlipWeakening
from .solver import PHYSICS, SemiDiscreteSystem, TimeStepper, advance, cfl_dt, scaled_dt
from .spectral import build_operators, build_quadrature

# heterogeneous medium, km / s / g cm^-3 / GPa
MMS_L = 10.0
MMS_C0 = 3.343
MMS_EPS = 0.1
MMS_N_OSC = 20
MMS_RHO = 2.7

# 1D rupture, SI
RUPTURE_L = 60.0e3
RUPTURE_CS = 3464.0
RUPTURE_RHO = 2670.0
RUPTURE_FAULT_X = 30.0e3
RUPTURE_TAU0 = 81.6e6
TABLE_FRICTION = SlipWeakening(f_s=0.677, f_d=0.525, d_c=0.4, sigma_n=120.0e6)


def make_system(
    L, K, N, nodes, rho_fn, mu_fn, r0=1.0, rL=1.0, default_law=None, overrides=None,
    source=None, left_data=None, right_data=None, flux=PHYSICS,
) -> SemiDiscreteSystem:
    rule = build_quadrature(nodes, N)
    ops = build_operators(rule)
    mesh = build_uniform_mesh(L, K)
    material = sample_material(mesh, rule, rho_fn, mu_fn)
    faces = FaceRegistry.uniform(
        K, r0, rL, default=default_law, overrides=overrides,
        left_data=left_data, right_data=right_data,
    )
    return SemiDiscreteSystem(mesh, material, ops, faces, source=source, flux=flux)


@dataclass
class MmsProblem:
    system: SemiDiscreteSystem
    spec: MmsSpec
    state0: GlobalState

    def exact(self, t):
        return self.spec.fields(self.system.x, t)

    def error_at(self, state, t, tracker: Optional[ErrorTracker] = None) -> float:
        ve, se = self.exact(t)
        tracker = tracker or ErrorTracker()
        return tracker.update(state.v, state.sigma, ve, se, t)


def mms_problem(
    N, K, nodes="gll", flux=PHYSICS, spec: Optional[MmsSpec] = None,
    L=MMS_L, c0=MMS_C0, eps=MMS_EPS, n_osc=MMS_N_OSC, rho0=MMS_RHO,
) -> MmsProblem:
    """Forced standing wave in the sinusoidal heterogeneous medium.

    Traction is prescribed at ``x = 0`` and velocity at ``x = L``, both from
    the exact solution.
    """
    spec = spec or MmsSpec()
    rho_fn, mu_fn = sinusoidal_profile(c0, eps, n_osc, L, rho0)
    system = make_system(
        L, K, N, nodes, rho_fn, mu_fn, r0=1.0, rL=-1.0,
        source=spec.source(rho_fn, mu_fn),
        left_data=spec.boundary_data(0.0), right_data=spec.boundary_data(L),
        flux=flux,
    )
    v0, s0 = spec.fields(system.x, 0.0)
    return MmsProblem(system, spec, system.state_from_fields(v0, s0))


def run_mms(problem: MmsProblem, T: float, dt: float, observe_every: int = 0):
    """Integrate an MMS problem; returns ``(final_state, ErrorTracker)``.

    With ``observe_every = n > 0`` the error is sampled every ``n`` steps
    (and at ``T``); otherwise at ``t = 0`` and ``T`` only.
    """
    tracker = ErrorTracker()
    count = [0]

    def observe(t, u):
        if t == T or (observe_every and count[0] % observe_every == 0) or count[0] == 0:
            problem.error_at(u, t, tracker)
        count[0] += 1

    final = advance(problem.system, TimeStepper(dt=dt, T=T), problem.state0, observer=observe)
    return final, tracker


def mms_convergence(N, levels, nodes="gll", T=10.0, cfl=0.5, step_scaling=True, flux=PHYSICS):
    """Final-time relative errors over a sequence of element counts."""
    errors = []
    dt0 = dx0 = None
    for K in levels:
        prob = mms_problem(N, K, nodes=nodes, flux=flux)
        sys_ = prob.system
        dt = cfl_dt(sys_.material, sys_.mesh, N, cfl)
        dx = float(np.min(sys_.mesh.dx))
        if dt0 is None:
            dt0, dx0 = dt, dx
        elif step_scaling:
            dt = scaled_dt(dt0, dx0, dx, N, dt)
        _, tracker = run_mms(prob, T, dt)
        errors.append(tracker.final)
    return errors


@dataclass
class RuptureProblem:
    system: SemiDiscreteSystem
    state0: GlobalState
    fault_face: int
    law: FrictionLaw
    tau0: float


def rupture_problem(
    K=400, N=3, nodes="gl", L=RUPTURE_L, cs=RUPTURE_CS, rho=RUPTURE_RHO,
    fault_x=RUPTURE_FAULT_X, law: FrictionLaw = TABLE_FRICTION, tau0=RUPTURE_TAU0, r=0.0,
) -> RuptureProblem:
    """Uniformly pre-stressed medium with one frictional face, all others locked.

    The external conditions act on the deviation from the initial load, so
    the pre-stress itself is not radiated from the domain ends.
    """
    mesh_faces = np.linspace(0.0, L, K + 1)
    face = int(np.argmin(np.abs(mesh_faces - fault_x)))
    if not 1 <= face <= K - 1:
        raise ValueError("fault position must snap to an interior face")
    rho_fn, mu_fn = constant_profile(rho, rho * cs**2)

    def prestress(t):
        return 0.0, tau0

    system = make_system(
        L, K, N, nodes, rho_fn, mu_fn, r0=r, rL=r, overrides={face: law},
        left_data=prestress, right_data=prestress,
    )
    v0 = np.zeros_like(system.x)
    s0 = np.full_like(system.x, tau0)
    return RuptureProblem(system, system.state_from_fields(v0, s0), face, law, tau0)


def gaussian_pulse_problem(
    N, K, nodes="gll", L=10.0, rho0=2.7, cs=3.343, center=None, width=0.25, amplitude=1.0,
    r0=1.0, rL=1.0, default_law=None, overrides=None, flux=PHYSICS, direction=0,
):
    """Gaussian pulse at rest (``direction=0``) or travelling (``+1`` right, ``-1`` left)."""
    rho_fn, mu_fn = constant_profile(rho0, rho0 * cs**2)
    system = make_system(
        L, K, N, nodes, rho_fn, mu_fn, r0=r0, rL=rL, default_law=default_law,
        overrides=overrides, flux=flux,
    )
    center = 0.5 * L if center is None else center
    g = amplitude * np.exp(-(((system.x - center) / width) ** 2))
    Z = rho0 * cs
    v0 = g
    s0 = -direction * Z * g
    return system, system.state_from_fields(v0, s0)
