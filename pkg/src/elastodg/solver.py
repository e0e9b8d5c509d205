"""Semi-discrete DG system, time-step selection and explicit integrators.

Per element ``k`` the nodal unknowns evolve as

    (dx/2) W(rho)  dv/dt     = Q sigma - e_L F - e_R G
    (dx/2) W(1/mu) dsigma/dt = Q v + e_L F / Z(-1) - e_R G / Z(+1)

where ``F``/``G`` penalise the incoming characteristic at the left/right
face against the hat data of that face.  Hat data are computed once per
face and shared by the two neighbouring elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .domain import FaceRegistry, GlobalState, MaterialField, Mesh1D, all_traces
from .physics import LEFT, RIGHT, HatSolveError, _boundary_hat, fluctuation, interface_hat
from .spectral import ElementOperators

PHYSICS = "physics"
RUSANOV = "rusanov"

RK4 = "rk4"
TAYLOR = "taylor"


@dataclass
class FaceSolution:
    """Hat data and fluctuations of every face for one state.

    ``v_hat_left``/``sigma_hat_left`` are the hat values on the left face of
    each element (``+`` side of faces ``0..K-1``), ``*_right`` those on the
    right face (``-`` side of faces ``1..K``).  Interior arrays (``phi``,
    ``eta``, ``slip_rate``, ``slip``) are indexed by face ``1..K-1``.
    """

    F: np.ndarray
    G: np.ndarray
    v_hat_left: np.ndarray
    sigma_hat_left: np.ndarray
    v_hat_right: np.ndarray
    sigma_hat_right: np.ndarray
    phi: np.ndarray
    eta: np.ndarray
    slip_rate: np.ndarray
    slip: np.ndarray
    p0: float
    qL: float


@dataclass
class SemiDiscreteSystem:
    mesh: Mesh1D
    material: MaterialField
    ops: ElementOperators
    faces: FaceRegistry
    source: Optional[Callable] = None
    flux: str = PHYSICS

    def __post_init__(self):
        K, n1 = self.material.rho.shape
        if K != self.mesh.K or self.faces.K != K:
            raise ValueError("mesh, material and face registry disagree on the element count")
        if n1 != self.ops.rule.size:
            raise ValueError("material sampled on a different rule than the operators")
        if self.flux not in (PHYSICS, RUSANOV):
            raise ValueError(f"flux must be 'physics' or 'rusanov', got {self.flux!r}")

        rule = self.ops.rule
        self.K, self.N = K, rule.degree
        self.x = self.mesh.node_positions(rule)
        half_dx = 0.5 * self.mesh.dx[:, None]
        self.inv_mass_v = 1.0 / (half_dx * rule.weights * self.material.rho)
        self.inv_mass_s = self.material.mu / (half_dx * rule.weights)
        self.Z_left, self.Z_right = self.material.face_impedance(self.ops)
        self.QT = self.ops.Q.T.copy()

        self.slip_faces = np.array(self.faces.slip_faces, dtype=int)
        self.slip_index = {f: i for i, f in enumerate(self.slip_faces)}
        groups: Dict[object, list] = {}
        for face in range(1, K):
            groups.setdefault(self.faces.law(face), []).append(face)
        self.law_groups = [(law, np.array(idx)) for law, idx in groups.items()]

        if self.flux == RUSANOV:
            ops, mat = self.ops, self.material
            self.rho_left, self.rho_right = mat.rho @ ops.e_left, mat.rho @ ops.e_right
            self.mu_left, self.mu_right = mat.mu @ ops.e_left, mat.mu @ ops.e_right

    @property
    def n_slip(self) -> int:
        return self.slip_faces.size

    def new_state(self) -> GlobalState:
        return GlobalState.zeros(self.K, self.N, self.n_slip)

    def state_from_fields(self, v, sigma, slip=None) -> GlobalState:
        slip = np.zeros(self.n_slip) if slip is None else slip
        return GlobalState.from_fields(v, sigma, slip)

    # -- face data -------------------------------------------------------

    def _slip_of_faces(self, state: GlobalState, faces: np.ndarray) -> np.ndarray:
        out = np.zeros(faces.size)
        for j, f in enumerate(faces):
            i = self.slip_index.get(int(f))
            if i is not None:
                out[j] = state.slip[i]
        return out

    def face_solution(self, state: GlobalState, t: float) -> FaceSolution:
        K = self.K
        vL, sL, vR, sR = all_traces(state, self.ops)
        ZL, ZR = self.Z_left, self.Z_right

        v_hat_left = np.empty(K)
        s_hat_left = np.empty(K)
        v_hat_right = np.empty(K)
        s_hat_right = np.empty(K)

        # external boundaries
        p0 = 0.5 * (ZL[0] * vL[0] + sL[0])
        qL = 0.5 * (ZR[-1] * vR[-1] - sR[-1])
        left, right = self.faces.left, self.faces.right
        vd, sd = left.data(t) if left.data is not None else (0.0, 0.0)
        hat = _boundary_hat(p0, ZL[0], left.r, LEFT, vd, sd)
        v_hat_left[0], s_hat_left[0] = hat.v_plus, hat.sigma_plus
        vd, sd = right.data(t) if right.data is not None else (0.0, 0.0)
        hat = _boundary_hat(qL, ZR[-1], right.r, RIGHT, vd, sd)
        v_hat_right[-1], s_hat_right[-1] = hat.v_minus, hat.sigma_minus

        # interior faces: '-' is element f-1 (right trace), '+' is element f (left trace)
        n_int = K - 1
        phi = np.zeros(n_int)
        eta = np.zeros(n_int)
        V = np.zeros(n_int)
        slip = np.zeros(n_int)
        for law, fidx in self.law_groups:
            m, p = fidx - 1, fidx
            q_minus = 0.5 * (ZR[m] * vR[m] - sR[m])
            p_plus = 0.5 * (ZL[p] * vL[p] + sL[p])
            s = self._slip_of_faces(state, fidx) if law.tracks_slip else 0.0
            try:
                hat = interface_hat(q_minus, p_plus, ZR[m], ZL[p], law, s)
            except HatSolveError as exc:
                raise HatSolveError(f"face(s) {fidx.tolist()}: {exc}", face=fidx.tolist()) from exc
            v_hat_right[m], s_hat_right[m] = hat.v_minus, hat.sigma_minus
            v_hat_left[p], s_hat_left[p] = hat.v_plus, hat.sigma_plus
            phi[m], eta[m], V[m] = hat.phi, hat.eta, hat.slip_rate
            slip[m] = s

        F = fluctuation(vL, sL, ZL, v_hat_left, s_hat_left, LEFT)
        G = fluctuation(vR, sR, ZR, v_hat_right, s_hat_right, RIGHT)
        return FaceSolution(
            F, G, v_hat_left, s_hat_left, v_hat_right, s_hat_right,
            phi, eta, V, slip, float(p0), float(qL),
        )

    # -- right-hand sides --------------------------------------------------

    def _add_source(self, dv, ds, t):
        if self.source is not None:
            s_v, s_s = self.source(self.x, t)
            dv += s_v / self.material.rho
            ds += self.material.mu * s_s

    def rhs(self, state: GlobalState, t: float) -> GlobalState:
        if self.flux == RUSANOV:
            return rusanov_rhs(self, state, t)
        return rhs(self, state, t)


def rhs(system: SemiDiscreteSystem, state: GlobalState, t: float) -> GlobalState:
    """Physics-flux semi-discrete rate of change of ``state``."""
    fs = system.face_solution(state, t)
    eL, eR = system.ops.e_left, system.ops.e_right
    out = state.like(np.empty_like(state.data))

    dv = out.v
    ds = out.sigma
    np.matmul(state.sigma, system.QT, out=dv)
    dv -= fs.F[:, None] * eL + fs.G[:, None] * eR
    dv *= system.inv_mass_v
    np.matmul(state.v, system.QT, out=ds)
    ds += (fs.F / system.Z_left)[:, None] * eL - (fs.G / system.Z_right)[:, None] * eR
    ds *= system.inv_mass_s
    system._add_source(dv, ds, t)

    if system.n_slip:
        out.slip[...] = fs.slip_rate[system.slip_faces - 1]
    return out


def _mirror_ghost(v, s, Z, r, vd, sd):
    # ghost state with both characteristics reflected: (p, q) -> (r q, r p)
    wv, ws = v - vd, s - sd
    p = 0.5 * (Z * wv + ws)
    q = 0.5 * (Z * wv - ws)
    pg, qg = r * q, r * p
    return vd + (pg + qg) / Z, sd + (pg - qg)


def rusanov_rhs(system: SemiDiscreteSystem, state: GlobalState, t: float) -> GlobalState:
    """Local Lax-Friedrichs flux in the same strong DG form.

    Face flux on the conserved pair ``(rho v, sigma/mu)`` with
    ``lambda = max(c-, c+)``.  External faces use mirrored ghost states.
    """
    K = system.K
    vL, sL, vR, sR = all_traces(state, system.ops)
    ZL, ZR = system.Z_left, system.Z_right
    rl, rr = system.rho_left, system.rho_right
    ml, mr = system.mu_left, system.mu_right

    # states on either side of faces 0..K
    vm = np.empty(K + 1); sm = np.empty(K + 1); rm = np.empty(K + 1); mm = np.empty(K + 1)
    vp = np.empty(K + 1); sp = np.empty(K + 1); rp = np.empty(K + 1); mp = np.empty(K + 1)
    vm[1:], sm[1:], rm[1:], mm[1:] = vR, sR, rr, mr
    vp[:-1], sp[:-1], rp[:-1], mp[:-1] = vL, sL, rl, ml

    left, right = system.faces.left, system.faces.right
    vd, sd = left.data(t) if left.data is not None else (0.0, 0.0)
    vm[0], sm[0] = _mirror_ghost(vL[0], sL[0], ZL[0], left.r, vd, sd)
    rm[0], mm[0] = rl[0], ml[0]
    vd, sd = right.data(t) if right.data is not None else (0.0, 0.0)
    vp[-1], sp[-1] = _mirror_ghost(vR[-1], sR[-1], ZR[-1], right.r, vd, sd)
    rp[-1], mp[-1] = rr[-1], mr[-1]

    lam = np.maximum(np.sqrt(mm / rm), np.sqrt(mp / rp))
    s_star = 0.5 * (sm + sp) + 0.5 * lam * (rp * vp - rm * vm)
    v_star = 0.5 * (vm + vp) + 0.5 * lam * (sp / mp - sm / mm)

    eL, eR = system.ops.e_left, system.ops.e_right
    out = state.like(np.empty_like(state.data))
    dv, ds = out.v, out.sigma
    np.matmul(state.sigma, system.QT, out=dv)
    dv += (sL - s_star[:-1])[:, None] * eL - (sR - s_star[1:])[:, None] * eR
    dv *= system.inv_mass_v
    np.matmul(state.v, system.QT, out=ds)
    ds += (vL - v_star[:-1])[:, None] * eL - (vR - v_star[1:])[:, None] * eR
    ds *= system.inv_mass_s
    system._add_source(dv, ds, t)
    if system.n_slip:
        # Rusanov has no frictional solve; report the trace jump as slip-rate
        f = system.slip_faces
        out.slip[...] = np.abs(vL[f] - vR[f - 1])
    return out


# --- time stepping ---------------------------------------------------------


def cfl_dt(material: MaterialField, mesh: Mesh1D, N: int, cfl: float) -> float:
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"CFL number must lie in (0, 1], got {cfl}")
    return cfl * float(np.min(mesh.dx)) / (material.c_max * (2 * N + 1))


def scaled_dt(dt_coarse: float, dx_coarse: float, dx: float, N: int, dt_cfl: float) -> float:
    """Step for a refined level: ``dt ~ dx^((N+1)/4)``, capped by the CFL step.

    With RK4 this makes the temporal error shrink like ``dx^(N+1)``.
    """
    return min(dt_cfl, dt_coarse * (dx / dx_coarse) ** ((N + 1) / 4.0))


@dataclass(frozen=True)
class TimeStepper:
    dt: float
    T: float
    scheme: str = RK4
    order: int = 4
    cfl: Optional[float] = None

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("time step must be positive")
        if self.scheme not in (RK4, TAYLOR):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == TAYLOR and self.order < 1:
            raise ValueError("Taylor order must be >= 1")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ValueError("CFL number must lie in (0, 1]")


def check_stepper(system: SemiDiscreteSystem, stepper: TimeStepper):
    if stepper.scheme == TAYLOR:
        if system.source is not None:
            raise ValueError("Taylor integrator requires a source-free system")
        if not system.faces.is_linear:
            raise ValueError(
                "Taylor integrator requires linear faces (locked, frictionless, "
                "linear shear resistance) and homogeneous boundary data"
            )


def rk4_step(system: SemiDiscreteSystem, u: GlobalState, t: float, dt: float) -> GlobalState:
    f = system.rhs
    d = u.data
    k1 = f(u, t).data
    k2 = f(u.like(d + 0.5 * dt * k1), t + 0.5 * dt).data
    k3 = f(u.like(d + 0.5 * dt * k2), t + 0.5 * dt).data
    k4 = f(u.like(d + dt * k3), t + dt).data
    return u.like(d + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def taylor_step(system: SemiDiscreteSystem, u: GlobalState, t: float, dt: float, order: int) -> GlobalState:
    acc = u.data.copy()
    term = u
    for j in range(1, order + 1):
        term = system.rhs(term, t)
        term = term.like(term.data * (dt / j))
        acc += term.data
    return u.like(acc)


def advance(
    system: SemiDiscreteSystem,
    stepper: TimeStepper,
    state0: GlobalState,
    observer: Optional[Callable] = None,
    t0: float = 0.0,
) -> GlobalState:
    """Integrate from ``t0`` to ``stepper.T``.

    ``observer(t, state)`` is called at ``t0`` and after every step.  The
    last step is shortened to land on ``T`` exactly.
    """
    check_stepper(system, stepper)
    T, dt = stepper.T, stepper.dt
    n_steps = max(0, math.ceil((T - t0) / dt - 1e-9))
    u, t = state0, t0
    if observer is not None:
        observer(t, u)
    for n in range(n_steps):
        h = min(dt, T - t)
        if h <= 0.0:
            break
        try:
            if stepper.scheme == RK4:
                u = rk4_step(system, u, t, h)
            else:
                u = taylor_step(system, u, t, h, stepper.order)
        except HatSolveError as exc:
            raise HatSolveError(f"t={t:.6g}: {exc}", face=exc.face) from exc
        t = T if n == n_steps - 1 else t0 + (n + 1) * dt
        if observer is not None:
            observer(t, u)
    return u
