"""Mesh, material sampling, face registry and the global state layout."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .physics import ExternalBoundary, FrictionLaw, Locked
from .spectral import ElementOperators, QuadratureRule, lagrange_values


@dataclass(frozen=True)
class Mesh1D:
    faces: np.ndarray

    def __post_init__(self):
        faces = np.asarray(self.faces, dtype=float)
        if faces.ndim != 1 or faces.size < 2:
            raise ValueError("a mesh needs at least two face positions")
        if np.any(np.diff(faces) <= 0.0):
            raise ValueError("face positions must be strictly increasing")
        object.__setattr__(self, "faces", faces)

    @property
    def K(self) -> int:
        return self.faces.size - 1

    @property
    def dx(self) -> np.ndarray:
        return np.diff(self.faces)

    @property
    def length(self) -> float:
        return float(self.faces[-1] - self.faces[0])

    def node_positions(self, rule: QuadratureRule) -> np.ndarray:
        """Physical quadrature-node coordinates, shape ``(K, N+1)``."""
        return self.faces[:-1, None] + 0.5 * self.dx[:, None] * (1.0 + rule.nodes[None, :])

    def nearest_face(self, x: float) -> int:
        return int(np.argmin(np.abs(self.faces - x)))


def build_uniform_mesh(L: float, K: int) -> Mesh1D:
    if not L > 0.0:
        raise ValueError("domain length must be positive")
    if K < 1:
        raise ValueError("need at least one element")
    faces = L * np.arange(K + 1) / K
    return Mesh1D(faces)


@dataclass(frozen=True)
class MaterialField:
    """Nodal density and shear modulus, shape ``(K, N+1)`` each."""

    rho: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        if np.any(self.rho <= 0.0) or np.any(self.mu <= 0.0):
            raise ValueError("density and shear modulus must be positive at every node")

    @property
    def cs(self) -> np.ndarray:
        return np.sqrt(self.mu / self.rho)

    @property
    def Z(self) -> np.ndarray:
        return np.sqrt(self.rho * self.mu)

    @property
    def c_max(self) -> float:
        return float(np.max(self.cs))

    def face_impedance(self, ops: ElementOperators):
        """Impedance of the interpolated material at ``xi = -1`` and ``xi = +1``.

        Returns ``(Z_left, Z_right)``, each of shape ``(K,)``.
        """
        rho_l, rho_r = self.rho @ ops.e_left, self.rho @ ops.e_right
        mu_l, mu_r = self.mu @ ops.e_left, self.mu @ ops.e_right
        if min(rho_l.min(), rho_r.min(), mu_l.min(), mu_r.min()) <= 0.0:
            raise ValueError("interpolated material is non-positive at an element face")
        return np.sqrt(rho_l * mu_l), np.sqrt(rho_r * mu_r)


def sample_material(mesh: Mesh1D, rule: QuadratureRule, rho: Callable, mu: Callable) -> MaterialField:
    x = mesh.node_positions(rule)
    rho_n = np.broadcast_to(np.asarray(rho(x), dtype=float), x.shape).copy()
    mu_n = np.broadcast_to(np.asarray(mu(x), dtype=float), x.shape).copy()
    if np.any(rho_n <= 0.0):
        raise ValueError("density callable returned a non-positive value")
    if np.any(mu_n <= 0.0):
        raise ValueError("shear modulus callable returned a non-positive value")
    return MaterialField(rho_n, mu_n)


def sinusoidal_profile(c0: float, eps: float, n: float, L: float, rho0: float):
    """``c_s(x) = c0 + eps sin(n pi x / L)`` at constant density.

    Returns ``(rho(x), mu(x))`` callables with ``mu = rho c_s^2``.
    """

    def cs(x):
        return c0 + eps * np.sin(n * np.pi * np.asarray(x) / L)

    def rho(x):
        return np.full_like(np.asarray(x, dtype=float), rho0)

    def mu(x):
        return rho0 * cs(x) ** 2

    return rho, mu


def constant_profile(rho0: float, mu0: float):
    def rho(x):
        return np.full_like(np.asarray(x, dtype=float), rho0)

    def mu(x):
        return np.full_like(np.asarray(x, dtype=float), mu0)

    return rho, mu


@dataclass
class FaceRegistry:
    """Physical condition at each of the ``K + 1`` faces.

    Face 0 is the left boundary, face ``K`` the right boundary; faces
    ``1..K-1`` are interior and carry a friction law.
    """

    left: ExternalBoundary
    right: ExternalBoundary
    interior: Sequence[FrictionLaw]

    def __post_init__(self):
        self.interior = list(self.interior)

    @classmethod
    def uniform(
        cls,
        K: int,
        r0: float = 1.0,
        rL: float = 1.0,
        default: Optional[FrictionLaw] = None,
        overrides: Optional[Dict[int, FrictionLaw]] = None,
        left_data=None,
        right_data=None,
    ) -> "FaceRegistry":
        default = Locked() if default is None else default
        interior = [default] * (K - 1)
        for face, law in (overrides or {}).items():
            if not 1 <= face <= K - 1:
                raise ValueError(f"face {face} is not an interior face of a {K}-element mesh")
            interior[face - 1] = law
        return cls(ExternalBoundary(r0, left_data), ExternalBoundary(rL, right_data), interior)

    @property
    def K(self) -> int:
        return len(self.interior) + 1

    def law(self, face: int) -> FrictionLaw:
        if not 1 <= face <= self.K - 1:
            raise IndexError(f"face {face} has no friction law")
        return self.interior[face - 1]

    @property
    def slip_faces(self) -> list:
        """Interior faces whose slip is integrated as part of the state."""
        return [i + 1 for i, law in enumerate(self.interior) if law.tracks_slip]

    @property
    def is_linear(self) -> bool:
        return (
            all(law.linear for law in self.interior)
            and self.left.data is None
            and self.right.data is None
        )


class GlobalState:
    """Flat state vector: per element ``[v_1..v_{N+1}, sigma_1..sigma_{N+1}]``,
    followed by one slip value per slip-tracking face.
    """

    def __init__(self, data: np.ndarray, K: int, N: int, n_slip: int = 0):
        data = np.asarray(data, dtype=float)
        if data.shape != (2 * K * (N + 1) + n_slip,):
            raise ValueError("state vector has the wrong length")
        self.data = data
        self.K, self.N, self.n_slip = K, N, n_slip

    @classmethod
    def zeros(cls, K, N, n_slip=0):
        return cls(np.zeros(2 * K * (N + 1) + n_slip), K, N, n_slip)

    @classmethod
    def from_fields(cls, v, sigma, slip=()):
        v = np.asarray(v, dtype=float)
        K, n1 = v.shape
        slip = np.asarray(slip, dtype=float).ravel()
        out = cls.zeros(K, n1 - 1, slip.size)
        out.v[...] = v
        out.sigma[...] = sigma
        out.slip[...] = slip
        return out

    @property
    def fields(self) -> np.ndarray:
        n = 2 * self.K * (self.N + 1)
        return self.data[:n].reshape(self.K, 2, self.N + 1)

    @property
    def v(self) -> np.ndarray:
        return self.fields[:, 0, :]

    @property
    def sigma(self) -> np.ndarray:
        return self.fields[:, 1, :]

    @property
    def slip(self) -> np.ndarray:
        return self.data[2 * self.K * (self.N + 1):]

    def copy(self) -> "GlobalState":
        return GlobalState(self.data.copy(), self.K, self.N, self.n_slip)

    def like(self, data) -> "GlobalState":
        return GlobalState(data, self.K, self.N, self.n_slip)


def face_traces(state: GlobalState, ops: ElementOperators, k: int):
    """Traces of element ``k`` as ``(v(-1), sigma(-1), v(+1), sigma(+1))``."""
    if not 0 <= k < state.K:
        raise IndexError(f"element {k} out of range")
    v, s = state.v[k], state.sigma[k]
    return v @ ops.e_left, s @ ops.e_left, v @ ops.e_right, s @ ops.e_right


def all_traces(state: GlobalState, ops: ElementOperators):
    v, s = state.v, state.sigma
    return v @ ops.e_left, s @ ops.e_left, v @ ops.e_right, s @ ops.e_right


def interpolate_to_nodes(fn, mesh: Mesh1D, rule: QuadratureRule) -> np.ndarray:
    return np.asarray(fn(mesh.node_positions(rule)), dtype=float)


def evaluate_field(values: np.ndarray, mesh: Mesh1D, rule: QuadratureRule, x) -> np.ndarray:
    """Evaluate a nodal DG field at physical points ``x`` (element found by search)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.clip(np.searchsorted(mesh.faces, x, side="right") - 1, 0, mesh.K - 1)
    xi = 2.0 * (x - mesh.faces[k]) / mesh.dx[k] - 1.0
    basis = lagrange_values(rule, np.clip(xi, -1.0, 1.0))
    return np.sum(basis * values[k], axis=-1)
