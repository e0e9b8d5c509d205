"""Reference-element machinery on [-1, 1].

Quadrature rules (Gauss-Lobatto-Legendre and Gauss-Legendre), the nodal
Lagrange basis built on their nodes, and the element operators used by the
DG discretisation:

* ``W(a)`` -- weighted mass matrix, diagonal for a nodal basis,
* ``Q``    -- stiffness matrix, ``Q_ij = sum_m w_m L_i(x_m) L_j'(x_m)``,
* ``B``    -- boundary matrix, ``B = e_R e_R^T - e_L e_L^T``.

With a quadrature exact to degree ``2N - 1`` the operators satisfy the
summation-by-parts identity ``Q + Q^T = B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GLL = "gll"
GL = "gl"

NEWTON_TOL = 1.0e-15
NEWTON_MAXITER = 100


class QuadratureError(RuntimeError):
    """Root finding for the quadrature nodes did not converge."""


def legendre(n: int, x):
    """Return ``(P_n(x), P_{n-1}(x))`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    return p, p_prev


def _newton(fn, x0, what):
    x = np.array(x0, dtype=float)
    for _ in range(NEWTON_MAXITER):
        dx = fn(x)
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            return x
    raise QuadratureError(
        f"{what}: Newton iteration did not converge in {NEWTON_MAXITER} "
        f"iterations (last max update {np.max(np.abs(dx)):.3e})"
    )


def _gll_nodes_weights(n: int):
    # roots of (1 - x^2) P_n'(x) == roots of x P_n - P_{n-1}
    x0 = -np.cos(np.pi * np.arange(n + 1) / n)

    def step(x):
        p, pm1 = legendre(n, x)
        return (x * p - pm1) / ((n + 1) * p)

    x = _newton(step, x0, f"GLL(N={n})")
    p, _ = legendre(n, x)
    w = 2.0 / (n * (n + 1) * p**2)
    return x, w


def _gl_nodes_weights(n: int):
    m = n + 1
    x0 = -np.cos(np.pi * (2 * np.arange(m) + 1) / (2 * m))

    def dlegendre(x):
        p, pm1 = legendre(m, x)
        return p, m * (x * p - pm1) / (x**2 - 1.0)

    def step(x):
        p, dp = dlegendre(x)
        return p / dp

    x = _newton(step, x0, f"GL(N={n})")
    _, dp = dlegendre(x)
    w = 2.0 / ((1.0 - x**2) * dp**2)
    return x, w


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    lam = 1.0 / np.prod(diff, axis=1)
    # scale out the common factor; only ratios matter
    return lam / np.max(np.abs(lam))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of an (N+1)-point rule on [-1, 1].

    ``bary`` holds the barycentric weights of the nodal Lagrange basis built
    on ``nodes``.
    """

    kind: str
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    bary: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bary", barycentric_weights(self.nodes))

    @property
    def size(self) -> int:
        return self.degree + 1

    @property
    def exactness(self) -> int:
        """Highest monomial degree integrated exactly."""
        return 2 * self.degree - 1 if self.kind == GLL else 2 * self.degree + 1


def build_quadrature(kind: str, N: int) -> QuadratureRule:
    """Build the GLL or GL rule with ``N + 1`` nodes.

    GLL nodes are the roots of ``(1 - x^2) P_N'(x)``, GL nodes the roots of
    ``P_{N+1}(x)``; both are found by Newton iteration started from
    Chebyshev points.
    """
    kind = kind.lower()
    if N < 1:
        raise ValueError(f"polynomial degree must be >= 1, got {N}")
    if kind == GLL:
        x, w = _gll_nodes_weights(N)
    elif kind == GL:
        x, w = _gl_nodes_weights(N)
    else:
        raise ValueError(f"unknown quadrature kind {kind!r} (expected 'gll' or 'gl')")

    # enforce exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    if kind == GLL:
        x[0], x[-1] = -1.0, 1.0
    return QuadratureRule(kind=kind, degree=N, nodes=x, weights=w)


def lagrange_values(rule: QuadratureRule, xi) -> np.ndarray:
    """Evaluate all nodal basis functions at ``xi``.

    Returns an array of shape ``xi.shape + (N + 1,)``.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < -1.0) or np.any(xi > 1.0):
        raise ValueError("evaluation points must lie in [-1, 1]")

    diff = xi[..., None] - rule.nodes
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        terms = rule.bary / diff
        # exact hits and points within a denormal of a node
        hit = ~np.isfinite(terms)
        values = terms / np.sum(terms, axis=-1, keepdims=True)
    on_node = np.any(hit, axis=-1)
    if np.any(on_node):
        values[on_node] = hit[on_node].astype(float)
    return values


def differentiation_matrix(rule: QuadratureRule) -> np.ndarray:
    """``D[m, j] = L_j'(x_m)`` from the barycentric formula."""
    x, lam = rule.nodes, rule.bary
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (lam[None, :] / lam[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -np.sum(D, axis=1))
    return D


@dataclass(frozen=True)
class ElementOperators:
    """Reference-element operators for one quadrature rule.

    ``mass`` is the diagonal of ``W(a)`` for the coefficient samples the
    operators were built with; ``weighted_mass`` recomputes it for other
    coefficients.
    """

    rule: QuadratureRule
    mass: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    e_left: np.ndarray
    e_right: np.ndarray

    @property
    def W(self) -> np.ndarray:
        return np.diag(self.mass)

    def weighted_mass(self, a) -> np.ndarray:
        """Dense ``W(a)`` for nodal coefficient samples ``a``."""
        a = np.asarray(a, dtype=float)
        if np.any(a <= 0.0):
            raise ValueError("mass-matrix coefficient must be strictly positive")
        return np.diag(self.rule.weights * a)


def build_operators(rule: QuadratureRule, a_samples=None) -> ElementOperators:
    n = rule.size
    if a_samples is None:
        a_samples = np.ones(n)
    a_samples = np.asarray(a_samples, dtype=float)
    if a_samples.shape != (n,):
        raise ValueError(f"expected {n} coefficient samples, got shape {a_samples.shape}")
    if np.any(a_samples <= 0.0):
        raise ValueError("mass-matrix coefficient must be strictly positive")

    D = differentiation_matrix(rule)
    Q = rule.weights[:, None] * D
    e_left = lagrange_values(rule, -1.0)
    e_right = lagrange_values(rule, 1.0)
    B = np.outer(e_right, e_right) - np.outer(e_left, e_left)
    return ElementOperators(
        rule=rule,
        mass=rule.weights * a_samples,
        D=D,
        Q=Q,
        B=B,
        e_left=e_left,
        e_right=e_right,
    )
