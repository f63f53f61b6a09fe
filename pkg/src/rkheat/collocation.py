"""Kernel collocation for the coupled optimality system.

The homogenized state y is sought in the tensor space with spatial factor
W_2[a,b] (zero boundary values) and temporal factor W_1[0,T] (zero initial
value); the adjoint p lives in the partner space whose temporal factor
vanishes at t = T instead.  Writing K1, K2 for the two tensor kernels, the
trial functions are the operator images of the kernels in their second
argument,

    psi_j1(x,t) = L1 applied to K1((x,t), .) at the node (x_j, t_j),
    psi_j2(x,t) = L2 applied to K2((x,t), .) at the node (x_j, t_j),

and the truncated series y = sum b1_j psi_j1, p = sum b2_j psi_j2 are
collocated at the same nodes.  Because the couplings are linear they move
to the left-hand side, giving one 2n x 2n block system

    [ L1 psi_j1   -(1/nu) psi_j2 ] [b1]   [ G1 at nodes        ]
    [   psi_j1      L2 psi_j2    ] [b2] = [ (y_d - y_hat) nodes ].

With k_S, k_T, k_T' the spatial and the two temporal 1-D kernels and
S_ab = d_x^a d_r^b k_S(x_i, x_j) etc., the blocks expand into Hadamard
combinations like L1 psi_j1 = S00*T11 - S02*T10 - S20*T01 + S22*T00, so
assembly reduces to a handful of 1-D kernel derivative matrices.  All
second-argument derivatives are exact (implicit differentiation in the
kernel module); no finite differences enter the matrix.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import KernelDomainMismatch, NumericallySingular, OutOfDomain
from .fields import ScalarField
from .kernels import SpaceSpec, TensorKernel, build_kernel, kernel_matrix
from .problems import ExactSolution, HomogenizedProblem

__all__ = [
    "NodeSet",
    "BasisKind",
    "BasisFunction",
    "CollocationSystem",
    "SolverConfig",
    "PicardInfo",
    "Solution",
    "standard_kernels",
    "generate_nodes",
    "assemble",
    "solve",
    "solve_picard",
    "evaluate",
    "error_norms",
]

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class NodeSet:
    """Ordered collocation nodes with the descriptor that generated them."""

    nodes: np.ndarray            # shape (n, 2), columns x, t
    generation: dict

    def __post_init__(self):
        pts = {(float(x), float(t)) for x, t in self.nodes}
        if len(pts) != len(self.nodes):
            raise ValueError("collocation nodes must be pairwise distinct")

    def __len__(self):
        return len(self.nodes)


def generate_nodes(n_x: int, n_t: int, domain) -> NodeSet:
    """Uniform midpoint tensor grid, t-major ordering.

    domain = ((a, b), T).  Points x_i = a + (i - 1/2)(b - a)/n_x and
    t_k = (k - 1/2) T / n_t are strictly interior by construction.
    """
    if n_x < 1 or n_t < 1:
        raise ValueError("need n_x, n_t >= 1")
    (a, b), T = domain
    xs = a + (np.arange(1, n_x + 1) - 0.5) * (b - a) / n_x
    ts = (np.arange(1, n_t + 1) - 0.5) * T / n_t
    X, Tt = np.meshgrid(xs, ts)          # t-major rows
    nodes = np.column_stack([X.ravel(), Tt.ravel()])
    gen = {"kind": "midpoint_grid", "n_x": n_x, "n_t": n_t,
           "interval": (a, b), "horizon": T, "ordering": "t-major"}
    return NodeSet(nodes=nodes, generation=gen)


class BasisKind(Enum):
    STATE = "state"
    ADJOINT = "adjoint"


@dataclass(frozen=True)
class BasisFunction:
    """Single trial function psi_j, the operator image of a kernel section.

    STATE uses L1 and the state-space kernel; ADJOINT uses L2 and the
    adjoint-space kernel.  evaluate() returns d^dx d^dt psi_j(x, t).
    """

    center: tuple[float, float]
    which: BasisKind
    kernel: TensorKernel

    def evaluate(self, x, t, dx=0, dt=0):
        xj, tj = self.center
        S = self.kernel.spatial
        Tk = self.kernel.temporal
        s0 = S.eval(x, xj, dx=dx, dy=0)
        s2 = S.eval(x, xj, dx=dx, dy=2)
        t1 = Tk.eval(t, tj, dx=dt, dy=1)
        t0 = Tk.eval(t, tj, dx=dt, dy=0)
        if self.which is BasisKind.STATE:
            # L1 = -d/ds + d^2/dr^2 applied to the second argument
            return -s0 * t1 + s2 * t0
        return s0 * t1 + s2 * t0

    def apply_own_operator(self, x, t):
        """L1 psi (STATE) or L2 psi (ADJOINT) at (x, t)."""
        sign = -1.0 if self.which is BasisKind.STATE else 1.0
        return (sign * self.evaluate(x, t, dx=0, dt=1)
                + self.evaluate(x, t, dx=2, dt=0))


@dataclass
class CollocationSystem:
    """Dense block system A b = C for the coupled pair."""

    A: np.ndarray
    C: np.ndarray
    node_set: NodeSet
    kernels: tuple[TensorKernel, TensorKernel]
    hom: HomogenizedProblem
    conditioning: dict | None = None


@dataclass(frozen=True)
class SolverConfig:
    """ridge_lambda = 0 solves A b = C by LU with partial pivoting;
    ridge_lambda > 0 solves the regularized normal equations
    (A^T A + lambda ||A||_F^2 I) b = A^T C."""

    ridge_lambda: float = 0.0
    pivot: str = "partial"

    def __post_init__(self):
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")
        if self.pivot != "partial":
            raise ValueError("only partial pivoting is implemented")


@dataclass(frozen=True)
class PicardInfo:
    converged: bool
    iterations: int
    last_change: float
    tol: float
    max_iter: int


def standard_kernels(interval, horizon):
    """State and adjoint tensor kernels on [a,b] x [0,T].

    The spatial factor (m=2, zero boundary values) is shared; the temporal
    factors vanish at t=0 for the state and at t=T for the adjoint.
    """
    a, b = interval
    spatial = build_kernel(SpaceSpec(2, (float(a), float(b)), (("a", 0), ("b", 0))))
    state_t = build_kernel(SpaceSpec(1, (0.0, float(horizon)), (("a", 0),)))
    adjoint_t = build_kernel(SpaceSpec(1, (0.0, float(horizon)), (("b", 0),)))
    return TensorKernel(spatial, state_t), TensorKernel(spatial, adjoint_t)


def _coordinate_matrices(kernel, coords):
    """S00, S02, S20, S22 on the distinct coordinate list.

    Pure second-argument derivatives come from symmetry (S02 = S20^T on a
    shared coordinate list); only the mixed (2,2) block needs the
    second-argument derivative chain.
    """
    m00 = kernel_matrix(kernel, coords, coords, 0, 0)
    m20 = kernel_matrix(kernel, coords, coords, 2, 0)
    m22 = kernel_matrix(kernel, coords, coords, 2, 2)
    return m00, m20.T, m20, m22


def _temporal_matrices(kernel, coords):
    """T00, T01, T10, T11 on the distinct coordinate list."""
    t00 = kernel_matrix(kernel, coords, coords, 0, 0)
    t10 = kernel_matrix(kernel, coords, coords, 1, 0)
    t11 = kernel_matrix(kernel, coords, coords, 1, 1)
    return t00, t10.T, t10, t11


def assemble(hom: HomogenizedProblem, nodes: NodeSet, kernels) -> CollocationSystem:
    """Assemble the 2n x 2n collocation matrix and right-hand side."""
    K1, K2 = kernels
    base = hom.base
    K1.require_domain(base.interval, base.T)
    K2.require_domain(base.interval, base.T)
    if K1.spatial.spec != K2.spatial.spec:
        raise KernelDomainMismatch("state and adjoint kernels use different spatial spaces")

    xn = nodes.nodes[:, 0]
    tn = nodes.nodes[:, 1]
    ux, ix = np.unique(xn, return_inverse=True)
    ut, it = np.unique(tn, return_inverse=True)

    S00u, S02u, S20u, S22u = _coordinate_matrices(K1.spatial, ux)
    T00u, T01u, T10u, T11u = _temporal_matrices(K1.temporal, ut)
    P00u, P01u, P10u, P11u = _temporal_matrices(K2.temporal, ut)

    sx = np.ix_(ix, ix)
    st = np.ix_(it, it)
    S00, S02, S20, S22 = S00u[sx], S02u[sx], S20u[sx], S22u[sx]
    T00, T01, T10, T11 = T00u[st], T01u[st], T10u[st], T11u[st]
    P00, P01, P10, P11 = P00u[st], P01u[st], P10u[st], P11u[st]

    nu = base.nu
    A11 = S00 * T11 - S02 * T10 - S20 * T01 + S22 * T00
    A12 = -(1.0 / nu) * (S00 * P01 + S02 * P00)
    A21 = -S00 * T01 + S02 * T00
    A22 = S00 * P11 + S02 * P10 + S20 * P01 + S22 * P00
    A = np.block([[A11, A12], [A21, A22]])

    g1 = np.asarray(hom.G1(xn, tn), dtype=float)
    rhs2 = (np.asarray(base.y_d(xn, tn), dtype=float)
            - np.asarray(hom.y_hat(xn, tn), dtype=float)
            + np.asarray(hom.G2(xn, tn), dtype=float))
    C = np.concatenate([np.broadcast_to(g1, xn.shape),
                        np.broadcast_to(rhs2, xn.shape)])
    return CollocationSystem(A=A, C=C, node_set=nodes, kernels=(K1, K2), hom=hom)


def _equilibrate(A, C):
    scale = np.abs(A).max(axis=1)
    if not np.all(scale > 0):
        raise NumericallySingular("system matrix has an identically zero row")
    return A / scale[:, None], C / scale


def solve(system: CollocationSystem, config: SolverConfig = SolverConfig()) -> "Solution":
    """Solve the collocation system.

    Rows are equilibrated by their max magnitude before factorization and
    condition estimates are recorded before and after.  ridge_lambda = 0
    uses LU with partial pivoting plus one step of iterative refinement;
    ridge_lambda > 0 uses regularized normal equations of the equilibrated
    matrix.
    """
    A, C = system.A, system.C
    Aeq, Ceq = _equilibrate(A, C)
    cond = {"pre": float(np.linalg.cond(A, 1)),
            "post": float(np.linalg.cond(Aeq, 1))}
    system.conditioning = cond

    if config.ridge_lambda == 0.0:
        try:
            with warnings.catch_warnings():
                # an exactly singular matrix warns before we can inspect the
                # pivots; the zero-pivot check below turns it into an error
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(Aeq)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericallySingular(f"LU factorization failed: {exc}") from exc
        if np.abs(np.diag(lu)).min() == 0.0:
            raise NumericallySingular("LU factorization hit an exactly zero pivot")
        b = scipy.linalg.lu_solve((lu, piv), Ceq)
        b = b + scipy.linalg.lu_solve((lu, piv), Ceq - Aeq @ b)
    else:
        lam = config.ridge_lambda * np.linalg.norm(Aeq, "fro") ** 2
        G = Aeq.T @ Aeq + lam * np.eye(Aeq.shape[0])
        try:
            b = scipy.linalg.solve(G, Aeq.T @ Ceq, assume_a="pos")
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericallySingular(f"regularized solve failed: {exc}") from exc
    if not np.isfinite(b).all():
        raise NumericallySingular("solution vector is not finite")

    n = len(system.node_set)
    info = {
        "cond": cond,
        "ridge_lambda": config.ridge_lambda,
        "residual_max": float(np.abs(A @ b - C).max()),
    }
    return Solution(b1=b[:n], b2=b[n:], node_set=system.node_set,
                    kernels=system.kernels, hom=system.hom, info=info)


def solve_picard(system: CollocationSystem, config: SolverConfig = SolverConfig(),
                 tol: float = 1e-10, max_iter: int = 200):
    """Block fixed-point iteration mirroring the two one-field solves.

    Both right-hand sides are evaluated on the previous iterate, so each
    sweep solves the state block and the adjoint block independently.  The
    iteration converges only when the coupling 1/nu is weak enough; the
    returned PicardInfo says whether the tolerance was met.
    """
    n = len(system.node_set)
    A, C = system.A, system.C
    A11, A12 = A[:n, :n], A[:n, n:]
    A21, A22 = A[n:, :n], A[n:, n:]
    C1, C2 = C[:n], C[n:]
    try:
        lu1 = scipy.linalg.lu_factor(A11)
        lu2 = scipy.linalg.lu_factor(A22)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericallySingular(f"diagonal block factorization failed: {exc}") from exc
    b1 = np.zeros(n)
    b2 = np.zeros(n)
    converged = False
    change = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        b1_new = scipy.linalg.lu_solve(lu1, C1 - A12 @ b2)
        b2_new = scipy.linalg.lu_solve(lu2, C2 - A21 @ b1)
        change = max(np.abs(b1_new - b1).max(), np.abs(b2_new - b2).max())
        b1, b2 = b1_new, b2_new
        scale = max(1.0, np.abs(b1).max(), np.abs(b2).max())
        if change < tol * scale:
            converged = True
            break
    if not np.isfinite(b1).all() or not np.isfinite(b2).all():
        raise NumericallySingular("picard iteration produced non-finite coefficients")
    info = PicardInfo(converged=converged, iterations=iterations,
                      last_change=float(change), tol=tol, max_iter=max_iter)
    sol = Solution(b1=b1, b2=b2, node_set=system.node_set,
                   kernels=system.kernels, hom=system.hom,
                   info={"picard": dataclasses.asdict(info)})
    return sol, info


@dataclass
class Solution:
    """Truncated-series solution of the homogenized system."""

    b1: np.ndarray
    b2: np.ndarray
    node_set: NodeSet
    kernels: tuple[TensorKernel, TensorKernel]
    hom: HomogenizedProblem
    info: dict

    # -- low-level series evaluation ------------------------------------

    def _series(self, which: BasisKind, X, T, dx=0, dt=0):
        """sum_j b_j d^dx d^dt psi_j at flattened points (X, T)."""
        K = self.kernels[0] if which is BasisKind.STATE else self.kernels[1]
        b = self.b1 if which is BasisKind.STATE else self.b2
        sign = -1.0 if which is BasisKind.STATE else 1.0
        xn = self.node_set.nodes[:, 0]
        tn = self.node_set.nodes[:, 1]
        Xf = np.asarray(X, dtype=float).ravel()
        Tf = np.asarray(T, dtype=float).ravel()
        S0 = kernel_matrix(K.spatial, Xf, xn, dx, 0)
        S2 = kernel_matrix(K.spatial, Xf, xn, dx, 2)
        T1 = kernel_matrix(K.temporal, Tf, tn, dt, 1)
        T0 = kernel_matrix(K.temporal, Tf, tn, dt, 0)
        vals = (sign * S0 * T1 + S2 * T0) @ b
        return vals.reshape(np.shape(X)) if np.shape(X) else float(vals[0])

    def _series_grid(self, which: BasisKind, xs, ts, dx=0, dt=0):
        """Tensor-grid evaluation, t-major output of shape (len(ts), len(xs))."""
        K = self.kernels[0] if which is BasisKind.STATE else self.kernels[1]
        b = self.b1 if which is BasisKind.STATE else self.b2
        sign = -1.0 if which is BasisKind.STATE else 1.0
        xn = self.node_set.nodes[:, 0]
        tn = self.node_set.nodes[:, 1]
        S0 = kernel_matrix(K.spatial, xs, xn, dx, 0)
        S2 = kernel_matrix(K.spatial, xs, xn, dx, 2)
        T1 = kernel_matrix(K.temporal, ts, tn, dt, 1)
        T0 = kernel_matrix(K.temporal, ts, tn, dt, 0)
        return sign * (T1 * b) @ S0.T + (T0 * b) @ S2.T

    def _check_domain(self, x, t):
        (a, b), T = self.hom.base.interval, self.hom.base.T
        tol_x = 1e-12 * (b - a)
        tol_t = 1e-12 * T
        xa = np.asarray(x, dtype=float)
        ta = np.asarray(t, dtype=float)
        if np.any(xa < a - tol_x) or np.any(xa > b + tol_x) \
                or np.any(ta < -tol_t) or np.any(ta > T + tol_t):
            raise OutOfDomain(f"point outside [{a},{b}] x [0,{T}]")

    # -- public evaluation ----------------------------------------------

    def evaluate_grid(self, xs, ts):
        """(y_total, p, u) arrays on the tensor grid, t-major."""
        self._check_domain(xs, ts)
        X, T = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ts, dtype=float))
        y_h = self._series_grid(BasisKind.STATE, xs, ts)
        p = self._series_grid(BasisKind.ADJOINT, xs, ts)
        y_tot = y_h + np.asarray(self.hom.y_hat(X, T), dtype=float)
        return y_tot, p, p / self.hom.base.nu

    def y_field(self) -> ScalarField:
        """Homogenized state as a field with analytic derivatives."""
        return ScalarField(
            lambda x, t: self._series(BasisKind.STATE, x, t),
            partials={(dx, dt): (lambda x, t, dx=dx, dt=dt:
                                 self._series(BasisKind.STATE, x, t, dx, dt))
                      for dx in range(3) for dt in range(2) if (dx, dt) != (0, 0)})

    def p_field(self) -> ScalarField:
        """Adjoint as a field with analytic derivatives."""
        return ScalarField(
            lambda x, t: self._series(BasisKind.ADJOINT, x, t),
            partials={(dx, dt): (lambda x, t, dx=dx, dt=dt:
                                 self._series(BasisKind.ADJOINT, x, t, dx, dt))
                      for dx in range(3) for dt in range(2) if (dx, dt) != (0, 0)})


def evaluate(sol: Solution, x: float, t: float):
    """(y_total, p, u) at a single point of the closed rectangle."""
    sol._check_domain(x, t)
    y_h = sol._series(BasisKind.STATE, x, t)
    p = sol._series(BasisKind.ADJOINT, x, t)
    y_tot = y_h + float(np.asarray(sol.hom.y_hat(x, t), dtype=float))
    return y_tot, p, p / sol.hom.base.nu


def error_norms(sol, exact: ExactSolution, eval_grid=(101, 101)) -> dict:
    """Error norms of y and p on a uniform inclusive evaluation grid.

    sol is anything exposing evaluate_grid(xs, ts) -> (y, p, u); the L2
    norm uses the trapezoidal rule over the full rectangle.
    """
    ne_x, ne_t = eval_grid
    if hasattr(sol, "hom"):
        (a, b), T = sol.hom.base.interval, sol.hom.base.T
    else:
        (a, b), T = (0.0, 1.0), 1.0
    xs = np.linspace(a, b, ne_x)
    ts = np.linspace(0.0, T, ne_t)
    Y, P, _ = sol.evaluate_grid(xs, ts)
    X, Tt = np.meshgrid(xs, ts)
    Ey = Y - np.asarray(exact.y_exact(X, Tt), dtype=float)
    Ep = P - np.asarray(exact.p_exact(X, Tt), dtype=float)

    def l2(E):
        return float(np.sqrt(_trapz(_trapz(E ** 2, xs, axis=1), ts)))

    return {
        "linf_y": float(np.abs(Ey).max()),
        "l2_y": l2(Ey),
        "linf_p": float(np.abs(Ep).max()),
        "l2_p": l2(Ep),
    }
