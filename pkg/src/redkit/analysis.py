"""Compatibility/material/stiffness matrix assembly and linear statics.

The three field equations for a linear truss are

    A^T s = f        (equilibrium)
    s = C e_el       (material law, C = diag(EA_k / L_k))
    e_el = A d - e_0 (compatibility)

with A the n_q x n compatibility matrix mapping free nodal displacements
to total member elongations. Eliminating s and e_el gives the stiffness
relation  K d = f + A^T C e_0  with  K = A^T C A.

Row k of A is the direction-cosine row of element k: +u at the free dofs
of node_b and -u at the free dofs of node_a, where u is the unit vector
from node_a to node_b. Positive elongation means lengthening. Fixed dofs
are eliminated (never assembled), so rank(A) = n is exactly the condition
for kinematic determinacy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import StructuralModel

DEFAULT_RANK_TOL = 1e-10


class AnalysisError(Exception):
    """Numerical failure during assembly or solve."""


class KinematicError(AnalysisError):
    """Structure has rigid-body or internal mechanisms (rank(A) < n)."""

    def __init__(self, message: str, n_mechanisms: int = 0, mechanisms: np.ndarray | None = None):
        super().__init__(message)
        self.n_mechanisms = n_mechanisms
        # columns span the mechanism space (displacements with zero elongation)
        self.mechanisms = mechanisms


class SpdFactor:
    """Cholesky factorization of an SPD matrix with O(n^2) rank-one edits.

    Keeps the lower factor L with K = L L^T. ``update`` and ``downdate``
    return new factors for K + v v^T and K - v v^T without refactorizing,
    which is what makes element addition/removal an O(n_q^2) operation.
    """

    def __init__(self, lower: np.ndarray):
        self.L = lower

    @classmethod
    def factorize(cls, K: np.ndarray) -> "SpdFactor":
        try:
            L = scipy.linalg.cholesky(K, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise AnalysisError(f"stiffness factorization failed: {exc}") from exc
        return cls(L)

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def solve(self, b: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve((self.L, True), b)

    def half_solve(self, B: np.ndarray) -> np.ndarray:
        """L^-1 B; useful because A K^-1 A^T = (L^-1 A^T)^T (L^-1 A^T)."""
        return scipy.linalg.solve_triangular(self.L, B, lower=True)

    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.L))))

    def update(self, v: np.ndarray) -> "SpdFactor":
        """Factor of K + v v^T."""
        return SpdFactor(_chol_rank_one(self.L.copy(), np.asarray(v, dtype=float).copy(), +1.0))

    def downdate(self, v: np.ndarray) -> "SpdFactor":
        """Factor of K - v v^T; raises AnalysisError if the result is not SPD."""
        return SpdFactor(_chol_rank_one(self.L.copy(), np.asarray(v, dtype=float).copy(), -1.0))


def _chol_rank_one(L: np.ndarray, v: np.ndarray, sign: float) -> np.ndarray:
    # classic LINPACK-style sweep of Givens (sign +1) / hyperbolic (sign -1)
    # rotations; O(n^2) total
    n = v.shape[0]
    for k in range(n):
        r2 = L[k, k] ** 2 + sign * v[k] ** 2
        if r2 <= 0.0:
            raise AnalysisError("rank-one downdate leaves matrix indefinite (mechanism)")
        r = math.sqrt(r2)
        c = r / L[k, k]
        s = v[k] / L[k, k]
        L[k, k] = r
        if k + 1 < n:
            L[k + 1:, k] = (L[k + 1:, k] + sign * s * v[k + 1:]) / c
            v[k + 1:] = c * v[k + 1:] - s * L[k + 1:, k]
    return L


@dataclass(frozen=True)
class AnalysisState:
    """Assembled matrices for one structure; immutable, safe to share.

    ``element_ids[k]`` is the user-facing id of the element behind row k of
    A, which keeps reporting stable across rank-one removals.
    """

    model: StructuralModel
    A: np.ndarray          # (n_q, n) compatibility matrix
    c: np.ndarray          # (n_q,) diagonal of the material matrix C [kN/m]
    lengths: np.ndarray    # (n_q,) element lengths [m]
    K: np.ndarray          # (n, n) stiffness matrix [kN/m]
    factor: SpdFactor
    rank_A: int
    n_s: int               # degree of static indeterminacy
    element_ids: tuple[int, ...]
    dof_index: tuple[tuple[int, int], ...]  # (node id, axis) per column of A

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def n_q(self) -> int:
        return self.A.shape[0]

    @property
    def C(self) -> np.ndarray:
        return np.diag(self.c)

    def row(self, element_id: int) -> int:
        return self.element_ids.index(element_id)

    def load_vector(self, loads=None) -> np.ndarray:
        """Assemble the free-dof load vector from (node id, vector) pairs.

        Defaults to the model's own load case. Components on fixed dofs are
        reacted by the supports and dropped.
        """
        if loads is None:
            loads = self.model.loads
        pos = {pair: i for i, pair in enumerate(self.dof_index)}
        f = np.zeros(self.n)
        for nid, vec in loads:
            for axis, value in enumerate(vec):
                j = pos.get((nid, axis))
                if j is not None:
                    f[j] += value
        return f


@dataclass(frozen=True)
class StaticSolution:
    d: np.ndarray        # free-dof displacements [m]
    e_total: np.ndarray  # total elongations A d [m]
    e_el: np.ndarray     # elastic elongations A d - e_0 [m]
    s: np.ndarray        # axial forces C e_el [kN]


def build_matrices(model: StructuralModel, rank_tol: float = DEFAULT_RANK_TOL) -> AnalysisState:
    """Assemble A, C, K for a model and factorize K.

    Raises :class:`KinematicError` when rank(A) < n; the error carries the
    number of mechanisms and an orthonormal basis of the mechanism space.
    """
    dim = model.dimension
    dof_index: list[tuple[int, int]] = []
    col: dict[tuple[int, int], int] = {}
    for node in model.nodes:
        for axis in range(dim):
            if not node.support[axis]:
                col[(node.id, axis)] = len(dof_index)
                dof_index.append((node.id, axis))
    n = len(dof_index)
    if n == 0:
        raise AnalysisError("model has no free degrees of freedom")

    n_q = model.n_elements
    A = np.zeros((n_q, n))
    c = np.zeros(n_q)
    lengths = np.zeros(n_q)
    for k, elem in enumerate(model.elements):
        xa = np.asarray(model.node(elem.node_a).coords)
        xb = np.asarray(model.node(elem.node_b).coords)
        length = float(np.linalg.norm(xb - xa))
        if length <= 0:
            raise AnalysisError(f"element {elem.id} has zero length")
        u = (xb - xa) / length
        for axis in range(dim):
            j = col.get((elem.node_b, axis))
            if j is not None:
                A[k, j] += u[axis]
            j = col.get((elem.node_a, axis))
            if j is not None:
                A[k, j] -= u[axis]
        lengths[k] = length
        c[k] = elem.ea / length

    K = A.T @ (c[:, None] * A)
    K = 0.5 * (K + K.T)

    sigma = scipy.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sigma > rank_tol * (sigma[0] if sigma.size else 0.0)))
    if rank < n:
        # right singular vectors with vanishing sigma span the mechanisms
        _, _, vt = scipy.linalg.svd(A)
        mechanisms = vt[rank:].T
        raise KinematicError(
            f"structure is kinematically indeterminate: {n - rank} mechanism(s) "
            f"(rank(A) = {rank} < n = {n})",
            n_mechanisms=n - rank,
            mechanisms=mechanisms,
        )

    factor = SpdFactor.factorize(K)
    return AnalysisState(
        model=model,
        A=A,
        c=c,
        lengths=lengths,
        K=K,
        factor=factor,
        rank_A=rank,
        n_s=n_q - rank,
        element_ids=model.element_ids,
        dof_index=tuple(dof_index),
    )


def solve_static(
    state: AnalysisState,
    f: np.ndarray | None = None,
    e_0: np.ndarray | None = None,
) -> StaticSolution:
    """Solve K d = f + A^T C e_0 and derive elongations and forces.

    The residual ||K d - rhs||_inf is checked against 1e-9 * (1 + ||f||_inf);
    a violation means K is effectively singular for this right-hand side and
    raises :class:`AnalysisError` with a condition estimate.
    """
    f = np.zeros(state.n) if f is None else np.asarray(f, dtype=float)
    e_0 = np.zeros(state.n_q) if e_0 is None else np.asarray(e_0, dtype=float)
    if f.shape != (state.n,):
        raise AnalysisError(f"load vector must have length {state.n}")
    if e_0.shape != (state.n_q,):
        raise AnalysisError(f"pre-deformation vector must have length {state.n_q}")

    rhs = f + state.A.T @ (state.c * e_0)
    d = state.factor.solve(rhs)
    residual = float(np.max(np.abs(state.K @ d - rhs))) if state.n else 0.0
    f_scale = 1.0 + float(np.max(np.abs(f))) if f.size else 1.0
    if residual > 1e-9 * max(f_scale, float(np.max(np.abs(rhs), initial=0.0))):
        cond = np.linalg.cond(state.K)
        raise AnalysisError(
            f"solve residual {residual:.3e} too large; K condition estimate {cond:.3e}"
        )

    e_total = state.A @ d
    e_el = e_total - e_0
    s = state.c * e_el
    return StaticSolution(d=d, e_total=e_total, e_el=e_el, s=s)


def degree_of_static_indeterminacy(state: AnalysisState) -> int:
    """n_s = n_q - rank(A^T); equals the trace of the redundancy matrix."""
    return state.n_s


def matrix_dump(M: np.ndarray) -> str:
    """Debug dump: dense, row-major, decimal; one row per line."""
    M = np.atleast_2d(M)
    return "\n".join(" ".join(repr(float(x)) for x in row) for row in M) + "\n"
