"""Redundancy matrix computation and rank-one element-removal updates.

The redundancy matrix

    R = I - A K^-1 A^T C

is an oblique projector onto the subspace of elastic elongations along the
compatible elongations im(A). Its diagonal distributes the degree of
static indeterminacy over the elements (trace R = n_s), and column k holds
the negative elastic elongations caused by a unit pre-deformation of
element k. R is load-independent: it characterizes the internal constraint
of the structure itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import AnalysisError, AnalysisState

# Removal below this diagonal value creates a mechanism: the element is a
# statically determinate part and the Woodbury denominator R_rr vanishes.
REMOVAL_THRESHOLD = 1e-8


class MechanismError(AnalysisError):
    """Removing the element would leave a kinematically indeterminate structure."""


@dataclass(frozen=True)
class RedundancyMatrix:
    R: np.ndarray            # (n_q, n_q), dimensionless
    diag: np.ndarray         # distributed static indeterminacy R_kk
    n_s: int
    element_ids: tuple[int, ...]

    @property
    def n_q(self) -> int:
        return self.R.shape[0]

    def entry(self, element_id: int) -> float:
        return float(self.diag[self.element_ids.index(element_id)])

    def by_element(self) -> list[tuple[int, float]]:
        """Per-element (id, R_kk) table in id order."""
        return [(eid, float(self.diag[k])) for k, eid in enumerate(self.element_ids)]


def compute_redundancy_matrix(state: AnalysisState) -> RedundancyMatrix:
    """Dense R = I - A K^-1 A^T C via one triangular solve against A^T.

    Cost is O(n^2 n_q + n n_q^2): G = L^-1 A^T, then A K^-1 A^T = G^T G.
    """
    G = state.factor.half_solve(state.A.T)        # (n, n_q)
    M = G.T @ G                                   # A K^-1 A^T
    R = np.eye(state.n_q) - M * state.c[None, :]  # column-scale by C
    return RedundancyMatrix(
        R=R,
        diag=R.diagonal().copy(),
        n_s=state.n_s,
        element_ids=state.element_ids,
    )


def redundancy_diagonal(state: AnalysisState) -> np.ndarray:
    """All diagonal entries R_kk = 1 - c_k a_k K^-1 a_k^T without forming R.

    This is the cheap path used inside optimization loops: diag(A K^-1 A^T)
    is the vector of squared column norms of L^-1 A^T.
    """
    G = state.factor.half_solve(state.A.T)
    return 1.0 - state.c * np.einsum("ij,ij->j", G, G)


def redundancy_diagonal_entry(state: AnalysisState, element_id: int) -> float:
    """Single entry R_rr = 1 - a_r K^-1 c_r a_r^T with one factored solve."""
    k = state.row(element_id)
    a = state.A[k]
    return float(1.0 - state.c[k] * (a @ state.factor.solve(a)))


def apply_redundancy(red: RedundancyMatrix, e_0: np.ndarray) -> np.ndarray:
    """Elastic elongations -R e_0 caused by pre-deformations e_0."""
    e_0 = np.asarray(e_0, dtype=float)
    if e_0.shape != (red.n_q,):
        raise AnalysisError(f"pre-deformation vector must have length {red.n_q}")
    return -red.R @ e_0

def stress_influence(red: RedundancyMatrix, c: np.ndarray) -> np.ndarray:
    """Influence matrix -C R mapping pre-deformations to axial force changes."""
    return -np.asarray(c, dtype=float)[:, None] * red.R


def remove_element_update(
    state: AnalysisState,
    red: RedundancyMatrix,
    element_id: int,
) -> tuple[AnalysisState, RedundancyMatrix]:
    """Remove one element by Woodbury rank-one updates in O(n_q^2).

    The stiffness change is K~ = K - a_r^T c_r a_r, handled by a Cholesky
    downdate; the projector update is

        R'_ik = R_ik - R_ir R_rk / R_rr   (row/column r then dropped)

    Equivalent to a from-scratch rebuild of the model without element r.
    Raises :class:`MechanismError` when R_rr is below the removal threshold,
    i.e. the element is a statically determinate part whose removal fails
    the structure.
    """
    r = state.element_ids.index(element_id)
    R_rr = float(red.diag[r])
    if R_rr < REMOVAL_THRESHOLD:
        raise MechanismError(
            f"element {element_id} is statically determinate (R_rr = {R_rr:.3e}); "
            "removal creates a mechanism"
        )

    a_r = state.A[r]
    c_r = float(state.c[r])

    keep = np.arange(state.n_q) != r
    R_new = red.R - np.outer(red.R[:, r], red.R[r, :]) / R_rr
    R_new = np.ascontiguousarray(R_new[np.ix_(keep, keep)])

    K_new = state.K - c_r * np.outer(a_r, a_r)
    K_new = 0.5 * (K_new + K_new.T)
    try:
        factor_new = state.factor.downdate(np.sqrt(c_r) * a_r)
    except AnalysisError as exc:
        raise MechanismError(
            f"removing element {element_id} leaves an indefinite stiffness matrix"
        ) from exc

    new_ids = tuple(eid for eid in state.element_ids if eid != element_id)
    new_state = AnalysisState(
        model=state.model.without_elements([element_id]),
        A=np.ascontiguousarray(state.A[keep]),
        c=state.c[keep].copy(),
        lengths=state.lengths[keep].copy(),
        K=K_new,
        factor=factor_new,
        rank_A=state.rank_A,
        n_s=state.n_s - 1,
        element_ids=new_ids,
        dof_index=state.dof_index,
    )
    new_red = RedundancyMatrix(
        R=R_new,
        diag=R_new.diagonal().copy(),
        n_s=state.n_s - 1,
        element_ids=new_ids,
    )
    return new_state, new_red


def add_element_update(
    state: AnalysisState,
    red: RedundancyMatrix,
    element_id: int,
    row: np.ndarray,
    stiffness: float,
    length: float,
    model=None,
) -> tuple[AnalysisState, RedundancyMatrix]:
    """Inverse of :func:`remove_element_update`: append an element in O(n_q^2).

    ``row`` is the new compatibility row on the existing dof set. The new
    element is appended as the last row/column. Used as the fast path when
    stepping through assembly sequences.
    """
    a = np.asarray(row, dtype=float)
    c_new = float(stiffness)
    t = state.factor.solve(a)          # K^-1 a^T
    u = state.A @ t                    # a_i K^-1 a^T for existing elements
    w = float(a @ t)
    gamma = 1.0 + c_new * w

    R_old = red.R + (c_new / gamma) * np.outer(u, u * state.c)
    col = -(c_new / gamma) * u
    row_new = -(state.c / gamma) * u
    corner = 1.0 - c_new * w / gamma

    n_q = state.n_q
    R_new = np.empty((n_q + 1, n_q + 1))
    R_new[:n_q, :n_q] = R_old
    R_new[:n_q, n_q] = col
    R_new[n_q, :n_q] = row_new
    R_new[n_q, n_q] = corner

    K_new = state.K + c_new * np.outer(a, a)
    K_new = 0.5 * (K_new + K_new.T)
    factor_new = state.factor.update(np.sqrt(c_new) * a)

    new_ids = state.element_ids + (element_id,)
    new_state = AnalysisState(
        model=model if model is not None else state.model,
        A=np.vstack([state.A, a[None, :]]),
        c=np.append(state.c, c_new),
        lengths=np.append(state.lengths, float(length)),
        K=K_new,
        factor=factor_new,
        rank_A=state.rank_A,
        n_s=state.n_s + 1,
        element_ids=new_ids,
        dof_index=state.dof_index,
    )
    new_red = RedundancyMatrix(
        R=R_new, diag=R_new.diagonal().copy(), n_s=state.n_s + 1, element_ids=new_ids
    )
    return new_state, new_red
