"""
Incrementally maintained conditionals of the assignment chain.

For a current map ``gamma`` the unnormalized conditional of coordinate ``i``
is row ``i`` of ``eta`` with every positive index held by another coordinate
set to zero. When successive maps differ only at coordinate ``n`` (old index
``a``, new index ``b``), every other row changes in at most two places: the
entry at ``a`` is restored and the entry at ``b`` is cleared. Propagating a
move therefore costs O(P) instead of the O(P^2 M) of rebuilding every row.

``rho`` is the coordinate-selection distribution of the tempered sampler:
for coordinate ``i`` its unnormalized value is the ratio of the mixture
proposal to the exact conditional at the current index,

    rho_tilde_i = alpha + (1 - alpha) * eta_i(g_i)^beta * nu1_i / (eta_i(g_i) * nubeta_i)

which only depends on the current entry and the two normalizers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.core.exceptions import DomainError
from app.services.assignment.core import CostMatrix, is_positive_one_to_one


@dataclass
class ConditionalState:
    pi_tilde: np.ndarray
    nu1: np.ndarray
    nu_beta: np.ndarray
    rho: np.ndarray
    current: np.ndarray
    alpha: float
    beta: float
    rho_tilde_sum: float = 0.0

    def copy(self) -> "ConditionalState":
        return ConditionalState(
            pi_tilde=self.pi_tilde.copy(),
            nu1=self.nu1.copy(),
            nu_beta=self.nu_beta.copy(),
            rho=self.rho.copy(),
            current=self.current.copy(),
            alpha=self.alpha,
            beta=self.beta,
            rho_tilde_sum=self.rho_tilde_sum,
        )


def zeros_map(P: int) -> np.ndarray:
    """All labels undetected: valid for any ``M``."""
    return np.zeros(P, dtype=np.int64)


def rho_tilde(
    values: np.ndarray,
    current: np.ndarray,
    nu1: np.ndarray,
    nu_beta: np.ndarray,
    alpha: float,
    beta: float,
) -> np.ndarray:
    """Unnormalized coordinate-selection weights, O(P)."""
    selected = values[np.arange(current.size), current + 1]
    return alpha + (1.0 - alpha) * selected ** (beta - 1.0) * (nu1 / nu_beta)


def check_start(gamma0: Sequence[int], eta: CostMatrix) -> np.ndarray:
    current = np.array(gamma0, dtype=np.int64).reshape(-1)
    if current.size != eta.P:
        raise DomainError(f"initial map length {current.size} does not match P={eta.P}")
    if not is_positive_one_to_one(current, eta.M):
        raise DomainError(f"initial map {tuple(int(v) for v in current)} is not positive 1-1")
    return current


def build_rows(current: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Masked rows for every coordinate in O(PM).

    The occupancy count of each positive column is taken once; a row is masked
    where the column is held by some coordinate and that coordinate is not
    the row itself.
    """
    P, width = values.shape
    taken = np.zeros(width, dtype=np.int64)
    np.add.at(taken, current[current > 0] + 1, 1)
    pi_tilde = np.array(values, dtype=float)
    for i in range(P):
        held = taken.copy()
        if current[i] > 0:
            held[current[i] + 1] -= 1
        pi_tilde[i, held > 0] = 0.0
    return pi_tilde


def init_state(gamma0: Sequence[int], eta: CostMatrix, alpha: float, beta: float) -> ConditionalState:
    """Build the conditionals, their normalizers and ``rho`` for a valid start map."""
    if not (0.0 < alpha <= 1.0 and 0.0 < beta <= 1.0):
        raise DomainError(f"alpha and beta must lie in (0, 1], got alpha={alpha}, beta={beta}")
    current = check_start(gamma0, eta)
    pi_tilde = build_rows(current, eta.values)
    nu1 = pi_tilde.sum(axis=1)
    nu_beta = (pi_tilde ** beta).sum(axis=1)
    weights = rho_tilde(eta.values, current, nu1, nu_beta, alpha, beta)
    total = float(weights.sum())
    return ConditionalState(
        pi_tilde=pi_tilde,
        nu1=nu1,
        nu_beta=nu_beta,
        rho=weights / total,
        current=current,
        alpha=alpha,
        beta=beta,
        rho_tilde_sum=total,
    )


def apply_move(
    pi_tilde: np.ndarray,
    nu1: np.ndarray,
    nu_beta: Optional[np.ndarray],
    values: np.ndarray,
    beta: float,
    n: int,
    old_j: int,
    new_j: int,
) -> None:
    """
    In-place update of every row except ``n`` after coordinate ``n`` moves.

    Pass ``nu_beta=None`` when the tempered normalizers are not tracked.
    """
    if old_j > 0:
        col = old_j + 1
        delta = values[:, col].copy()
        delta[n] = 0.0
        pi_tilde[:, col] = values[:, col]
        nu1 += delta
        if nu_beta is not None:
            nu_beta += delta ** beta
    if new_j > 0:
        col = new_j + 1
        delta = pi_tilde[:, col].copy()
        delta[n] = 0.0
        nu1 -= delta
        if nu_beta is not None:
            nu_beta -= delta ** beta
        pi_tilde[:, col] = 0.0
        pi_tilde[n, col] = values[n, col]


def propagate_state(
    state: ConditionalState,
    n: int,
    new_j: int,
    eta: CostMatrix,
    beta: Optional[float] = None,
) -> ConditionalState:
    """
    Move coordinate ``n`` to ``new_j`` and update ``state`` in place.

    Row ``n`` is untouched; other rows change at most at ``old_j`` and
    ``new_j``. ``rho`` is refreshed in O(P) only when the index changed.
    Returns the same (mutated) state.
    """
    beta = state.beta if beta is None else beta
    old_j = int(state.current[n])
    new_j = int(new_j)
    if not -1 <= new_j <= eta.M:
        raise DomainError(f"index {new_j} outside -1..{eta.M}")
    if new_j > 0 and state.pi_tilde[n, new_j + 1] == 0.0:
        raise DomainError(f"index {new_j} is held by another coordinate")
    if new_j == old_j:
        return state
    apply_move(state.pi_tilde, state.nu1, state.nu_beta, eta.values, beta, n, old_j, new_j)
    state.current[n] = new_j
    weights = rho_tilde(eta.values, state.current, state.nu1, state.nu_beta, state.alpha, beta)
    state.rho_tilde_sum = float(weights.sum())
    state.rho = weights / state.rho_tilde_sum
    return state


def proposal(state: ConditionalState, i: int, alpha: Optional[float] = None, beta: Optional[float] = None) -> np.ndarray:
    """Mixture proposal for coordinate ``i``: exact conditional blended with its tempered version."""
    alpha = state.alpha if alpha is None else alpha
    beta = state.beta if beta is None else beta
    row = state.pi_tilde[i]
    tempered = row ** beta
    return alpha * row / row.sum() + (1.0 - alpha) * tempered / tempered.sum()
