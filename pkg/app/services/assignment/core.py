"""
Association maps, cost matrices and the stationary assignment distribution.

An association map ``gamma`` assigns every one of the ``P`` hypothesized
labels an index in ``{-1, 0, 1, ..., M}``:

- ``-1``  the label does not exist (it is dropped from the child hypothesis),
- ``0``   the label exists but is not detected,
- ``j>0`` the label generated measurement ``j``.

A map is *positive 1-1* when no two labels share the same positive index.
The cost matrix ``eta`` holds the per-label likelihood factors; column ``c``
of the stored array corresponds to index ``j = c - 1``. The unnormalized
probability of a valid map is the product of the selected entries of each
row, which is carried in the natural-log domain.

Everything here is pure and safe to share between chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from app.core.config import settings
from app.core.exceptions import CapacityError, DomainError

AssociationMap = Tuple[int, ...]

LOG_ZERO = float("-inf")


@dataclass(frozen=True)
class CostMatrix:
    """
    P x (M+2) table of strictly positive likelihood factors.

    ``values[i, j + 1]`` is the factor of label ``i`` taking index ``j``.
    The array is stored read-only so instances can be shared between chains.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 2:
            raise DomainError(f"cost matrix must be P x (M+2) with P >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise DomainError("cost matrix entries must be strictly positive and finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "CostMatrix":
        try:
            values = np.asarray(rows, dtype=float)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"cost matrix rows must be equal-length numbers: {exc}") from exc
        return cls(values)

    @property
    def P(self) -> int:
        return int(self.values.shape[0])

    @property
    def M(self) -> int:
        return int(self.values.shape[1]) - 2

    @property
    def log_values(self) -> np.ndarray:
        return np.log(self.values)

    def entry(self, i: int, j: int) -> float:
        """Factor of label ``i`` (0-based) taking index ``j`` in ``-1..M``."""
        return float(self.values[i, j + 1])

    def row_scaled(self, i: int, factor: float) -> "CostMatrix":
        scaled = np.array(self.values)
        scaled[i] *= factor
        return CostMatrix(scaled)


@dataclass(frozen=True)
class WeightedAssignment:
    map: AssociationMap
    log_weight: float


def _as_entries(gamma: Sequence[int]) -> np.ndarray:
    entries = np.asarray(gamma, dtype=np.int64)
    if entries.ndim != 1:
        raise DomainError("association map must be a one-dimensional sequence")
    return entries


def is_positive_one_to_one(gamma: Sequence[int], M: Optional[int] = None) -> bool:
    """
    True iff the positive entries of ``gamma`` are pairwise distinct.

    Raises :class:`DomainError` when an entry lies below ``-1`` or, if ``M`` is
    given, above ``M``.
    """
    entries = _as_entries(gamma)
    if entries.size and entries.min() < -1:
        raise DomainError(f"association entry {int(entries.min())} below -1")
    if M is not None and entries.size and entries.max() > M:
        raise DomainError(f"association entry {int(entries.max())} above M={M}")
    positive = entries[entries > 0]
    return bool(np.unique(positive).size == positive.size)


def joint_log_weight(gamma: Sequence[int], eta: CostMatrix) -> float:
    """
    Unnormalized log-probability ``sum_i ln eta_i(gamma_i)`` of a map.

    Maps that are out of range or not positive 1-1 get :data:`LOG_ZERO`.
    A length mismatch with ``eta`` is a :class:`DomainError`.
    """
    entries = _as_entries(gamma)
    if entries.size != eta.P:
        raise DomainError(f"map length {entries.size} does not match P={eta.P}")
    if entries.min() < -1 or entries.max() > eta.M:
        return LOG_ZERO
    if not is_positive_one_to_one(entries):
        return LOG_ZERO
    return float(np.log(eta.values[np.arange(eta.P), entries + 1]).sum())


def _check_enumeration_guard(P: int, M: int, limit: Optional[int]) -> None:
    if P < 1 or M < 0:
        raise DomainError(f"enumeration needs P >= 1 and M >= 0, got P={P}, M={M}")
    guard = settings.ENUMERATION_LIMIT if limit is None else limit
    if (M + 2) ** P > guard:
        raise CapacityError(f"(M+2)^P = {M + 2}^{P} exceeds the enumeration limit {guard}")


def enumerate_valid_maps(P: int, M: int, limit: Optional[int] = None) -> Iterator[AssociationMap]:
    """
    Yield every positive 1-1 map in ``{-1..M}^P`` once, in lexicographic order.

    The capacity guard is checked eagerly, before the first map is produced.
    """
    _check_enumeration_guard(P, M, limit)

    def walk(prefix: list[int], used: set[int]) -> Iterator[AssociationMap]:
        if len(prefix) == P:
            yield tuple(prefix)
            return
        for j in range(-1, M + 1):
            if j > 0 and j in used:
                continue
            prefix.append(j)
            if j > 0:
                used.add(j)
            yield from walk(prefix, used)
            prefix.pop()
            used.discard(j)

    return walk([], set())


def valid_maps_array(P: int, M: int, limit: Optional[int] = None) -> np.ndarray:
    """All valid maps stacked as a ``(K, P)`` integer array."""
    return np.array(list(enumerate_valid_maps(P, M, limit)), dtype=np.int64).reshape(-1, P)


def brute_force_distribution(eta: CostMatrix, limit: Optional[int] = None) -> Dict[AssociationMap, float]:
    """Exact stationary distribution by enumerating every valid map."""
    maps = valid_maps_array(eta.P, eta.M, limit)
    log_w = np.log(eta.values)[np.arange(eta.P)[None, :], maps + 1].sum(axis=1)
    probs = np.exp(log_w - logsumexp(log_w))
    return {tuple(int(v) for v in row): float(p) for row, p in zip(maps, probs)}


def occupied_mask(i: int, gamma: np.ndarray, M: int) -> np.ndarray:
    """Boolean mask over ``1..M`` of indices taken by coordinates other than ``i``."""
    others = np.delete(gamma, i)
    return (others[:, None] == np.arange(1, M + 1)[None, :]).any(axis=0)


def masked_row(i: int, gamma: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Unnormalized conditional of coordinate ``i``, recomputed from scratch in O(PM)."""
    row = np.array(values[i])
    row[2:][occupied_mask(i, gamma, values.shape[1] - 2)] = 0.0
    return row


def conditional_direct(i: int, gamma: Sequence[int], eta: CostMatrix) -> np.ndarray:
    """
    Normalized conditional of coordinate ``i`` given the other coordinates.

    Returns a length ``M+2`` probability vector ordered ``j = -1..M``.
    Positive indices held by another coordinate get probability zero.
    """
    entries = _as_entries(gamma)
    if entries.size != eta.P:
        raise DomainError(f"map length {entries.size} does not match P={eta.P}")
    if not 0 <= i < eta.P:
        raise DomainError(f"coordinate {i} outside 0..{eta.P - 1}")
    others = np.delete(entries, i)
    if not is_positive_one_to_one(others, eta.M):
        raise DomainError("coordinates other than i are not positive 1-1")
    row = masked_row(i, entries, eta.values)
    return row / row.sum()


def random_cost_matrix(
    P: int,
    M: int,
    rng: np.random.Generator,
    low: float = 0.01,
    high: float = 10.0,
) -> CostMatrix:
    """Cost matrix with i.i.d. Uniform(low, high) entries."""
    if low <= 0.0 or high <= low:
        raise DomainError(f"need 0 < low < high, got low={low}, high={high}")
    return CostMatrix(rng.uniform(low, high, size=(P, M + 2)))


def total_variation(p: Mapping[AssociationMap, float], q: Mapping[AssociationMap, float]) -> float:
    """Total-variation distance between two distributions over maps."""
    keys = set(p) | set(q)
    return 0.5 * float(sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys))
