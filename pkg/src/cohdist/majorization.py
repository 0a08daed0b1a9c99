"""Tail sums and majorization tests on dephased spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cohdist.errors import MassMismatch, NegativeWeight
from cohdist.states import DEFAULT_TOL, PureState, PureStateEnsemble, ToleranceConfig


@dataclass(frozen=True, eq=False)
class TailSumProfile:
    """``c[s-1] = sum_{i >= s} w_i`` over the descending-sorted weights."""

    c: np.ndarray

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def __getitem__(self, s: int) -> float:
        # 1-based tail position; C_{d+1} = 0.
        if s == self.dim + 1:
            return 0.0
        if not 1 <= s <= self.dim:
            raise IndexError(s)
        return float(self.c[s - 1])


def _weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float).reshape(-1)
    if np.any(w < 0):
        raise NegativeWeight(f"negative weight {w.min()}")
    return w


def _tails(w: np.ndarray, dim: int | None = None) -> np.ndarray:
    d = w.shape[0] if dim is None else dim
    desc = np.zeros(d)
    desc[: w.shape[0]] = np.sort(w)[::-1]
    return np.cumsum(desc[::-1])[::-1]


def tail_sums(weights, dim: int | None = None) -> TailSumProfile:
    """Tail-sum profile of a nonnegative weight vector, zero-padded to ``dim``."""
    w = _weights(weights)
    return TailSumProfile(_tails(w, dim))


def majorizes(p, q, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Return True iff ``p`` is majorized by ``q`` (``p ≺ q``).

    The shorter vector is zero-padded. The check is done on tail sums:
    ``C_s(p) >= C_s(q) - tol.majorization`` for every ``s``.
    """
    p, q = _weights(p), _weights(q)
    if abs(p.sum() - q.sum()) > tol.majorization:
        raise MassMismatch(f"total masses differ: {p.sum()} vs {q.sum()}")
    d = max(p.shape[0], q.shape[0])
    return bool(np.all(_tails(p, d) >= _tails(q, d) - tol.majorization))


def pure_to_pure_feasible(phi: PureState, psi: PureState, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether ``phi -> psi`` is possible with certainty under strictly incoherent operations."""
    return majorizes(phi.probabilities, psi.probabilities, tol)


def ensemble_tails(ens: PureStateEnsemble, dim: int) -> np.ndarray:
    """``sum_k p_k C_s(phi_k)`` for ``s = 1..dim``."""
    total = np.zeros(dim)
    for p, s in ens.members:
        total += p * _tails(s.probabilities, dim)
    return total


def pure_to_ensemble_feasible(
    phi: PureState, ens: PureStateEnsemble, tol: ToleranceConfig = DEFAULT_TOL
) -> bool:
    """Whether ``phi -> {p_k, phi_k}`` is possible under strictly incoherent operations.

    Holds iff ``C_s(phi) >= sum_k p_k C_s(phi_k)`` for all ``s``.
    """
    ens.require_complete()
    d = max(phi.dim, ens.dim)
    return bool(np.all(_tails(phi.probabilities, d) >= ensemble_tails(ens, d) - tol.majorization))
