"""Feasibility of mixed-to-ensemble conversions and ensemble collapse.

A conversion ``rho -> {p_k, phi_k}`` is possible under strictly incoherent
operations iff some complete family of incoherent projectors splits ``rho``
into rank-one blocks ``psi_mu`` (weights ``p_mu``) and the target ensemble can
be divided among the blocks so that every block's tail sums dominate the
weighted tail sums of its share.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import linprog

from cohdist.errors import DimensionTooLarge, DimMismatch, InvalidPartition
from cohdist.majorization import _tails, ensemble_tails
from cohdist.states import (
    DEFAULT_TOL,
    DensityMatrix,
    PureState,
    PureStateEnsemble,
    ToleranceConfig,
    fidelity_pure_pure,
)
from cohdist.subspaces import _block_state, pure_blocks, verify_block_purity

MAX_PARTITION_DIM = 12
# Margin accepted from the transport LP; HiGHS is run with 1e-10 feasibility
# tolerances so certified margins are accurate well below this.
LP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BlockCertificate:
    indices: tuple[int, ...]
    state: PureState | None  # None when the block is not rank one or empty
    probability: float
    group: PureStateEnsemble  # absolute weights p_{mu n}
    condition_holds: bool
    margin: float  # min_s [C_s(psi_mu) - sum_n p_{n|mu} C_s(phi_{mu n})]


@dataclass(frozen=True, eq=False)
class PartitionCertificate:
    partition: tuple[tuple[int, ...], ...]
    blocks: tuple[BlockCertificate, ...]
    feasible: bool
    tol: ToleranceConfig


def _normalize_partition(partition, d: int) -> tuple[tuple[int, ...], ...]:
    blocks = tuple(tuple(sorted(int(i) for i in b)) for b in partition)
    flat = [i for b in blocks for i in b]
    if any(not b for b in blocks):
        raise InvalidPartition("empty block in partition")
    if sorted(flat) != list(range(d)):
        raise InvalidPartition(f"partition {partition} does not cover 0..{d - 1} disjointly")
    return blocks


def check_transformation(
    rho: DensityMatrix,
    groups: Sequence[PureStateEnsemble],
    partition,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> PartitionCertificate:
    """Certify ``rho -> union of groups`` against a given projector family.

    Args:
        rho: initial state.
        groups: one (sub-normalized) ensemble per partition block, holding the
            absolute weights of the target members produced from that block.
        partition: disjoint index sets covering ``0..d-1``.
    """
    d = rho.dim
    blocks = _normalize_partition(partition, d)
    if len(groups) != len(blocks):
        raise InvalidPartition(f"{len(groups)} ensemble groups for {len(blocks)} blocks")
    certs = []
    for idx, group in zip(blocks, groups):
        if group.dim > d:
            raise DimMismatch(f"target dimension {group.dim} exceeds {d}")
        prob = float(np.real(np.trace(rho.entries[np.ix_(idx, idx)])))
        weight_ok = abs(prob - group.total) <= tol.trace
        if prob < tol.psd:
            certs.append(BlockCertificate(idx, None, prob, group, weight_ok, 0.0))
            continue
        if not verify_block_purity(rho, idx, tol):
            certs.append(BlockCertificate(idx, None, prob, group, False, -np.inf))
            continue
        state, _ = _block_state(rho, idx)
        margin = float(np.min(prob * _tails(state.probabilities, d) - ensemble_tails(group, d))) / prob
        holds = weight_ok and margin >= -tol.majorization
        certs.append(BlockCertificate(idx, state, prob, group, holds, margin))
    return PartitionCertificate(blocks, tuple(certs), all(c.condition_holds for c in certs), tol)


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for r in range(len(rest), -1, -1):
        for chosen in combinations(rest, r):
            remaining = [x for x in rest if x not in chosen]
            for tail in _set_partitions(remaining):
                yield [[first, *chosen], *tail]


def candidate_partitions(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> list[tuple[tuple[int, ...], ...]]:
    """Refinements of the maximal pure-subspace family, coarsest first.

    Ordered by number of blocks, then lexicographically. Every rank-one block
    sits inside a maximal one, so this list contains every projector family
    worth testing.
    """
    dec = pure_blocks(rho, tol)
    per_block = []
    for proj in dec.projectors:
        per_block.append([sorted(tuple(sorted(p)) for p in part) for part in _set_partitions(list(proj))])
    out: list[tuple[tuple[int, ...], ...]] = [()]
    for options in per_block:
        out = [prev + tuple(opt) for prev in out for opt in options]
    return sorted((tuple(sorted(p)) for p in out), key=lambda p: (len(p), p))


def _transport(rho, ens: PureStateEnsemble, partition, d: int, tol: ToleranceConfig):
    """Split ``ens`` across blocks maximizing the worst normalized tail margin.

    Returns (margin, weights[mu][k]) or None when some block is not rank one.
    """
    members = list(ens.members)
    m, n = len(partition), len(members)
    probs, tails_mu = [], []
    for idx in partition:
        prob = float(np.real(np.trace(rho.entries[np.ix_(idx, idx)])))
        probs.append(prob)
        if prob < tol.psd:
            tails_mu.append(np.zeros(d))
            continue
        if not verify_block_purity(rho, idx, tol):
            return None
        state, _ = _block_state(rho, idx)
        tails_mu.append(_tails(state.probabilities, d))
    tails_k = [_tails(s.probabilities, d) for _, s in members]

    # variables: w[mu, k] (row-major), then t; maximize t
    nv = m * n + 1
    c = np.zeros(nv)
    c[-1] = -1.0
    a_eq, b_eq = [], []
    for k, (p, _) in enumerate(members):
        row = np.zeros(nv)
        row[[mu * n + k for mu in range(m)]] = 1.0
        a_eq.append(row)
        b_eq.append(p)
    for mu in range(m):
        row = np.zeros(nv)
        row[mu * n : mu * n + n] = 1.0
        a_eq.append(row)
        b_eq.append(probs[mu])
    a_ub, b_ub = [], []
    for mu in range(m):
        for s in range(1, d):  # C_1 is the mass, fixed by the equalities
            row = np.zeros(nv)
            for k in range(n):
                row[mu * n + k] = tails_k[k][s]
            row[-1] = 1.0
            a_ub.append(row)
            b_ub.append(probs[mu] * tails_mu[mu][s])
    bounds = [(0, None)] * (m * n) + [(None, 1.0)]
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq),
        b_eq=np.array(b_eq),
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        return -np.inf, None
    w = res.x[:-1].reshape(m, n)
    w[w < 1e-13] = 0.0
    return float(res.x[-1]), w


def find_feasible_partition(
    rho: DensityMatrix,
    ens: PureStateEnsemble,
    tol: ToleranceConfig = DEFAULT_TOL,
    max_dim: int = MAX_PARTITION_DIM,
    exhaustive: bool = False,
) -> PartitionCertificate | None:
    """Search projector families for a certificate of ``rho -> ens``.

    The ensemble need not be grouped: for each candidate family a linear
    program divides the members (fractionally) among the blocks. Refining a
    pure block can only weaken its tail sums, so if the coarsest family fails
    no refinement succeeds; the search stops there unless ``exhaustive``.

    Returns:
        The first feasible certificate in enumeration order, or None.
    """
    d = rho.dim
    if d > max_dim:
        raise DimensionTooLarge(f"dimension {d} exceeds enumeration bound {max_dim}")
    ens.require_complete()
    if ens.dim > d:
        raise DimMismatch(f"target dimension {ens.dim} exceeds {d}")
    cert_tol = tol.replace(majorization=max(tol.majorization, LP_TOL))
    if exhaustive:
        candidates = candidate_partitions(rho, tol)
    else:
        candidates = [tuple(pure_blocks(rho, tol).projectors)]
    for partition in candidates:
        out = _transport(rho, ens, partition, d, tol)
        if out is not None:
            margin, w = out
            if w is not None and margin >= -LP_TOL:
                groups = [
                    PureStateEnsemble(
                        [(w[mu, k], s) for k, (_, s) in enumerate(ens.members) if w[mu, k] > 0],
                        tol,
                    )
                    for mu in range(len(partition))
                ]
                cert = check_transformation(rho, groups, partition, cert_tol)
                if cert.feasible:
                    return cert
    return None


def incoherent_unitary_align(phi: PureState, psi: PureState) -> tuple[float, tuple[int, ...], np.ndarray]:
    """Best overlap ``|<phi|U|psi>|`` over incoherent unitaries ``U = sum_j e^{i theta_j} |pi(j)><j|``.

    Returns:
        ``(fidelity, pi, theta)`` where the fidelity is the inner product of the
        descending-sorted moduli and ``pi``/``theta`` attain it.
    """
    if phi.dim != psi.dim:
        raise DimMismatch(f"dimension mismatch: {phi.dim} vs {psi.dim}")
    d = phi.dim
    order_phi = np.argsort(-np.abs(phi.amplitudes), kind="stable")
    order_psi = np.argsort(-np.abs(psi.amplitudes), kind="stable")
    perm = np.empty(d, dtype=int)
    perm[order_psi] = order_phi
    terms = np.conj(phi.amplitudes[perm]) * psi.amplitudes
    theta = np.where(np.abs(terms) > 0, -np.angle(terms), 0.0)
    fid = float(np.sum(np.abs(phi.amplitudes[order_phi]) * np.abs(psi.amplitudes[order_psi])))
    return min(fid, 1.0), tuple(int(p) for p in perm), theta


def incoherent_unitary(perm, theta) -> np.ndarray:
    d = len(perm)
    u = np.zeros((d, d), dtype=complex)
    u[list(perm), np.arange(d)] = np.exp(1j * np.asarray(theta))
    return u


def ensemble_collapse(ens: PureStateEnsemble) -> PureState:
    """Pure state whose squared moduli are the ensemble average of the sorted members'."""
    ens.require_complete()
    d = ens.dim
    avg = np.zeros(d)
    for p, s in ens.members:
        w = np.zeros(d)
        w[: s.dim] = np.sort(s.probabilities)[::-1]
        avg += p * w
    return PureState.from_moduli_squared(avg)


def ensemble_average_fidelity(psi: PureState, ens: PureStateEnsemble) -> float:
    """``sum_k p_k |<psi|phi_k>|``."""
    ens.require_complete()
    return float(sum(p * fidelity_pure_pure(psi, s.padded(psi.dim)) for p, s in ens.members))

