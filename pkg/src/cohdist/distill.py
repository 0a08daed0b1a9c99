"""Maximal fidelity to a pure target reachable under strictly incoherent operations.

For pure inputs the optimum is built by a staircase: with both states sorted
by descending modulus and tail sums ``C_s``, repeatedly pick the tail position
minimizing the ratio of initial to target tail mass over the not yet covered
range. Each segment of the target is rescaled by its ratio; the resulting
state is reachable with certainty and its overlap with the target is
``sum_j sqrt(A_j B_j)``. For mixed inputs the answer is the minimum over the
maximal pure subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cohdist.errors import InvalidThreshold
from cohdist.states import DEFAULT_TOL, DensityMatrix, PureState, ToleranceConfig
from cohdist.subspaces import SubspaceDecomposition, pure_blocks

# Ratios within this relative distance of the minimum count as ties; the
# smallest tail position among ties wins, which merges collinear segments.
TIE_RTOL = 1e-13


@dataclass(frozen=True, eq=False)
class StaircaseResult:
    """Output of :func:`distill_pure`.

    ``breakpoints`` are 1-based tail positions ``s_0 = d+1 > s_1 > ... > s_k = 1``;
    segment ``j`` covers sorted positions ``s_j .. s_{j-1}-1``. ``intermediate``
    is expressed in the target's basis order with the target's phases, so
    ``|<intermediate|psi>| = f_max``; ``canonical_intermediate`` is the real,
    descending-sorted form.
    """

    breakpoints: tuple[int, ...]
    ratios: tuple[float, ...]
    segment_masses: tuple[tuple[float, float], ...]
    f_max: float
    intermediate: PureState
    canonical_intermediate: PureState
    target_order: tuple[int, ...]  # target_order[r] = basis index of r-th largest |psi_i|

    @property
    def k(self) -> int:
        return len(self.ratios)


@dataclass(frozen=True, eq=False)
class MixedDistillReport:
    decomposition: SubspaceDecomposition
    per_block: tuple[tuple[float, StaircaseResult], ...]
    f_max: float
    limiting_block: int


def _sorted_weights(state: PureState, d: int) -> np.ndarray:
    w = np.zeros(d)
    w[: state.dim] = np.sort(state.probabilities)[::-1]
    return w


def distill_pure(phi: PureState, psi: PureState, tol: ToleranceConfig = DEFAULT_TOL) -> StaircaseResult:
    d = max(phi.dim, psi.dim)
    psi = psi.padded(d)
    a = _sorted_weights(phi, d)
    order = np.argsort(-np.abs(psi.amplitudes), kind="stable")
    b = np.abs(psi.amplitudes[order]) ** 2

    # Segment sums are taken directly, never as differences of tails.
    breakpoints = [d + 1]
    ratios, masses = [], []
    prev = d + 1
    while prev > 1:
        # s = 1 always qualifies since the largest target weight is positive;
        # positions where the remaining target tail is empty are skipped
        cand = []
        for s in range(1, prev):
            den = float(b[s - 1 : prev - 1].sum())
            if den > 0.0:
                num = float(a[s - 1 : prev - 1].sum())
                cand.append((s, num / den, num, den))
        q_min = min(c[1] for c in cand)
        s, q, num, den = next(c for c in cand if c[1] <= q_min + TIE_RTOL * max(1.0, q_min))
        breakpoints.append(s)
        ratios.append(q)
        masses.append((num, den))
        prev = s

    canon = np.zeros(d)
    for j, q in enumerate(ratios):
        lo, hi = breakpoints[j + 1] - 1, breakpoints[j] - 1
        canon[lo:hi] = np.sqrt(q * b[lo:hi])
    f_max = float(sum(np.sqrt(A * B) for A, B in masses))

    phases = np.ones(d, dtype=complex)
    amps = psi.amplitudes[order]
    nz = np.abs(amps) > 0
    phases[nz] = amps[nz] / np.abs(amps[nz])
    aligned = np.zeros(d, dtype=complex)
    aligned[order] = canon * phases

    return StaircaseResult(
        breakpoints=tuple(breakpoints),
        ratios=tuple(float(q) for q in ratios),
        segment_masses=tuple(masses),
        f_max=min(f_max, 1.0),
        intermediate=PureState(aligned, tol),
        canonical_intermediate=PureState(canon, tol),
        target_order=tuple(int(i) for i in order),
    )


def distill_mixed(
    rho: DensityMatrix, psi: PureState, tol: ToleranceConfig = DEFAULT_TOL, strict: bool = False
) -> MixedDistillReport:
    """Run the staircase on every maximal pure subspace and keep the worst one."""
    dec = pure_blocks(rho, tol, strict=strict)
    per_block = tuple((blk.probability, distill_pure(blk.state, psi, tol)) for blk in dec.blocks)
    values = [res.f_max for _, res in per_block]
    limiting = int(np.argmin(values))
    return MixedDistillReport(dec, per_block, float(values[limiting]), limiting)


def _check_threshold(f0: float) -> float:
    f0 = float(f0)
    if not 0.0 <= f0 <= 1.0:
        raise InvalidThreshold(f"fidelity threshold {f0} outside [0, 1]")
    return f0


def can_reach(rho: DensityMatrix, psi: PureState, f0: float, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    f0 = _check_threshold(f0)
    return distill_mixed(rho, psi, tol).f_max >= f0 - tol.fidelity


def p_max(
    rho: DensityMatrix, psi: PureState, f0: float, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[float, list[int]]:
    """Largest success probability of reaching fidelity ``f0``.

    Returns:
        The summed weight of the qualifying subspaces, and their indices into
        ``distill_mixed(rho, psi).decomposition.blocks``.
    """
    f0 = _check_threshold(f0)
    report = distill_mixed(rho, psi, tol)
    ok = [mu for mu, (_, res) in enumerate(report.per_block) if res.f_max >= f0 - tol.fidelity]
    return float(sum(report.per_block[mu][0] for mu in ok)), ok
