"""Pure coherent-state subspaces of a density matrix.

A subset of basis indices is a pure subspace when the incoherent projector
onto it compresses ``rho`` to a rank-one block. Such subsets are exactly the
principal blocks of the comparison matrix ``A_ij = |rho_ij| / sqrt(rho_ii rho_jj)``
whose entries are all one. For a PSD matrix the unit-entry relation is
transitive (Cauchy-Schwarz equality), so maximal subspaces are the connected
components of the graph with an edge wherever ``A_ij`` reaches one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from cohdist.errors import BlockNotPure, BlockNotPureWarning, ZeroBlock
from cohdist.states import DEFAULT_TOL, DensityMatrix, PureState, ToleranceConfig

# Empirical bound on the unit-entry relation: A_ij, A_jk >= 1 - t implies
# A_ik >= 1 - TRANSITIVITY_CONSTANT * t (from cos(2θ) >= 1 - 4t).
TRANSITIVITY_CONSTANT = 4.0


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    entries: np.ndarray
    support: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class PureBlock:
    indices: tuple[int, ...]
    state: PureState  # full-dimension, zero off ``indices``
    probability: float

    @property
    def local_state(self) -> PureState:
        return PureState(self.state.amplitudes[list(self.indices)])


@dataclass(frozen=True, eq=False)
class SubspaceDecomposition:
    blocks: tuple[PureBlock, ...]
    null_indices: tuple[int, ...]
    dim: int
    split: bool = False  # a component failed verification and was split

    @property
    def probabilities(self) -> list[float]:
        return [b.probability for b in self.blocks]

    @property
    def coverage(self) -> tuple[int, ...]:
        return tuple(sorted({i for b in self.blocks for i in b.indices} | set(self.null_indices)))

    @property
    def projectors(self) -> list[tuple[int, ...]]:
        """Index sets of the complete projector family.

        Zero-population indices are attached to the largest block (first on
        ties), which leaves every compressed block unchanged.
        """
        sets = [list(b.indices) for b in self.blocks]
        if self.null_indices:
            if sets:
                largest = max(range(len(sets)), key=lambda k: (len(sets[k]), -k))
                sets[largest] = sorted(sets[largest] + list(self.null_indices))
            else:
                sets = [list(self.null_indices)]
        return [tuple(s) for s in sets]


def comparison_matrix(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> ComparisonMatrix:
    diag = rho.diagonal
    support = np.flatnonzero(diag > tol.psd)
    inv_sqrt = np.zeros_like(diag)
    inv_sqrt[support] = 1.0 / np.sqrt(diag[support])
    a = inv_sqrt[:, None] * np.abs(rho.entries) * inv_sqrt[None, :]
    a = (a + a.T) / 2
    a[support, support] = 1.0
    return ComparisonMatrix(a, tuple(int(i) for i in support))


def _block(rho: DensityMatrix, indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=int)
    return rho.entries[np.ix_(idx, idx)]


def verify_block_purity(rho: DensityMatrix, indices, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff the principal submatrix on ``indices`` has rank one.

    Uses eigenvalues only, independent of :func:`comparison_matrix`.

    Raises:
        ZeroBlock: the block carries (numerically) no population.
    """
    idx = sorted(set(int(i) for i in indices))
    if not idx or idx[0] < 0 or idx[-1] >= rho.dim:
        raise IndexError(f"indices {indices} out of range for dimension {rho.dim}")
    sub = _block(rho, idx)
    tr = float(np.real(np.trace(sub)))
    if tr < tol.psd:
        raise ZeroBlock(f"block {idx} has trace {tr:.3e}")
    w = np.linalg.eigvalsh(sub)
    return int(np.count_nonzero(w > tol.psd * tr)) == 1


def _block_state(rho: DensityMatrix, indices: tuple[int, ...]) -> tuple[PureState, float]:
    sub = _block(rho, indices)
    prob = float(np.real(np.trace(sub)))
    w, v = np.linalg.eigh(sub)
    vec = v[:, -1]
    # fix the global phase: first nonzero amplitude real positive
    lead = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
    vec = vec * (abs(lead) / lead)
    full = np.zeros(rho.dim, dtype=complex)
    full[list(indices)] = vec
    return PureState(full), prob


def _components(a: np.ndarray, nodes: list[int], threshold: float) -> list[list[int]]:
    if not nodes:
        return []
    sub = a[np.ix_(nodes, nodes)] >= threshold
    n, labels = connected_components(csr_matrix(sub), directed=False)
    groups: dict[int, list[int]] = {}
    for node, lab in zip(nodes, labels):
        groups.setdefault(lab, []).append(node)
    return sorted(groups.values(), key=lambda g: g[0])


def _split_until_pure(rho, a, comp, threshold, tol) -> list[list[int]]:
    """Drop the weakest edge of ``comp`` until every part verifies as rank one."""
    edges = sorted(
        (a[i, j], i, j) for n, i in enumerate(comp) for j in comp[n + 1 :] if a[i, j] >= threshold
    )
    local = a.copy()
    parts = [comp]
    while any(len(p) > 1 and not verify_block_purity(rho, p, tol) for p in parts):
        _, i, j = edges.pop(0)
        local[i, j] = local[j, i] = 0.0
        parts = _components(local, comp, threshold)
    return parts


def pure_blocks(
    rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL, strict: bool = False
) -> SubspaceDecomposition:
    """Maximal pure coherent-state subspaces of ``rho``.

    Every component of the unit-entry graph is re-checked by eigenvalues. A
    component that fails is split greedily (weakest edge first) with a
    :class:`BlockNotPureWarning`, or raises :class:`BlockNotPure` when
    ``strict`` is set.
    """
    cm = comparison_matrix(rho, tol)
    support = list(cm.support)
    null = tuple(i for i in range(rho.dim) if i not in cm.support)
    threshold = 1.0 - tol.unit_entry
    groups = []
    split = False
    for comp in _components(cm.entries, support, threshold):
        if len(comp) == 1 or verify_block_purity(rho, comp, tol):
            groups.append(comp)
            continue
        if strict:
            raise BlockNotPure(f"component {comp} is not rank one")
        warnings.warn(
            f"component {comp} of the unit-entry graph is not rank one; splitting",
            BlockNotPureWarning,
            stacklevel=2,
        )
        split = True
        groups.extend(_split_until_pure(rho, cm.entries, comp, threshold, tol))
    groups.sort(key=lambda g: g[0])
    blocks = []
    for g in groups:
        state, prob = _block_state(rho, tuple(g))
        blocks.append(PureBlock(tuple(g), state, prob))
    return SubspaceDecomposition(tuple(blocks), null, rho.dim, split)


def decompose(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL, strict: bool = False) -> DensityMatrix:
    """Block-diagonal state ``sum_mu P_mu rho P_mu`` over the maximal pure subspaces."""
    dec = pure_blocks(rho, tol, strict=strict)
    out = np.zeros_like(rho.entries)
    for proj in dec.projectors:
        idx = np.ix_(proj, proj)
        out[idx] = rho.entries[idx]
    return DensityMatrix._trusted(out)
