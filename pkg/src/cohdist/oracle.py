"""Brute-force references for the closed-form results, plus random state generators.

Nothing here calls into the staircase code. ``oracle_fmax`` searches the
reachable set directly: probability vectors ``e`` whose tail sums stay below
those of the initial state, scored by ``sum_i sqrt(e_i) |psi_i|`` with the
target sorted descending. The sort constraint on ``e`` is dropped; sorting a
feasible ``e`` keeps it feasible and can only raise the score, so the maximum
is unchanged and every point visited is a true lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from cohdist.errors import DimensionTooLarge
from cohdist.states import DensityMatrix, PureState, PureStateEnsemble, validate_density


@dataclass(frozen=True)
class OracleConfig:
    grid_step: float = 1e-3
    restarts: int = 64
    ascent_iterations: int = 10000
    seed: int = 0
    tolerance: float = 1e-4
    zoom_levels: int = 3

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


def _problem(phi: PureState, psi: PureState):
    d = max(phi.dim, psi.dim)
    a = np.zeros(d)
    a[: phi.dim] = np.sort(phi.probabilities)[::-1]
    b = np.zeros(d)
    b[: psi.dim] = np.sort(np.abs(psi.amplitudes))[::-1]
    cap = np.cumsum(a[::-1])[::-1]  # cap[s] bounds sum_{i >= s} e_i (0-based)
    return d, b, cap


def _score(e: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(e, 0.0, None)) @ b


def _grid_search(b, cap, step, levels, slack=1e-12) -> float:
    d = b.shape[0]
    if d == 1:
        return float(b[0])
    # coordinates are the tail entries e_1..e_{d-1}; e_0 takes the rest
    lo = np.zeros(d - 1)
    hi = np.array([cap[i] for i in range(1, d)])
    best_val, best_pt = -np.inf, None
    h = step
    for level in range(levels + 1):
        axes = [np.arange(lo[i], hi[i] + h / 2, h) for i in range(d - 1)]
        axes = [np.append(ax[ax <= hi[i] + slack], hi[i]) for i, ax in enumerate(axes)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
        tail = np.cumsum(mesh[:, ::-1], axis=1)[:, ::-1]  # tail[:, j] = sum_{i > j} e_i
        ok = np.all(tail <= cap[1:] + slack, axis=1) & (tail[:, 0] <= 1.0 + slack)
        mesh = mesh[ok]
        if mesh.size:
            e = np.column_stack([1.0 - mesh.sum(axis=1), mesh])
            vals = _score(e, b)
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_pt = float(vals[k]), mesh[k]
        if level == levels:
            break
        lo = np.maximum(best_pt - 2 * h, 0.0)
        hi = np.minimum(best_pt + 2 * h, cap[1:])
        h /= 10.0
    return best_val


def _feasible_starts(d, cap, rng, count):
    """Random convex mixtures of known reachable points."""
    a = np.append(-np.diff(cap), cap[-1])
    vertices = [a]
    for s in range(1, d):
        v = a.copy()
        v[0] += v[s:].sum()
        v[s:] = 0.0
        vertices.append(v)
    vertices = np.array(vertices)
    for _ in range(count):
        yield rng.dirichlet(np.full(len(vertices), 0.5)) @ vertices


def _pairwise_ascent(e, b, cap, iterations, tol) -> float:
    """Exchange mass between coordinate pairs with an exact 1-D maximization each time.

    For a separable concave objective over this nested-capacity polytope,
    no improving pairwise exchange means global optimality.
    """
    d = e.shape[0]
    e = e.copy()
    tails = np.cumsum(e[::-1])[::-1]
    val = float(_score(e, b))
    for _ in range(iterations):
        old = val
        for i in range(d):
            for j in range(i + 1, d):
                # delta > 0 moves mass from i down to j, raising tails i+1..j
                hi = min(e[i], float(np.min(cap[i + 1 : j + 1] - tails[i + 1 : j + 1])))
                lo = -e[j]
                bi2, bj2 = b[i] ** 2, b[j] ** 2
                if bi2 + bj2 == 0.0:
                    continue
                m = e[i] + e[j]
                delta = min(max(m * bj2 / (bi2 + bj2) - e[j], lo), max(hi, lo))
                if delta == 0.0:
                    continue
                e[i] -= delta
                e[j] += delta
                tails[i + 1 : j + 1] += delta
        e = np.clip(e, 0.0, None)
        val = float(_score(e, b))
        if val - old <= tol * 1e-3:
            break
    return val


def oracle_fmax(phi: PureState, psi: PureState, cfg: OracleConfig = OracleConfig()) -> float:
    """Brute-force maximal fidelity of ``psi`` over states reachable from ``phi``.

    Exhaustive grid (with zoomed refinement) for d <= 3, pairwise-exchange
    ascent from random feasible starts for 4 <= d <= 6.
    """
    d, b, cap = _problem(phi, psi)
    if d > 6:
        raise DimensionTooLarge(f"oracle supports d <= 6, got {d}")
    if d <= 3:
        return min(1.0, _grid_search(b, cap, cfg.grid_step, cfg.zoom_levels))
    return oracle_fmax_ascent(phi, psi, cfg)


def oracle_fmax_ascent(phi: PureState, psi: PureState, cfg: OracleConfig = OracleConfig()) -> float:
    d, b, cap = _problem(phi, psi)
    if d > 6:
        raise DimensionTooLarge(f"oracle supports d <= 6, got {d}")
    rng = np.random.default_rng(cfg.seed)
    best = -np.inf
    for e0 in _feasible_starts(d, cap, rng, cfg.restarts):
        best = max(best, _pairwise_ascent(e0, b, cap, cfg.ascent_iterations, cfg.tolerance))
    return min(1.0, best)


def oracle_unitary_fidelity(phi: PureState, psi: PureState) -> float:
    """``max_pi sum_j |phi_pi(j) psi_j|`` by enumerating every permutation."""
    d = phi.dim
    if d > 8 or psi.dim != d:
        raise DimensionTooLarge(f"exhaustive alignment needs equal dims <= 8, got {d}, {psi.dim}")
    x, y = np.abs(phi.amplitudes), np.abs(psi.amplitudes)
    perms = np.array(list(permutations(range(d))))
    return float(min(1.0, (x[perms] * y).sum(axis=1).max()))


def _rng(seed):
    return np.random.default_rng(seed)


def random_pure(dim: int, seed=None) -> PureState:
    rng = _rng(seed)
    return PureState.normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_mixed(dim: int, seed=None, rank: int | None = None) -> DensityMatrix:
    rng = _rng(seed)
    r = dim if rank is None else rank
    a = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
    m = a @ a.conj().T
    return validate_density(m / np.trace(m).real)


def random_block_pure(dim: int, seed=None, n_blocks: int | None = None):
    """Direct sum of random pure states on random disjoint index blocks.

    Returns:
        ``(rho, blocks, weights, states)`` with the planted structure.
    """
    rng = _rng(seed)
    if n_blocks is None:
        n_blocks = int(rng.integers(1, dim + 1))
    perm = rng.permutation(dim)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_blocks - 1, replace=False)) if n_blocks > 1 else []
    blocks = [tuple(sorted(int(i) for i in part)) for part in np.split(perm, cuts)]
    blocks.sort()
    weights = rng.dirichlet(np.ones(n_blocks)) * 0.9 + 0.1 / n_blocks
    m = np.zeros((dim, dim), dtype=complex)
    states = []
    for blk, w in zip(blocks, weights):
        v = np.zeros(dim, dtype=complex)
        v[list(blk)] = random_pure(len(blk), rng).amplitudes
        states.append(PureState(v))
        m += w * np.outer(v, v.conj())
    return validate_density(m), blocks, [float(w) for w in weights], states


def random_state(kind: str, dim: int, seed=None):
    """Seeded generator: ``pure`` -> PureState, ``mixed``/``block-pure`` -> DensityMatrix."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if kind == "pure":
        return random_pure(dim, seed)
    if kind == "mixed":
        return random_mixed(dim, seed)
    if kind == "block-pure":
        return random_block_pure(dim, seed)[0]
    raise ValueError(f"unknown state kind {kind!r}")


def random_ensemble(dim: int, size: int, seed=None) -> PureStateEnsemble:
    rng = _rng(seed)
    p = rng.dirichlet(np.ones(size))
    return PureStateEnsemble([(float(w), random_pure(dim, rng)) for w in p])


def random_majorized_pair(dim: int, seed=None) -> tuple[PureState, PureState]:
    """``(phi, psi)`` with ``|phi|^2 ≺ |psi|^2`` by averaging ``|psi|^2`` over random permutations."""
    rng = _rng(seed)
    psi = random_pure(dim, rng)
    w = psi.probabilities
    n = int(rng.integers(1, 4))
    mix = rng.dirichlet(np.ones(n + 1))
    avg = mix[0] * w + sum(c * w[rng.permutation(dim)] for c in mix[1:])
    phases = np.exp(2j * np.pi * rng.random(dim))
    return PureState.normalize(np.sqrt(avg) * phases), psi
