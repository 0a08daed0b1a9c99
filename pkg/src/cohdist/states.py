"""States, ensembles and Kraus channels in a fixed incoherent basis.

Indices are 0-based throughout the Python API; the basis vector ``|i>`` is
``np.eye(d)[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from cohdist.errors import (
    DimMismatch,
    IncompleteEnsemble,
    IncompleteKrausSet,
    InvalidKrausSet,
    StateValidationError,
    Violation,
    ZeroProbability,
)


@dataclass(frozen=True)
class ToleranceConfig:
    hermitian: float = 1e-9
    psd: float = 1e-9
    trace: float = 1e-9
    norm: float = 1e-9
    complete: float = 1e-9
    unit_entry: float = 1e-9
    majorization: float = 1e-12
    fidelity: float = 1e-9

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) >= 0:
                raise ValueError(f"tolerance {f.name} must be nonnegative")

    def replace(self, **changes) -> "ToleranceConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({k: float(v) for k, v in changes.items() if v is not None})
        return ToleranceConfig(**values)


DEFAULT_TOL = ToleranceConfig()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """A unit vector of complex amplitudes.

    Construction validates the norm against ``tol.norm`` and then rescales to
    exact unit norm, so downstream tail sums add up to 1 to machine precision.
    """

    amplitudes: np.ndarray

    def __init__(self, amplitudes, tol: ToleranceConfig = DEFAULT_TOL):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise StateValidationError([Violation("NotNormalized", 1.0, tol.norm)])
        norm = float(np.linalg.norm(amps))
        if abs(norm**2 - 1.0) > tol.norm:
            raise StateValidationError([Violation("NotNormalized", abs(norm**2 - 1.0), tol.norm)])
        object.__setattr__(self, "amplitudes", _frozen(amps / norm))

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @classmethod
    def normalize(cls, vector) -> "PureState":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def from_moduli_squared(cls, weights) -> "PureState":
        """Real nonnegative amplitudes with the given squared moduli."""
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        return cls(np.sqrt(w / w.sum()))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        """Squared moduli, i.e. the diagonal of the dephased projector."""
        return np.abs(self.amplitudes) ** 2

    def padded(self, dim: int) -> "PureState":
        if dim < self.dim:
            raise DimMismatch(f"cannot pad a {self.dim}-dim state down to {dim}")
        if dim == self.dim:
            return self
        v = np.zeros(dim, dtype=complex)
        v[: self.dim] = self.amplitudes
        return PureState(v)

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix._trusted(np.outer(v, v.conj()))

    def coherence_rank(self, atol: float = 0.0) -> int:
        return int(np.count_nonzero(np.abs(self.amplitudes) > atol))

    def __repr__(self) -> str:
        return f"PureState({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix. Build with :func:`validate_density`."""

    entries: np.ndarray

    @classmethod
    def _trusted(cls, m: np.ndarray) -> "DensityMatrix":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "entries", _frozen(m))
        return obj

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class PureStateEnsemble:
    """Weighted pure states ``{(p_k, phi_k)}``, possibly sub-normalized."""

    members: tuple[tuple[float, PureState], ...]
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __init__(self, members: Iterable[tuple[float, PureState]], tol: ToleranceConfig = DEFAULT_TOL):
        items = tuple((float(p), s) for p, s in members)
        for p, _ in items:
            if not p > 0:
                raise IncompleteEnsemble(f"ensemble weight {p} is not positive")
        total = sum(p for p, _ in items)
        if total > 1.0 + tol.norm:
            raise IncompleteEnsemble(f"ensemble weights sum to {total} > 1")
        object.__setattr__(self, "members", items)
        object.__setattr__(self, "tol", tol)

    @property
    def total(self) -> float:
        return float(sum(p for p, _ in self.members))

    @property
    def complete(self) -> bool:
        return abs(self.total - 1.0) <= self.tol.norm

    @property
    def dim(self) -> int:
        return max((s.dim for _, s in self.members), default=0)

    def require_complete(self) -> None:
        if not self.complete:
            raise IncompleteEnsemble(f"ensemble weights sum to {self.total}, expected 1")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


STRICTLY_INCOHERENT = "strictly-incoherent"
INCOHERENT = "incoherent"
GENERAL = "general"
_RANK = {STRICTLY_INCOHERENT: 0, INCOHERENT: 1, GENERAL: 2}


def classify_kraus(k, tol: ToleranceConfig = DEFAULT_TOL) -> str:
    """Classify a single Kraus operator by its sparsity pattern.

    Entries with ``|K_ij| < tol.unit_entry * max|K|`` count as zero. At most
    one nonzero per column makes the operator incoherent; at most one per row
    as well makes it strictly incoherent.
    """
    k = np.asarray(k, dtype=complex)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise DimMismatch(f"Kraus operator must be square, got shape {k.shape}")
    mags = np.abs(k)
    scale = mags.max(initial=0.0)
    nz = mags >= tol.unit_entry * scale if scale > 0 else np.zeros_like(mags, dtype=bool)
    per_col = nz.sum(axis=0).max(initial=0)
    per_row = nz.sum(axis=1).max(initial=0)
    if per_col <= 1 and per_row <= 1:
        return STRICTLY_INCOHERENT
    if per_col <= 1:
        return INCOHERENT
    return GENERAL


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: tuple[np.ndarray, ...]
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False)

    def __init__(self, operators: Sequence, tol: ToleranceConfig = DEFAULT_TOL):
        ops = tuple(_frozen(np.asarray(k, dtype=complex)) for k in operators)
        if not ops:
            raise InvalidKrausSet("empty Kraus set")
        d = ops[0].shape
        if len(d) != 2 or d[0] != d[1] or any(k.shape != d for k in ops):
            raise DimMismatch("Kraus operators must be square with a common dimension")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "tol", tol)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def gram(self) -> np.ndarray:
        """``sum_k K_k^dagger K_k``."""
        return sum(k.conj().T @ k for k in self.operators)

    @property
    def completeness_error(self) -> float:
        return float(np.abs(self.gram - np.eye(self.dim)).max())

    @property
    def complete(self) -> bool:
        return self.completeness_error <= self.tol.complete

    @property
    def stochastic(self) -> bool:
        g = self.gram
        return float(np.linalg.eigvalsh((g + g.conj().T) / 2).max()) <= 1.0 + self.tol.complete

    @property
    def classifications(self) -> list[str]:
        return [classify_kraus(k, self.tol) for k in self.operators]

    @property
    def classification(self) -> str:
        """Weakest class over all operators."""
        return max(self.classifications, key=_RANK.__getitem__)


def validate_density(m, tol: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    """Check that ``m`` is a density matrix and wrap it.

    Raises:
        DimMismatch: ``m`` is not square.
        StateValidationError: with one :class:`Violation` per failed bound
            (``NotHermitian``, ``NotPSD``, ``TraceNotOne``).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimMismatch(f"density matrix must be square, got shape {m.shape}")
    violations = []
    herm_err = float(np.abs(m - m.conj().T).max())
    if herm_err > tol.hermitian:
        violations.append(Violation("NotHermitian", herm_err, tol.hermitian))
    h = (m + m.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(h).min())
    if min_eig < -tol.psd:
        violations.append(Violation("NotPSD", -min_eig, tol.psd))
    trace_err = abs(complex(np.trace(m)) - 1.0)
    if trace_err > tol.trace:
        violations.append(Violation("TraceNotOne", trace_err, tol.trace))
    if violations:
        raise StateValidationError(violations)
    return DensityMatrix._trusted(h)


def dephase(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix._trusted(np.diag(np.diag(rho.entries)))


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimMismatch(f"dimension mismatch: {a} vs {b}")


def fidelity_pure_pure(a: PureState, b: PureState) -> float:
    """``|<a|b>|``."""
    _check_dims(a.dim, b.dim)
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


def fidelity_pure_mixed(a: PureState, rho: DensityMatrix) -> float:
    """``<a|rho|a>``.

    This is the squared-overlap convention. For a pure ``a`` it equals
    ``fidelity_general(a.density(), rho) ** 2``, not the root-fidelity.
    """
    _check_dims(a.dim, rho.dim)
    v = a.amplitudes
    return float(np.clip(np.real(np.vdot(v, rho.entries @ v)), 0.0, 1.0))


def _clamp(w: np.ndarray) -> np.ndarray:
    # round-off eigenvalues of rank-deficient inputs would otherwise add
    # ~sqrt(eps) per dimension after the square root
    cutoff = 16 * np.finfo(float).eps * w.shape[0] * max(float(np.abs(w).max(initial=0.0)), 1.0)
    return np.where(w > cutoff, w, 0.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(_clamp(w))) @ v.conj().T


def fidelity_general(r1: DensityMatrix, r2: DensityMatrix) -> float:
    """Root fidelity ``Tr sqrt(sqrt(r1) r2 sqrt(r1))``."""
    _check_dims(r1.dim, r2.dim)
    s = _psd_sqrt(r1.entries)
    inner = s @ r2.entries @ s
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(min(1.0, np.sqrt(_clamp(w)).sum()))


def _kraus_sum(rho: DensityMatrix, ks: KrausSet) -> np.ndarray:
    _check_dims(rho.dim, ks.dim)
    out = sum(k @ rho.entries @ k.conj().T for k in ks.operators)
    return (out + out.conj().T) / 2


def apply_channel(rho: DensityMatrix, ks: KrausSet) -> DensityMatrix:
    if not ks.complete:
        raise IncompleteKrausSet(
            f"sum K^dagger K deviates from identity by {ks.completeness_error:.3e}"
        )
    return validate_density(_kraus_sum(rho, ks), ks.tol)


def apply_stochastic(rho: DensityMatrix, ks: KrausSet) -> tuple[DensityMatrix, float]:
    """Apply a sub-normalized Kraus subset and renormalize.

    Returns:
        The normalized output state and its success probability.
    """
    if not ks.stochastic:
        raise InvalidKrausSet("sum K^dagger K exceeds the identity")
    out = _kraus_sum(rho, ks)
    prob = float(np.real(np.trace(out)))
    if prob < ks.tol.trace:
        raise ZeroProbability(f"success probability {prob:.3e} is below {ks.tol.trace:.1e}")
    return validate_density(out / prob, ks.tol), prob
