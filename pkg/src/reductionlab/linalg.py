"""Dense complex Hermitian linear algebra at small dimension.

Everything is plain numpy under the hood: the dataclasses below are thin
validated wrappers around ndarrays, and every function also accepts bare
arrays.  All simulation-side quantities are dimensionless (hbar = 1,
energies in an arbitrary unit); physical units live in `phenomenology`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "LinalgError",
    "Operator",
    "StateVector",
    "DensityMatrix",
    "Spectrum",
    "hermitize",
    "hermiticity_defect",
    "tensor_product",
    "partial_trace",
    "partial_trace_matrix",
    "eig_hermitian",
    "random_hermitian",
    "random_pure_state",
    "random_density_matrix",
    "save_array",
    "load_array",
]

# Construction-time tolerances.  Trajectory storage uses scheme-dependent
# relaxed tolerances (see dynamics.Trajectory), not these.
HERMITIAN_RTOL = 1e-12
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-10
PSD_ATOL = 1e-9
PURITY_ATOL = 1e-8

MAX_DIM = 4096


class LinalgError(ValueError):
    """Raised when an operator or state violates its contract."""


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def as_matrix(op) -> np.ndarray:
    """Coerce Operator / DensityMatrix / array-like to a complex 2-D array."""
    if isinstance(op, (Operator, DensityMatrix)):
        return op.matrix
    m = np.asarray(op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {m.shape}")
    return m


def as_vector(state) -> np.ndarray:
    """Coerce StateVector / array-like to a complex 1-D array."""
    if isinstance(state, StateVector):
        return state.amplitudes
    v = np.asarray(state, dtype=complex)
    if v.ndim != 1:
        raise LinalgError(f"expected a vector, got shape {v.shape}")
    return v


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2."""
    return 0.5 * (a + a.conj().T)


def hermiticity_defect(a: np.ndarray) -> float:
    """max|A − A†| relative to max|A| (0 for the zero matrix)."""
    scale = np.abs(a).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(a - a.conj().T).max() / scale)


@dataclass(frozen=True)
class Operator:
    """Square complex matrix; set hermitian=True to enforce self-adjointness."""

    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = _freeze(as_matrix(self.matrix))
        if self.hermitian and hermiticity_defect(m) > HERMITIAN_RTOL:
            raise LinalgError(
                f"operator tagged Hermitian has defect {hermiticity_defect(m):.2e}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = _freeze(as_vector(self.amplitudes))
        nrm2 = float(np.vdot(v, v).real)
        if abs(nrm2 - 1.0) > NORM_ATOL:
            raise LinalgError(f"state norm² = {nrm2!r}, off unity by {abs(nrm2-1):.2e}")
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), purity_tag="pure")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one, positive-semidefinite operator."""

    matrix: np.ndarray
    purity_tag: str = "unknown"

    def __post_init__(self):
        if self.purity_tag not in ("pure", "mixed", "unknown"):
            raise LinalgError(f"unknown purity tag {self.purity_tag!r}")
        m = _freeze(as_matrix(self.matrix))
        defect = hermiticity_defect(m)
        if defect > HERMITIAN_RTOL:
            raise LinalgError(f"density matrix Hermiticity defect {defect:.2e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise LinalgError(f"density matrix trace {tr!r} differs from 1")
        evals = np.linalg.eigvalsh(hermitize(m))
        if evals[0] < -PSD_ATOL:
            # Deliberately a hard error: clipping would mask integrator defects.
            raise LinalgError(f"density matrix has eigenvalue {evals[0]:.3e} < -{PSD_ATOL}")
        if self.purity_tag == "pure":
            res = purity_residual(m)
            if res > PURITY_ATOL:
                raise LinalgError(f"purity residual ‖ρ²−ρ‖_F = {res:.2e} for pure tag")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def purity_residual(rho) -> float:
    """Frobenius norm of ρ² − ρ."""
    m = as_matrix(rho)
    return float(np.linalg.norm(m @ m - m))


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian operator with degeneracy bookkeeping.

    eigenvalues ascend; eigenvectors are orthonormal columns aligned with
    them; degeneracy_groups partitions the index range into runs of
    eigenvalues closer than the tolerance used at construction.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_groups: tuple = field(default=())

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        w.setflags(write=False)
        u = _freeze(self.eigenvectors)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", u)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def group_energies(self) -> np.ndarray:
        return np.array([self.eigenvalues[list(g)].mean() for g in self.degeneracy_groups])


def tensor_product(a, b, max_dim: int = MAX_DIM):
    """Kronecker product of two operators; first factor varies slowest.

    Rejects results larger than max_dim (default 4096).  Wrapper inputs give
    a wrapper output; bare arrays give a bare array.
    """
    ma, mb = as_matrix(a), as_matrix(b)
    dim = ma.shape[0] * mb.shape[0]
    if dim > max_dim:
        raise LinalgError(f"tensor product dimension {dim} exceeds maximum {max_dim}")
    out = np.kron(ma, mb)
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(out, hermitian=a.hermitian and b.hermitian)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        tag = "pure" if a.purity_tag == b.purity_tag == "pure" else "unknown"
        return DensityMatrix(out, purity_tag=tag)
    return out


def partial_trace_matrix(m: np.ndarray, dims: tuple, keep: str = "first") -> np.ndarray:
    """Partial trace of a (d1*d2)×(d1*d2) matrix over the discarded factor."""
    d1, d2 = dims
    m = as_matrix(m)
    if m.shape[0] != d1 * d2:
        raise LinalgError(f"dimension {m.shape[0]} does not factor as {d1}×{d2}")
    r = m.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ikjk->ij", r)
    if keep == "second":
        return np.einsum("kikj->ij", r)
    raise LinalgError(f"keep must be 'first' or 'second', got {keep!r}")


def partial_trace(rho, dims: tuple, keep: str = "first") -> DensityMatrix:
    """Reduced density matrix over one tensor factor."""
    out = partial_trace_matrix(as_matrix(rho), dims, keep)
    return DensityMatrix(hermitize(out))


def eig_hermitian(h, degeneracy_tol: float | None = None) -> Spectrum:
    """Eigendecomposition with degeneracy groups.

    degeneracy_tol defaults to 1e-9 × spectral range; consecutive eigenvalues
    within it are chained into one group.
    """
    m = as_matrix(h)
    if hermiticity_defect(m) > HERMITIAN_RTOL:
        raise LinalgError("eig_hermitian requires a Hermitian matrix")
    w, u = np.linalg.eigh(m)
    spread = float(w[-1] - w[0])
    if degeneracy_tol is None:
        degeneracy_tol = 1e-9 * spread if spread > 0 else 1e-15
    groups = []
    cur = [0]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= degeneracy_tol:
            cur.append(i)
        else:
            groups.append(tuple(cur))
            cur = [i]
    groups.append(tuple(cur))
    return Spectrum(w, u, tuple(groups))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return hermitize(a) * scale


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from a Wishart-style construction."""
    rank = dim if rank is None else rank
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


# Plain-text serialization: first line is the dimension, then one "re im"
# pair per entry — dim lines for a vector, dim² lines (row-major) for a
# square matrix.

def save_array(path, arr) -> None:
    a = np.asarray(arr, dtype=complex)
    if isinstance(arr, (Operator, DensityMatrix)):
        a = arr.matrix
    elif isinstance(arr, StateVector):
        a = arr.amplitudes
    if a.ndim not in (1, 2):
        raise LinalgError("can only serialize vectors and square matrices")
    dim = a.shape[0]
    flat = a.reshape(-1)
    lines = [str(dim)]
    lines += [f"{x.real:.17g} {x.imag:.17g}" for x in flat]
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def load_array(path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    dim = int(lines[0])
    vals = np.array(
        [complex(float(p[0]), float(p[1])) for p in (ln.split() for ln in lines[1:])]
    )
    if vals.size == dim:
        return vals
    if vals.size == dim * dim:
        return vals.reshape(dim, dim)
    raise LinalgError(f"file holds {vals.size} entries; expected {dim} or {dim*dim}")
