"""Dense operator algebra for small qubit registers.

Operators are plain complex ``numpy`` arrays. Density matrices are the same
arrays, checked against :data:`POLICY` by :func:`check_density_matrix`.

Conventions: sigma_z = diag(1, -1), so index 0 is the excited state, and in a
register of ``n`` qubits the ancillas occupy sites ``0..n-2`` and the probe is
the last site.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from .errors import DomainError, ShapeError

__all__ = [
    "NumericPolicy",
    "POLICY",
    "IDENTITY",
    "SIGMA",
    "pauli",
    "tensor",
    "partial_trace",
    "gibbs_state",
    "trace_distance",
    "dagger",
    "commutator",
    "is_hermitian",
    "hermitize",
    "check_density_matrix",
]


@dataclass(frozen=True)
class NumericPolicy:
    hermiticity: float = 1e-10
    positivity: float = -1e-10
    trace: float = 1e-10
    equality: float = 1e-8

    def with_overrides(self, **kw) -> "NumericPolicy":
        return replace(self, **kw)


POLICY = NumericPolicy()

IDENTITY = np.eye(2, dtype=complex)
SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
}
# unicode minus accepted for convenience
SIGMA["−"] = SIGMA["-"]


def pauli(axis: str, site: int, n_qubits: int) -> np.ndarray:
    """Single-qubit operator ``axis`` on ``site`` of an ``n_qubits`` register.

    ``axis`` is one of ``x, y, z, +, -``; sigma^+ = (sigma^x + i sigma^y)/2
    raises the excited-first basis state |1> to |0>.
    """
    if n_qubits < 1:
        raise DomainError(f"n_qubits must be >= 1, got {n_qubits}")
    if not 0 <= site < n_qubits:
        raise IndexError(f"site {site} out of range for {n_qubits} qubits")
    try:
        s = SIGMA[axis]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None
    factors = [IDENTITY] * n_qubits
    factors[site] = s
    return tensor(factors)


def tensor(factors) -> np.ndarray:
    """Kronecker product of ``factors`` in list order."""
    factors = list(factors)
    if not factors:
        raise ValueError("tensor() needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_hermitian(a: np.ndarray, tol: float | None = None) -> bool:
    tol = POLICY.hermiticity if tol is None else tol
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Reduce ``rho`` on subsystems with dimensions ``dims`` to the ``keep`` set.

    Kept subsystems stay in their original order.
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ShapeError(f"dims {dims} imply {total}x{total}, got {rho.shape}")
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise IndexError(f"keep {keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace the highest index first so lower axis numbers stay valid
    for count, i in enumerate(sorted(traced, reverse=True)):
        m = n - count
        t = np.trace(t, axis1=i, axis2=i + m)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def gibbs_state(h: np.ndarray, temperature: float) -> np.ndarray:
    """Thermal state exp(-H/T)/Z via the eigendecomposition of ``h``.

    The ground energy is subtracted before exponentiating, so arbitrarily low
    temperatures cannot overflow.
    """
    if not is_hermitian(h):
        raise ValueError("gibbs_state requires a Hermitian Hamiltonian")
    if not temperature > 0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    h = hermitize(h)
    if not np.any(h.imag):
        h = h.real
    energies, vecs = np.linalg.eigh(h)
    weights = np.exp(-(energies - energies[0]) / temperature)
    weights /= weights.sum()
    return ((vecs * weights) @ dagger(vecs)).astype(complex)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ShapeError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    return 0.5 * float(np.sum(np.linalg.svd(rho - sigma, compute_uv=False)))


def check_density_matrix(rho: np.ndarray, policy: NumericPolicy | None = None) -> np.ndarray:
    """Return ``rho`` unchanged if it is a valid density matrix, else raise."""
    policy = policy or POLICY
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"density matrix must be square, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if not is_hermitian(rho, policy.hermiticity):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > policy.trace:
        raise ValueError(f"density matrix trace is {tr!r}")
    lo = np.linalg.eigvalsh(hermitize(rho))[0]
    if lo < policy.positivity:
        raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
    return rho
