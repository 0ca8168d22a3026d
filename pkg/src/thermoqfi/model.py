"""Ancilla-probe Hamiltonians and the dressing transformation.

Register layout: ancillas on sites ``0..N-1``, probe on site ``N``.

The dressing unitary ``U = exp[-(i/2) sum_k theta_k sz_k sy_p]`` maps dressed
operators to local ones by ``U A U^dagger`` (see :data:`DRESSED_TO_LOCAL`);
the inverse direction ``U^dagger H U`` diagonalizes the asymmetric
Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, UnsupportedModelError
from .qcore import IDENTITY, SIGMA, dagger, pauli, tensor

__all__ = [
    "DRESSED_TO_LOCAL",
    "ThermometerParams",
    "DressedFrame",
    "DmModelParams",
    "build_hamiltonian",
    "mixing_angles",
    "dressed_frame",
    "dressing_unitary",
    "to_local",
    "to_dressed",
    "dressed_hamiltonian",
    "model_hamiltonian",
    "dressed_eigenstates_n1",
    "build_dd_hamiltonian",
    "dd_frequencies",
    "build_dm_hamiltonian",
]

# A dressed-frame operator A is expressed in the local basis as U A U^dagger.
DRESSED_TO_LOCAL = "U A U^dagger"


@dataclass(frozen=True)
class ThermometerParams:
    """Probe frequency, ancilla frequencies and ancilla-probe couplings.

    Frequencies are in units where hbar = k_B = 1 (usually omega_p = 1).
    """

    omega_p: float
    omega_k: tuple[float, ...] = ()
    g_k: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "omega_k", tuple(float(w) for w in self.omega_k))
        object.__setattr__(self, "g_k", tuple(float(g) for g in self.g_k))
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be positive, got {self.omega_p}")
        if any(not w > 0 for w in self.omega_k):
            raise DomainError(f"ancilla frequencies must be positive: {self.omega_k}")
        if len(self.omega_k) != len(self.g_k):
            raise ValueError("omega_k and g_k must have equal length")

    @property
    def n_ancilla(self) -> int:
        return len(self.omega_k)

    @property
    def n_qubits(self) -> int:
        return self.n_ancilla + 1

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @classmethod
    def identical(cls, omega_p: float, omega: float, g: float, n: int) -> "ThermometerParams":
        return cls(omega_p, (omega,) * n, (g,) * n)

    def scaled(self, s: float) -> "ThermometerParams":
        return ThermometerParams(
            self.omega_p * s,
            tuple(w * s for w in self.omega_k),
            tuple(g * s for g in self.g_k),
        )

    def to_dict(self) -> dict:
        return {"omega_p": self.omega_p, "omega_k": list(self.omega_k), "g_k": list(self.g_k)}


@dataclass(frozen=True)
class DressedFrame:
    """Mixing angles and dressed probe frequency.

    ``omega`` is the single probe frequency used by the dressed master
    equation. For two ancillas it is the literal ``Omega_+ + Omega_-`` value;
    the exact probe gaps of the two ancilla-parity sectors are kept in
    ``sector_gaps`` for comparison.
    """

    theta_k: tuple[float, ...]
    omega: float
    eigvals: tuple[float, ...]
    sector_gaps: tuple[float, ...] = field(default=())


def build_hamiltonian(p: ThermometerParams) -> np.ndarray:
    n = p.n_qubits
    probe = p.n_ancilla
    h = 0.5 * p.omega_p * pauli("z", probe, n)
    for k, (w, g) in enumerate(zip(p.omega_k, p.g_k)):
        h += 0.5 * w * pauli("z", k, n)
        # sz_k sx_p assembled as one Kronecker product (no dense matmul)
        factors = [IDENTITY] * n
        factors[k], factors[probe] = SIGMA["z"], SIGMA["x"]
        h += g * tensor(factors)
    return h


def _require_closed_form(p: ThermometerParams):
    if p.n_ancilla not in (1, 2):
        raise UnsupportedModelError(
            f"closed-form dressing exists only for 1 or 2 ancillas, got {p.n_ancilla}"
        )


def mixing_angles(p: ThermometerParams) -> list[float]:
    _require_closed_form(p)
    if p.n_ancilla == 1:
        return [float(np.arctan(2 * p.g_k[0] / p.omega_p))]
    g1, g2 = p.g_k
    a = np.arctan(2 * (g1 + g2) / p.omega_p)
    b = np.arctan(2 * (g1 - g2) / p.omega_p)
    return [float(0.5 * (a + b)), float(0.5 * (a - b))]


def two_ancilla_literal_gap(p: ThermometerParams) -> float:
    """Omega_+ + Omega_- with Omega_pm = sqrt(omega_p^2 +- 4 (g1 + g2)^2)."""
    g1, g2 = p.g_k
    s = 4 * (g1 + g2) ** 2
    if s > p.omega_p**2:
        raise DomainError("omega_p^2 - 4(g1+g2)^2 < 0: literal two-ancilla gap is undefined")
    return float(np.sqrt(p.omega_p**2 + s) + np.sqrt(p.omega_p**2 - s))


def dressed_frame(p: ThermometerParams, probe_gap: str = "literal") -> DressedFrame:
    """Diagonalization data for 1 or 2 ancillas.

    ``probe_gap`` selects the two-ancilla probe frequency: ``"literal"``
    (Omega_+ + Omega_-) or ``"mean"`` (average of the two exact sector gaps).
    It is ignored for a single ancilla.
    """
    theta = tuple(mixing_angles(p))
    if p.n_ancilla == 1:
        om = float(np.hypot(p.omega_p, 2 * p.g_k[0]))
        w1 = p.omega_k[0]
        eig = ((w1 + om) / 2, (w1 - om) / 2, (-w1 + om) / 2, (-w1 - om) / 2)
        return DressedFrame(theta, om, eig, (om,))
    g1, g2 = p.g_k
    same = float(np.hypot(p.omega_p, 2 * (g1 + g2)))
    diff = float(np.hypot(p.omega_p, 2 * (g1 - g2)))
    if probe_gap == "literal":
        om = two_ancilla_literal_gap(p)
    elif probe_gap == "mean":
        om = 0.5 * (same + diff)
    else:
        raise ValueError(f"unknown probe_gap {probe_gap!r}")
    eig = tuple(np.sort(np.diag(dressed_hamiltonian(p)).real)[::-1])
    return DressedFrame(theta, om, eig, (same, diff))


def dressing_unitary(p: ThermometerParams) -> np.ndarray:
    theta = mixing_angles(p)
    n = p.n_qubits
    syp = pauli("y", p.n_ancilla, n)
    gen = sum(t * (pauli("z", k, n) @ syp) for k, t in enumerate(theta))
    return expm(-0.5j * gen)


def to_local(a: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u @ a @ dagger(u)


def to_dressed(a: np.ndarray, u: np.ndarray) -> np.ndarray:
    return dagger(u) @ a @ u


def dressed_hamiltonian(p: ThermometerParams) -> np.ndarray:
    """Exact ``U^dagger H U``; diagonal for one or two ancillas.

    For two ancillas the probe gap depends on the ancilla parity sector, so
    this is not of the single-frequency form of :func:`model_hamiltonian`.
    """
    ht = to_dressed(build_hamiltonian(p), dressing_unitary(p))
    return np.diag(np.diag(ht).real).astype(complex)


def model_hamiltonian(p: ThermometerParams, frame: DressedFrame) -> np.ndarray:
    """sum_k (omega_k/2) sz_k + (Omega/2) sz_p, the generator of the dressed master equation."""
    n = p.n_qubits
    h = 0.5 * frame.omega * pauli("z", p.n_ancilla, n)
    for k, w in enumerate(p.omega_k):
        h = h + 0.5 * w * pauli("z", k, n)
    return h


def dressed_eigenstates_n1(p: ThermometerParams) -> list[np.ndarray]:
    """Eigenvectors of the one-ancilla Hamiltonian for eps_1..eps_4.

    Basis order |++>, |+->, |-+>, |--> (ancilla first).
    """
    if p.n_ancilla != 1:
        raise UnsupportedModelError("dressed_eigenstates_n1 needs exactly one ancilla")
    th = mixing_angles(p)[0]
    c, s = np.cos(th / 2), np.sin(th / 2)
    return [
        np.array([c, s, 0, 0], dtype=complex),
        np.array([-s, c, 0, 0], dtype=complex),
        np.array([0, 0, c, -s], dtype=complex),
        np.array([0, 0, s, c], dtype=complex),
    ]


def build_dd_hamiltonian(omega_p: float, omega_1: float, g: float) -> np.ndarray:
    """Dipole-dipole (flip-flop) coupling; site 0 is the ancilla, site 1 the probe."""
    h = 0.5 * omega_p * pauli("z", 1, 2) + 0.5 * omega_1 * pauli("z", 0, 2)
    hop = pauli("+", 0, 2) @ pauli("-", 1, 2)
    return h + g * (hop + dagger(hop))


def dd_frequencies(omega_p: float, omega_1: float, g: float) -> tuple[float, float]:
    """(omega_+, omega_-) of the diagonalized dipole-dipole Hamiltonian."""
    mean = 0.5 * (omega_1 + omega_p)
    split = np.hypot(0.5 * (omega_1 - omega_p), g)
    return float(mean + split), float(mean - split)


def build_dm_hamiltonian(omega_p: float, omega_1: float, g: float) -> np.ndarray:
    """Dzyaloshinskii-Moriya coupling g (sx_1 sy_p - sy_1 sx_p)."""
    h = 0.5 * omega_p * pauli("z", 1, 2) + 0.5 * omega_1 * pauli("z", 0, 2)
    return h + g * (
        pauli("x", 0, 2) @ pauli("y", 1, 2) - pauli("y", 0, 2) @ pauli("x", 1, 2)
    )


@dataclass(frozen=True)
class DmModelParams:
    omega_1: float
    omega_p: float
    g: float

    def __post_init__(self):
        if not (self.omega_1 > 0 and self.omega_p > 0):
            raise DomainError("DM model frequencies must be positive")

    @property
    def omega_s(self) -> float:
        return 0.5 * (self.omega_1 + self.omega_p)

    @property
    def omega_d(self) -> float:
        return 0.5 * (self.omega_1 - self.omega_p)

    @property
    def omega(self) -> float:
        # squared omega_D; the unsquared form is dimensionally inconsistent
        return float(np.hypot(self.omega_d, 2 * self.g))

    @property
    def cos_sin(self) -> tuple[float, float]:
        """(cos theta, sin theta) from the normalized vector (2g, omega_D - Omega)."""
        wd, om, g = self.omega_d, self.omega, self.g
        if wd > 0:
            # omega_D - Omega without cancellation
            lower = -4 * g * g / (wd + om)
        else:
            lower = wd - om
        norm = np.hypot(2 * g, lower)
        if norm == 0:
            # g = 0 and omega_1 = omega_p: the g -> 0+ limit
            return float(np.sqrt(0.5)), float(-np.sqrt(0.5))
        return float(2 * g / norm), float(lower / norm)

    @property
    def theta(self) -> float:
        c, s = self.cos_sin
        return float(np.arctan2(s, c))
