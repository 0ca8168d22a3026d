"""Global Lindblad master equation in the dressed frame.

Each ancilla k contributes three dissipator pairs: a local one at omega_k and
two nonlocal ones at omega_k -+ Omega. A pair is a forward dissipator
D[c] plus its Boltzmann-weighted reverse exp(-freq/T) D[c^dagger].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NonUniqueSteadyStateError, NumericalFailure, ShapeError, StiffnessError
from .model import DressedFrame, ThermometerParams, mixing_angles
from .qcore import POLICY, check_density_matrix, dagger, hermitize, pauli

__all__ = [
    "SpectralResponse",
    "JumpChannel",
    "Liouvillian",
    "build_channels",
    "lindblad_rhs",
    "evolve",
    "liouvillian",
    "steady_state",
    "default_dt",
]


@dataclass(frozen=True)
class SpectralResponse:
    """Bath spectral response G(omega).

    ``flat`` is constant; ``ohmic`` is base_rate * (w/wc) * exp(1 - w/wc),
    normalized to base_rate at the cutoff.
    """

    kind: str = "flat"
    base_rate: float = 1e-3
    ohmic_cutoff: float = 1.0

    def __post_init__(self):
        if self.kind not in ("flat", "ohmic"):
            raise ValueError(f"unknown spectral response {self.kind!r}")
        if not self.base_rate > 0:
            raise DomainError("base_rate must be positive")
        if not self.ohmic_cutoff > 0:
            raise DomainError("ohmic_cutoff must be positive")

    def __call__(self, omega: float) -> float:
        if self.kind == "flat":
            return self.base_rate
        x = abs(omega) / self.ohmic_cutoff
        return float(self.base_rate * x * np.exp(1.0 - x))


@dataclass(frozen=True, eq=False)
class JumpChannel:
    op: np.ndarray
    freq: float
    prefactor: float
    boltzmann: float
    label: str = ""

    @property
    def forward_rate(self) -> float:
        return self.prefactor

    @property
    def reverse_rate(self) -> float:
        return self.prefactor * self.boltzmann


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Matrix acting on row-major vectorized density matrices."""

    matrix: np.ndarray
    d: int

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.matrix @ rho.reshape(-1)).reshape(self.d, self.d)


def _boltzmann(freq: float, temperature: float, sign: float = 1.0) -> float:
    return float(np.exp(-sign * freq / temperature))


def build_channels(
    p: ThermometerParams,
    frame: DressedFrame,
    temperature: float,
    response: SpectralResponse | None = None,
    *,
    boltzmann_sign: float = 1.0,
) -> list[JumpChannel]:
    """Jump channels of the dressed master equation.

    A pair whose frequency is negative is rewritten with the conjugate jump
    operator as the forward process at |freq|; the rate ratio is unchanged.
    ``boltzmann_sign`` exists only for fault-injection in validation runs.
    """
    if not temperature > 0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    if p.n_ancilla not in (1, 2):
        mixing_angles(p)  # raises UnsupportedModelError
    response = response or SpectralResponse()
    n = p.n_qubits
    probe = p.n_ancilla
    sp_p, sm_p = pauli("+", probe, n), pauli("-", probe, n)
    channels = []
    for k, (wk, th) in enumerate(zip(p.omega_k, frame.theta_k)):
        sp_k, sm_k = pauli("+", k, n), pauli("-", k, n)
        c2, s2 = np.cos(th) ** 2, np.sin(th) ** 2
        terms = [
            (f"local[{k}]", sm_k, wk, c2),
            (f"minus[{k}]", sm_k @ sp_p, wk - frame.omega, s2),
            (f"plus[{k}]", sm_k @ sm_p, wk + frame.omega, s2),
        ]
        for label, op, freq, weight in terms:
            if freq < 0:
                op, freq = dagger(op), -freq
            channels.append(
                JumpChannel(
                    op=op,
                    freq=float(freq),
                    prefactor=float(weight * response(freq)),
                    boltzmann=_boltzmann(freq, temperature, boltzmann_sign),
                    label=label,
                )
            )
    return channels


def _dissipator(c: np.ndarray, rho: np.ndarray) -> np.ndarray:
    cd = dagger(c)
    cdc = cd @ c
    return c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc)


def lindblad_rhs(rho: np.ndarray, h: np.ndarray, channels: Sequence[JumpChannel]) -> np.ndarray:
    if rho.shape != h.shape:
        raise ShapeError(f"rho {rho.shape} and H {h.shape} differ")
    out = -1j * (h @ rho - rho @ h)
    for ch in channels:
        if ch.op.shape != h.shape:
            raise ShapeError(f"jump operator {ch.label} has shape {ch.op.shape}")
        if ch.forward_rate:
            out = out + ch.forward_rate * _dissipator(ch.op, rho)
        if ch.reverse_rate:
            out = out + ch.reverse_rate * _dissipator(dagger(ch.op), rho)
    return out


def _superop_dissipator(c: np.ndarray) -> np.ndarray:
    d = c.shape[0]
    eye = np.eye(d)
    cdc = dagger(c) @ c
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    return np.kron(c, c.conj()) - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))


def liouvillian(h: np.ndarray, channels: Sequence[JumpChannel]) -> Liouvillian:
    d = h.shape[0]
    eye = np.eye(d)
    mat = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for ch in channels:
        if ch.forward_rate:
            mat = mat + ch.forward_rate * _superop_dissipator(ch.op)
        if ch.reverse_rate:
            mat = mat + ch.reverse_rate * _superop_dissipator(dagger(ch.op))
    return Liouvillian(mat, d)


def steady_state(lv: Liouvillian, degeneracy_tol: float = 1e-12) -> np.ndarray:
    """Null vector of the Liouvillian as a normalized density matrix."""
    vals, vecs = np.linalg.eig(lv.matrix)
    order = np.argsort(np.abs(vals))
    if np.abs(vals[order[1]]) < degeneracy_tol:
        raise NonUniqueSteadyStateError(
            f"two Liouvillian eigenvalues below {degeneracy_tol}: "
            f"{vals[order[0]]:.3e}, {vals[order[1]]:.3e}"
        )
    rho = vecs[:, order[0]].reshape(lv.d, lv.d)
    tr = np.trace(rho)
    if not np.isfinite(tr) or abs(tr) < 1e-12 * np.abs(rho).max():
        raise NumericalFailure("Liouvillian null vector has no trace; not a physical state")
    rho = hermitize(rho / tr)
    rho = rho / np.trace(rho).real
    resid = np.max(np.abs(lv.apply(rho)))
    if resid > 1e-9:
        raise NonUniqueSteadyStateError(f"steady-state residual {resid:.3e} exceeds 1e-9")
    return rho


def default_dt(channels: Sequence[JumpChannel]) -> float:
    fastest = max((max(ch.forward_rate, ch.reverse_rate) for ch in channels), default=0.0)
    if fastest <= 0:
        raise DomainError("no dissipative channel; choose dt explicitly")
    return 0.01 / fastest


def evolve(
    rho0: np.ndarray,
    h: np.ndarray,
    channels: Sequence[JumpChannel],
    t_final: float,
    dt: float | None = None,
    check_every: int = 10,
) -> np.ndarray:
    """Fixed-step RK4 integration of :func:`lindblad_rhs` from ``rho0``."""
    if t_final < 0:
        raise DomainError("t_final must be non-negative")
    dt = default_dt(channels) if dt is None else dt
    if not dt > 0:
        raise DomainError("dt must be positive")
    rho = np.array(rho0, dtype=complex)
    steps = int(np.ceil(t_final / dt)) if t_final > 0 else 0
    if steps:
        dt = t_final / steps

    def f(r):
        return lindblad_rhs(r, h, channels)

    for i in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * dt * k1)
        k3 = f(rho + 0.5 * dt * k2)
        k4 = f(rho + dt * k3)
        rho = hermitize(rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
        if (check_every and (i + 1) % check_every == 0) or i == steps - 1:
            lo = np.linalg.eigvalsh(rho)[0]
            if lo < -1e-6:
                raise StiffnessError(f"eigenvalue {lo:.2e} at step {i}; reduce dt below {dt:.3e}")
            if abs(np.trace(rho).real - 1) > 1e-8:
                raise StiffnessError(f"trace drifted to {np.trace(rho).real!r} at step {i}")
    return check_density_matrix(rho, POLICY.with_overrides(positivity=-1e-6, trace=1e-8))
