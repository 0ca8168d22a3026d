"""Quantum Fisher information for temperature, error bounds, peaks and scaling fits."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DerivativeError, DomainError, NumericalFailure
from .qcore import hermitize
from .steady import ProbeState2x2, ProbeStateDerivative, _sech2

log = logging.getLogger(__name__)

__all__ = [
    "QfiCurve",
    "ScalingFit",
    "qfi_qubit",
    "qfi_sld",
    "classical_fisher",
    "d_rho_dT",
    "qfi_thermal_tls",
    "gamma_constant",
    "gamma_literal",
    "qfi_approx_n1",
    "qfi_approx_global",
    "qfi_at",
    "qfi_curve",
    "temperature_grid",
    "find_peaks",
    "scaling_fit",
]

NEAR_PURE_DET = 1e-12
SLD_CUTOFF = 1e-14
NEGATIVE_TOL = 1e-12


@dataclass(frozen=True)
class QfiCurve:
    temps: np.ndarray
    qfi: np.ndarray
    coherence: np.ndarray
    rel_error: np.ndarray
    peaks: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.temps)
        if not (len(self.qfi) == len(self.coherence) == len(self.rel_error) == n):
            raise ValueError("curve columns differ in length")
        if n > 1 and np.any(np.diff(self.temps) <= 0):
            raise ValueError("temperatures must be strictly ascending")

    def with_peaks(self, peaks) -> "QfiCurve":
        return QfiCurve(self.temps, self.qfi, self.coherence, self.rel_error, list(peaks))


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float

    def to_dict(self) -> dict:
        return {"exponent": self.exponent, "prefactor": self.prefactor, "r_squared": self.r_squared}


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, (ProbeState2x2, ProbeStateDerivative)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def _check_nonneg(f: float) -> float:
    if not np.isfinite(f):
        raise NumericalFailure(f"non-finite Fisher information {f}")
    if f < -NEGATIVE_TOL:
        raise NumericalFailure(f"negative Fisher information {f}")
    return max(float(f), 0.0)


def qfi_sld(rho, drho, cutoff: float = SLD_CUTOFF) -> float:
    """Spectral SLD formula: sum over eigenpairs of 2|<j|drho|k>|^2 / (l_j + l_k)."""
    rho, drho = _as_matrix(rho), _as_matrix(drho)
    if rho.shape != drho.shape:
        raise ValueError("rho and drho differ in shape")
    lam, vec = np.linalg.eigh(hermitize(rho))
    d = vec.conj().T @ hermitize(drho) @ vec
    s = lam[:, None] + lam[None, :]
    mask = s > cutoff
    return _check_nonneg(np.sum(2 * np.abs(d[mask]) ** 2 / s[mask]))


def qfi_qubit(rho, drho) -> float:
    """Fisher information of a qubit family.

    With Bloch data carrying the purity deficit and its derivative the value is
    |dr|^2 + (r.dr)^2 / (1 - |r|^2) with r.dr = -d(1 - |r|^2)/2, which stays
    accurate as the state approaches purity. Otherwise the determinant
    formula Tr(drho^2) + Tr((rho drho)^2)/det(rho) is used, switching to the
    spectral form once det(rho) < 1e-12.
    """
    if (
        isinstance(rho, ProbeState2x2)
        and isinstance(drho, ProbeStateDerivative)
        and drho.dgap is not None
    ):
        dr2 = drho.dc**2 + drho.dchi**2
        rdr = -0.5 * drho.dgap
        # ordered so that rdr^2 cannot underflow while rdr^2/gap is representable
        radial = rdr * (rdr / rho.gap) if rho.gap > 0 else 0.0
        return _check_nonneg(dr2 + radial)
    m, dm = _as_matrix(rho), _as_matrix(drho)
    if m.shape != (2, 2) or dm.shape != (2, 2):
        raise ValueError("qfi_qubit needs 2x2 inputs")
    if abs(np.trace(dm)) > 1e-8 * max(1.0, np.abs(dm).max()):
        raise ValueError("derivative of a density matrix must be traceless")
    det = float(np.linalg.det(m).real)
    if det < NEAR_PURE_DET:
        return qfi_sld(m, dm)
    rd = m @ dm
    return _check_nonneg(float(np.trace(dm @ dm).real + np.trace(rd @ rd).real / det))


def classical_fisher(p, dp) -> float:
    p, dp = np.asarray(p, float), np.asarray(dp, float)
    keep = p > 0
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def d_rho_dT(state_fn: Callable, temperature: float, richardson: bool = True) -> np.ndarray:
    """Central-difference temperature derivative, optionally with one Richardson step."""
    T = float(temperature)
    if not T > 0:
        raise DomainError("temperature must be positive")
    h = max(1e-7, 1e-4 * T)
    if h >= T:
        h = 0.5 * T

    def central(step):
        return (_as_matrix(state_fn(T + step)) - _as_matrix(state_fn(T - step))) / (2 * step)

    d = central(h)
    if richardson:
        d = (4 * central(0.5 * h) - d) / 3
    if not np.all(np.isfinite(d)):
        raise DerivativeError(f"non-finite derivative at T={T}")
    return hermitize(d)


def qfi_thermal_tls(omega0: float, temperature: float) -> float:
    """omega0^2 sech^2(omega0/2T) / (4 T^4)."""
    T = temperature
    return float(omega0**2 * _sech2(omega0 / (2 * T)) / (4 * T**4))


def gamma_constant() -> float:
    """Location of the thermal-qubit maximum for omega0 = 1."""
    res = minimize_scalar(
        lambda T: -qfi_thermal_tls(1.0, T), bounds=(0.05, 2.0), method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x)


def gamma_literal() -> float:
    """Root of 2 gamma = tanh(1/gamma), kept for comparison with gamma_constant."""
    return float(brentq(lambda g: 2 * g - np.tanh(1 / g), 0.1, 1.0, xtol=1e-14))


def qfi_approx_n1(p, temperature: float) -> float:
    """Weak-coupling sum of a probe term and a theta^2/2-weighted ancilla term."""
    if p.n_ancilla != 1:
        raise DomainError("qfi_approx_n1 needs exactly one ancilla")
    theta = np.arctan(2 * p.g_k[0] / p.omega_p)
    w1 = p.omega_k[0]
    return qfi_thermal_tls(p.omega_p, temperature) + 0.5 * theta**2 * qfi_thermal_tls(w1, temperature)


def qfi_approx_global(omega_p: float, omega_1: float, g: float, temperature: float, parts: bool = False):
    """Low- and high-temperature weak-coupling terms for a globally thermalized pair.

    The low term is written as 8 g^2 w1^2 sinh^6 / (T^4 sinh^4); it is evaluated
    as the algebraically equal sinh^2 so it does not overflow.
    """
    T = temperature
    x1, xp = omega_1 / (2 * T), omega_p / (2 * T)
    with np.errstate(over="ignore"):
        f_low = 8 * g**2 * omega_1**2 * np.sinh(x1) ** 2 / T**4
        # cosh overflows to inf at low T where sech^2 is already 0
        f_high = omega_p**2 * _sech2(xp) / (4 * T**4 * (1 + 2 * g**2 * (1 + np.cosh(xp))))
    f_low, f_high = float(f_low), float(f_high)
    if parts:
        return f_low, f_high
    return f_low + f_high


def _state_and_derivative(family, T):
    if getattr(family, "has_derivative", False):
        return family.state(T), family.derivative(T)
    state = family.state(T) if hasattr(family, "state") else family(T)
    return state, d_rho_dT(family, T)


def _coherence(state) -> float:
    if isinstance(state, ProbeState2x2):
        return state.coherence
    return 2.0 * abs(_as_matrix(state)[0, 1])


def qfi_at(family, temperature: float) -> tuple[float, float, float]:
    """(F, |c|, dT/T) where dT/T = 1/(T sqrt(F)); |c| is twice the off-diagonal modulus."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    state, deriv = _state_and_derivative(family, temperature)
    f = qfi_qubit(state, deriv)
    rel = 1.0 / (temperature * np.sqrt(f)) if f > 0 else np.inf
    return f, _coherence(state), float(rel)


def temperature_grid(t_min: float = 1e-3, t_max: float = 10.0, n_points: int = 400, grid: str = "log") -> np.ndarray:
    if not (0 < t_min < t_max):
        raise DomainError("need 0 < t_min < t_max")
    if n_points < 3:
        raise DomainError("need at least 3 grid points")
    if grid == "log":
        return np.geomspace(t_min, t_max, n_points)
    if grid == "linear":
        return np.linspace(t_min, t_max, n_points)
    raise DomainError(f"unknown grid {grid!r}")


def qfi_curve(family, temps: Sequence[float] | None = None, *, refine: bool = True, admission: float = 0.01, **grid_kw) -> QfiCurve:
    temps = np.asarray(temps if temps is not None else temperature_grid(**grid_kw), dtype=float)
    rows = np.array([qfi_at(family, T) for T in temps]).reshape(len(temps), 3)
    curve = QfiCurve(temps, rows[:, 0], rows[:, 1], rows[:, 2])
    evaluate = (lambda T: qfi_at(family, T)[0]) if refine else None
    return curve.with_peaks(find_peaks(curve, evaluate, admission=admission))


def find_peaks(curve: QfiCurve, evaluate: Callable[[float], float] | None = None, *, admission: float = 0.01, rtol: float = 1e-6) -> list[tuple[float, float]]:
    """Interior maxima that rise at least ``admission`` (relative) above the minima on both sides.

    With ``evaluate`` each admitted maximum is refined by golden-section search in log T.
    """
    t, f = np.asarray(curve.temps, float), np.asarray(curve.qfi, float)
    n = len(f)
    if n < 3:
        raise DomainError("need at least 3 samples to find peaks")
    maxima = [i for i in range(1, n - 1) if f[i] > f[i - 1] and f[i] >= f[i + 1]]
    peaks = []
    for j, i in enumerate(maxima):
        lo = maxima[j - 1] if j > 0 else 0
        hi = maxima[j + 1] if j + 1 < len(maxima) else n - 1
        left, right = f[lo:i + 1].min(), f[i:hi + 1].min()
        if f[i] <= 0 or (f[i] - left) / f[i] < admission or (f[i] - right) / f[i] < admission:
            continue
        t_star, f_star = t[i], f[i]
        if evaluate is not None:
            t_star, f_star = _refine(evaluate, t[i - 1], t[i], t[i + 1], f_star, rtol)
        peaks.append((float(t_star), float(f_star)))
    return sorted(peaks)


def _refine(evaluate, ta, tb, tc, fb, rtol):
    try:
        res = minimize_scalar(
            lambda u: -evaluate(np.exp(u)),
            bracket=(np.log(ta), np.log(tb), np.log(tc)),
            method="golden",
            tol=rtol,
        )
    except ValueError:
        # flat top: the grid bracket is not strict
        return tb, fb
    if -res.fun < fb:
        return tb, fb
    return float(np.exp(res.x)), float(-res.fun)


def scaling_fit(ns: Sequence[float], values: Sequence[float]) -> ScalingFit:
    """Least-squares fit of log(values) = log(prefactor) + exponent * log(ns)."""
    x, y = np.asarray(ns, float), np.asarray(values, float)
    if len(x) != len(y):
        raise ValueError("ns and values differ in length")
    if len(x) < 4:
        raise DomainError("a scaling fit needs at least 4 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("scaling fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(np.exp(icpt)), float(min(max(r2, 0.0), 1.0)))
