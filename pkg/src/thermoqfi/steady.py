"""Closed-form steady states and the probe-state families built on them.

A probe state is stored through its Bloch data: rho = (1/2)[[1-chi, c], [c, 1+chi]],
so the Bloch vector is (c, 0, -chi). ``gap`` = 1 - chi^2 - c^2 is carried
separately when it can be evaluated without cancellation; the low-temperature
Fisher information depends on it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logsumexp

from .errors import DomainError, UnsupportedModelError
from .model import (
    DmModelParams,
    DressedFrame,
    ThermometerParams,
    build_dd_hamiltonian,
    build_hamiltonian,
    dd_frequencies,
    dressed_frame,
    dressing_unitary,
    to_local,
)
from .qcore import gibbs_state, partial_trace, tensor

__all__ = [
    "ProbeState2x2",
    "ProbeStateDerivative",
    "qubit_gibbs",
    "dressed_product_state",
    "local_probe_oracle",
    "probe_state_n1",
    "probe_state_n2",
    "global_gibbs_probe",
    "global_gibbs_probe_dense",
    "global_probe_n1_literal",
    "dd_probe_state",
    "dd_pipeline_probe_state",
    "dm_probe_state",
    "ThermalQubitFamily",
    "LocalProbeFamily",
    "GlobalGibbsFamily",
    "DmFamily",
    "ConstantFamily",
]


@dataclass(frozen=True)
class ProbeState2x2:
    chi: float
    c: float
    gap: float | None = None

    def __post_init__(self):
        if self.gap is None:
            object.__setattr__(self, "gap", 1.0 - self.chi**2 - self.c**2)
        if self.gap < -1e-12:
            raise ValueError(f"unphysical probe state: Bloch norm^2 = {1 - self.gap}")

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "ProbeState2x2":
        rho = np.asarray(rho)
        return cls(chi=float((rho[1, 1] - rho[0, 0]).real), c=float(2 * rho[0, 1].real))

    @property
    def matrix(self) -> np.ndarray:
        return 0.5 * np.array([[1 - self.chi, self.c], [self.c, 1 + self.chi]], dtype=complex)

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        return m if dtype is None else m.astype(dtype)

    @property
    def bloch(self) -> np.ndarray:
        return np.array([self.c, 0.0, -self.chi])

    @property
    def coherence(self) -> float:
        """|c|, twice the magnitude of the off-diagonal element."""
        return abs(self.c)

    @property
    def det(self) -> float:
        return 0.25 * self.gap


@dataclass(frozen=True)
class ProbeStateDerivative:
    """Temperature derivative of a :class:`ProbeState2x2`.

    ``dgap`` (derivative of 1 - |r|^2) is optional.
    """

    dchi: float
    dc: float
    dgap: float | None = None

    @property
    def matrix(self) -> np.ndarray:
        return 0.5 * np.array([[-self.dchi, self.dc], [self.dc, self.dchi]], dtype=complex)


# -- small scalar helpers; all stable for x = omega/2T -> infinity --------------

def _x(omega, temperature):
    return omega / (2.0 * temperature)


def _sech2(x):
    # 1/cosh^2 = 4 e^{-2|x|} / (1 + e^{-2|x|})^2
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def _tanh_and_derivs(omega, temperature):
    """tanh(x), sech^2(x), d tanh/dT and d sech^2/dT with x = omega/2T."""
    x = _x(omega, temperature)
    t = np.tanh(x)
    s2 = _sech2(x)
    dxdT = -x / temperature
    return t, s2, s2 * dxdT, -2.0 * s2 * t * dxdT


def qubit_gibbs(omega: float, temperature: float) -> np.ndarray:
    """Gibbs state of (omega/2) sigma_z, excited state first."""
    t = np.tanh(_x(omega, temperature))
    return np.diag([(1 - t) / 2, (1 + t) / 2]).astype(complex)


def _check_T(temperature):
    if not temperature > 0:
        raise DomainError(f"temperature must be positive, got {temperature}")


# -- local (probe outside the sample) scheme --------------------------------

def dressed_product_state(p: ThermometerParams, frame: DressedFrame, temperature: float) -> np.ndarray:
    """Product of qubit Gibbs states at omega_k (ancillas) and Omega (probe)."""
    _check_T(temperature)
    if p.n_ancilla not in (1, 2):
        raise UnsupportedModelError("dressed product state needs 1 or 2 ancillas")
    factors = [qubit_gibbs(w, temperature) for w in p.omega_k]
    factors.append(qubit_gibbs(frame.omega, temperature))
    return tensor(factors)


def local_probe_oracle(p: ThermometerParams, temperature: float, frame: DressedFrame | None = None) -> np.ndarray:
    """Transform the dressed product state to the local basis and trace out the ancillas."""
    frame = frame or dressed_frame(p)
    rho = to_local(dressed_product_state(p, frame, temperature), dressing_unitary(p))
    return partial_trace(rho, [2] * p.n_qubits, {p.n_ancilla})


def _two_angle_state(th1, th2, w1, w2, omega, temperature, with_derivative=False):
    """Local probe state for angles (th1, th2); th2 = 0 gives the one-ancilla case.

    chi = t_O (c1 c2 - s1 s2 t1 t2),  c = t_O (s1 c2 t1 + c1 s2 t2).
    """
    c1, s1, c2, s2 = np.cos(th1), np.sin(th1), np.cos(th2), np.sin(th2)
    tO, sO, dtO, dsO = _tanh_and_derivs(omega, temperature)
    t1, q1, dt1, dq1 = _tanh_and_derivs(w1, temperature)
    t2, q2, dt2, dq2 = _tanh_and_derivs(w2, temperature)

    X = c1 * c2 - s1 * s2 * t1 * t2
    C = s1 * c2 * t1 + c1 * s2 * t2
    # 1 - X^2 - C^2 written as a sum of non-negative terms
    inner = c1**2 * s2**2 * q2 + s1**2 * c2**2 * q1 + s1**2 * s2**2 * (q1 + t1**2 * q2)
    gap = sO + tO**2 * inner
    state = ProbeState2x2(chi=float(tO * X), c=float(tO * C), gap=float(gap))
    if not with_derivative:
        return state
    dX = -s1 * s2 * (dt1 * t2 + t1 * dt2)
    dC = s1 * c2 * dt1 + c1 * s2 * dt2
    dinner = (
        c1**2 * s2**2 * dq2
        + s1**2 * c2**2 * dq1
        + s1**2 * s2**2 * (dq1 + 2 * t1 * dt1 * q2 + t1**2 * dq2)
    )
    dgap = dsO + 2 * tO * dtO * inner + tO**2 * dinner
    deriv = ProbeStateDerivative(
        dchi=float(dtO * X + tO * dX),
        dc=float(dtO * C + tO * dC),
        dgap=float(dgap),
    )
    return state, deriv


def probe_state_n1(p: ThermometerParams, temperature: float) -> ProbeState2x2:
    """chi = cos(theta) tanh(Omega/2T), c = sin(theta) tanh(Omega/2T) tanh(omega_1/2T)."""
    _check_T(temperature)
    if p.n_ancilla != 1:
        raise UnsupportedModelError("probe_state_n1 needs exactly one ancilla")
    fr = dressed_frame(p)
    w1 = p.omega_k[0]
    return _two_angle_state(fr.theta_k[0], 0.0, w1, w1, fr.omega, temperature)


def probe_state_n2(p: ThermometerParams, temperature: float, probe_gap: str = "literal") -> ProbeState2x2:
    """Two-ancilla local probe state, chi = alpha * beta and c = 2 c'."""
    _check_T(temperature)
    if p.n_ancilla != 2:
        raise UnsupportedModelError("probe_state_n2 needs exactly two ancillas")
    fr = dressed_frame(p, probe_gap)
    th1, th2 = fr.theta_k
    w1, w2 = p.omega_k
    return _two_angle_state(th1, th2, w1, w2, fr.omega, temperature)


def exponential_form_n2(p: ThermometerParams, temperature: float, probe_gap: str = "literal") -> tuple[float, float]:
    """(chi, c') written with raw exponentials; overflows at low T, kept as a cross-check."""
    fr = dressed_frame(p, probe_gap)
    th1, th2 = fr.theta_k
    w1, w2 = p.omega_k
    T, om = temperature, fr.omega
    alpha = np.tanh(om / (2 * T))
    beta = np.cos(th1) * np.cos(th2) - np.sin(th1) * np.sin(th2) * np.tanh(w1 / (2 * T)) * np.tanh(w2 / (2 * T))
    e = np.exp
    num = (e(om / T) - 1) * (
        np.sin(th1 - th2) * (e(w1 / T) - e(w2 / T)) + np.sin(th1 + th2) * (e((w1 + w2) / T) - 1)
    )
    den = 2 * (e(w1 / T) + 1) * (e(w2 / T) + 1) * (e(om / T) + 1)
    return float(alpha * beta), float(num / den)


# -- global thermalization: Gibbs state of the full Hamiltonian ---------------

def _sector_table(p: ThermometerParams):
    """Ancilla sz-sectors: (log multiplicity, ancilla energy, probe x-field).

    Every sz_k commutes with H, so H splits into 2x2 probe blocks
    (omega_p/2) sz + G sx with G = sum_k g_k s_k. Identical ancillas collapse
    to N+1 magnetization sectors with binomial multiplicity.
    """
    n = p.n_ancilla
    if n == 0:
        return np.zeros(1), np.zeros(1), np.zeros(1)
    w = np.array(p.omega_k)
    g = np.array(p.g_k)
    if np.all(w == w[0]) and np.all(g == g[0]):
        m = np.arange(n + 1)
        mag = 2 * m - n
        logmult = gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
        return logmult, 0.5 * w[0] * mag, g[0] * mag
    if n > 20:
        raise UnsupportedModelError("non-identical ancillas are limited to 20")
    s = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    return np.zeros(len(s)), 0.5 * s @ w, s @ g


def _global_gibbs(p: ThermometerParams, temperature: float, with_derivative=False):
    logmult, e_anc, field = _sector_table(p)
    T = temperature
    om = np.hypot(p.omega_p, 2 * field)
    nx, nz = 2 * field / om, p.omega_p / om
    x = om / (2 * T)
    t = np.tanh(x)
    # log of multiplicity * exp(-E_anc/T) * 2 cosh(x)
    logw = logmult - e_anc / T + np.logaddexp(x, -x)
    prob = np.exp(logw - logsumexp(logw))

    r_x = -np.sum(prob * t * nx)
    r_z = -np.sum(prob * t * nz)
    one_minus_t = 2.0 * expit(-2.0 * x)
    nn = np.outer(nx, nx) + np.outer(nz, nz)
    dn = 0.5 * ((nx[:, None] - nx[None, :]) ** 2 + (nz[:, None] - nz[None, :]) ** 2)
    tt = np.outer(t, t)
    # 1 - t t' n.n' = (1 - t) + t (1 - t') + t t' |n - n'|^2 / 2
    D = one_minus_t[:, None] + t[:, None] * one_minus_t[None, :] + tt * dn
    D = 0.5 * (D + D.T)
    gap = float(prob @ D @ prob)
    state = ProbeState2x2(chi=float(-r_z), c=float(r_x), gap=max(gap, 0.0))
    if not with_derivative:
        return state

    dlogw = e_anc / T**2 - (om / (2 * T**2)) * t
    # dp_m = p_m sum_m' p_m' (dlogw_m - dlogw_m'), no cancellation in the mean
    dprob = prob * ((dlogw[:, None] - dlogw[None, :]) @ prob)
    dt = _sech2(x) * (-x / T)
    dr_x = -np.sum((dprob * t + prob * dt) * nx)
    dr_z = -np.sum((dprob * t + prob * dt) * nz)
    dD = -(np.outer(dt, t) + np.outer(t, dt)) * nn
    dgap = float(2 * dprob @ D @ prob + prob @ dD @ prob)
    return state, ProbeStateDerivative(dchi=float(-dr_z), dc=float(dr_x), dgap=dgap)


def global_gibbs_probe(p: ThermometerParams, temperature: float) -> ProbeState2x2:
    """Probe marginal of exp(-H/T)/Z for any number of ancillas."""
    _check_T(temperature)
    return _global_gibbs(p, temperature)


def global_gibbs_probe_dense(p: ThermometerParams, temperature: float) -> np.ndarray:
    """Dense reference: full 2^(N+1) Gibbs state, then trace out the ancillas."""
    rho = gibbs_state(build_hamiltonian(p), temperature)
    return partial_trace(rho, [2] * p.n_qubits, {p.n_ancilla})


def global_probe_n1_literal(p: ThermometerParams, temperature: float, prefactor: str = "literal") -> tuple[float, float]:
    """(chi', c') for one ancilla with the Omega' prefactor as printed, or ``"normalized"`` omega_p/Omega'.

    c' is the off-diagonal element itself.
    """
    if p.n_ancilla != 1:
        raise UnsupportedModelError("needs exactly one ancilla")
    g, w1 = p.g_k[0], p.omega_k[0]
    om = float(np.hypot(p.omega_p, 2 * g))
    tO = np.tanh(om / (2 * temperature))
    pref = om if prefactor == "literal" else p.omega_p / om
    return float(pref * tO), float(g / om * tO * np.tanh(w1 / (2 * temperature)))


# -- symmetric and anti-symmetric couplings ---------------------------------

def dd_probe_state(omega_p: float, omega_1: float, g: float, temperature: float) -> ProbeState2x2:
    """Dipole-dipole coupling: the probe is left maximally mixed."""
    _check_T(temperature)
    return ProbeState2x2(0.0, 0.0, 1.0)


def dd_pipeline_probe_state(omega_p: float, omega_1: float, g: float, temperature: float) -> np.ndarray:
    """Dressed product state at (omega_+, omega_-) taken back to the local basis.

    The local eigenbasis comes from diagonalizing the flip-flop Hamiltonian;
    each dressed level |s_p s_1> with energy (s_p omega_+ + s_1 omega_-)/2 is
    mapped onto the local eigenvector of equal energy. The result is the probe
    marginal of exp(-H_dd/T)/Z.
    """
    _check_T(temperature)
    wp_, wm_ = dd_frequencies(omega_p, omega_1, g)
    h = build_dd_hamiltonian(omega_p, omega_1, g)
    energies, vecs = np.linalg.eigh(h)
    dressed = tensor([qubit_gibbs(wm_, temperature), qubit_gibbs(wp_, temperature)])
    # dressed levels in register order (ancilla, probe)
    levels = [0.5 * (sp * wp_ + s1 * wm_) for s1 in (1, -1) for sp in (1, -1)]
    # eigh sorts ascending; degenerate levels carry equal weight so any pairing inside them is fine
    order = np.empty(4, dtype=int)
    order[np.argsort(levels, kind="stable")] = np.arange(4)
    v = vecs[:, order]
    rho = v @ dressed @ v.conj().T
    return partial_trace(rho, [2, 2], {1})


def _lse_and_slope(terms, temperature):
    """log(sum a_i exp(b_i/T)) and its T-derivative, for non-negative a_i."""
    a = np.array([x[0] for x in terms], dtype=float)
    b = np.array([x[1] for x in terms], dtype=float)
    keep = a > 0
    logs = np.log(a[keep]) + b[keep] / temperature
    val = logsumexp(logs)
    w = np.exp(logs - val)
    return val, -float(w @ b[keep]) / temperature**2


def _dm(dm: DmModelParams, temperature: float):
    _check_T(temperature)
    T = temperature
    om, ws = dm.omega, dm.omega_s
    cth, sth = dm.cos_sin
    c2, s2 = cth**2, sth**2
    log_top, d_top = _lse_and_slope([(1.0, om), (c2, ws + 2 * om), (s2, ws)], T)
    log_bot, d_bot = _lse_and_slope([(1.0, 2 * ws + om), (c2, ws), (s2, ws + 2 * om)], T)
    # top + bot equals the normalization K, so p_top = top/(top + bot)
    z = log_bot - log_top
    p_top, p_bot = expit(-z), expit(z)
    pq = np.exp(-np.logaddexp(0.0, z) - np.logaddexp(0.0, -z))
    chi = p_bot - p_top
    state = ProbeState2x2(chi=float(chi), c=0.0, gap=float(4 * pq))
    slope = d_top - d_bot
    deriv = ProbeStateDerivative(dchi=float(-2 * pq * slope), dc=0.0, dgap=float(4 * pq * slope * chi))
    return state, deriv


def dm_probe_state(dm: DmModelParams, temperature: float) -> ProbeState2x2:
    """Diagonal probe state of the DM model; the coherence is identically zero."""
    return _dm(dm, temperature)[0]


def dm_populations(dm: DmModelParams, temperature: float) -> tuple[float, float]:
    st = dm_probe_state(dm, temperature)
    return 0.5 * (1 - st.chi), 0.5 * (1 + st.chi)


# -- temperature families ---------------------------------------------------

class ThermalQubitFamily:
    """A qubit of frequency omega0 in equilibrium with the sample."""

    has_derivative = True

    def __init__(self, omega0: float):
        self.omega0 = float(omega0)

    def state(self, temperature):
        t, s2, _, _ = _tanh_and_derivs(self.omega0, temperature)
        return ProbeState2x2(chi=float(t), c=0.0, gap=float(s2))

    def derivative(self, temperature):
        _, _, dt, ds2 = _tanh_and_derivs(self.omega0, temperature)
        return ProbeStateDerivative(dchi=float(dt), dc=0.0, dgap=float(ds2))

    __call__ = state


class LocalProbeFamily:
    """Probe outside the sample, coupled through one or two ancillas."""

    has_derivative = True

    def __init__(self, p: ThermometerParams, probe_gap: str = "literal", zero_coherence: bool = False):
        if p.n_ancilla not in (1, 2):
            raise UnsupportedModelError("local scheme has closed forms for 1 or 2 ancillas only")
        self.params = p
        self.frame = dressed_frame(p, probe_gap)
        self.zero_coherence = zero_coherence
        th = self.frame.theta_k
        w = p.omega_k
        if p.n_ancilla == 1:
            self._args = (th[0], 0.0, w[0], w[0], self.frame.omega)
        else:
            self._args = (th[0], th[1], w[0], w[1], self.frame.omega)

    def _both(self, temperature):
        _check_T(temperature)
        st, d = _two_angle_state(*self._args, temperature, with_derivative=True)
        if self.zero_coherence:
            st = ProbeState2x2(st.chi, 0.0)
            d = ProbeStateDerivative(d.dchi, 0.0)
        return st, d

    def state(self, temperature):
        return self._both(temperature)[0]

    def derivative(self, temperature):
        return self._both(temperature)[1]

    __call__ = state


class GlobalGibbsFamily:
    """All qubits thermalized with the sample; probe marginal of the Gibbs state."""

    has_derivative = True

    def __init__(self, p: ThermometerParams):
        self.params = p

    def state(self, temperature):
        _check_T(temperature)
        return _global_gibbs(self.params, temperature)

    def derivative(self, temperature):
        return _global_gibbs(self.params, temperature, with_derivative=True)[1]

    __call__ = state


class DmFamily:
    """DM-coupled probe (populations only)."""

    has_derivative = True

    def __init__(self, dm: DmModelParams):
        self.dm = dm

    def state(self, temperature):
        return _dm(self.dm, temperature)[0]

    def derivative(self, temperature):
        return _dm(self.dm, temperature)[1]

    __call__ = state


class ConstantFamily:
    """Temperature-independent probe state (e.g. the dipole-dipole result)."""

    has_derivative = True

    def __init__(self, state: ProbeState2x2):
        self._state = state

    def state(self, temperature):
        _check_T(temperature)
        return self._state

    def derivative(self, temperature):
        return ProbeStateDerivative(0.0, 0.0, 0.0)

    __call__ = state
