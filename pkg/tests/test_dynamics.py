import numpy as np
import pytest

from thermoqfi.dynamics import (
    SpectralResponse, build_channels, default_dt, evolve, lindblad_rhs,
    liouvillian, steady_state,
)
from thermoqfi.errors import DomainError, NonUniqueSteadyStateError
from thermoqfi.model import ThermometerParams, dressed_frame, model_hamiltonian
from thermoqfi.qcore import trace_distance
from thermoqfi.steady import dressed_product_state
from thermoqfi.validation import random_local_params

FIG2 = ThermometerParams(1.0, (0.04,), (0.04,))


def setup(p=FIG2, T=0.1, response=None):
    fr = dressed_frame(p)
    ch = build_channels(p, fr, T, response)
    return fr, model_hamiltonian(p, fr), ch


def random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = a @ a.conj().T
    return r / np.trace(r)


def test_spectral_response():
    assert SpectralResponse()(5.0) == 1e-3
    ohm = SpectralResponse("ohmic", 1e-3, 1.0)
    assert ohm(1.0) == pytest.approx(1e-3)
    assert ohm(0.5) < ohm(1.0)
    with pytest.raises(ValueError):
        SpectralResponse("lorentz")
    with pytest.raises(DomainError):
        SpectralResponse(base_rate=0)


def test_channels_fig2():
    _, _, ch = setup()
    # three forward/reverse pairs, i.e. six dissipators
    assert len(ch) == 3
    assert sum(2 for c in ch) == 6
    plus = [c for c in ch if c.label.startswith("plus")][0]
    assert plus.freq == pytest.approx(0.04 + np.sqrt(1 + 4 * 0.04**2), abs=1e-12)
    assert plus.freq == pytest.approx(1.0432, abs=1e-4)
    for c in ch:
        assert c.reverse_rate / c.forward_rate == pytest.approx(np.exp(-c.freq / 0.1), rel=1e-12)
        assert c.freq >= 0


def test_decoupled_channels_vanish():
    p = ThermometerParams(1.0, (0.04,), (0.0,))
    _, _, ch = setup(p)
    live = [c for c in ch if c.prefactor > 0]
    assert [c.label for c in live] == ["local[0]"]


def test_rhs_trace_and_unitary_part():
    rng = np.random.default_rng(0)
    _, h, ch = setup()
    rho = random_density(rng, 4)
    assert abs(np.trace(lindblad_rhs(rho, h, ch))) < 1e-12
    assert np.allclose(lindblad_rhs(rho, h, []), -1j * (h @ rho - rho @ h))


def test_analytic_state_is_stationary():
    fr, h, ch = setup()
    rho = dressed_product_state(FIG2, fr, 0.1)
    assert np.abs(lindblad_rhs(rho, h, ch)).max() < 1e-10


def test_liouvillian_matches_rhs():
    rng = np.random.default_rng(1)
    for p in (FIG2, ThermometerParams(0.26, (0.09, 0.17), (0.003, 0.05))):
        _, h, ch = setup(p, 0.05)
        lv = liouvillian(h, ch)
        for _ in range(5):
            rho = random_density(rng, p.dim)
            assert np.abs(lv.apply(rho) - lindblad_rhs(rho, h, ch)).max() < 1e-12


def test_liouvillian_spectrum():
    _, h, ch = setup()
    ev = np.linalg.eigvals(liouvillian(h, ch).matrix)
    assert np.min(np.abs(ev)) < 1e-10
    assert np.all(ev.real <= 1e-10)


def test_steady_state_matches_product_state():
    fr, h, ch = setup()
    ss = steady_state(liouvillian(h, ch))
    assert trace_distance(ss, dressed_product_state(FIG2, fr, 0.1)) < 1e-8


def test_infinite_temperature_fixed_point():
    fr, h, ch = setup(T=1e9)
    ss = steady_state(liouvillian(h, ch))
    assert np.allclose(ss, np.eye(4) / 4, atol=1e-6)


def test_no_dissipation_is_degenerate():
    _, h, _ = setup()
    with pytest.raises(NonUniqueSteadyStateError):
        steady_state(liouvillian(h, []))


@pytest.mark.parametrize("seed", range(5))
def test_spectrum_independence(seed):
    rng = np.random.default_rng(seed)
    p = random_local_params(rng, 1 + seed % 2)
    T = float(rng.uniform(0.02, 3))
    _, h, flat = setup(p, T, SpectralResponse("flat"))
    _, _, ohm = setup(p, T, SpectralResponse("ohmic", 2e-3, 0.7))
    a, b = steady_state(liouvillian(h, flat)), steady_state(liouvillian(h, ohm))
    assert trace_distance(a, b) < 1e-8


def test_evolve_zero_time_and_unitary():
    rng = np.random.default_rng(2)
    _, h, ch = setup()
    rho0 = random_density(rng, 4)
    assert np.allclose(evolve(rho0, h, ch, 0.0), rho0)
    out = evolve(rho0, h, [], 20.0, dt=0.01)
    assert np.allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho0), atol=1e-8)


def test_evolve_relaxes_to_steady_state():
    # the slowest relaxation is set by sin^2(theta) times the bath rate, far
    # below base_rate, so the horizon is taken from the Liouvillian gap
    fr, h, ch = setup()
    ev = -np.linalg.eigvals(liouvillian(h, ch).matrix).real
    gap = np.min(ev[ev > 1e-12])
    fastest = max(max(c.forward_rate, c.reverse_rate) for c in ch)
    rho = evolve(np.eye(4) / 4, h, ch, 30 / gap, dt=1 / fastest)
    assert trace_distance(rho, dressed_product_state(FIG2, fr, 0.1)) < 1e-6


def test_default_dt():
    _, _, ch = setup()
    assert default_dt(ch) == pytest.approx(0.01 / max(max(c.forward_rate, c.reverse_rate) for c in ch))
    with pytest.raises(DomainError):
        default_dt([])
