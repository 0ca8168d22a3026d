import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from thermoqfi.errors import DomainError, UnsupportedModelError
from thermoqfi.model import (
    DRESSED_TO_LOCAL, DmModelParams, ThermometerParams, build_dd_hamiltonian,
    build_dm_hamiltonian, build_hamiltonian, dd_frequencies, dressed_eigenstates_n1,
    dressed_frame, dressed_hamiltonian, dressing_unitary, mixing_angles,
    model_hamiltonian, to_dressed, to_local, two_ancilla_literal_gap,
)
from thermoqfi.qcore import pauli

FIG2 = ThermometerParams(1.0, (0.04,), (0.04,))
FIG4 = ThermometerParams(0.26, (0.09, 0.17), (0.003, 0.05))


def offdiag_norm(a):
    return np.abs(a - np.diag(np.diag(a))).max()


def test_params_validation():
    with pytest.raises(DomainError):
        ThermometerParams(0.0)
    with pytest.raises(DomainError):
        ThermometerParams(1.0, (-0.1,), (0.1,))
    with pytest.raises(ValueError):
        ThermometerParams(1.0, (0.1, 0.2), (0.1,))
    p = ThermometerParams.identical(1.0, 0.03, 0.01, 4)
    assert (p.n_ancilla, p.n_qubits, p.dim) == (4, 5, 32)
    assert p.scaled(2.0).omega_k == (0.06,) * 4


def test_bare_probe_hamiltonian():
    assert np.allclose(build_hamiltonian(ThermometerParams(1.0)), 0.5 * np.diag([1, -1]))


def test_coupling_matrix_element():
    h = build_hamiltonian(ThermometerParams(1.0, (0.04,), (0.01,)))
    # |++> is index 0, |+-> index 1; sz_1 sx_p couples them with amplitude g
    assert h[0, 1] == pytest.approx(0.01)
    assert h[2, 3] == pytest.approx(-0.01)


def test_one_ancilla_spectrum():
    p = ThermometerParams(1.0, (0.04,), (0.04,))
    om = np.sqrt(1 + 4 * 0.04**2)
    expected = sorted([(0.04 + om) / 2, (0.04 - om) / 2, (-0.04 + om) / 2, (-0.04 - om) / 2])
    assert np.allclose(np.linalg.eigvalsh(build_hamiltonian(p)), expected, atol=1e-12)
    assert dressed_frame(p).omega == pytest.approx(om, abs=1e-12)


def test_mixing_angles():
    assert mixing_angles(ThermometerParams(1.0, (0.1,), (0.0,))) == [0.0]
    assert mixing_angles(ThermometerParams(1.0, (0.04,), (0.01,)))[0] == pytest.approx(np.arctan(0.02), abs=1e-15)
    th = mixing_angles(ThermometerParams(1.0, (0.1, 0.2), (0.05, 0.05)))
    assert th[0] == pytest.approx(th[1]) == pytest.approx(0.5 * np.arctan(0.2))
    with pytest.raises(UnsupportedModelError):
        mixing_angles(ThermometerParams.identical(1, 0.1, 0.01, 3))


def test_dressing_unitary_basics():
    u = dressing_unitary(FIG2)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    assert np.allclose(dressing_unitary(ThermometerParams(1.0, (0.1,), (0.0,))), np.eye(4))
    assert DRESSED_TO_LOCAL == "U A U^dagger"


def test_conjugation_direction_diagonalizes():
    u = dressing_unitary(FIG2)
    assert offdiag_norm(to_dressed(build_hamiltonian(FIG2), u)) < 1e-10
    # the opposite direction does not
    assert offdiag_norm(u @ build_hamiltonian(FIG2) @ u.conj().T) > 1e-3


def test_transformed_probe_pauli():
    th = mixing_angles(FIG2)[0]
    u = dressing_unitary(FIG2)
    lhs = to_local(pauli("z", 1, 2), u)
    rhs = np.cos(th) * pauli("z", 1, 2) + np.sin(th) * pauli("z", 0, 2) @ pauli("x", 1, 2)
    assert np.allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    hst.floats(0.2, 2.0), hst.lists(hst.floats(0.01, 2.0), min_size=1, max_size=2),
    hst.lists(hst.floats(-0.5, 0.5), min_size=2, max_size=2),
)
def test_spectrum_preserved(wp, ws, gs):
    gs = [g * wp for g in gs[: len(ws)]]
    p = ThermometerParams(wp, tuple(ws), tuple(gs))
    ev = np.linalg.eigvalsh(build_hamiltonian(p))
    dv = np.sort(np.diag(dressed_hamiltonian(p)).real)
    assert np.allclose(ev, dv, atol=1e-10)
    assert offdiag_norm(to_dressed(build_hamiltonian(p), dressing_unitary(p))) < 1e-10


@settings(max_examples=30, deadline=None)
@given(hst.floats(0.1, 2.0), hst.floats(-1, 1), hst.floats(-1, 1))
def test_angles_odd_in_coupling(wp, g1, g2):
    p = ThermometerParams(wp, (0.3, 0.5), (g1, g2))
    m = ThermometerParams(wp, (0.3, 0.5), (-g1, -g2))
    assert np.allclose(mixing_angles(m), -np.array(mixing_angles(p)))


def test_dressed_hamiltonian_values():
    p = ThermometerParams(1.0, (0.04,), (0.01,))
    om = np.sqrt(1.0004)
    d = np.diag(dressed_hamiltonian(p)).real
    assert np.allclose(sorted(d), sorted([(0.04 + om) / 2, (0.04 - om) / 2, (-0.04 + om) / 2, (-0.04 - om) / 2]))
    free = ThermometerParams(1.0, (0.3, 0.5), (0.0, 0.0))
    assert np.allclose(dressed_hamiltonian(free), build_hamiltonian(free))


def test_two_ancilla_gaps():
    fr = dressed_frame(FIG4)
    gaps = sorted(fr.sector_gaps)
    assert gaps[0] == pytest.approx(np.hypot(0.26, 2 * 0.047))
    assert gaps[1] == pytest.approx(np.hypot(0.26, 2 * 0.053))
    assert fr.omega == pytest.approx(two_ancilla_literal_gap(FIG4))
    # the literal single gap is roughly twice the true ones
    assert fr.omega / np.mean(gaps) == pytest.approx(1.86, abs=0.01)
    mean = dressed_frame(FIG4, "mean")
    assert mean.omega == pytest.approx(np.mean(gaps))
    with pytest.raises(DomainError):
        two_ancilla_literal_gap(ThermometerParams(0.1, (0.1, 0.1), (0.05, 0.05)))


def test_model_hamiltonian_one_ancilla_matches_dressed():
    fr = dressed_frame(FIG2)
    assert np.allclose(model_hamiltonian(FIG2, fr), dressed_hamiltonian(FIG2), atol=1e-12)


def test_dressed_eigenstates():
    p = ThermometerParams(1.0, (0.04,), (0.04,))
    vecs = dressed_eigenstates_n1(p)
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    assert np.allclose(gram, np.eye(4), atol=1e-12)
    h = build_hamiltonian(p)
    fr = dressed_frame(p)
    for v, e in zip(vecs, fr.eigvals):
        assert np.linalg.norm(h @ v - e * v) < 1e-10
    free = dressed_eigenstates_n1(ThermometerParams(1.0, (0.04,), (0.0,)))
    assert np.allclose(np.abs(np.array(free)), np.eye(4))


def test_dd_spectrum():
    wp, w1, g = 1.0, 0.4, 0.15
    ev = np.linalg.eigvalsh(build_dd_hamiltonian(wp, w1, g))
    r = np.hypot((w1 - wp) / 2, g)
    assert np.allclose(ev, sorted([(w1 + wp) / 2, -(w1 + wp) / 2, r, -r]))
    wplus, wminus = dd_frequencies(wp, w1, g)
    assert np.allclose(sorted([(wplus + wminus) / 2, (wplus - wminus) / 2]), sorted([(w1 + wp) / 2, r]))
    assert np.allclose(build_dd_hamiltonian(wp, w1, 0.0), 0.5 * (pauli("z", 1, 2) + 0.4 * pauli("z", 0, 2)))


def test_dm_hamiltonian_and_params():
    h = build_dm_hamiltonian(1.0, 0.5, 0.1)
    assert np.abs(h - h.conj().T).max() < 1e-14
    dm = DmModelParams(0.5, 1.0, 0.1)
    # inner block spectrum omega_s +- Omega
    ev = np.linalg.eigvalsh(h)
    assert np.allclose(sorted(np.abs(ev)), sorted([dm.omega, dm.omega, dm.omega_s, dm.omega_s]))
    c, s = dm.cos_sin
    assert c**2 + s**2 == pytest.approx(1.0)
    assert DmModelParams(0.5, 0.5, 0.0).cos_sin == pytest.approx((np.sqrt(0.5), -np.sqrt(0.5)))
    with pytest.raises(DomainError):
        DmModelParams(0.0, 1.0, 0.1)
