import numpy as np
import pytest
from conftest import random_state
from hypothesis import given, settings
from hypothesis import strategies as st

from qpoisson.core import StateVector
from qpoisson.noise import (
    CHANNEL_CODES,
    amplitude_damping,
    bit_flip,
    channel_by_name,
    composite,
    depolarizing,
    phase_damping,
)

FACTORIES = list(CHANNEL_CODES.values())
probs = st.floats(0.0, 1.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(p=probs, which=st.sampled_from(FACTORIES))
def test_completeness_and_trace(p, which):
    ch = which(p)
    assert ch.completeness_error() < 1e-12
    rng = np.random.default_rng(int(p * 1e6))
    psi = random_state(rng, 1)
    out = ch(np.outer(psi, psi.conj()))
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.allclose(out, out.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(out).min() > -1e-12


@pytest.mark.parametrize("factory", FACTORIES)
def test_zero_intensity_is_identity(factory):
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    assert np.allclose(factory(0.0)(rho), rho, atol=1e-15)


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
@pytest.mark.parametrize("factory", FACTORIES)
def test_out_of_range_p(factory, bad):
    with pytest.raises(ValueError):
        factory(bad)


def test_amplitude_damping_full_decay():
    one = np.diag([0.0, 1.0])
    assert np.allclose(amplitude_damping(1.0)(one), np.diag([1.0, 0.0]))


def test_phase_damping_keeps_populations_shrinks_coherence():
    plus = np.full((2, 2), 0.5)
    out = phase_damping(0.36)(plus)
    assert np.allclose(np.diag(out), [0.5, 0.5])
    assert out[0, 1] == pytest.approx(0.5 * 0.8)


def test_bit_flip_flips_with_probability_p():
    out = bit_flip(0.1)(np.diag([1.0, 0.0]))
    assert np.allclose(np.diag(out), [0.9, 0.1])


def test_depolarizing_mixes_towards_identity():
    rho = np.array([[1.0, 0.0], [0.0, 0.0]])
    out = depolarizing(0.4)(rho)
    assert np.allclose(out, 0.6 * rho + 0.4 * np.eye(2) / 2)
    assert np.allclose(depolarizing(1.0)(rho), np.eye(2) / 2)


def test_composite_is_the_four_in_sequence():
    rng = np.random.default_rng(3)
    psi = random_state(rng, 1)
    rho = np.outer(psi, psi.conj())
    p = 0.07
    seq = rho
    for f in (amplitude_damping, phase_damping, bit_flip, depolarizing):
        seq = f(p)(seq)
    assert np.allclose(composite(p)(rho), seq, atol=1e-14)
    assert composite(p).is_valid()


def test_tensor_acts_independently():
    a, b = amplitude_damping(0.2), bit_flip(0.3)
    ab = a.tensor(b)
    rho0 = np.diag([0.0, 1.0])
    rho1 = np.diag([1.0, 0.0])
    assert np.allclose(ab(np.kron(rho0, rho1)), np.kron(a(rho0), b(rho1)))
    assert ab.num_qubits == 2 and ab.is_valid()


def test_superoperator_matches_operator_sum():
    ch = depolarizing(0.3)
    psi = random_state(np.random.default_rng(0), 1)
    rho = np.outer(psi, psi.conj())
    via_super = (ch.superoperator.reshape(4, 4) @ rho.reshape(4)).reshape(2, 2)
    assert np.allclose(via_super, ch(rho), atol=1e-14)


def test_channel_by_name():
    assert channel_by_name("AD", 0.1).name.value == "AmplitudeDamping"
    with pytest.raises(ValueError):
        channel_by_name("xx", 0.1)


def test_applied_to_state_vector_density():
    rho = StateVector.basis(1, 1).to_density_matrix()
    assert np.allclose(amplitude_damping(0.25)(rho.matrix.reshape(2, 2)), np.diag([0.25, 0.75]))
