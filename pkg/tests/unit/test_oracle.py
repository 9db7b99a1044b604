from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from vibronic_gbs.fock import CutoffExceededError, fock_amplitudes
from vibronic_gbs.gauss import BlochMessiahForm
from vibronic_gbs.oracle import (
    MAX_WORKSPACE_DIM,
    MIN_PADDING,
    DipolePolynomial,
    Displacement,
    Rotation,
    Squeezing,
    bloch_messiah_operators,
    default_padding,
    ladder_space,
    truncated_oracle_state,
    workspace_dim,
    workspace_fits,
)


def test_displacement_produces_coherent_state() -> None:
    alpha = 0.5 + 0.2j
    state = truncated_oracle_state([Displacement(np.array([alpha, 0.0]))], 2, 4)

    expected = [math.exp(-abs(alpha) ** 2 / 2.0) * alpha**n / math.sqrt(math.factorial(n)) for n in range(5)]
    np.testing.assert_allclose(state.amplitudes[:, 0], expected, atol=1e-10)
    np.testing.assert_allclose(state.amplitudes[:, 1:], 0.0, atol=1e-12)


def test_rotation_swaps_displaced_modes() -> None:
    alpha = np.array([0.4, 0.0])
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    state = truncated_oracle_state([Rotation(swap), Displacement(alpha)], 2, 3)
    reference = truncated_oracle_state([Displacement(alpha[::-1])], 2, 3)

    np.testing.assert_allclose(np.abs(state.amplitudes), np.abs(reference.amplitudes), atol=1e-10)


def test_unitary_chain_keeps_norm_below_one() -> None:
    operators = [Squeezing(np.array([0.3, 0.1j])), Displacement(np.array([0.2, -0.1]))]
    state = truncated_oracle_state(operators, 2, 4)

    assert state.norm() <= 1.0 + 1e-9
    assert state.norm() > 0.99


def test_dipole_polynomial_acts_on_vacuum() -> None:
    state = truncated_oracle_state([DipolePolynomial(1.0, np.array([math.sqrt(2.0)]), np.zeros((1, 1)))], 1, 3)

    np.testing.assert_allclose(state.amplitudes, [1.0, 1.0, 0.0, 0.0], atol=1e-14)
    assert state.amplitude((1,)) == pytest.approx(1.0)


def test_default_padding_grows_with_squeezing_and_displacement() -> None:
    assert default_padding([Displacement(np.array([1.0]))]) == MIN_PADDING
    assert default_padding([Displacement(np.array([3.0]))]) == 36
    assert default_padding([Squeezing(np.array([1.5]))]) > default_padding([Squeezing(np.array([0.5]))])
    squeezed = [Squeezing(np.array([0.8])), Displacement(np.array([1.0]))]
    assert default_padding(squeezed) > default_padding([Squeezing(np.array([0.8]))])


def test_strongly_squeezed_three_mode_form_converges() -> None:
    rng = np.random.default_rng(2024)
    modes, cutoff = 3, 6
    gamma = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    form = BlochMessiahForm(
        V=unitary_group.rvs(modes, random_state=rng),
        sigma=np.full(modes, 0.8),
        W=unitary_group.rvs(modes, random_state=rng),
        gamma=gamma / np.linalg.norm(gamma),
    )
    operators = bloch_messiah_operators(form)
    assert workspace_fits(operators, modes, cutoff)

    state = truncated_oracle_state(operators, modes, cutoff)

    assert state.padding > default_padding(operators)
    assert workspace_dim(modes, cutoff, state.padding) <= MAX_WORKSPACE_DIM
    assert state.norm() <= 1.0 + 1e-9
    np.testing.assert_allclose(state.amplitudes, fock_amplitudes(form, cutoff), atol=1e-8, rtol=0.0)


def test_workspace_guard() -> None:
    with pytest.raises(CutoffExceededError):
        truncated_oracle_state([Displacement(np.zeros(6))], 6, 10)


def test_ladder_operators_commute_across_modes() -> None:
    space = ladder_space(3, 2)
    a0, a1 = space.lowering
    interior = space.patterns.sum(axis=1) < 3
    commutator = (a0 @ space.raising[1] - space.raising[1] @ a0).toarray()[:, interior]

    assert abs(a0 @ a1 - a1 @ a0).max() == 0.0
    assert abs(commutator).max() == 0.0
    assert space.dim == 10
    assert (a1 @ space.vacuum() == 0).all()
