from __future__ import annotations

import numpy as np
import pytest

from vibronic_gbs.molfile import load_dataset
from vibronic_gbs.spectrum import (
    device_components,
    error_sweep,
    exact_profile,
    noncondon_profile,
    sample_profile,
    total_mass,
)

pytestmark = pytest.mark.integration


@pytest.mark.parametrize(
    "name, axes, cutoff, expected, tol",
    [
        ("naphthalene", None, 3, 0.9999, 1e-3),
        ("phenanthrene", None, 3, 0.9999, 1e-3),
        ("benzene_e2g", ["x", "y"], 4, 0.9999, 1e-3),
        ("benzene_e1g", None, 5, 0.9993, 2e-3),
        ("benzene_e1g", None, 3, 0.9872, 5e-3),
    ],
)
def test_mass_captured_by_cutoff(name: str, axes, cutoff: int, expected: float, tol: float) -> None:
    profile = noncondon_profile(load_dataset(name), axes, 1e-2, None, cutoff)

    assert total_mass(profile) == pytest.approx(expected, abs=tol)


def test_benzene_e1g_dominant_lines() -> None:
    profile = exact_profile(load_dataset("benzene_e1g"), None, None, 5)
    frequencies, probabilities = profile.lines(tol=1e-3)

    first, second = np.argsort(-probabilities)[:2]
    assert sorted([frequencies[first], frequencies[second]]) == [
        pytest.approx(1075.51, abs=0.5),
        pytest.approx(1186.47, abs=0.5),
    ]
    ratio = probabilities[first] / (probabilities[first] + probabilities[second])
    assert frequencies[first] == pytest.approx(1075.51, abs=0.5)
    assert ratio == pytest.approx(0.8486, abs=0.01)


@pytest.mark.parametrize(
    "name, order, taus, cutoff",
    [
        ("naphthalene", None, [1e-1, 3e-2, 1e-2], 3),
        ("phenanthrene", None, [1e-1, 3e-2, 1e-2], 3),
        ("benzene_e2g", None, [1e-1, 3e-2, 1e-2], 2),
        ("benzene_e1g", "ht2", [3e-1, 1e-1, 3e-2], 3),
    ],
)
def test_quadratic_convergence(name: str, order, taus: list[float], cutoff: int) -> None:
    sweep = error_sweep(load_dataset(name), None, order, taus, cutoff)

    assert sweep.slope == pytest.approx(-2.0, abs=0.3)


@pytest.mark.parametrize("name", ["naphthalene", "phenanthrene"])
def test_combination_matches_exact_profile(name: str) -> None:
    spec = load_dataset(name)

    approximate = noncondon_profile(spec, None, 1e-2, None, 3)
    exact = exact_profile(spec, None, None, 3)

    assert np.abs(approximate.probabilities - exact.probabilities).sum() <= 1e-3


def test_sampled_profile_converges() -> None:
    components = device_components(load_dataset("naphthalene"), None, 0.5, None, 3)

    result = sample_profile(components, 10_000_000, seed=1)

    assert result.tv_distance <= 5e-3
