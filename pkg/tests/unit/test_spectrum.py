from __future__ import annotations

import math

import numpy as np
import pytest

from vibronic_gbs.factors import DomainError, normalization_constant
from vibronic_gbs.models import InputError, MoleculeSpec, Order
from vibronic_gbs.molecule import dimensionless_tdm
from vibronic_gbs.molfile import load_dataset
from vibronic_gbs.spectrum import (
    FWHM_TO_SIGMA,
    MASS_EXCESS_LIMIT,
    MassExcessError,
    SpectralProfile,
    aux_profile,
    broaden,
    condon_profile,
    device_components,
    device_plan,
    device_settings,
    error_sweep,
    exact_profile,
    noncondon_profile,
    sample_profile,
    sampled_profile,
    total_mass,
)


def _condon_only(mu0: float = 1.2) -> MoleculeSpec:
    return MoleculeSpec.from_mapping(
        {
            "name": "condon-only",
            "omega_initial": [509.0, 938.0],
            "omega_final": [438.0, 912.0],
            "duschinsky": [[0.98, -0.2], [0.2, 0.98]],
            "delta": [0.3, -0.2],
            "tdm": {"x": {"mu0": mu0}},
        }
    )


def _profile(frequencies: list[float], probabilities: list[float]) -> SpectralProfile:
    modes = len(frequencies)
    return SpectralProfile(
        patterns=np.eye(modes, dtype=int),
        probabilities=np.array(probabilities),
        omega_final=np.array(frequencies),
        molecule="toy",
        axes=("x",),
        order=Order.HT1,
        kind="noncondon",
        cutoff=1,
    )


def test_aux_profile_at_zero_kappa_is_condon_profile() -> None:
    spec = load_dataset("phenanthrene")

    aux = aux_profile(spec, "x", 0.0, 3)
    condon = condon_profile(spec, 3)

    np.testing.assert_array_equal(aux.probabilities, condon.probabilities)
    np.testing.assert_array_equal(aux.patterns, condon.patterns)


def test_condon_only_combination_is_scaled_condon_profile() -> None:
    spec = _condon_only(1.2)
    tau = 0.05

    combined = noncondon_profile(spec, None, tau, None, 3)
    condon = condon_profile(spec, 3)

    factor = (math.cosh(2.0 * tau * 1.2) - 1.0) / (2.0 * tau**2 * 1.2**2)
    np.testing.assert_allclose(combined.probabilities, factor * condon.probabilities, atol=1e-10, rtol=0.0)


def test_oversized_tau_combination_is_rejected() -> None:
    spec = _condon_only(1.2)
    tau = 1.5
    factor = (math.cosh(2.0 * tau * 1.2) - 1.0) / (2.0 * tau**2 * 1.2**2)
    assert factor * total_mass(condon_profile(spec, 3)) > 1.0 + MASS_EXCESS_LIMIT

    with pytest.raises(MassExcessError, match="choose a smaller tau"):
        noncondon_profile(spec, None, tau, None, 3)


def test_condon_profile_vacuum_line_comes_first() -> None:
    profile = condon_profile(load_dataset("naphthalene"), 2)

    assert profile.kind == "condon"
    assert profile.patterns[0].tolist() == [0, 0]
    assert profile.frequencies[0] == 0.0
    assert 0.0 < total_mass(profile) <= 1.0


def test_noncondon_profile_tracks_exact_profile() -> None:
    spec = load_dataset("naphthalene")

    approximate = noncondon_profile(spec, None, 1e-2, "ht1", 2)
    exact = exact_profile(spec, None, "ht1", 2, method="analytic")

    assert np.abs(approximate.probabilities - exact.probabilities).sum() < 1e-3


def test_exact_evaluators_agree() -> None:
    spec = load_dataset("phenanthrene")

    oracle = exact_profile(spec, None, None, 3, method="oracle")
    analytic = exact_profile(spec, None, None, 3, method="analytic")

    np.testing.assert_allclose(oracle.probabilities, analytic.probabilities, atol=1e-8)


def test_exact_profile_rejects_unknown_method() -> None:
    with pytest.raises(InputError):
        exact_profile(load_dataset("naphthalene"), None, None, 2, method="guess")


def test_unknown_axis_is_rejected() -> None:
    with pytest.raises(InputError, match="not present"):
        noncondon_profile(load_dataset("naphthalene"), ["z"], 1e-2, None, 2)


def test_error_sweep_needs_three_taus() -> None:
    with pytest.raises(InputError):
        error_sweep(load_dataset("naphthalene"), None, None, [1e-1, 1e-2], 2)


def test_error_sweep_orders_taus_descending() -> None:
    sweep = error_sweep(load_dataset("naphthalene"), None, None, [1e-2, 1e-1, 3e-2], 2, method="analytic")

    assert sweep.taus.tolist() == [1e-1, 3e-2, 1e-2]
    assert sweep.errors[0] > sweep.errors[-1]
    assert sweep.slope is not None and sweep.slope < 0.0


def test_large_kappa_leaves_the_domain() -> None:
    with pytest.raises(DomainError):
        aux_profile(load_dataset("benzene_e1g"), "x", 200.0, 1)


def test_lines_merge_degenerate_frequencies() -> None:
    profile = _profile([100.0, 100.0, 250.0], [0.2, 0.3, 0.1])

    frequencies, probabilities = profile.lines()

    assert frequencies.tolist() == [100.0, 250.0]
    np.testing.assert_allclose(probabilities, [0.5, 0.1])
    assert profile.top_lines(1) == [(100.0, pytest.approx(0.5))]


def test_broaden_places_gaussians_and_clamps_negatives() -> None:
    profile = _profile([500.0, 700.0], [0.6, -0.05])

    curve = broaden(profile, 10.0, grid_step=0.5)

    assert curve.clamped_mass == pytest.approx(0.05)
    assert curve.grid[0] == pytest.approx(460.0)
    peak = int(np.argmax(curve.intensity))
    assert curve.grid[peak] == pytest.approx(500.0)
    assert curve.intensity[peak] == pytest.approx(0.6)
    assert np.all(curve.intensity >= 0.0)


def test_broaden_fwhm_mode_converts_width() -> None:
    curve = broaden(_profile([300.0], [1.0]), 20.0, mode="fwhm")

    assert curve.sigma == pytest.approx(20.0 * FWHM_TO_SIGMA)
    half = curve.intensity >= 0.5
    assert curve.grid[half][-1] - curve.grid[half][0] == pytest.approx(20.0, abs=1.0)


def test_broaden_rejects_bad_arguments() -> None:
    with pytest.raises(InputError):
        broaden(_profile([1.0], [1.0]), 0.0)
    with pytest.raises(InputError):
        broaden(_profile([1.0], [1.0]), 1.0, mode="lorentz")


def test_sampling_is_seeded_and_counts_every_shot() -> None:
    components = device_components(load_dataset("naphthalene"), None, 0.5, None, 2)

    first = sample_profile(components, 2000, seed=3)
    second = sample_profile(components, 2000, seed=3)
    third = sample_profile(components, 2000, seed=4)

    np.testing.assert_array_equal(first.probabilities, second.probabilities)
    assert not np.array_equal(first.probabilities, third.probabilities)
    assert all(int(counts.sum()) == 2000 for counts in first.counts)
    assert first.tv_distance >= 0.0


def test_sampled_profile_reports_noiseless_combination() -> None:
    spec = load_dataset("naphthalene")
    profile, result = sampled_profile(spec, None, 0.5, None, 2, 1000, 0)

    np.testing.assert_allclose(result.noiseless, noncondon_profile(spec, None, 0.5, None, 2).probabilities)
    assert profile.kind == "sampled"


def test_sampling_rejects_zero_shots() -> None:
    components = device_components(load_dataset("naphthalene"), None, 0.5, None, 1)
    with pytest.raises(InputError):
        sample_profile(components, 0, seed=0)


def test_device_plan_weights_cancel() -> None:
    plan = device_plan(load_dataset("benzene_e2g"), ["x", "y"], 1e-2)

    assert len(plan) == 7
    assert plan[0].axis is None
    assert sum(setting.weight for setting in plan) == pytest.approx(0.0, abs=1e-6)
    assert {setting.kappa for setting in plan[1:4]} == {1e-2j, 1e-2 + 0j, -1e-2 + 0j}


def test_device_settings_describe_squeezers() -> None:
    spec = load_dataset("phenanthrene")
    condon = device_settings(spec, None, 0.0)
    shifted = device_settings(spec, "x", 0.1)

    assert condon.scale == 1.0
    assert np.all(condon.squeezing >= 0.0)
    assert condon.interferometer.shape == (2, 2)
    assert shifted.scale != pytest.approx(1.0)
    mapping = shifted.to_mapping()
    assert mapping["axis"] == "x"
    assert mapping["kappa"] == [0.1, 0.0]
    assert len(mapping["interferometer"]) == 2


def _two_axis() -> MoleculeSpec:
    return MoleculeSpec.from_mapping(
        {
            "name": "two-axis",
            "length_unit": "bohr",
            "omega_initial": [509.0, 938.0],
            "omega_final": [438.0, 912.0],
            "duschinsky": [[0.98, -0.2], [0.2, 0.98]],
            "delta": [0.2, -0.1],
            "tdm": {"x": {"mu0": 1.0, "mu1": [1.0, -1.0]}, "y": {"mu0": 0.5, "mu1": [0.3, 0.8]}},
        }
    )


def test_axes_add_weighted_by_their_norms() -> None:
    spec = _two_axis()
    norms = normalization_constant([dimensionless_tdm(spec, "x"), dimensionless_tdm(spec, "y")], "ht1").per_axis
    builders = [
        (lambda axes: exact_profile(spec, axes, "ht1", 3, method="analytic"), 1e-12),
        (lambda axes: noncondon_profile(spec, axes, 1e-2, "ht1", 3), 1e-10),
    ]

    for build, atol in builders:
        both = build(["x", "y"]).probabilities
        x, y = build(["x"]).probabilities, build(["y"]).probabilities

        expected = (norms["x"] * x + norms["y"] * y) / (norms["x"] + norms["y"])
        np.testing.assert_allclose(both, expected, atol=atol, rtol=0.0)


def test_exact_mass_never_shrinks_with_cutoff() -> None:
    spec = load_dataset("phenanthrene")

    masses = [total_mass(exact_profile(spec, None, "ht1", cutoff, method="analytic")) for cutoff in (1, 2, 3, 4)]

    assert all(later >= earlier - 1e-12 for earlier, later in zip(masses, masses[1:]))
    assert masses[0] < masses[-1] <= 1.0 + 1e-9


def test_phenanthrene_error_halves_twice_when_tau_halves() -> None:
    spec = load_dataset("phenanthrene")
    exact = exact_profile(spec, None, "ht1", 3, method="analytic").probabilities

    coarse, fine = (
        float(np.abs(noncondon_profile(spec, None, tau, "ht1", 3).probabilities - exact).sum()) for tau in (0.1, 0.05)
    )

    assert coarse / fine == pytest.approx(4.0, rel=0.2)


def test_naphthalene_fundamental_appears_beyond_condon() -> None:
    spec = load_dataset("naphthalene")

    def line(profile: SpectralProfile) -> float:
        frequencies, probabilities = profile.lines()
        return float(probabilities[np.isclose(frequencies, 438.0)].sum())

    condon = line(condon_profile(spec, 3))
    noncondon = line(noncondon_profile(spec, None, 1e-2, "ht1", 3))
    exact = line(exact_profile(spec, None, "ht1", 3, method="analytic"))

    assert condon == pytest.approx(0.0, abs=1e-12)
    assert noncondon > condon + 0.05
    assert noncondon == pytest.approx(exact, abs=1e-3)
