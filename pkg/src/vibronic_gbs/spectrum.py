"""Condon, Herzberg-Teller and sampled vibronic profiles.

A non-Condon profile is assembled from four Gaussian boson sampling devices
per axis, each preparing ``exp(kappa mu)|0>`` pushed through the Doktorov
unitary for ``kappa`` in ``{i tau, tau, -tau, 0}``::

    P(m) = sum_r [f(i tau) + f(tau)/2 + f(-tau)/2 - 2 f(0)] / (2 tau^2 N)

The ``kappa = 0`` device is shared by every axis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from .factors import DomainError, HtModeFactors, NormalizationConstant, ht_mode_factors, normalization_constant
from .fock import (
    CutoffExceededError,
    dressed_fock_amplitudes,
    enumerate_patterns,
    enumeration_order,
    fock_amplitudes,
)
from .gauss import BlochMessiahForm, BogoliubovTransform, bloch_messiah, compose_chain, doktorov_factorize
from .models import InputError, MoleculeSpec, NumericalError, Order
from .molecule import DimensionlessTdm, build_bogoliubov_inputs, dimensionless_tdm
from .oracle import DipolePolynomial, NonConvergenceError, doktorov_operators, truncated_oracle_state, workspace_fits

logger = logging.getLogger(__name__)

LINE_MERGE_TOL = 1e-6
ORACLE_MAX_MODES = 6
ORACLE_MAX_CUTOFF = 10
SLOPE_FLOOR = 1e-13
MASS_WARN_EXCESS = 1e-6
MASS_EXCESS_LIMIT = 0.5
BROADENING_WINDOW = 8.0
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
EXACT_METHODS = ("auto", "oracle", "analytic")
BROADENING_MODES = ("sigma", "fwhm")


class MassExcessError(NumericalError):
    """Raised when a combined profile carries far more than unit mass, so tau is too large."""


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Probabilities per photon pattern, in enumeration order."""

    patterns: np.ndarray
    probabilities: np.ndarray
    omega_final: np.ndarray
    molecule: str
    axes: tuple[str, ...]
    order: Order
    kind: str
    cutoff: int
    tau: float | None = None

    @property
    def frequencies(self) -> np.ndarray:
        return self.patterns @ self.omega_final

    def entries(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(n) for n in pattern): float(p) for pattern, p in zip(self.patterns, self.probabilities)}

    def lines(self, tol: float = LINE_MERGE_TOL) -> tuple[np.ndarray, np.ndarray]:
        """Merge patterns whose frequencies agree within ``tol`` cm^-1."""
        frequencies = self.frequencies
        order = np.argsort(frequencies, kind="stable")
        sorted_frequencies = frequencies[order]
        sorted_probabilities = self.probabilities[order]
        starts = np.concatenate([[True], np.diff(sorted_frequencies) > tol]) if order.size else np.array([], dtype=bool)
        groups = np.cumsum(starts) - 1
        merged = np.zeros(int(starts.sum()))
        np.add.at(merged, groups, sorted_probabilities)
        return sorted_frequencies[starts], merged

    def top_lines(self, count: int = 10) -> list[tuple[float, float]]:
        frequencies, probabilities = self.lines()
        ranked = np.argsort(-probabilities, kind="stable")[:count]
        return [(float(frequencies[index]), float(probabilities[index])) for index in ranked]


@dataclass(frozen=True, eq=False)
class BroadenedSpectrum:
    grid: np.ndarray
    intensity: np.ndarray
    width: float
    sigma: float
    mode: str
    clamped_mass: float


@dataclass(frozen=True, eq=False)
class ErrorSweep:
    taus: np.ndarray
    errors: np.ndarray
    slope: float | None


@dataclass(frozen=True, eq=False)
class DeviceComponent:
    """One sampling device: ``weight * scale * probabilities`` enters the combination."""

    axis: str | None
    kappa: complex
    weight: float
    scale: float
    form: BlochMessiahForm
    probabilities: np.ndarray

    @property
    def overflow(self) -> float:
        return max(0.0, 1.0 - float(self.probabilities.sum()))


@dataclass(frozen=True, eq=False)
class DeviceSetting:
    axis: str | None
    kappa: complex
    weight: float
    scale: float
    squeezing: np.ndarray
    interferometer: np.ndarray
    displacement: np.ndarray

    def to_mapping(self) -> dict[str, object]:
        return {
            "axis": self.axis,
            "kappa": [self.kappa.real, self.kappa.imag],
            "weight": self.weight,
            "scale": self.scale,
            "squeezing": [float(value) for value in self.squeezing],
            "interferometer": [[[float(value.real), float(value.imag)] for value in row] for row in self.interferometer],
            "displacement": [[float(value.real), float(value.imag)] for value in self.displacement],
        }


@dataclass(frozen=True, eq=False)
class SampleResult:
    probabilities: np.ndarray
    noiseless: np.ndarray
    tv_distance: float
    counts: tuple[np.ndarray, ...]
    shots: int
    seed: int


class _Workspace:
    """Per-molecule quantities shared by every profile of one run."""

    def __init__(self, spec: MoleculeSpec, axes: Sequence[str] | None, order: Order | str | None, cutoff: int) -> None:
        self.spec = spec
        self.axes = resolve_axes(spec, axes)
        self.order = Order.parse(order) if order is not None else spec.highest_order
        self.cutoff = int(cutoff)
        J, delta = build_bogoliubov_inputs(spec)
        self.dok = doktorov_factorize(J, delta)
        self.tdms: dict[str, DimensionlessTdm] = {
            axis: dimensionless_tdm(spec, axis).truncated(self.order) for axis in self.axes
        }

    @cached_property
    def normalization(self) -> NormalizationConstant:
        return normalization_constant(list(self.tdms.values()), self.order)

    @cached_property
    def patterns(self) -> np.ndarray:
        return enumerate_patterns(self.spec.modes, self.cutoff)

    @cached_property
    def condon(self) -> DeviceComponent:
        modes = self.spec.modes
        transform = compose_chain(self.dok, np.eye(modes), np.zeros(modes), np.zeros(modes))
        form = bloch_messiah(transform)
        probabilities = _probabilities(fock_amplitudes(form, self.cutoff))
        return DeviceComponent(axis=None, kappa=0j, weight=1.0, scale=1.0, form=form, probabilities=probabilities)

    def chain(self, axis: str, kappa: complex) -> tuple[HtModeFactors, BogoliubovTransform, BlochMessiahForm]:
        tdm = self.tdms[axis]
        factors = ht_mode_factors(tdm, kappa)
        curvature = float(np.max(np.abs(np.linalg.eigvalsh(tdm.Lam)), initial=0.0))
        if abs(kappa) * curvature >= 0.5:
            raise DomainError(f"|kappa| * max|d| = {abs(kappa) * curvature:.3g} must stay below 0.5")
        transform = compose_chain(self.dok, factors.U_ht, factors.xi, factors.alpha)
        return factors, transform, bloch_messiah(transform)

    def device(self, axis: str, kappa: complex, weight: float = 1.0) -> DeviceComponent:
        kappa = complex(kappa)
        factors, _, form = self.chain(axis, kappa)
        probabilities = _probabilities(fock_amplitudes(form, self.cutoff))
        return DeviceComponent(
            axis=axis, kappa=kappa, weight=weight, scale=factors.scale, form=form, probabilities=probabilities
        )

    def components(self, tau: float) -> list[DeviceComponent]:
        if tau <= 0.0:
            raise InputError(f"tau must be positive, got {tau}")
        norm = self.normalization.value
        base = 1.0 / (tau**2 * norm)
        components = [replace(self.condon, weight=-len(self.axes) * base)]
        for axis in self.axes:
            components.append(self.device(axis, 1j * tau, 0.5 * base))
            components.append(self.device(axis, tau, 0.25 * base))
            components.append(self.device(axis, -tau, 0.25 * base))
        return components

    def combine(self, components: Sequence[DeviceComponent]) -> np.ndarray:
        total = np.zeros_like(components[0].probabilities)
        for component in components:
            total = total + component.weight * component.scale * component.probabilities
        return total

    def exact_amplitudes(self, axis: str, method: str) -> np.ndarray:
        tdm = self.tdms[axis]
        modes = self.spec.modes
        if method == "auto":
            if not self.oracle_fits():
                return self.exact_amplitudes(axis, "analytic")
            try:
                return self.exact_amplitudes(axis, "oracle")
            except NonConvergenceError as exc:
                logger.warning("oracle did not converge for %s (%s); using the analytic evaluator", axis, exc)
                return self.exact_amplitudes(axis, "analytic")
        if method == "oracle":
            if modes > ORACLE_MAX_MODES or self.cutoff > ORACLE_MAX_CUTOFF:
                raise CutoffExceededError(
                    f"oracle limited to {ORACLE_MAX_MODES} modes and cutoff {ORACLE_MAX_CUTOFF}"
                )
            operators = doktorov_operators(self.dok) + [DipolePolynomial(tdm.mu0, tdm.lam, tdm.Lam)]
            return truncated_oracle_state(operators, modes, self.cutoff).amplitudes
        if method == "analytic":
            transform = compose_chain(self.dok, np.eye(modes), np.zeros(modes), np.zeros(modes))
            return dressed_fock_amplitudes(transform, self.condon.form, tdm.mu0, tdm.lam, tdm.Lam, self.cutoff)
        raise InputError(f"unknown exact method: {method} (expected one of {', '.join(EXACT_METHODS)})")

    def oracle_fits(self) -> bool:
        modes = self.spec.modes
        if modes > ORACLE_MAX_MODES or self.cutoff > ORACLE_MAX_CUTOFF:
            return False
        return workspace_fits(doktorov_operators(self.dok), modes, self.cutoff)

    def profile(self, probabilities: np.ndarray, kind: str, tau: float | None = None) -> SpectralProfile:
        return SpectralProfile(
            patterns=self.patterns,
            probabilities=probabilities,
            omega_final=self.spec.omega_final,
            molecule=self.spec.name,
            axes=self.axes,
            order=self.order,
            kind=kind,
            cutoff=self.cutoff,
            tau=tau,
        )


def resolve_axes(spec: MoleculeSpec, axes: Sequence[str] | None) -> tuple[str, ...]:
    if not axes:
        return spec.axes
    resolved = tuple(dict.fromkeys(axis.strip().lower() for axis in axes))
    missing = [axis for axis in resolved if axis not in spec.tdm]
    if missing:
        raise InputError(f"axes {missing} are not present in molecule {spec.name} (available: {list(spec.axes)})")
    return resolved


def condon_profile(spec: MoleculeSpec, cutoff: int) -> SpectralProfile:
    workspace = _Workspace(spec, None, Order.CONDON, cutoff)
    return workspace.profile(workspace.condon.probabilities, kind="condon")


def aux_profile(
    spec: MoleculeSpec, axis: str, kappa: complex, cutoff: int, order: Order | str | None = None
) -> SpectralProfile:
    """Unnormalised ``f_m(kappa) = |<m|U_Dok exp(kappa mu)|0>|^2``."""
    workspace = _Workspace(spec, [axis], order, cutoff)
    if complex(kappa) == 0:
        return workspace.profile(workspace.condon.probabilities, kind="aux", tau=0.0)
    device = workspace.device(axis, kappa)
    return workspace.profile(device.scale * device.probabilities, kind="aux")


def device_components(
    spec: MoleculeSpec, axes: Sequence[str] | None, tau: float, order: Order | str | None, cutoff: int
) -> list[DeviceComponent]:
    return _Workspace(spec, axes, order, cutoff).components(tau)


def noncondon_profile(
    spec: MoleculeSpec, axes: Sequence[str] | None, tau: float, order: Order | str | None, cutoff: int
) -> SpectralProfile:
    workspace = _Workspace(spec, axes, order, cutoff)
    return _noncondon(workspace, tau)


def exact_profile(
    spec: MoleculeSpec,
    axes: Sequence[str] | None,
    order: Order | str | None,
    cutoff: int,
    method: str = "auto",
) -> SpectralProfile:
    workspace = _Workspace(spec, axes, order, cutoff)
    return _exact(workspace, method)


def error_sweep(
    spec: MoleculeSpec,
    axes: Sequence[str] | None,
    order: Order | str | None,
    taus: Sequence[float],
    cutoff: int,
    method: str = "auto",
) -> ErrorSweep:
    if len(taus) < 3:
        raise InputError("error sweep needs at least three tau values")
    if any(tau <= 0.0 for tau in taus):
        raise InputError("tau values must be positive")
    workspace = _Workspace(spec, axes, order, cutoff)
    exact = _exact(workspace, method).probabilities
    ordered = np.array(sorted((float(tau) for tau in taus), reverse=True))
    errors = np.array([float(np.abs(exact - _noncondon(workspace, tau).probabilities).sum()) for tau in ordered])

    slope: float | None = None
    if np.all(errors > SLOPE_FLOOR):
        # against log(1/tau): an O(tau^2) remainder reads as slope -2
        slope = float(np.polyfit(np.log(1.0 / ordered), np.log(errors), 1)[0])
    logger.info("error sweep for %s: errors %s, slope %s", spec.name, errors.tolist(), slope)
    return ErrorSweep(taus=ordered, errors=errors, slope=slope)


def broaden(
    profile: SpectralProfile, width_cm1: float, grid_step: float = 1.0, mode: str = "sigma"
) -> BroadenedSpectrum:
    if width_cm1 <= 0.0:
        raise InputError("broadening width must be positive")
    if grid_step <= 0.0:
        raise InputError("grid step must be positive")
    if mode not in BROADENING_MODES:
        raise InputError(f"unknown broadening mode: {mode} (expected sigma or fwhm)")
    sigma = width_cm1 if mode == "sigma" else width_cm1 * FWHM_TO_SIGMA

    frequencies, probabilities = profile.lines()
    negative = probabilities < 0.0
    clamped_mass = float(-probabilities[negative].sum())
    if clamped_mass > 0.0:
        logger.warning("clamped %.3e of negative probability before broadening", clamped_mass)
    probabilities = np.where(negative, 0.0, probabilities)

    start = float(frequencies.min()) - 4.0 * sigma
    stop = float(frequencies.max()) + 4.0 * sigma
    grid = start + grid_step * np.arange(int(math.floor((stop - start) / grid_step)) + 1)
    intensity = np.zeros_like(grid)
    reach = BROADENING_WINDOW * sigma
    for centre, weight in zip(frequencies, probabilities):
        if weight == 0.0:
            continue
        low = int(np.searchsorted(grid, centre - reach))
        high = int(np.searchsorted(grid, centre + reach, side="right"))
        intensity[low:high] += weight * np.exp(-((grid[low:high] - centre) ** 2) / (2.0 * sigma**2))
    return BroadenedSpectrum(
        grid=grid, intensity=intensity, width=width_cm1, sigma=sigma, mode=mode, clamped_mass=clamped_mass
    )


def sample_profile(components: Sequence[DeviceComponent], shots: int, seed: int) -> SampleResult:
    """Estimate the device combination from ``shots`` detector patterns per device.

    Every device draws from its own child stream of ``SeedSequence(seed)``;
    patterns above the cutoff land in an overflow outcome that is discarded.
    """
    if shots < 1:
        raise InputError("shots must be at least 1")
    streams = np.random.SeedSequence(seed).spawn(len(components))
    noiseless = np.zeros_like(components[0].probabilities)
    empirical = np.zeros_like(components[0].probabilities)
    counts: list[np.ndarray] = []
    for component, stream in zip(components, streams):
        rng = np.random.default_rng(stream)
        outcome = np.clip(component.probabilities, 0.0, None)
        overflow = component.overflow
        if overflow > 1e-3:
            logger.warning("device kappa=%s loses %.3e of its mass above the cutoff", component.kappa, overflow)
        distribution = np.append(outcome, overflow)
        distribution = distribution / distribution.sum()
        draw = rng.multinomial(shots, distribution)
        counts.append(draw)
        factor = component.weight * component.scale
        noiseless = noiseless + factor * component.probabilities
        empirical = empirical + factor * draw[:-1] / shots
    tv_distance = 0.5 * float(np.abs(empirical - noiseless).sum())
    return SampleResult(
        probabilities=empirical,
        noiseless=noiseless,
        tv_distance=tv_distance,
        counts=tuple(counts),
        shots=int(shots),
        seed=int(seed),
    )


def sampled_profile(
    spec: MoleculeSpec,
    axes: Sequence[str] | None,
    tau: float,
    order: Order | str | None,
    cutoff: int,
    shots: int,
    seed: int,
) -> tuple[SpectralProfile, SampleResult]:
    workspace = _Workspace(spec, axes, order, cutoff)
    result = sample_profile(workspace.components(tau), shots, seed)
    return workspace.profile(result.probabilities, kind="sampled", tau=tau), result


def total_mass(profile: SpectralProfile) -> float:
    return float(np.sum(profile.probabilities))


def device_settings(
    spec: MoleculeSpec, axis: str | None, kappa: complex, order: Order | str | None = None
) -> DeviceSetting:
    """Squeezers, interferometer and input displacement of one device."""
    workspace = _Workspace(spec, [axis] if axis else None, order, 0)
    return _setting(workspace, axis, complex(kappa), 1.0)


def device_plan(
    spec: MoleculeSpec, axes: Sequence[str] | None, tau: float, order: Order | str | None = None
) -> list[DeviceSetting]:
    """Settings and signed weights of every device in the tau combination."""
    workspace = _Workspace(spec, axes, order, 0)
    if tau <= 0.0:
        raise InputError(f"tau must be positive, got {tau}")
    base = 1.0 / (tau**2 * workspace.normalization.value)
    plan = [_setting(workspace, None, 0j, -len(workspace.axes) * base)]
    for axis in workspace.axes:
        for kappa, weight in ((1j * tau, 0.5 * base), (complex(tau), 0.25 * base), (complex(-tau), 0.25 * base)):
            plan.append(_setting(workspace, axis, kappa, weight))
    return plan


def _setting(workspace: _Workspace, axis: str | None, kappa: complex, weight: float) -> DeviceSetting:
    if axis is None or kappa == 0:
        form = workspace.condon.form
        scale = 1.0
        axis = None
    else:
        factors, _, form = workspace.chain(axis, kappa)
        scale = factors.scale
    return DeviceSetting(
        axis=axis,
        kappa=kappa,
        weight=weight,
        scale=scale,
        squeezing=form.sigma,
        interferometer=form.V,
        displacement=form.input_displacement,
    )


def _noncondon(workspace: _Workspace, tau: float) -> SpectralProfile:
    probabilities = workspace.combine(workspace.components(tau))
    total = float(probabilities.sum())
    if total > 1.0 + MASS_EXCESS_LIMIT:
        raise MassExcessError(
            f"tau={tau:g} combination carries total mass {total:.6f}, more than {MASS_EXCESS_LIMIT:g} above one;"
            " choose a smaller tau"
        )
    if total > 1.0 + MASS_WARN_EXCESS:
        logger.warning("tau=%g combination carries total mass %.8f above one", tau, total)
    return workspace.profile(probabilities, kind="noncondon", tau=float(tau))


def _exact(workspace: _Workspace, method: str) -> SpectralProfile:
    total = np.zeros(workspace.patterns.shape[0])
    for axis in workspace.axes:
        total = total + _probabilities(workspace.exact_amplitudes(axis, method))
    return workspace.profile(total / workspace.normalization.value, kind="exact")


def _probabilities(amplitudes: np.ndarray) -> np.ndarray:
    flat = amplitudes.reshape(-1)[enumeration_order(amplitudes.shape)]
    return np.abs(flat) ** 2
