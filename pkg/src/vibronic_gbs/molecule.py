"""Unit conversion and dimensionless oscillator quantities for a molecule."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants

from .models import (
    AXES,
    LENGTH_UNITS,
    DimensionMismatchError,
    InputError,
    MoleculeSpec,
    Order,
    TdmExpansion,
)

logger = logging.getLogger(__name__)

ORTHOGONALITY_WARN = 1e-6
ORTHOGONALITY_REJECT = 1e-3
SYMMETRY_TOL = 1e-12

_LENGTH_IN_METRES = {
    "bohr": constants.physical_constants["Bohr radius"][0],
    "angstrom": constants.angstrom,
}


class UnitError(InputError):
    """Raised when a length unit is missing or unknown."""


@dataclass(frozen=True, eq=False)
class DimensionlessTdm:
    """Transition dipole expansion in dimensionless normal coordinates.

    ``mu0 + lam . q + q^T Lam q`` with ``q = (a + a^dagger) / sqrt(2)``.
    """

    axis: str
    mu0: float
    lam: np.ndarray
    Lam: np.ndarray

    @property
    def modes(self) -> int:
        return int(self.lam.shape[0])

    @property
    def order(self) -> Order:
        if np.any(self.Lam):
            return Order.HT2
        if np.any(self.lam):
            return Order.HT1
        return Order.CONDON

    def truncated(self, order: Order | str) -> "DimensionlessTdm":
        order = Order.parse(order)
        lam = self.lam if order.rank >= 1 else np.zeros_like(self.lam)
        Lam = self.Lam if order.rank >= 2 else np.zeros_like(self.Lam)
        return replace(self, lam=lam, Lam=Lam)


def oscillator_length(wavenumbers: np.ndarray, length_unit: str) -> np.ndarray:
    """Return sqrt(hbar / omega) in u^1/2 * length_unit for wavenumbers in cm^-1."""
    if length_unit not in _LENGTH_IN_METRES:
        raise UnitError(f"unknown length unit: {length_unit} (expected one of {', '.join(LENGTH_UNITS)})")
    omega = 2.0 * np.pi * constants.c * 100.0 * np.asarray(wavenumbers, dtype=float)
    length = np.sqrt(constants.hbar / omega) / np.sqrt(constants.atomic_mass)
    return length / _LENGTH_IN_METRES[length_unit]


def validate_molecule(spec: MoleculeSpec) -> tuple[list[str], list[str]]:
    """Return ``(issues, warnings)``; an empty issue list means the molecule is usable."""
    issues: list[str] = []
    warnings: list[str] = []
    modes = spec.modes

    for label, values in (("omega_initial", spec.omega_initial), ("omega_final", spec.omega_final)):
        if values.shape != (modes,):
            issues.append(f"{label}: expected {modes} entries, got {values.shape[0]}")
        elif not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            bad = [index for index, value in enumerate(values) if not np.isfinite(value) or value <= 0.0]
            issues.append(f"{label}: frequencies must be finite and strictly positive (entries {bad})")

    if spec.duschinsky.shape != (modes, modes):
        issues.append(f"duschinsky: expected a {modes}x{modes} matrix, got {spec.duschinsky.shape}")
    elif not np.all(np.isfinite(spec.duschinsky)):
        issues.append("duschinsky: entries must be finite")
    else:
        error = float(np.max(np.abs(spec.duschinsky.T @ spec.duschinsky - np.eye(modes))))
        if error > ORTHOGONALITY_REJECT:
            issues.append(f"duschinsky: not orthogonal (max |U^T U - I| = {error:.3e})")
        elif error > ORTHOGONALITY_WARN:
            warnings.append(f"duschinsky: orthogonal only to {error:.3e} (quoted precision)")

    present = [name for name, value in (("displacement_d", spec.displacement_d), ("delta", spec.delta)) if value is not None]
    if len(present) != 1:
        issues.append("exactly one of displacement_d and delta is required, got " + (", ".join(present) or "neither"))
    for name in present:
        values = spec.displacement_d if name == "displacement_d" else spec.delta
        assert values is not None
        if values.shape != (modes,):
            issues.append(f"{name}: expected {modes} entries, got {values.shape[0]}")

    needs_unit = spec.displacement_d is not None or any(
        expansion.mu1 is not None or expansion.mu2 is not None for expansion in spec.tdm.values()
    )
    if spec.length_unit is None:
        if needs_unit:
            issues.append("length_unit: required when displacement_d, mu1 or mu2 is given")
    elif spec.length_unit not in LENGTH_UNITS:
        issues.append(f"length_unit: unknown unit {spec.length_unit!r} (expected one of {', '.join(LENGTH_UNITS)})")

    if not spec.tdm:
        issues.append("tdm: at least one axis (x, y or z) is required")
    for axis, expansion in spec.tdm.items():
        if axis not in AXES:
            issues.append(f"tdm.{axis}: unknown axis (expected x, y or z)")
            continue
        if not np.isfinite(expansion.mu0):
            issues.append(f"tdm.{axis}.mu0: must be finite")
        if expansion.mu1 is not None:
            if expansion.mu1.shape != (modes,):
                issues.append(f"tdm.{axis}.mu1: expected {modes} entries, got {expansion.mu1.shape[0]}")
            elif not np.all(np.isfinite(expansion.mu1)):
                issues.append(f"tdm.{axis}.mu1: entries must be finite")
        if expansion.mu2 is not None:
            mu2 = expansion.mu2
            if mu2.shape != (modes, modes):
                issues.append(f"tdm.{axis}.mu2: expected a {modes}x{modes} matrix, got {mu2.shape}")
            elif not np.all(np.isfinite(mu2)):
                issues.append(f"tdm.{axis}.mu2: entries must be finite")
            else:
                rows, cols = np.nonzero(np.abs(mu2 - mu2.T) > SYMMETRY_TOL)
                for row, col in zip(rows, cols):
                    if row < col:
                        issues.append(
                            f"tdm.{axis}.mu2: not symmetric at ({row + 1}, {col + 1}): "
                            f"{mu2[row, col]!r} != {mu2[col, row]!r}"
                        )
    return issues, warnings


def build_bogoliubov_inputs(spec: MoleculeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return the Duschinsky matrix J and the dimensionless displacement delta."""
    root_initial = np.sqrt(spec.omega_initial)
    root_final = np.sqrt(spec.omega_final)
    J = (root_final[:, None] * spec.duschinsky) / root_initial[None, :]

    if spec.delta is not None:
        delta = np.asarray(spec.delta, dtype=float)
    elif spec.displacement_d is not None:
        if spec.length_unit is None:
            raise UnitError("length_unit is required to convert displacement_d")
        delta = spec.displacement_d / oscillator_length(spec.omega_final, spec.length_unit)
    else:
        delta = np.zeros(spec.modes)
    if delta.shape != (spec.modes,):
        raise DimensionMismatchError(f"displacement has {delta.shape[0]} entries for {spec.modes} modes")
    return J, delta


def dimensionless_tdm(spec: MoleculeSpec, axis: str) -> DimensionlessTdm:
    if axis not in spec.tdm:
        raise InputError(f"axis {axis!r} is not present in molecule {spec.name}")
    expansion = spec.tdm[axis]
    modes = spec.modes
    lam = np.zeros(modes)
    Lam = np.zeros((modes, modes))
    if expansion.mu1 is not None or expansion.mu2 is not None:
        if spec.length_unit is None:
            raise UnitError("length_unit is required to convert mu1 and mu2")
        scale = oscillator_length(spec.omega_initial, spec.length_unit)
        if expansion.mu1 is not None:
            lam = scale * expansion.mu1
        if expansion.mu2 is not None:
            Lam = 0.5 * expansion.mu2 * np.outer(scale, scale)
            Lam = 0.5 * (Lam + Lam.T)
    return DimensionlessTdm(axis=axis, mu0=float(expansion.mu0), lam=lam, Lam=Lam)


def expansion_from_dimensionless(tdm: DimensionlessTdm, omega_initial: np.ndarray, length_unit: str) -> TdmExpansion:
    """Inverse of :func:`dimensionless_tdm` for one axis."""
    scale = oscillator_length(omega_initial, length_unit)
    mu1 = tdm.lam / scale if np.any(tdm.lam) else None
    mu2 = 2.0 * tdm.Lam / np.outer(scale, scale) if np.any(tdm.Lam) else None
    return TdmExpansion(mu0=tdm.mu0, mu1=mu1, mu2=mu2)


def ht_rotation(Lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalise ``Lam = U^T diag(D) U`` with D descending and fixed eigenvector signs."""
    Lam = np.asarray(Lam, dtype=float)
    values, vectors = np.linalg.eigh(0.5 * (Lam + Lam.T))
    order = np.argsort(-values, kind="stable")
    D = values[order]
    U = vectors[:, order].T.copy()
    for row in U:
        significant = np.flatnonzero(np.abs(row) > SYMMETRY_TOL)
        if significant.size and row[significant[0]] < 0.0:
            row *= -1.0
    return U, D


def log_validation(spec: MoleculeSpec, warnings: list[str]) -> None:
    for message in warnings:
        logger.warning("%s: %s", spec.name, message)
