from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np


AXES: tuple[str, ...] = ("x", "y", "z")
LENGTH_UNITS: tuple[str, ...] = ("bohr", "angstrom")


class VibronicError(Exception):
    """Base error for every failure raised by vibronic_gbs."""


class InputError(VibronicError):
    """Raised when user-supplied data is malformed or inconsistent."""


class NumericalError(VibronicError):
    """Raised when a computation cannot reach the required accuracy."""


class DimensionMismatchError(InputError):
    """Raised when array shapes disagree with the mode count."""


class ValidationError(InputError):
    """Raised when a molecule description violates one or more rules."""

    def __init__(self, issues: list[str]) -> None:
        self.issues = list(issues)
        super().__init__("; ".join(self.issues) if self.issues else "invalid molecule")


class Order(str, Enum):
    """Truncation order of the transition dipole expansion."""

    CONDON = "condon"
    HT1 = "ht1"
    HT2 = "ht2"

    @property
    def rank(self) -> int:
        return {"condon": 0, "ht1": 1, "ht2": 2}[self.value]

    @classmethod
    def parse(cls, value: "Order | str") -> "Order":
        if isinstance(value, Order):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as exc:
            choices = ", ".join(item.value for item in cls)
            raise InputError(f"unknown order: {value} (expected one of {choices})") from exc


@dataclass(frozen=True, eq=False)
class TdmExpansion:
    """Transition dipole expansion for one axis in spectroscopic units."""

    mu0: float = 0.0
    mu1: np.ndarray | None = None
    mu2: np.ndarray | None = None

    @property
    def highest_order(self) -> Order:
        if self.mu2 is not None:
            return Order.HT2
        if self.mu1 is not None:
            return Order.HT1
        return Order.CONDON

    def to_mapping(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"mu0": float(self.mu0)}
        if self.mu1 is not None:
            payload["mu1"] = [float(value) for value in self.mu1]
        if self.mu2 is not None:
            payload["mu2"] = [[float(value) for value in row] for row in self.mu2]
        return payload


@dataclass(frozen=True, eq=False)
class MoleculeSpec:
    """Harmonic model of one electronic transition.

    Frequencies are wavenumbers in cm^-1. ``displacement_d`` is expressed in
    u^1/2 times ``length_unit``; ``delta`` is already dimensionless. Exactly
    one of the two is expected to be present.
    """

    name: str
    omega_initial: np.ndarray
    omega_final: np.ndarray
    duschinsky: np.ndarray
    tdm: dict[str, TdmExpansion] = field(default_factory=dict)
    length_unit: str | None = None
    displacement_d: np.ndarray | None = None
    delta: np.ndarray | None = None
    source: str | None = None

    @property
    def modes(self) -> int:
        return int(self.omega_initial.shape[0])

    @property
    def axes(self) -> tuple[str, ...]:
        return tuple(axis for axis in AXES if axis in self.tdm)

    @property
    def highest_order(self) -> Order:
        ranks = [expansion.highest_order for expansion in self.tdm.values()]
        return max(ranks, key=lambda order: order.rank, default=Order.CONDON)

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "MoleculeSpec":
        spec, issues = cls.parse_mapping(payload)
        if issues:
            raise ValidationError(issues)
        assert spec is not None
        return spec

    @classmethod
    def parse_mapping(cls, payload: Mapping[str, Any]) -> tuple[MoleculeSpec | None, list[str]]:
        """Build what can be built and return it with every shape or type issue found.

        The molecule is ``None`` only when a frequency list or the Duschinsky
        matrix is unusable.
        """
        issues: list[str] = []

        def vector(key: str, source: Mapping[str, Any], label: str) -> np.ndarray | None:
            if key not in source or source[key] is None:
                return None
            try:
                value = np.asarray(source[key], dtype=float)
            except (TypeError, ValueError):
                issues.append(f"{label}: expected a list of numbers")
                return None
            if value.ndim != 1:
                issues.append(f"{label}: expected a flat list of numbers")
                return None
            return value

        def matrix(key: str, source: Mapping[str, Any], label: str) -> np.ndarray | None:
            if key not in source or source[key] is None:
                return None
            try:
                value = np.asarray(source[key], dtype=float)
            except (TypeError, ValueError):
                issues.append(f"{label}: expected a list of rows of numbers")
                return None
            if value.ndim != 2:
                issues.append(f"{label}: expected a list of rows of equal length")
                return None
            return value

        name = payload.get("name")
        if not isinstance(name, str) or not name.strip():
            issues.append("name: a non-empty string is required")
            name = ""

        omega_initial = vector("omega_initial", payload, "omega_initial")
        omega_final = vector("omega_final", payload, "omega_final")
        duschinsky = matrix("duschinsky", payload, "duschinsky")
        for key, value in (("omega_initial", omega_initial), ("omega_final", omega_final), ("duschinsky", duschinsky)):
            if value is None and payload.get(key) is None:
                issues.append(f"{key}: required")

        tdm: dict[str, TdmExpansion] = {}
        raw_tdm = payload.get("tdm")
        if not isinstance(raw_tdm, Mapping) or not raw_tdm:
            issues.append("tdm: at least one axis (x, y or z) is required")
        else:
            for axis, raw_axis in raw_tdm.items():
                label = f"tdm.{axis}"
                if not isinstance(raw_axis, Mapping):
                    issues.append(f"{label}: expected a mapping with mu0, mu1, mu2")
                    continue
                mu0 = raw_axis.get("mu0", 0.0)
                if isinstance(mu0, bool) or not isinstance(mu0, (int, float)):
                    issues.append(f"{label}.mu0: expected a number")
                    mu0 = 0.0
                tdm[str(axis)] = TdmExpansion(
                    mu0=float(mu0),
                    mu1=vector("mu1", raw_axis, f"{label}.mu1"),
                    mu2=matrix("mu2", raw_axis, f"{label}.mu2"),
                )

        length_unit = payload.get("length_unit")
        if length_unit is not None:
            length_unit = str(length_unit).lower()

        displacement_d = vector("displacement_d", payload, "displacement_d")
        delta = vector("delta", payload, "delta")
        source = payload.get("source")

        if omega_initial is None or omega_final is None or duschinsky is None:
            return None, issues
        spec = cls(
            name=str(name),
            omega_initial=omega_initial,
            omega_final=omega_final,
            duschinsky=duschinsky,
            tdm=tdm,
            length_unit=length_unit,
            displacement_d=displacement_d,
            delta=delta,
            source=str(source) if source is not None else None,
        )
        return spec, issues

    def to_mapping(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"name": self.name, "modes": self.modes}
        if self.source is not None:
            payload["source"] = self.source
        if self.length_unit is not None:
            payload["length_unit"] = self.length_unit
        payload["omega_initial"] = [float(value) for value in self.omega_initial]
        payload["omega_final"] = [float(value) for value in self.omega_final]
        payload["duschinsky"] = [[float(value) for value in row] for row in self.duschinsky]
        if self.displacement_d is not None:
            payload["displacement_d"] = [float(value) for value in self.displacement_d]
        if self.delta is not None:
            payload["delta"] = [float(value) for value in self.delta]
        payload["tdm"] = {axis: self.tdm[axis].to_mapping() for axis in self.axes}
        return payload
