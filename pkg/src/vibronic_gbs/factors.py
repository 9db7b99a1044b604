"""Gaussian factorisation of exp(kappa * mu) acting on the vacuum."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .models import NumericalError, Order
from .molecule import DimensionlessTdm, ht_rotation

logger = logging.getLogger(__name__)

POLE_TOL = 1e-12
NEAR_POLE_WARN = 0.9


class PoleError(NumericalError):
    """Raised when 1 - kappa * d vanishes."""


class DomainError(NumericalError):
    """Raised when the single-mode squeeze parameter leaves |t| < 1."""


@dataclass(frozen=True, eq=False)
class HtModeFactors:
    """``exp(kappa mu)|0> = exp(kappa mu0) R(U_ht^T) prod_j C_j S(xi_j) D(alpha_j) |0>``."""

    kappa: complex
    C: np.ndarray
    xi: np.ndarray
    alpha: np.ndarray
    U_ht: np.ndarray
    mu0: float

    @property
    def scale(self) -> float:
        """Squared norm carried outside the Gaussian unitary."""
        return float(math.exp(2.0 * self.kappa.real * self.mu0) * np.prod(np.abs(self.C) ** 2))


@dataclass(frozen=True)
class NormalizationConstant:
    value: float
    order: Order
    per_axis: dict[str, float] = field(default_factory=dict)


def single_mode_factors(kappa: complex, b: float, d: float) -> tuple[complex, complex, complex]:
    """Return ``(C, xi, alpha)`` with ``exp(kappa (b q + d q^2))|0> = C S(xi) D(alpha)|0>``.

    ``t = kappa d / (1 - kappa d)`` fixes the squeezing through
    ``xi = artanh|t| exp(i arg t)``; the displacement and prefactor follow from
    matching the normal-ordered (Bargmann) form of both sides exactly.
    """
    kappa = complex(kappa)
    denominator = 1.0 - kappa * d
    if abs(denominator) <= POLE_TOL:
        raise PoleError(f"kappa * d = {kappa * d} sits on the pole at 1")
    t = kappa * d / denominator
    if abs(t) >= 1.0:
        raise DomainError(f"|kappa d / (1 - kappa d)| = {abs(t):.6g} is outside the unit disc")
    if abs(t) > NEAR_POLE_WARN:
        logger.warning("squeeze parameter |t| = %.4f is close to the domain edge", abs(t))

    r = math.atanh(abs(t))
    theta = cmath.phase(t) if t != 0 else 0.0
    phase = cmath.exp(1j * theta)
    xi = r * phase

    beta = kappa * b / math.sqrt(2.0)
    alpha = beta * (math.cosh(r) + phase * math.sinh(r))
    C = (
        math.sqrt(math.cosh(r))
        / cmath.sqrt(denominator)
        * cmath.exp(beta**2 / (2.0 * denominator) + 0.5 * t.conjugate() * alpha**2 + 0.5 * abs(alpha) ** 2)
    )
    return complex(C), complex(xi), complex(alpha)


def ht_mode_factors(tdm: DimensionlessTdm, kappa: complex) -> HtModeFactors:
    kappa = complex(kappa)
    U, D = ht_rotation(tdm.Lam)
    b = U @ tdm.lam
    modes = tdm.modes
    C = np.ones(modes, dtype=complex)
    xi = np.zeros(modes, dtype=complex)
    alpha = np.zeros(modes, dtype=complex)
    if kappa != 0:
        for j in range(modes):
            C[j], xi[j], alpha[j] = single_mode_factors(kappa, float(b[j]), float(D[j]))
    return HtModeFactors(kappa=kappa, C=C, xi=xi, alpha=alpha, U_ht=U, mu0=tdm.mu0)


def normalization_constant(
    tdms: DimensionlessTdm | Sequence[DimensionlessTdm], order: Order | str | None = None
) -> NormalizationConstant:
    """Return ``sum_r <0|mu_r^2|0>`` over the given axes at the requested order."""
    if isinstance(tdms, DimensionlessTdm):
        tdms = [tdms]
    if order is None:
        order = max((tdm.order for tdm in tdms), key=lambda item: item.rank, default=Order.CONDON)
    order = Order.parse(order)

    per_axis: dict[str, float] = {}
    for tdm in tdms:
        truncated = tdm.truncated(order)
        per_axis[tdm.axis] = _axis_norm(truncated.mu0, truncated.lam, truncated.Lam)
    value = float(sum(per_axis.values()))
    if value <= 0.0:
        raise NumericalError("transition dipole vanishes identically; the profile cannot be normalised")
    return NormalizationConstant(value=value, order=order, per_axis=per_axis)


def _axis_norm(mu0: float, lam: np.ndarray, Lam: np.ndarray) -> float:
    diagonal = np.diag(Lam)
    off_diagonal = Lam - np.diag(diagonal)
    first = mu0**2 + 0.5 * float(lam @ lam)
    second = (
        mu0 * float(diagonal.sum())
        + 0.25 * (float(diagonal.sum()) ** 2 - float(diagonal @ diagonal))
        + 0.5 * float(np.sum(off_diagonal**2))
        + 0.75 * float(diagonal @ diagonal)
    )
    return float(first + second)
