"""Multimode Gaussian unitaries as Bogoliubov transforms.

A transform ``(X, Y, z)`` describes ``a'^dagger = X a + Y a^dagger + z``. The
Heisenberg action of the unitary O it represents is
``O^dagger a O = conj(Y) a + conj(X) a^dagger + conj(z)``.

Operator conventions used throughout the package::

    R(U) = exp(a^dagger^T log(conj(U)) a)      R(U)^dagger a R(U) = conj(U) a
    S(xi) = exp((xi a^dagger^2 - conj(xi) a^2) / 2)
    D(alpha) = exp(alpha a^dagger - conj(alpha) a)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .models import DimensionMismatchError, NumericalError

logger = logging.getLogger(__name__)

CONSTRUCTION_TOL = 1e-10
ACCEPTANCE_TOL = 1e-8
SQUEEZE_FLOOR = 1e-12
_SINGULAR_CONDITION = 1e14
_TIE_DECIMALS = 9


class SingularDuschinskyError(NumericalError):
    """Raised when the Duschinsky matrix is numerically singular."""


class InvariantViolationError(NumericalError):
    """Raised when a transform violates the bosonic commutation invariants."""


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    X: np.ndarray
    Y: np.ndarray
    z: np.ndarray

    @property
    def modes(self) -> int:
        return int(self.z.shape[0])

    def heisenberg(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(P, Q, r)`` with ``O^dagger a O = P a + Q a^dagger + r``."""
        return self.Y.conj(), self.X.conj(), self.z.conj()

    @classmethod
    def from_heisenberg(cls, P: np.ndarray, Q: np.ndarray, r: np.ndarray) -> "BogoliubovTransform":
        return cls(X=np.conj(Q), Y=np.conj(P), z=np.conj(r))

    def invariant_residuals(self) -> tuple[float, float]:
        """Frobenius norms of ``Y Y^dagger - X X^dagger - I`` and of the antisymmetric part of ``X Y^T``."""
        unit = self.Y @ self.Y.conj().T - self.X @ self.X.conj().T - np.eye(self.modes)
        product = self.X @ self.Y.T
        return float(np.linalg.norm(unit)), float(np.linalg.norm(product - product.T))

    def check(self, tol: float = ACCEPTANCE_TOL) -> None:
        unit, symmetric = self.invariant_residuals()
        if unit > tol or symmetric > tol:
            raise InvariantViolationError(
                f"transform violates bosonic invariants (|YY'-XX'-I| = {unit:.3e}, |XY^T asym| = {symmetric:.3e})"
            )


@dataclass(frozen=True, eq=False)
class DoktorovFactors:
    """SVD factors ``J = U2 diag(l) U1`` and displacement ``beta = J^-1 delta / sqrt(2)``."""

    U2: np.ndarray
    l: np.ndarray
    U1: np.ndarray
    beta: np.ndarray

    @property
    def modes(self) -> int:
        return int(self.l.shape[0])

    @property
    def squeezing(self) -> np.ndarray:
        return np.log(self.l)

    def reconstruct(self) -> np.ndarray:
        return (self.U2 * self.l) @ self.U1

    def transform(self) -> BogoliubovTransform:
        return operator_product(
            [rotation(self.U2), squeezing(self.squeezing), rotation(self.U1), displacement(self.beta)]
        )


@dataclass(frozen=True, eq=False)
class BlochMessiahForm:
    """Canonical factorisation ``R(V) S(sigma) R(W)^dagger D(gamma)``."""

    V: np.ndarray
    sigma: np.ndarray
    W: np.ndarray
    gamma: np.ndarray

    @property
    def modes(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def input_displacement(self) -> np.ndarray:
        """Coherent amplitudes fed into the squeezers, ``W^T gamma``."""
        return self.W.T @ self.gamma

    def transform(self) -> BogoliubovTransform:
        X = (self.V * np.sinh(self.sigma)) @ self.W.T
        Y = (self.V * np.cosh(self.sigma)) @ self.W.conj().T
        z = Y @ self.gamma.conj() + X @ self.gamma
        return BogoliubovTransform(X=X, Y=Y, z=z)


def identity(modes: int) -> BogoliubovTransform:
    return BogoliubovTransform(
        X=np.zeros((modes, modes), dtype=complex),
        Y=np.eye(modes, dtype=complex),
        z=np.zeros(modes, dtype=complex),
    )


def rotation(U: np.ndarray) -> BogoliubovTransform:
    U = np.asarray(U, dtype=complex)
    _require_square(U, "rotation")
    modes = U.shape[0]
    return BogoliubovTransform(X=np.zeros((modes, modes), dtype=complex), Y=U.copy(), z=np.zeros(modes, dtype=complex))


def squeezing(xi: np.ndarray) -> BogoliubovTransform:
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    r = np.abs(xi)
    phase = np.exp(1j * np.angle(xi))
    return BogoliubovTransform(
        X=np.diag(np.conj(phase) * np.sinh(r)),
        Y=np.diag(np.cosh(r)).astype(complex),
        z=np.zeros(xi.shape[0], dtype=complex),
    )


def displacement(alpha: np.ndarray) -> BogoliubovTransform:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    modes = alpha.shape[0]
    return BogoliubovTransform(
        X=np.zeros((modes, modes), dtype=complex), Y=np.eye(modes, dtype=complex), z=np.conj(alpha)
    )


def operator_product(factors: Sequence[BogoliubovTransform]) -> BogoliubovTransform:
    """Transform of the operator product ``O_1 O_2 ... O_n`` (leftmost first)."""
    if not factors:
        raise DimensionMismatchError("operator_product needs at least one factor")
    modes = factors[0].modes
    P, Q, r = factors[0].heisenberg()
    for factor in factors[1:]:
        if factor.modes != modes:
            raise DimensionMismatchError(f"cannot compose a {factor.modes}-mode factor with {modes} modes")
        P2, Q2, r2 = factor.heisenberg()
        P, Q, r = P @ P2 + Q @ Q2.conj(), P @ Q2 + Q @ P2.conj(), P @ r2 + Q @ r2.conj() + r
    return BogoliubovTransform.from_heisenberg(P, Q, r)


def bogoliubov_from_duschinsky(J: np.ndarray, delta: np.ndarray) -> BogoliubovTransform:
    J = np.asarray(J, dtype=float)
    delta = np.asarray(delta, dtype=float)
    _require_square(J, "J")
    if delta.shape != (J.shape[0],):
        raise DimensionMismatchError(f"delta has {delta.shape} entries for a {J.shape[0]}-mode J")
    inverse_transpose = _inverse(J).T
    transform = BogoliubovTransform(
        X=(0.5 * (J - inverse_transpose)).astype(complex),
        Y=(0.5 * (J + inverse_transpose)).astype(complex),
        z=(delta / np.sqrt(2.0)).astype(complex),
    )
    transform.check(CONSTRUCTION_TOL * max(1.0, float(np.linalg.norm(J)) ** 2))
    return transform


def doktorov_factorize(J: np.ndarray, delta: np.ndarray) -> DoktorovFactors:
    J = np.asarray(J, dtype=float)
    delta = np.asarray(delta, dtype=float)
    _require_square(J, "J")
    if delta.shape != (J.shape[0],):
        raise DimensionMismatchError(f"delta has {delta.shape} entries for a {J.shape[0]}-mode J")
    inverse = _inverse(J)
    U2, l, U1 = np.linalg.svd(J)
    for k in range(l.shape[0]):
        column = U2[:, k]
        lead = column[np.flatnonzero(np.abs(column) > SQUEEZE_FLOOR)[0]]
        if lead < 0.0:
            U2[:, k] *= -1.0
            U1[k, :] *= -1.0
    beta = inverse @ delta / np.sqrt(2.0)
    return DoktorovFactors(U2=U2, l=l, U1=U1, beta=beta)


def compose_chain(
    dok: DoktorovFactors, U_ht: np.ndarray, xi: np.ndarray, alpha: np.ndarray
) -> BogoliubovTransform:
    """Transform of ``U_Dok R(U_ht^T) S(xi) D(alpha)``.

    For real xi and alpha this reduces to::

        X = U2 sinh(log L) U1 U^T cosh(Xi) + U2 cosh(log L) U1 U^T sinh(Xi)
        Y = U2 cosh(log L) U1 U^T cosh(Xi) + U2 sinh(log L) U1 U^T sinh(Xi)
        z = U2 L U1 U^T exp(Xi) alpha + U2 L U1 beta
    """
    modes = dok.modes
    U_ht = np.asarray(U_ht)
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if U_ht.shape != (modes, modes) or xi.shape != (modes,) or alpha.shape != (modes,):
        raise DimensionMismatchError(
            f"chain inputs U_ht {U_ht.shape}, xi {xi.shape}, alpha {alpha.shape} do not match {modes} modes"
        )
    return operator_product(
        [
            rotation(dok.U2),
            squeezing(dok.squeezing),
            rotation(dok.U1),
            displacement(dok.beta),
            rotation(U_ht.T),
            squeezing(xi),
            displacement(alpha),
        ]
    )


def bloch_messiah(transform: BogoliubovTransform) -> BlochMessiahForm:
    transform.check(ACCEPTANCE_TOL)
    X, Y, z = transform.X, transform.Y, transform.z
    modes = transform.modes

    V0, _, W0h = np.linalg.svd(Y)
    W0 = W0h.conj().T
    middle = V0.conj().T @ X @ W0.conj()
    middle = 0.5 * (middle + middle.T)
    E, s = _takagi(middle)

    V = V0 @ E
    W = W0 @ E
    sigma = np.arcsinh(s)

    for k in range(modes):
        column = V[:, k]
        lead = column[np.flatnonzero(np.abs(column) > SQUEEZE_FLOOR)[0]]
        if s[k] <= SQUEEZE_FLOOR:
            phase = np.conj(lead) / abs(lead)
        elif abs(lead.real) > SQUEEZE_FLOOR:
            phase = 1.0 if lead.real > 0.0 else -1.0
        else:
            phase = 1.0 if lead.imag > 0.0 else -1.0
        V[:, k] *= phase
        W[:, k] *= phase

    order = sorted(
        range(modes),
        key=lambda k: (
            -round(float(sigma[k]), _TIE_DECIMALS),
            tuple(np.round(V[:, k].real, _TIE_DECIMALS)),
            tuple(np.round(V[:, k].imag, _TIE_DECIMALS)),
        ),
    )
    V = V[:, order]
    W = W[:, order]
    sigma = sigma[order]

    gamma = Y.T @ z.conj() - X.conj().T @ z
    logger.debug("bloch-messiah squeezing %s", np.array2string(sigma, precision=6))
    return BlochMessiahForm(V=V, sigma=sigma, W=W, gamma=gamma)


def _takagi(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a complex symmetric ``M = E diag(s) E^T`` with E unitary and s >= 0 descending."""
    modes = M.shape[0]
    A, B = M.real, M.imag
    doubled = np.block([[A, B], [B, -A]])
    values, vectors = np.linalg.eigh(doubled)
    order = np.argsort(-values, kind="stable")[:modes]
    values = values[order]
    vectors = vectors[:, order]

    keep = values > SQUEEZE_FLOOR
    E_kept = vectors[:modes, keep] + 1j * vectors[modes:, keep]
    s_kept = values[keep]
    missing = modes - E_kept.shape[1]
    if missing:
        if E_kept.shape[1]:
            complement = null_space(E_kept.conj().T)
        else:
            complement = np.eye(modes, dtype=complex)
        E = np.hstack([E_kept, complement[:, :missing]])
        s = np.concatenate([s_kept, np.zeros(missing)])
    else:
        E, s = E_kept, s_kept
    return E, s


def _inverse(J: np.ndarray) -> np.ndarray:
    try:
        condition = float(np.linalg.cond(J))
        if not np.isfinite(condition) or condition > _SINGULAR_CONDITION:
            raise SingularDuschinskyError(f"Duschinsky matrix is singular (condition number {condition:.3e})")
        logger.debug("Duschinsky condition number %.3e", condition)
        return np.linalg.inv(J)
    except np.linalg.LinAlgError as exc:
        raise SingularDuschinskyError(str(exc)) from exc


def _require_square(matrix: np.ndarray, label: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"{label} must be square, got shape {matrix.shape}")
