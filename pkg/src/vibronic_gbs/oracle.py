"""Independent Fock-space oracle built from truncated ladder operators.

Operators are applied right to left to the vacuum: exponentials through
``expm_multiply`` of their sparse generators, the dipole polynomial directly.
The workspace holds every pattern with at most ``modes * cutoff + padding``
photons in total, so passive rotations never leave it. The padding is sized
from the squeezing and displacement of the chain and widened until the
requested amplitudes stop changing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import logm
from scipy.sparse.linalg import expm_multiply

from .fock import CutoffExceededError
from .gauss import BlochMessiahForm, DoktorovFactors
from .models import NumericalError

logger = logging.getLogger(__name__)

MIN_PADDING = 16
MAX_WORKSPACE_DIM = 2_000_000
CONVERGENCE_TOL = 1e-9
# amplitude allowed at the workspace boundary
TAIL_AMPLITUDE = 1e-8
_MAX_TANH = 1.0 - 1e-12
_MAX_GROWTH = 50.0


class NonConvergenceError(NumericalError):
    """Raised when widening the padding does not stabilise the requested amplitudes."""


@lru_cache(maxsize=32)
def _fock_basis(total: int, modes: int) -> np.ndarray:
    """Patterns with at most ``total`` photons, lexicographic in the mode index."""
    if modes == 1:
        basis = np.arange(total + 1, dtype=np.int64).reshape(-1, 1)
    else:
        blocks = []
        for first in range(total + 1):
            rest = _fock_basis(total - first, modes - 1)
            blocks.append(np.column_stack([np.full(rest.shape[0], first, dtype=np.int64), rest]))
        basis = np.vstack(blocks)
    basis.setflags(write=False)
    return basis


def workspace_dim(modes: int, cutoff: int, padding: int) -> int:
    return math.comb(modes * cutoff + padding + modes, modes)


class LadderSpace:
    """Sparse annihilation operators on all patterns with at most ``total`` photons."""

    def __init__(self, total: int, modes: int) -> None:
        self.total = total
        self.modes = modes
        self.patterns = _fock_basis(total, modes)
        self.dim = int(self.patterns.shape[0])
        strides = (total + 1) ** np.arange(modes - 1, -1, -1, dtype=np.int64)
        codes = self.patterns @ strides
        lowering = []
        for j in range(modes):
            source = np.flatnonzero(self.patterns[:, j] > 0)
            target = np.searchsorted(codes, codes[source] - strides[j])
            values = np.sqrt(self.patterns[source, j].astype(float)).astype(complex)
            lowering.append(sp.csr_matrix((values, (target, source)), shape=(self.dim, self.dim)))
        self.lowering = tuple(lowering)
        self.raising = tuple(operator.conj().T.tocsr() for operator in lowering)
        self.identity = sp.identity(self.dim, dtype=complex, format="csr")

    def quadrature(self, j: int) -> sp.csr_matrix:
        return (self.lowering[j] + self.raising[j]) / math.sqrt(2.0)

    def vacuum(self) -> np.ndarray:
        state = np.zeros(self.dim, dtype=complex)
        state[0] = 1.0
        return state

    def window(self, state: np.ndarray, cutoff: int) -> np.ndarray:
        """Amplitude tensor over patterns with at most ``cutoff`` photons per mode."""
        inside = np.all(self.patterns <= cutoff, axis=1)
        amplitudes = np.zeros((cutoff + 1,) * self.modes, dtype=complex)
        amplitudes[tuple(self.patterns[inside].T)] = state[inside]
        return amplitudes


@lru_cache(maxsize=4)
def ladder_space(total: int, modes: int) -> LadderSpace:
    return LadderSpace(total, modes)


class OperatorSpec(Protocol):
    unitary: bool

    @property
    def squeezing_scale(self) -> float: ...

    @property
    def displacement_scale(self) -> float: ...

    def apply(self, space: LadderSpace, state: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class Displacement:
    alpha: np.ndarray
    unitary: bool = True

    @property
    def squeezing_scale(self) -> float:
        return 0.0

    @property
    def displacement_scale(self) -> float:
        return float(np.linalg.norm(self.alpha))

    def apply(self, space: LadderSpace, state: np.ndarray) -> np.ndarray:
        alpha = np.asarray(self.alpha, dtype=complex)
        if not np.any(alpha):
            return state
        generator = sum(
            alpha[j] * space.raising[j] - np.conj(alpha[j]) * space.lowering[j] for j in range(space.modes)
        )
        return expm_multiply(generator, state)


@dataclass(frozen=True, eq=False)
class Squeezing:
    xi: np.ndarray
    unitary: bool = True

    @property
    def squeezing_scale(self) -> float:
        return float(np.max(np.abs(self.xi), initial=0.0))

    @property
    def displacement_scale(self) -> float:
        return 0.0

    def apply(self, space: LadderSpace, state: np.ndarray) -> np.ndarray:
        xi = np.asarray(self.xi, dtype=complex)
        if not np.any(xi):
            return state
        generator = sum(
            0.5 * (xi[j] * space.raising[j] @ space.raising[j] - np.conj(xi[j]) * space.lowering[j] @ space.lowering[j])
            for j in range(space.modes)
        )
        return expm_multiply(generator, state)


@dataclass(frozen=True, eq=False)
class Rotation:
    matrix: np.ndarray
    unitary: bool = True

    @property
    def squeezing_scale(self) -> float:
        return 0.0

    @property
    def displacement_scale(self) -> float:
        return 0.0

    def apply(self, space: LadderSpace, state: np.ndarray) -> np.ndarray:
        U = np.asarray(self.matrix, dtype=complex)
        if np.allclose(U, np.eye(space.modes), rtol=0.0, atol=1e-15):
            return state
        log = logm(U.conj())
        generator = sum(
            log[j, k] * space.raising[j] @ space.lowering[k]
            for j in range(space.modes)
            for k in range(space.modes)
            if log[j, k] != 0
        )
        return expm_multiply(generator, state)


def _dipole_operator(space: LadderSpace, mu0: float, lam: np.ndarray, Lam: np.ndarray) -> sp.csr_matrix:
    operator = mu0 * space.identity
    quadratures = [space.quadrature(j) for j in range(space.modes)]
    for j in range(space.modes):
        if lam[j] != 0:
            operator = operator + lam[j] * quadratures[j]
        for k in range(space.modes):
            if Lam[j, k] != 0:
                operator = operator + Lam[j, k] * (quadratures[j] @ quadratures[k])
    return operator.tocsr()


@dataclass(frozen=True, eq=False)
class DipolePolynomial:
    """``mu0 + lam . q + q^T Lam q`` applied directly."""

    mu0: float
    lam: np.ndarray
    Lam: np.ndarray
    unitary: bool = False

    @property
    def squeezing_scale(self) -> float:
        return 0.0

    @property
    def displacement_scale(self) -> float:
        return 0.0

    def apply(self, space: LadderSpace, state: np.ndarray) -> np.ndarray:
        return _dipole_operator(space, self.mu0, np.asarray(self.lam), np.asarray(self.Lam)) @ state


@dataclass(frozen=True, eq=False)
class DipoleExponential:
    """``exp(kappa * mu)`` for the dipole polynomial mu."""

    kappa: complex
    mu0: float
    lam: np.ndarray
    Lam: np.ndarray
    unitary: bool = False

    @property
    def _curvature(self) -> float:
        Lam = np.atleast_2d(np.asarray(self.Lam, dtype=float))
        return float(abs(self.kappa) * np.max(np.abs(np.linalg.eigvalsh(Lam)), initial=0.0))

    @property
    def squeezing_scale(self) -> float:
        curvature = self._curvature
        if curvature >= 0.5:
            return math.inf
        return math.atanh(curvature / (1.0 - curvature))

    @property
    def displacement_scale(self) -> float:
        curvature = min(self._curvature, 0.5)
        return float(abs(self.kappa) * np.linalg.norm(self.lam) / (math.sqrt(2.0) * (1.0 - curvature)))

    def apply(self, space: LadderSpace, state: np.ndarray) -> np.ndarray:
        generator = self.kappa * _dipole_operator(space, self.mu0, np.asarray(self.lam), np.asarray(self.Lam))
        return expm_multiply(generator, state)


@dataclass(frozen=True, eq=False)
class TruncatedState:
    cutoff: tuple[int, ...]
    amplitudes: np.ndarray
    padding: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, m: Sequence[int]) -> complex:
        return complex(self.amplitudes[tuple(int(value) for value in m)])


def doktorov_operators(dok: DoktorovFactors) -> list[OperatorSpec]:
    """``U_Dok = R(U2) S(log l) R(U1) D(beta)`` in operator-product order."""
    return [Rotation(dok.U2), Squeezing(dok.squeezing), Rotation(dok.U1), Displacement(dok.beta)]


def bloch_messiah_operators(form: BlochMessiahForm) -> list[OperatorSpec]:
    """``R(V) S(sigma) R(W)^dagger D(gamma)`` in operator-product order."""
    return [Rotation(form.V), Squeezing(form.sigma), Rotation(form.W.conj().T), Displacement(form.gamma)]


def default_padding(operators: Sequence[OperatorSpec]) -> int:
    """Photons above ``modes * cutoff`` needed before the state's tail drops below ``TAIL_AMPLITUDE``.

    A squeeze ``r`` leaves a tail decaying like ``tanh(r)`` per photon pair; a
    displacement ``|alpha|`` amplified by the squeezing adds a Poisson shoulder.
    """
    squeeze = sum(operator.squeezing_scale for operator in operators)
    shift = sum(operator.displacement_scale for operator in operators) * math.exp(min(squeeze, _MAX_GROWTH))
    tail = 0.0
    if squeeze > 0.0:
        ratio = min(math.tanh(squeeze), _MAX_TANH)
        tail = 2.0 * math.log(1.0 / TAIL_AMPLITUDE) / -math.log(ratio)
    return max(MIN_PADDING, math.ceil(tail + 2.0 * shift**2 + 6.0 * shift))


def widen(padding: int) -> int:
    return padding + max(MIN_PADDING, padding // 4)


def workspace_fits(operators: Sequence[OperatorSpec], modes: int, cutoff: int) -> bool:
    """True when the default padding and its first widening both fit the workspace limit."""
    padding = default_padding(operators)
    return workspace_dim(modes, cutoff, widen(padding)) <= MAX_WORKSPACE_DIM


def truncated_oracle_state(
    operators: Sequence[OperatorSpec],
    modes: int,
    cutoff: int,
    padding: int | None = None,
    tol: float = CONVERGENCE_TOL,
) -> TruncatedState:
    """Apply ``operators`` (leftmost first in the product) to the vacuum.

    Returns amplitudes for every pattern with at most ``cutoff`` photons per mode.
    Convergence is judged relative to the largest amplitude when it exceeds one.
    """
    if padding is None:
        padding = default_padding(operators)

    previous = _evaluate(operators, modes, cutoff, padding)
    change = math.inf
    while True:
        wider = widen(padding)
        if workspace_dim(modes, cutoff, wider) > MAX_WORKSPACE_DIM:
            if math.isinf(change):
                raise NonConvergenceError(
                    f"padding {padding} cannot be widened within {MAX_WORKSPACE_DIM} states to confirm convergence"
                )
            raise NonConvergenceError(
                f"amplitudes still changing by {change:.3e} at padding {padding} when the workspace limit was reached"
            )
        current = _evaluate(operators, modes, cutoff, wider)
        change = float(np.max(np.abs(current - previous)))
        scale = max(1.0, float(np.max(np.abs(current))))
        if change <= tol * scale:
            logger.info("oracle converged with padding %d (change %.2e)", wider, change)
            state = TruncatedState(cutoff=(cutoff,) * modes, amplitudes=current, padding=wider)
            if all(operator.unitary for operator in operators) and state.norm() > 1.0 + tol:
                raise NonConvergenceError(f"truncated state gained norm ({state.norm():.12f})")
            return state
        logger.info("oracle padding %d changed amplitudes by %.2e", wider, change)
        padding, previous = wider, current


def _evaluate(operators: Sequence[OperatorSpec], modes: int, cutoff: int, padding: int) -> np.ndarray:
    dim = workspace_dim(modes, cutoff, padding)
    if dim > MAX_WORKSPACE_DIM:
        raise CutoffExceededError(
            f"oracle workspace of {dim} states ({modes} modes, padding {padding}) exceeds {MAX_WORKSPACE_DIM}; "
            "lower the cutoff"
        )
    space = ladder_space(modes * cutoff + padding, modes)
    state = space.vacuum()
    for operator in reversed(operators):
        state = operator.apply(space, state)
    return space.window(state, cutoff)
