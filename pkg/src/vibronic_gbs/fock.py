"""Fock amplitudes of pure Gaussian states.

Amplitudes come from the Bargmann form ``c exp(z^T A z / 2 + b^T z)`` through
the recursion

    sqrt(m_p) G[m] = b_p G[m - e_p] + sum_j A_pj sqrt(m_j - delta_pj) G[m - e_p - e_j]

evaluated one total-photon layer at a time over a per-mode cutoff lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .gauss import BlochMessiahForm, BogoliubovTransform
from .models import DimensionMismatchError, NumericalError

MAX_TOTAL_PHOTONS = 60
MAX_LATTICE_SIZE = 4_000_000

Cutoff = Union[int, Sequence[int]]


class CutoffExceededError(NumericalError):
    """Raised when a requested photon cutoff exceeds the evaluator limits."""


@dataclass(frozen=True, eq=False)
class FockLattice:
    """Index plan for the recursion on a box of photon patterns (C order)."""

    shape: tuple[int, ...]
    patterns: np.ndarray
    layers: tuple[np.ndarray, ...]
    pivot: np.ndarray
    lowered: np.ndarray
    pivot_root: np.ndarray
    neighbors: np.ndarray
    neighbor_root: np.ndarray

    @property
    def size(self) -> int:
        return int(self.patterns.shape[0])


def lattice_shape(modes: int, cutoff: Cutoff) -> tuple[int, ...]:
    if isinstance(cutoff, (int, np.integer)):
        levels = [int(cutoff)] * modes
    else:
        levels = [int(value) for value in cutoff]
    if len(levels) != modes:
        raise DimensionMismatchError(f"cutoff has {len(levels)} entries for {modes} modes")
    if any(value < 0 for value in levels):
        raise CutoffExceededError("cutoff must be non-negative")
    return tuple(value + 1 for value in levels)


@lru_cache(maxsize=16)
def build_lattice(shape: tuple[int, ...]) -> FockLattice:
    size = int(np.prod(shape))
    if size > MAX_LATTICE_SIZE:
        raise CutoffExceededError(f"lattice of {size} patterns exceeds the limit of {MAX_LATTICE_SIZE}")
    modes = len(shape)
    patterns = np.indices(shape).reshape(modes, -1).T
    strides = np.array([int(np.prod(shape[j + 1 :])) for j in range(modes)], dtype=np.int64)
    totals = patterns.sum(axis=1)

    nonzero = patterns > 0
    pivot = np.where(nonzero.any(axis=1), nonzero.argmax(axis=1), 0)
    rows = np.arange(size)
    flat = rows.astype(np.int64)
    lowered = flat - strides[pivot]
    pivot_count = patterns[rows, pivot]
    pivot_root = np.sqrt(pivot_count.astype(float))

    reduced = patterns.copy()
    reduced[rows, pivot] -= 1
    neighbor_count = reduced.astype(float)
    neighbors = lowered[:, None] - strides[None, :]
    valid = (reduced > 0) & (totals[:, None] > 0)
    neighbors = np.where(valid, neighbors, 0)
    neighbor_root = np.where(valid, np.sqrt(np.clip(neighbor_count, 0.0, None)), 0.0)
    lowered = np.where(totals > 0, lowered, 0)

    layers = tuple(np.flatnonzero(totals == total) for total in range(1, int(totals.max(initial=0)) + 1))
    for array in (patterns, pivot, lowered, pivot_root, neighbors, neighbor_root):
        array.setflags(write=False)
    return FockLattice(
        shape=shape,
        patterns=patterns,
        layers=layers,
        pivot=pivot,
        lowered=lowered,
        pivot_root=pivot_root,
        neighbors=neighbors,
        neighbor_root=neighbor_root,
    )


@lru_cache(maxsize=16)
def enumeration_order(shape: tuple[int, ...]) -> np.ndarray:
    """Flat C-order indices sorted by total photon number, then colexicographically."""
    lattice = build_lattice(shape)
    keys = [lattice.patterns[:, j] for j in range(len(shape))]
    keys.append(lattice.patterns.sum(axis=1))
    order = np.lexsort(keys)
    order.setflags(write=False)
    return order


def enumerate_patterns(modes: int, cutoff: Cutoff) -> np.ndarray:
    shape = lattice_shape(modes, cutoff)
    return build_lattice(shape).patterns[enumeration_order(shape)]


def bargmann_data(form: BlochMessiahForm) -> tuple[np.ndarray, np.ndarray, complex]:
    """Return ``(A, b, c)`` of ``R(V) S(sigma) R(W)^dagger D(gamma)|0>``."""
    V, sigma = form.V, form.sigma
    g = form.input_displacement
    A = (V.conj() * np.tanh(sigma)) @ V.conj().T
    b = (V.conj() / np.cosh(sigma)) @ g
    c = complex(
        np.prod(1.0 / np.sqrt(np.cosh(sigma)))
        * np.exp(np.sum(-0.5 * np.tanh(sigma) * g**2 - 0.5 * np.abs(g) ** 2))
    )
    return A, b, c


def hermite_tensor(A: np.ndarray, b: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """``G[m]`` for ``exp(z^T A z / 2 + b^T z)`` on the lattice ``shape`` (``G[0] = 1``)."""
    lattice = build_lattice(shape)
    G = np.zeros(lattice.size, dtype=complex)
    G[0] = 1.0
    for layer in lattice.layers:
        pivot = lattice.pivot[layer]
        coupling = A[pivot] * lattice.neighbor_root[layer]
        total = b[pivot] * G[lattice.lowered[layer]]
        total += np.einsum("ij,ij->i", coupling, G[lattice.neighbors[layer]])
        G[layer] = total / lattice.pivot_root[layer]
    return G.reshape(shape)


def fock_amplitudes(form: BlochMessiahForm, cutoff: Cutoff, scale: complex = 1.0) -> np.ndarray:
    """Amplitude tensor ``scale * <m|R(V) S R(W)^dagger D(gamma)|0>`` for every m within the cutoff."""
    shape = lattice_shape(form.modes, cutoff)
    A, b, c = bargmann_data(form)
    return scale * c * hermite_tensor(A, b, shape)


def gaussian_fock_amplitude(form: BlochMessiahForm, scale: complex, m: Sequence[int]) -> complex:
    m = tuple(int(value) for value in m)
    if len(m) != form.modes:
        raise DimensionMismatchError(f"pattern {m} does not have {form.modes} entries")
    if sum(m) > MAX_TOTAL_PHOTONS:
        raise CutoffExceededError(f"pattern {m} has more than {MAX_TOTAL_PHOTONS} photons")
    return complex(fock_amplitudes(form, m, scale)[m])


def raise_mode(tensor: np.ndarray, axis: int) -> np.ndarray:
    """Coefficients of ``a_axis^dagger`` applied to a truncated amplitude tensor."""
    levels = tensor.shape[axis]
    roots = np.sqrt(np.arange(1, levels, dtype=float))
    shape = [1] * tensor.ndim
    shape[axis] = levels - 1
    result = np.zeros_like(tensor)
    target = [slice(None)] * tensor.ndim
    source = [slice(None)] * tensor.ndim
    target[axis] = slice(1, None)
    source[axis] = slice(None, -1)
    result[tuple(target)] = tensor[tuple(source)] * roots.reshape(shape)
    return result


def creation_polynomial(
    transform: BogoliubovTransform,
    form: BlochMessiahForm,
    mu0: float,
    lam: np.ndarray,
    Lam: np.ndarray,
) -> tuple[complex, np.ndarray, np.ndarray]:
    """Push ``mu|0>`` through the Gaussian unitary.

    Returns ``(f0, f1, F2)`` such that ``O mu |0> = (f0 + f1 . a^dagger +
    a^dagger^T F2 a^dagger / 2) O|0>``, where O is the unitary of
    ``transform`` and ``form`` is its Bloch-Messiah factorisation.
    """
    P, Q, r = transform.heisenberg()
    A, b, _ = bargmann_data(form)
    shifted = -(P.conj().T @ r - Q.T @ r.conj())
    M = P.T - Q.conj().T @ A
    v = shifted.conj() - Q.conj().T @ b
    ell = np.asarray(lam, dtype=float) / math.sqrt(2.0)
    Lam = np.asarray(Lam, dtype=float)
    s0 = mu0 + 0.5 * float(np.trace(Lam))
    F2 = M.T @ Lam @ M
    f1 = M.T @ (ell + Lam @ v)
    f0 = complex(s0 + ell @ v + 0.5 * v @ Lam @ v - 0.5 * np.trace(Lam @ Q.conj().T @ M.T))
    return f0, f1, F2


def dressed_fock_amplitudes(
    transform: BogoliubovTransform,
    form: BlochMessiahForm,
    mu0: float,
    lam: np.ndarray,
    Lam: np.ndarray,
    cutoff: Cutoff,
) -> np.ndarray:
    """Amplitude tensor of ``O mu |0>`` for the quadratic dipole polynomial mu."""
    f0, f1, F2 = creation_polynomial(transform, form, mu0, lam, Lam)
    gaussian = fock_amplitudes(form, cutoff)
    result = f0 * gaussian
    raised = [raise_mode(gaussian, j) for j in range(form.modes)]
    for i in range(form.modes):
        result = result + f1[i] * raised[i]
        for j in range(form.modes):
            if F2[i, j] != 0:
                result = result + 0.5 * F2[i, j] * raise_mode(raised[j], i)
    return result
