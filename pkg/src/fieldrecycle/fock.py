"""Single-mode field states on a truncated Fock basis |0>, ..., |D-1>.

Pure states are :class:`FieldState` (amplitude vectors), mixed states are
:class:`FieldDensity` (D x D matrices). Both are immutable: the underlying
arrays are flagged read-only after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import TruncationError

TAIL_TOL = 1e-10
NORM_TOL = 1e-12


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FieldState:
    """Normalized pure field state given by its Fock amplitudes."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError("FieldState needs a 1-D amplitude vector with D >= 2")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector is not a state")
        object.__setattr__(self, "amps", _frozen(amps / norm))

    @property
    def D(self) -> int:
        return self.amps.size

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def projector(self) -> "FieldDensity":
        return FieldDensity(np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True)
class FieldDensity:
    """Mixed field state; Hermiticity, unit trace and positivity are checked."""

    mat: np.ndarray
    check: bool = True

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 2:
            raise ValueError("FieldDensity needs a square matrix with D >= 2")
        if self.check:
            if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(mat) - 1) > NORM_TOL:
                raise ValueError(f"density matrix trace {np.trace(mat).real!r} != 1")
            if np.linalg.eigvalsh(mat).min() < -1e-10:
                raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "mat", _frozen(mat))

    @property
    def D(self) -> int:
        return self.mat.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.mat)).copy()


@dataclass(frozen=True)
class StateMoments:
    mean_n: float
    var_n: float
    purity: float

    @property
    def delta_n(self) -> float:
        return float(np.sqrt(max(self.var_n, 0.0)))


def as_density(s) -> FieldDensity:
    if isinstance(s, FieldDensity):
        return s
    if isinstance(s, FieldState):
        return s.projector()
    raise TypeError(f"not a field state: {type(s).__name__}")


def _check_tail(tail: float, tol: float, what: str):
    if tail >= tol:
        raise TruncationError(f"{what}: truncated tail mass {tail:.3e} >= {tol:.1e}; increase D")


def coherent_state(alpha: complex, D: int, tail_tol: float = TAIL_TOL) -> FieldState:
    """Coherent state |alpha>, amplitudes alpha**n / sqrt(n!) times exp(-|alpha|^2/2)."""
    if D < 2:
        raise ValueError("D must be >= 2")
    nbar = abs(alpha) ** 2
    n = np.arange(D)
    if alpha == 0:
        amps = np.zeros(D, dtype=complex)
        amps[0] = 1.0
        return FieldState(amps)
    _check_tail(float(poisson.sf(D - 1, nbar)), tail_tol, "coherent_state")
    logmag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * nbar
    amps = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    return FieldState(amps)


def squeezed_state(alpha: complex, r: float, D: int, tail_tol: float = TAIL_TOL) -> FieldState:
    """Displaced squeezed vacuum D(alpha) S(r) |0> with real squeeze parameter r.

    Convention: S(r) = exp(r (a^2 - a^dag^2) / 2), so r > 0 narrows the X = a + a^dag
    quadrature. With alpha real positive this is amplitude (number) squeezing.

    The state is the eigenvector of ``a cosh r + a^dag sinh r`` with eigenvalue
    ``gamma = alpha cosh r + conj(alpha) sinh r``, which gives the recurrence

        cosh r sqrt(n+1) c[n+1] = gamma c[n] - sinh r sqrt(n) c[n-1]

    seeded with the exact vacuum amplitude, so the tail mass beyond D is known.
    """
    if D < 2:
        raise ValueError("D must be >= 2")
    ch, sh = np.cosh(r), np.sinh(r)
    gamma = alpha * ch + np.conj(alpha) * sh
    c = np.zeros(D, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * np.conj(alpha) ** 2 * np.tanh(r)) / np.sqrt(ch)
    if D > 1:
        c[1] = gamma * c[0] / ch
    for n in range(1, D - 1):
        c[n + 1] = (gamma * c[n] - sh * np.sqrt(n) * c[n - 1]) / (ch * np.sqrt(n + 1))
    _check_tail(max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2))), tail_tol, "squeezed_state")
    return FieldState(c)


def number_state(n: int, D: int) -> FieldState:
    if not 0 <= n < D:
        raise IndexError(f"number state |{n}> outside truncation D={D}")
    amps = np.zeros(D, dtype=complex)
    amps[n] = 1.0
    return FieldState(amps)


def moments(s) -> StateMoments:
    """Photon-number mean, variance and purity of a pure or mixed field state."""
    n = np.arange(s.D)
    p = s.probabilities
    mean = float(p @ n)
    var = float(p @ (n * n)) - mean**2
    if isinstance(s, FieldState):
        purity = 1.0
    else:
        purity = float(np.sum(np.abs(s.mat) ** 2))
    return StateMoments(mean, var, purity)


def fidelity(pure: FieldState, rho) -> float:
    """Overlap <pure| rho |pure>; ``rho`` may itself be a pure state."""
    if isinstance(rho, FieldState):
        return float(abs(np.vdot(pure.amps, rho.amps)) ** 2)
    return float(np.clip(np.vdot(pure.amps, rho.mat @ pure.amps).real, 0.0, 1.0))


def trace_distance(a, b) -> float:
    """Half the trace norm of the difference of two field states."""
    diff = as_density(a).mat - as_density(b).mat
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def top_occupancy(s) -> float:
    return float(s.probabilities[-1])
