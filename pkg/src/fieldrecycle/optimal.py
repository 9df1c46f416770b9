"""Optimal field states |Phi_Theta> and related constructions.

|Phi_Theta> is the pure field state left invariant by an ancilla prepared in
cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>, at pulse area gT = theta / sqrt(n_Theta).
Its amplitudes obey

    C[n+1] = -i e^{i phi} tan(theta/2) cot(gT sqrt(n+1) / 2) C[n]

which stops at the first zero of the cotangent, n_max = (pi/gT)^2 - 1.
Amplitudes are accumulated as log-magnitude plus phase so large n_Theta does not
overflow; C[0] is real positive.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .errors import DegenerateAncilla, DimensionTooSmall
from .fock import TAIL_TOL, FieldState, moments, number_state, squeezed_state
from .jcm import JcmBlocks, build_blocks

# Automatic dimensions keep everything above this relative tail mass.
_AUTO_TAIL = 1e-32


class DegenerateAncillaWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PulseSpec:
    """Ancilla direction and pulse length for a Theta = 2 theta rotation.

    ``n_target`` is n_Theta; the pulse area is gT = Theta / (2 sqrt(n_Theta)).
    ``D=None`` picks a dimension that holds the whole state (see :func:`default_dim`).
    """

    theta: float
    phi: float
    n_target: int
    D: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.n_target, bool) or int(self.n_target) != self.n_target:
            raise ValueError(f"n_target must be an integer, got {self.n_target!r}")
        object.__setattr__(self, "n_target", int(self.n_target))
        if self.n_target < 1:
            raise ValueError("n_target must be >= 1")
        if not 0 <= self.theta < math.pi:
            raise DegenerateAncilla(f"ancilla colatitude {self.theta} outside (0, pi)")
        if self.D is not None and self.D < 2:
            raise ValueError("D must be >= 2")

    @classmethod
    def for_rotation(cls, Theta, n_target, phi=math.pi / 2, D=None):
        return cls(Theta / 2, phi, n_target, D)

    @property
    def Theta(self) -> float:
        return 2 * self.theta

    @property
    def gT(self) -> float:
        return self.theta / math.sqrt(self.n_target)

    @property
    def c(self) -> float:
        return math.cos(self.theta / 2)

    @property
    def s(self) -> float:
        return math.sin(self.theta / 2)

    @property
    def n_max(self) -> int:
        """Last Fock index the recursion can populate."""
        if self.theta == 0:
            return 0
        m = (math.pi / self.gT) ** 2
        if abs(m - round(m)) < 1e-9 * m:
            m = round(m)
        return math.ceil(m) - 1

    @property
    def dim(self) -> int:
        return self.D if self.D is not None else default_dim(self)

    def blocks(self, D=None) -> JcmBlocks:
        return build_blocks(self.gT, D if D is not None else self.dim)

    def with_dim(self, D):
        return PulseSpec(self.theta, self.phi, self.n_target, D)


def _log_magnitudes(spec: PulseSpec, length: int) -> np.ndarray:
    """log|C_n| (unnormalized, C_0 = 1) for n < length; -inf past n_max."""
    out = np.full(length, -np.inf)
    upto = min(length, spec.n_max + 1)
    k = np.arange(1, upto)
    steps = math.log(math.tan(spec.theta / 2)) + np.log(1 / np.tan(0.5 * spec.gT * np.sqrt(k)))
    out[0] = 0.0
    out[1:upto] = np.cumsum(steps)
    return out


def _support_logs(spec):
    """Peak-normalized log|C_n| over the support, cut once past the peak and
    below exp(-40) relative amplitude (the tail decays monotonically there)."""
    length = min(spec.n_max + 1, 4 * spec.n_target + 64)
    while True:
        logs = _log_magnitudes(spec, length)
        logs = logs - logs.max()
        if length == spec.n_max + 1:
            return logs
        peak = int(np.argmax(logs))
        if peak < length - 1 and logs[-1] < -40:
            return logs
        length = min(spec.n_max + 1, 2 * length)


def default_dim(spec: PulseSpec) -> int:
    """Truncation dimension for ``spec``.

    The exact support n_max + 1 plus 8 levels when that is no larger than
    4 n_Theta + 8 (always the case for Theta = pi); otherwise the state's own
    decay sets the cut, keeping relative tail mass below 1e-32.
    """
    if spec.theta == 0:
        return 2
    exact = spec.n_max + 1 + 8
    if exact <= 4 * spec.n_target + 8:
        return exact
    logs = _support_logs(spec)
    p = np.exp(2 * logs)
    tail = np.cumsum(p[::-1])[::-1] / p.sum()
    cut = int(np.argmax(tail < _AUTO_TAIL)) if np.any(tail < _AUTO_TAIL) else p.size
    return cut + 8


def phi_theta(spec: PulseSpec, tail_tol: float = TAIL_TOL) -> FieldState:
    """Exact fixed-point state |Phi_Theta> of the ancilla channel."""
    D = spec.dim
    if spec.theta == 0:
        warnings.warn("theta = 0: the fixed point is the vacuum", DegenerateAncillaWarning)
        return number_state(0, D)
    logs = _support_logs(spec)
    if D < logs.size:
        p = np.exp(2 * logs)
        tail = p[D:].sum() / p.sum()
        if tail >= tail_tol:
            raise DimensionTooSmall(
                f"D={D} drops tail mass {tail:.2e}; need D > {spec.n_max} "
                f"or a larger cut (n_max = {spec.n_max})")
        logs = logs[:D]
    amps = np.zeros(D, dtype=complex)
    n = np.arange(logs.size)
    amps[: logs.size] = np.exp(logs) * np.exp(1j * n * (spec.phi - math.pi / 2))
    return FieldState(amps)


def phi_theta_gaussian(spec: PulseSpec, with_cubic: bool = True) -> FieldState:
    """Gaussian approximation to |Phi_Theta>, optionally with the cubic skew factor.

    |C_n| ~ exp(-(n - n_T + 1/2)^2 Theta / (8 n_T sin(Theta/2)))
            * (1 + Theta (2 + Theta cot(Theta/2)) (n - n_T + 1/2)^3 / (96 n_T^2 sin(Theta/2)))

    The exponent is squared and the cubic coefficient is the expansion of the
    exact log-recursion; at Theta = pi it reduces to 2 pi / (96 n_T^2).
    """
    D = spec.dim
    nt = spec.n_target
    Th = spec.Theta
    sh = math.sin(Th / 2)
    u = np.arange(D) - nt + 0.5
    mag = np.exp(-(u**2) * Th / (8 * nt * sh))
    if with_cubic:
        mag = mag * (1 + Th * (2 + Th / math.tan(Th / 2)) / (96 * nt**2 * sh) * u**3)
    return FieldState(mag * np.exp(1j * np.arange(D) * (spec.phi - math.pi / 2)))


def mean_n_prediction(n_pi) -> float:
    """Closed-form mean photon number of |Phi_pi>: n - 1/2 + (2 + pi) / (8 sqrt(n))."""
    return n_pi - 0.5 + (2 + math.pi) / (8 * math.sqrt(n_pi))


def _check_poles(spec):
    if spec.s == 0 or spec.c == 0:
        raise DegenerateAncilla("companion state needs sin(theta/2) and cos(theta/2) nonzero")


def phi_two(spec: PulseSpec, phi_one: FieldState = None, blocks: JcmBlocks = None):
    """Companion state |Phi_2>, orthogonal to |Phi_1> = |Phi_Theta>.

    Returns ``(state, N2)`` where N2 is the squared norm of
    [(s/c)(1 + U_ee) - (c/s)(1 - U_gg)] |Phi_1> before normalization.
    """
    _check_poles(spec)
    phi_one = phi_theta(spec) if phi_one is None else phi_one
    blocks = spec.blocks(phi_one.D) if blocks is None else blocks
    s, c = spec.s, spec.c
    weights = (s / c) * (1 + blocks.u_ee) - (c / s) * (1 - blocks.u_gg)
    raw = weights * phi_one.amps
    n2 = float(np.vdot(raw, raw).real)
    return FieldState(raw), n2


def phi_two_first_line(spec: PulseSpec, phi_one: FieldState, blocks: JcmBlocks):
    """Same state built from all four blocks; used to cross-check :func:`phi_two`."""
    _check_poles(spec)
    s, c, e = spec.s, spec.c, np.exp(1j * spec.phi)
    op = (c * s * blocks.Ugg - e * c * c * blocks.Uge
          - np.conj(e) * s * s * blocks.Ueg + s * c * blocks.Uee)
    raw = op.apply(phi_one.amps)
    return FieldState(raw), float(np.vdot(raw, raw).real)


def transcoherent_target_var(Theta, n_bar) -> float:
    return n_bar * math.sin(Theta) / Theta


def transcoherent_surrogate(Theta: float, n_bar: float, D: int, rel_tol: float = 1e-6):
    """Amplitude-squeezed state with mean ``n_bar`` and variance n_bar sin(Theta)/Theta.

    Stands in for a transcoherent state of the same photon-number width. The
    displacement is real with alpha^2 = n_bar - sinh(r)^2 so the mean stays at
    ``n_bar``; r is found by bisection on the state's actual variance.
    Returns ``(state, r)``.
    """
    if not 0 < Theta < math.pi:
        raise ValueError("transcoherent width needs 0 < Theta < pi (vanishes at pi)")
    target = transcoherent_target_var(Theta, n_bar)

    def build(r):
        return squeezed_state(math.sqrt(n_bar - math.sinh(r) ** 2), r, D)

    def analytic_var(r):
        return (n_bar - math.sinh(r) ** 2) * math.exp(-2 * r) + 2 * (math.sinh(r) * math.cosh(r)) ** 2

    r_cap = math.asinh(math.sqrt(n_bar))
    r_lo_var = minimize_scalar(analytic_var, bounds=(0, r_cap), method="bounded").x
    if target < analytic_var(r_lo_var):
        raise ValueError("target variance below what amplitude squeezing can reach")

    def f(r):
        return moments(build(r)).var_n - target

    if f(0.0) <= 0:
        return build(0.0), 0.0
    r = bisect(f, 0.0, r_lo_var, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    state = build(r)
    resid = abs(moments(state).var_n - target)
    if resid >= rel_tol * target:
        raise ArithmeticError(f"bisection residual {resid:.2e} above tolerance")
    return state, r
