"""The ancilla-recycling channel and its fixed points.

Each step lets the field interact for a fixed pulse area with a fresh ancilla in

    rho_a = (1 - lam) |v1><v1| + lam |v2><v2|
    v1 = cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>
    v2 = sin(theta/2)|g> - e^{i phi} cos(theta/2)|e>

and traces the ancilla out. For an ancilla in |v> the field sees the two Kraus
operators <g|U|v> and <e|U|v>, each a tridiagonal combination of the JCM blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import NoConvergence, TruncationError
from .fock import FieldDensity, FieldState, as_density, fidelity, moments
from .jcm import JcmBlocks
from .optimal import PulseSpec, phi_theta, phi_two

G = np.array([1, 0], complex)
E = np.array([0, 1], complex)

LEAK_TOL = 1e-8


@dataclass(frozen=True)
class AncillaSpec:
    theta: float
    phi: float
    lam: float = 0.0

    def __post_init__(self):
        if not 0 < self.theta < math.pi:
            raise ValueError("ancilla colatitude must lie in (0, pi)")
        if not 0 <= self.lam < 0.5:
            raise ValueError("preparation error lam must lie in [0, 1/2)")

    @property
    def v1(self):
        return np.array([math.cos(self.theta / 2), np.exp(1j * self.phi) * math.sin(self.theta / 2)])

    @property
    def v2(self):
        return np.array([math.sin(self.theta / 2), -np.exp(1j * self.phi) * math.cos(self.theta / 2)])

    def density(self):
        v1, v2 = self.v1, self.v2
        return (1 - self.lam) * np.outer(v1, v1.conj()) + self.lam * np.outer(v2, v2.conj())


def kraus_operators(anc: AncillaSpec, blocks: JcmBlocks):
    """List of (weight, Tridiag) pairs whose sandwiches sum to the channel."""
    ops = [(1 - anc.lam, blocks.atom_operator(G, anc.v1)), (1 - anc.lam, blocks.atom_operator(E, anc.v1))]
    if anc.lam > 0:
        ops += [(anc.lam, blocks.atom_operator(G, anc.v2)), (anc.lam, blocks.atom_operator(E, anc.v2))]
    return ops


def _apply_channel(mat, ops):
    out = sum(w * k.sandwich(mat) for w, k in ops)
    out = 0.5 * (out + out.conj().T)
    leak = 1.0 - np.trace(out).real
    top = out[-1, -1].real
    if leak >= LEAK_TOL or top >= LEAK_TOL:
        raise TruncationError(
            f"channel output lost {leak:.2e} of its trace (top level holds {top:.2e}); increase D")
    return out / np.trace(out).real


def ancilla_channel(rho_f, anc: AncillaSpec, blocks: JcmBlocks) -> FieldDensity:
    """One interaction with a fresh ancilla, ancilla traced out."""
    rho = as_density(rho_f)
    if rho.D != blocks.D:
        raise ValueError("field and blocks disagree on D")
    return FieldDensity(_apply_channel(rho.mat, kraus_operators(anc, blocks)))


@dataclass(frozen=True)
class IterationRecord:
    """One channel application. ``step`` is half the Frobenius norm of the change,
    a lower bound on the trace distance between successive iterates."""

    iteration: int
    fidelity: float
    mean_n: float
    purity: float
    step: float


@dataclass
class ConvergenceTrace:
    initial: IterationRecord
    records: List[IterationRecord] = field(default_factory=list)
    converged: bool = False
    snapshots: Dict[int, FieldDensity] = field(default_factory=dict)

    @property
    def iterations(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def _record(i, rho, target, step):
    m = moments(rho)
    return IterationRecord(i, fidelity(target, rho), m.mean_n, m.purity, step)


def _trace_distance_mat(a, b):
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def default_target(anc: AncillaSpec, blocks: JcmBlocks) -> FieldState:
    n_t = (anc.theta / blocks.gt) ** 2
    if abs(n_t - round(n_t)) > 1e-6:
        raise ValueError("pulse area does not give an integer n_target; pass target explicitly")
    return phi_theta(PulseSpec(anc.theta, anc.phi, int(round(n_t)), blocks.D))


def iterate(rho0, anc: AncillaSpec, blocks: JcmBlocks, max_iters: int = 2000,
            tol: float = 1e-10, target: Optional[FieldState] = None,
            raise_on_fail: bool = False, snapshots: Sequence[int] = ()):
    """Apply the channel until successive iterates are within ``tol`` in trace distance.

    Returns ``(rho, trace)``. If ``max_iters`` runs out the trace is returned
    with ``converged=False``, or :class:`NoConvergence` is raised when
    ``raise_on_fail`` is set. States after the iterations listed in
    ``snapshots`` are kept in ``trace.snapshots``.
    """
    target = default_target(anc, blocks) if target is None else target
    ops = kraus_operators(anc, blocks)
    rho = as_density(rho0)
    mat = rho.mat
    trace = ConvergenceTrace(_record(0, rho, target, float("nan")))
    keep = set(snapshots)
    for i in range(1, max_iters + 1):
        new = _apply_channel(mat, ops)
        diff = new - mat
        step = 0.5 * float(np.linalg.norm(diff))
        mat = new
        trace.records.append(_record(i, FieldDensity(mat, check=False), target, step))
        if i in keep:
            trace.snapshots[i] = FieldDensity(mat, check=False)
        # the eigendecomposition is only worth paying for once the bound allows convergence
        if step < tol and _trace_distance_mat(diff, 0) < tol:
            trace.converged = True
            break
    final = FieldDensity(mat)
    if not trace.converged and raise_on_fail:
        raise NoConvergence(f"no convergence to {tol:g} in {max_iters} iterations", final, trace)
    return final, trace


def mixed_fixed_point(anc: AncillaSpec, spec: PulseSpec) -> FieldDensity:
    """Lowest-order fixed point (1 - lam)|Phi_1><Phi_1| + lam |Phi_2><Phi_2|."""
    p1 = phi_theta(spec)
    if anc.lam == 0:
        return p1.projector()
    p2, _ = phi_two(spec, p1)
    return FieldDensity((1 - anc.lam) * p1.projector().mat + anc.lam * p2.projector().mat)


def mixture(phi_one: FieldState, phi_two_: FieldState, x: float) -> FieldDensity:
    return FieldDensity((1 - x) * phi_one.projector().mat + x * phi_two_.projector().mat)


def basis_weights(rho, phi_one: FieldState, phi_two_: FieldState):
    """Populations of ``rho`` on |Phi_1> and |Phi_2>."""
    return fidelity(phi_one, rho), fidelity(phi_two_, rho)
