"""Gate errors of field pulses acting on a target atom.

The error of a pulse on an initial atomic state |psi> is
1 - <psi_ideal| rho_at |psi_ideal>, with psi_ideal the ideal rotation of |psi>
and rho_at the atom's reduced state after the Jaynes-Cummings interaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .fock import FieldDensity, FieldState, as_density, moments, squeezed_state
from .jcm import JcmBlocks, Tridiag
from .optimal import PulseSpec, phi_theta
from .recycler import AncillaSpec, mixed_fixed_point

SIGMA_X = np.array([[0, 1], [1, 0]], complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], complex)
PERCENTILES = (10, 25, 75, 90)


def bloch_state(theta, phi):
    """cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>."""
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


@dataclass(frozen=True)
class RotationTarget:
    Theta: float
    axis_azimuth: float
    matrix: np.ndarray

    def __call__(self, atom):
        return self.matrix @ np.asarray(atom, complex)


def _rotation(Theta, beta):
    axis = math.cos(beta) * SIGMA_X + math.sin(beta) * SIGMA_Y
    return math.cos(Theta / 2) * np.eye(2) - 1j * math.sin(Theta / 2) * axis


def ideal_rotation(Theta: float, phi: float) -> RotationTarget:
    """Rotation by Theta about the equatorial axis that carries the ancilla state
    bloch_state(Theta/2, phi) to cos(Theta/4)|g> - e^{i phi} sin(Theta/4)|e>.

    The axis azimuth phi - pi/2 is checked against that mapping (and its
    opposite tried) at construction.
    """
    v1 = bloch_state(Theta / 2, phi)
    v1p = np.array([math.cos(Theta / 4), -np.exp(1j * phi) * math.sin(Theta / 4)])
    for beta in (phi - math.pi / 2, phi + math.pi / 2):
        R = _rotation(Theta, beta)
        if abs(abs(np.vdot(v1p, R @ v1)) - 1) < 1e-12:
            R.flags.writeable = False
            return RotationTarget(Theta, beta, R)
    raise AssertionError(f"no equatorial axis maps the ancilla state for Theta={Theta}, phi={phi}")


def _tr_dagger(tri: Tridiag, A):
    """Tr(tri^dag A) = sum_ij conj(tri_ij) A_ij, using only the stripes."""
    return (np.vdot(tri.diag, np.diagonal(A)) + np.vdot(tri.lower, np.diagonal(A, -1))
            + np.vdot(tri.upper, np.diagonal(A, 1)))


def transfer_tensor(field, blocks: JcmBlocks) -> np.ndarray:
    """T[i, k, j, l] = Tr(U_ik rho U_jl^dag) for atomic labels in (g, e).

    The reduced atomic density after the interaction from initial atom a is
    rho_at[i, j] = sum_kl a_k conj(a_l) T[i, k, j, l].
    """
    labels = "ge"
    T = np.zeros((2, 2, 2, 2), complex)
    if isinstance(field, FieldState):
        vecs = {i + k: blocks.block(i, k).apply(field.amps) for i in labels for k in labels}
        for a, i in enumerate(labels):
            for b, k in enumerate(labels):
                for c, j in enumerate(labels):
                    for d, l in enumerate(labels):
                        T[a, b, c, d] = np.vdot(vecs[j + l], vecs[i + k])
        return T
    rho = as_density(field).mat
    left = {i + k: blocks.block(i, k).apply(rho) for i in labels for k in labels}
    for a, i in enumerate(labels):
        for b, k in enumerate(labels):
            for c, j in enumerate(labels):
                for d, l in enumerate(labels):
                    T[a, b, c, d] = _tr_dagger(blocks.block(j, l), left[i + k])
    return T


def _errors_from_tensor(T, atoms, target: RotationTarget):
    atoms = np.atleast_2d(np.asarray(atoms, complex))
    ideal = atoms @ target.matrix.T
    rho_at = np.einsum("ikjl,nk,nl->nij", T, atoms, atoms.conj())
    fid = np.einsum("ni,nij,nj->n", ideal.conj(), rho_at, ideal).real
    return np.clip(1.0 - fid, 0.0, 1.0)


def gate_error(field, atom, target: RotationTarget, blocks: JcmBlocks) -> float:
    """1 - <psi_ideal| rho_at |psi_ideal> for one initial atomic state."""
    atom = np.asarray(atom, complex)
    W = blocks.atom_operator(target(atom), atom)
    if isinstance(field, FieldState):
        w = W.apply(field.amps)
        fid = float(np.vdot(w, w).real)
    else:
        rho = as_density(field).mat
        fid = float(_tr_dagger(W, W.apply(rho)).real)
    return min(1.0, max(0.0, 1.0 - fid))


def reduced_atom(field, atom, blocks: JcmBlocks) -> np.ndarray:
    T = transfer_tensor(field, blocks)
    atom = np.asarray(atom, complex)
    return np.einsum("ikjl,k,l->ij", T, atom, atom.conj())


def random_bloch_ensemble(count: int, seed: int) -> np.ndarray:
    """``count`` pure qubit states uniform on the Bloch sphere, one per row."""
    rng = np.random.default_rng(seed)
    cos_t = rng.uniform(-1.0, 1.0, count)
    phi = rng.uniform(0.0, 2 * math.pi, count)
    theta = np.arccos(cos_t)
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


@dataclass(frozen=True)
class ErrorEnsembleReport:
    """Per-atom errors and their summary. Percentiles interpolate linearly."""

    errors: np.ndarray
    min: float
    max: float
    mean: float
    percentiles: Dict[int, float]
    seed: Optional[int] = None

    @classmethod
    def from_errors(cls, errors, seed=None):
        errors = np.asarray(errors, float)
        pct = {p: float(np.percentile(errors, p, method="linear")) for p in PERCENTILES}
        return cls(errors, float(errors.min()), float(errors.max()), float(errors.mean()), pct, seed)


def ensemble_errors(field, target: RotationTarget, blocks: JcmBlocks, ensemble,
                    seed: Optional[int] = None) -> ErrorEnsembleReport:
    T = transfer_tensor(field, blocks)
    return ErrorEnsembleReport.from_errors(_errors_from_tensor(T, ensemble, target), seed)


@dataclass(frozen=True)
class SweepRow:
    r: float
    mean_n: float
    delta_n: float
    report: ErrorEnsembleReport
    ground_error: float


@dataclass(frozen=True)
class SweepTable:
    rows: List[SweepRow]

    @property
    def r(self):
        return np.array([row.r for row in self.rows])

    @property
    def mean_errors(self):
        return np.array([row.report.mean for row in self.rows])

    @property
    def best(self) -> SweepRow:
        return self.rows[int(np.argmin(self.mean_errors))]

    @property
    def argmin_r(self) -> float:
        return self.best.r


def squeeze_point(n_bar, r, target, blocks, ensemble, seed=None) -> SweepRow:
    state = squeezed_state(math.sqrt(n_bar), r, blocks.D)
    m = moments(state)
    T = transfer_tensor(state, blocks)
    report = ErrorEnsembleReport.from_errors(_errors_from_tensor(T, ensemble, target), seed)
    ground = float(_errors_from_tensor(T, [[1, 0]], target)[0])
    return SweepRow(float(r), m.mean_n, m.delta_n, report, ground)


def squeeze_sweep(n_bar: float, Theta: float, r_grid: Sequence[float], ensemble,
                  blocks: JcmBlocks, phi: float = math.pi / 2, seed=None,
                  executor=None) -> SweepTable:
    """Ensemble errors of amplitude-squeezed pulses D(sqrt(n_bar)) S(r)|0> over ``r_grid``.

    Each row also carries the error for an atom starting in |g>. ``executor``
    (a concurrent.futures executor) fans the grid points out; rows come back
    sorted by r regardless of scheduling.
    """
    r_grid = list(r_grid)
    if not r_grid:
        raise ValueError("empty squeeze grid")
    target = ideal_rotation(Theta, phi)
    if executor is None:
        rows = [squeeze_point(n_bar, r, target, blocks, ensemble, seed) for r in r_grid]
    else:
        futures = [executor.submit(squeeze_point, n_bar, r, target, blocks, ensemble, seed)
                   for r in r_grid]
        rows = [f.result() for f in futures]
    return SweepTable(sorted(rows, key=lambda row: row.r))


def coherent_error_prediction(n_bar) -> float:
    """Pi/2-pulse error of a coherent state started in |g>: pi^2/(64 n) + 1/(16 n)."""
    return math.pi**2 / (64 * n_bar) + 1 / (16 * n_bar)


def eps_one(n_bar) -> float:
    return math.pi / (6 * n_bar)


def eps_two(n_bar) -> float:
    return 7 * math.pi / (16 * n_bar)


def mixed_error_budget(lam: float, n_pi: int) -> float:
    """pi/(6 n) + lam 13 pi / (48 n), with n the mean photon number of |Phi_pi>."""
    n_bar = moments(phi_theta(PulseSpec.for_rotation(math.pi, n_pi))).mean_n
    return math.pi / (6 * n_bar) + lam * 13 * math.pi / (48 * n_bar)


def mixed_error_numeric(lam: float, n_pi: int, ensemble, rho: FieldDensity = None) -> float:
    """Ensemble-mean pi-pulse error of the mixed fixed point (or of ``rho``)."""
    spec = PulseSpec.for_rotation(math.pi, n_pi)
    if rho is None:
        rho = mixed_fixed_point(AncillaSpec(spec.theta, spec.phi, lam), spec)
    target = ideal_rotation(math.pi, spec.phi)
    return ensemble_errors(rho, target, spec.blocks(rho.D), ensemble).mean
