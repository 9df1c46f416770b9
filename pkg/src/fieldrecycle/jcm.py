"""Jaynes-Cummings evolution blocks and joint atom-field dynamics.

With H = g (a |e><g| + a^dag |g><e|) the propagator at pulse area ``gt`` splits
into four field operators acting between the atomic levels::

    U_gg = cos(gt sqrt(a^dag a))
    U_ge = -i sin(gt sqrt(a^dag a)) (a^dag a)^(-1/2) a^dag
    U_eg = -i sin(gt sqrt(a a^dag)) (a a^dag)^(-1/2) a
    U_ee = cos(gt sqrt(a a^dag))

Each is diagonal or lives on a single off-diagonal stripe, so they are stored as
:class:`Tridiag` objects and applied in O(D) to vectors, O(D^2) to matrices.

Joint vectors and densities use the block layout (g-block, e-block): index
``n`` is |g, n> and index ``D + n`` is |e, n>. The top level |D-1> is the
truncation boundary: |e, D-1> would couple to |g, D>, which is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FieldDensity, FieldState, _frozen


@dataclass(frozen=True)
class Tridiag:
    """D x D matrix with a main diagonal and the two adjacent stripes.

    ``lower[k]`` is element (k+1, k); ``upper[k]`` is element (k, k+1).
    """

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def zeros(cls, D):
        return cls(np.zeros(D, complex), np.zeros(D - 1, complex), np.zeros(D - 1, complex))

    @property
    def D(self):
        return self.diag.size

    def __add__(self, other):
        return Tridiag(self.diag + other.diag, self.lower + other.lower, self.upper + other.upper)

    def __sub__(self, other):
        return Tridiag(self.diag - other.diag, self.lower - other.lower, self.upper - other.upper)

    def __mul__(self, z):
        return Tridiag(z * self.diag, z * self.lower, z * self.upper)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    @property
    def H(self):
        return Tridiag(self.diag.conj(), self.upper.conj(), self.lower.conj())

    def dense(self):
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def apply(self, x):
        """Matrix-vector or matrix-matrix product ``self @ x`` (acts on rows)."""
        x = np.asarray(x)
        d = self.diag if x.ndim == 1 else self.diag[:, None]
        lo = self.lower if x.ndim == 1 else self.lower[:, None]
        up = self.upper if x.ndim == 1 else self.upper[:, None]
        out = d * x
        out[1:] += lo * x[:-1]
        out[:-1] += up * x[1:]
        return out

    def sandwich(self, rho):
        """``self @ rho @ self^dag`` in O(D^2)."""
        left = self.apply(rho)
        return self.apply(left.conj().T).conj().T

    def eye_plus(self, z=1.0):
        return Tridiag(self.diag + z, self.lower, self.upper)


@dataclass(frozen=True)
class JcmBlocks:
    """The four propagator blocks at fixed dimensionless pulse area ``gt``.

    ``u_ge[n]`` is sin(gt sqrt(n+1)), so <n+1|U_ge|n> = -i u_ge[n];
    ``u_eg[n]`` is sin(gt sqrt(n)), so <n-1|U_eg|n> = -i u_eg[n].
    """

    gt: float
    D: int
    u_gg: np.ndarray
    u_ee: np.ndarray
    u_ge: np.ndarray
    u_eg: np.ndarray

    def _zero(self):
        return np.zeros(self.D - 1, complex)

    @property
    def Ugg(self) -> Tridiag:
        return Tridiag(self.u_gg.astype(complex), self._zero(), self._zero())

    @property
    def Uee(self) -> Tridiag:
        return Tridiag(self.u_ee.astype(complex), self._zero(), self._zero())

    @property
    def Uge(self) -> Tridiag:
        return Tridiag(np.zeros(self.D, complex), -1j * self.u_ge[:-1], self._zero())

    @property
    def Ueg(self) -> Tridiag:
        return Tridiag(np.zeros(self.D, complex), self._zero(), -1j * self.u_eg[1:])

    def block(self, i: str, j: str) -> Tridiag:
        return {"gg": self.Ugg, "ge": self.Uge, "eg": self.Ueg, "ee": self.Uee}[i + j]

    def joint_unitary(self) -> np.ndarray:
        """Dense 2D x 2D propagator in the (g-block, e-block) layout."""
        return np.block(
            [[self.Ugg.dense(), self.Uge.dense()], [self.Ueg.dense(), self.Uee.dense()]]
        )

    def atom_operator(self, bra, ket) -> Tridiag:
        """Field operator <bra|U|ket> for atomic vectors in the {g, e} basis."""
        bra = np.asarray(bra, complex).conj()
        ket = np.asarray(ket, complex)
        out = Tridiag.zeros(self.D)
        for i, a in zip("ge", bra):
            for j, b in zip("ge", ket):
                if a * b != 0:
                    out = out + (a * b) * self.block(i, j)
        return out


def build_blocks(g_t: float, D: int) -> JcmBlocks:
    if D < 2:
        raise ValueError("D must be >= 2")
    if not np.isfinite(g_t):
        raise ValueError("pulse area must be finite")
    n = np.arange(D)
    u = [np.cos(g_t * np.sqrt(n)), np.cos(g_t * np.sqrt(n + 1)),
         np.sin(g_t * np.sqrt(n + 1)), np.sin(g_t * np.sqrt(n))]
    for arr in u:
        arr.flags.writeable = False
    return JcmBlocks(float(g_t), D, *u)


@dataclass(frozen=True)
class JointState:
    """Pure atom-field state as the amplitudes of |g, n> and |e, n>."""

    g_block: np.ndarray
    e_block: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g_block, complex)
        e = np.asarray(self.e_block, complex)
        if g.shape != e.shape or g.ndim != 1:
            raise ValueError("g and e blocks must be equal-length vectors")
        object.__setattr__(self, "g_block", _frozen(g))
        object.__setattr__(self, "e_block", _frozen(e))

    @classmethod
    def product(cls, atom, field: FieldState) -> "JointState":
        atom = np.asarray(atom, complex)
        return cls(atom[0] * field.amps, atom[1] * field.amps)

    @property
    def D(self):
        return self.g_block.size

    @property
    def vector(self):
        return np.concatenate([self.g_block, self.e_block])

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def density(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


def evolve_joint(blocks: JcmBlocks, psi: JointState) -> JointState:
    g = blocks.Ugg.apply(psi.g_block) + blocks.Uge.apply(psi.e_block)
    e = blocks.Ueg.apply(psi.g_block) + blocks.Uee.apply(psi.e_block)
    return JointState(g, e)


def evolve_joint_density(blocks: JcmBlocks, rho: np.ndarray) -> np.ndarray:
    """U rho U^dag for a 2D x 2D joint density, computed blockwise."""
    D = blocks.D
    rho = np.asarray(rho, complex)
    if rho.shape != (2 * D, 2 * D):
        raise ValueError(f"joint density must be {2 * D}x{2 * D}")
    ops = [[blocks.Ugg, blocks.Uge], [blocks.Ueg, blocks.Uee]]

    def left(m):
        top, bot = m[:D], m[D:]
        return np.vstack([ops[0][0].apply(top) + ops[0][1].apply(bot),
                          ops[1][0].apply(top) + ops[1][1].apply(bot)])

    out = left(left(rho).conj().T).conj().T
    return 0.5 * (out + out.conj().T)


def trace_out_atom(rho_joint: np.ndarray, check: bool = True) -> FieldDensity:
    D = rho_joint.shape[0] // 2
    return FieldDensity(rho_joint[:D, :D] + rho_joint[D:, D:], check=check)


def trace_out_field(rho_joint: np.ndarray) -> np.ndarray:
    """Reduced 2x2 atomic density in the {g, e} basis."""
    D = rho_joint.shape[0] // 2
    return np.array([[np.trace(rho_joint[:D, :D]), np.trace(rho_joint[:D, D:])],
                     [np.trace(rho_joint[D:, :D]), np.trace(rho_joint[D:, D:])]])


def product_density(field, atom_rho) -> np.ndarray:
    """Joint density field (x) atom in the block layout."""
    from .fock import as_density

    rf = as_density(field).mat
    atom_rho = np.asarray(atom_rho, complex)
    return np.kron(atom_rho, rf)
