"""Independent reference implementations used to produce and check expected values.

None of these share code with the package beyond plain numpy/scipy/mpmath.
"""

import math

import mpmath
import numpy as np
from scipy.linalg import expm


def ladder(D):
    return np.diag(np.sqrt(np.arange(1, D)), 1).astype(complex)


def jcm_unitary_expm(gt, D):
    """exp(-i gt (a|e><g| + a^dag|g><e|)) in the (g-block, e-block) layout.

    The truncated Hamiltonian leaves |e, D-1> uncoupled, so the column for that
    state differs from the untruncated propagator.
    """
    a = ladder(D)
    z = np.zeros((D, D), complex)
    # |g><e| carries a^dag, |e><g| carries a
    H = np.block([[z, a.conj().T], [a, z]])
    return expm(-1j * gt * H)


def squeezed_expm(alpha, r, D, pad=120):
    """D(alpha) S(r)|0> by matrix exponentials of the generators, on a padded space."""
    N = D + pad
    a = ladder(N)
    ad = a.conj().T
    S = expm(0.5 * r * (a @ a - ad @ ad))
    Dop = expm(alpha * ad - np.conj(alpha) * a)
    vac = np.zeros(N, complex)
    vac[0] = 1
    return (Dop @ S @ vac)[:D]


def phi_pi_mean_mp(n_pi, dps=40):
    """Mean photon number of the pi-pulse fixed point from the recursion in high precision."""
    mpmath.mp.dps = dps
    gT = mpmath.pi / (2 * mpmath.sqrt(n_pi))
    c = [mpmath.mpf(1)]
    for n in range(1, 4 * n_pi):
        c.append(c[-1] * mpmath.cot(gT * mpmath.sqrt(n) / 2))
    p = [x * x for x in c]
    tot = mpmath.fsum(p)
    return float(mpmath.fsum(n * pn for n, pn in enumerate(p)) / tot)


def dense_channel(rho, atom_rho, U):
    """Tr_atom[U (atom_rho (x) rho) U^dag] with a dense joint propagator U."""
    D = rho.shape[0]
    joint = U @ np.kron(atom_rho, rho) @ U.conj().T
    return joint[:D, :D] + joint[D:, D:]


def random_density(rng, D, rank=None, support=None):
    """Random density on the lowest ``support`` levels (keeps the top levels empty)."""
    support = support or D
    rank = rank or support
    X = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    small = X @ X.conj().T
    rho = np.zeros((D, D), complex)
    rho[:support, :support] = small / np.trace(small).real
    return rho


def bloch_rotation(Theta, axis_azimuth):
    """Rotation about an equatorial axis written out entry by entry."""
    c, s = math.cos(Theta / 2), math.sin(Theta / 2)
    e = complex(math.cos(axis_azimuth), math.sin(axis_azimuth))
    return np.array([[c, -1j * s * e.conjugate()], [-1j * s * e, c]])
