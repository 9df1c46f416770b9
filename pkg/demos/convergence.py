"""
Recycling ancillas until the field converges
============================================

A coherent field first flips one ground-state atom, which leaves it slightly
mixed. Feeding it ancillas prepared in (|g> + i|e>)/sqrt(2) drives it to the
optimal pi-pulse state, from either phase of the initial coherent state.
"""

import math

import numpy as np

from fieldrecycle.fock import coherent_state, moments
from fieldrecycle.jcm import evolve_joint_density, product_density, trace_out_atom
from fieldrecycle.optimal import PulseSpec, phi_theta
from fieldrecycle.recycler import AncillaSpec, iterate

spec = PulseSpec.for_rotation(math.pi, 25)
blocks = spec.blocks()
target = phi_theta(spec)
ancilla = AncillaSpec(spec.theta, spec.phi)

for alpha in (5, -5):
    start = coherent_state(alpha, blocks.D)
    joint = evolve_joint_density(blocks, product_density(start, np.diag([1, 0])))
    field = trace_out_atom(joint)
    print(f"alpha={alpha:+d}: after the ground-state atom mean n = {moments(field).mean_n:.3f}")

    rho, trace = iterate(field, ancilla, blocks, max_iters=3000, target=target)
    fid, pur = trace.column("fidelity"), trace.column("purity")
    for k in (1, 10, 30, 60, 200, 1000):
        if k <= trace.iterations:
            print(f"  after {k:4d} ancillas: fidelity {fid[k - 1]:.6f}, purity {pur[k - 1]:.6f}")
    print(f"  converged after {trace.iterations} ancillas, final mean n = {moments(rho).mean_n:.4f}")
    print(f"  lowest purity on the way: {pur.min():.4f}")
