"""
Gate errors with imperfect ancillas
===================================

If each ancilla is prepared with probability lam in the wrong (orthogonal)
state, the field settles into a mixture of the optimal state and a companion
state. The average error then grows linearly with lam.
"""

import math

from fieldrecycle.fock import moments
from fieldrecycle.gates import (ensemble_errors, eps_one, eps_two, ideal_rotation,
                                mixed_error_budget, mixed_error_numeric, random_bloch_ensemble)
from fieldrecycle.optimal import PulseSpec, phi_theta, phi_two
from fieldrecycle.recycler import AncillaSpec, basis_weights, iterate

atoms = random_bloch_ensemble(1024, seed=11)
spec = PulseSpec.for_rotation(math.pi, 100)
p1 = phi_theta(spec)
blocks = spec.blocks(p1.D)
p2, _ = phi_two(spec, p1, blocks)
target = ideal_rotation(math.pi, spec.phi)
n_bar = moments(p1).mean_n

print(f"optimal state:   mean error {ensemble_errors(p1, target, blocks, atoms).mean:.3e}"
      f"  (pi/6n = {eps_one(n_bar):.3e})")
print(f"companion state: mean error {ensemble_errors(p2, target, blocks, atoms).mean:.3e}"
      f"  (7pi/16n = {eps_two(n_bar):.3e})")

for lam in (0.0, 0.02, 0.05, 0.1):
    print(f"lam={lam:.2f}: numeric {mixed_error_numeric(lam, 100, atoms):.4e}"
          f"  budget {mixed_error_budget(lam, 100):.4e}")

# Running the imperfect channel itself at a smaller n
small = PulseSpec.for_rotation(math.pi, 25)
q1 = phi_theta(small)
b = small.blocks(q1.D)
q2, _ = phi_two(small, q1, b)
rho, trace = iterate(q1.projector(), AncillaSpec(small.theta, small.phi, 0.02), b, target=q1)
w1, w2 = basis_weights(rho, q1, q2)
print(f"n=25, lam=0.02: converged in {trace.iterations} steps, weights {w1:.4f} / {w2:.4f},"
      f" off-support {1 - w1 - w2:.1e}")
