"""
Optimal field states for a rotation
===================================

Build the field state that a Theta-rotation leaves untouched, compare it with
its Gaussian approximation and look at how its width depends on Theta.
"""

import math

import numpy as np

from fieldrecycle.fock import coherent_state, fidelity, moments
from fieldrecycle.optimal import PulseSpec, mean_n_prediction, phi_theta, phi_theta_gaussian

# A pi pulse tuned for n_Theta = 25 photons
spec = PulseSpec.for_rotation(math.pi, 25)
state = phi_theta(spec)
m = moments(state)
print(f"pi pulse, n_Theta=25: D={state.D}, support ends at n={spec.n_max}")
print(f"  mean n = {m.mean_n:.4f} (closed form {mean_n_prediction(25):.4f})")
print(f"  delta n = {m.delta_n:.4f}, coherent state would have {math.sqrt(m.mean_n):.4f}")

# The Gaussian approximation with the cubic skew factor is very close
gauss = phi_theta_gaussian(spec)
print(f"  overlap with the skewed Gaussian: {fidelity(state, gauss):.6f}")
print(f"  overlap with a coherent state:    {fidelity(state, coherent_state(5, state.D)):.6f}")

# Smaller rotations want broader number distributions
for Theta in (math.pi / 4, math.pi / 2, math.pi):
    s = phi_theta(PulseSpec.for_rotation(Theta, 100))
    mm = moments(s)
    law = math.sqrt(2 * mm.mean_n * math.sin(Theta / 2) / Theta)
    print(f"Theta={Theta:.3f}: mean n={mm.mean_n:8.3f}  delta n={mm.delta_n:7.3f}  width law={law:7.3f}")

# Photon-number distribution, coarse text histogram
p = state.probabilities
for n in range(10, 42, 2):
    print(f"{n:3d} {'#' * int(round(400 * p[n]))}")
