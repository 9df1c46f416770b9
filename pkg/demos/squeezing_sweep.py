"""
Amplitude squeezing versus the optimal state
============================================

Average gate errors of displaced squeezed states over a random ensemble of
initial atomic states, as a function of the squeeze parameter r. The best
squeezed state is almost as good as the optimal state.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from fieldrecycle.gates import ensemble_errors, ideal_rotation, random_bloch_ensemble, squeeze_sweep
from fieldrecycle.optimal import PulseSpec, phi_theta

atoms = random_bloch_ensemble(512, seed=3)
grid = np.round(np.linspace(0, 0.6, 31), 12)

for Theta in (math.pi, math.pi / 2):
    spec = PulseSpec.for_rotation(Theta, 25)
    blocks = spec.blocks(135)
    with ThreadPoolExecutor() as pool:
        table = squeeze_sweep(25, Theta, grid, atoms, blocks, executor=pool)
    optimal = ensemble_errors(phi_theta(spec.with_dim(135)), ideal_rotation(Theta, spec.phi),
                              blocks, atoms)
    print(f"Theta={Theta:.4f}")
    for row in table.rows[::5]:
        print(f"  r={row.r:.2f}  delta n={row.delta_n:6.3f}  mean error={row.report.mean:.5f}"
              f"  from |g>={row.ground_error:.5f}")
    best = table.best
    print(f"  best r={best.r:.2f}: mean error {best.report.mean:.5f}, optimal state {optimal.mean:.5f}")
