"""
Perturbative identities under exact evolution
=============================================

Each line compares an amplitude, norm or projection computed by exact
propagation with its lowest-order closed form, at two photon numbers.
"""

import math

from fieldrecycle.appendix import verify_a4, verify_a6_residual, verify_a13, verify_a15, verify_a18_a21
from fieldrecycle.optimal import PulseSpec

for n in (100, 400):
    spec = PulseSpec.for_rotation(math.pi, n)
    print(f"n_Theta = {n}")
    for rep in (verify_a4(spec), verify_a18_a21(spec)):
        for name, measured, predicted, dev in rep.as_rows():
            shown = f"{measured: .6f}" if isinstance(measured, float) else f"{measured:.6f}"
            print(f"  {name:20s} measured {shown}  predicted {predicted: .6f}  |dev| {dev:.1e}")
    for name, (m, p) in (("diagonal deficit", verify_a13(spec)), ("companion norm^2", verify_a15(spec))):
        print(f"  {name:20s} measured {m: .6f}  predicted {p: .6f}")
    print(f"  residual of the v2 rotation: {verify_a6_residual(spec):.4f}")
