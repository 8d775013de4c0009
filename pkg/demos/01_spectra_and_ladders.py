"""Spectra and ladder realizations.

Builds eigenvalue sequences (equally spaced, deformed, explicit), shifts them
to zero ground level, inspects factorial products and convergence radii, and
realizes the phase-twisted lowering operators on the two-sector space.
"""

import numpy as np

from vcslab import spectra, hilbert

# --- eigenvalue sequences ----------------------------------------------------
linear = spectra.linear_sequence(12, omega=1.0, offset=0.3)
deformed = spectra.quon_sequence(12, q=0.5)
explicit = spectra.make_sequence([0.1, 0.9, 2.2, 4.0, 6.3])

print("linear spectrum:  ", np.round(linear.values[:6], 3), "...")
print("deformed spectrum:", np.round(deformed.values[:6], 4), "...")
print("explicit spectrum:", explicit.values)

# shifting subtracts the ground level; factorial products live on the shifts
shifted = spectra.shift(linear)
cache = spectra.factorials(shifted)
print("\nshifted values:   ", np.round(shifted.values[:6], 3), "...")
print("running products: ", np.round(cache.products[:6], 3), "...")
print("log-domain column:", np.round(cache.log_products[:6], 3), "...")

# the convergence radius is guessed from the tail increments
for name, seq in (("linear", linear), ("deformed q=0.5", spectra.quon_sequence(50, 0.5))):
    estimate = spectra.radius_estimate(seq)
    print(f"radius estimate [{name}]: flag={estimate.flag} limit={estimate.limit}")

# disjointness scan between two spectra
other = spectra.linear_sequence(12, omega=np.sqrt(2.0), offset=0.55)
report = spectra.eds_check(linear, other)
print(f"\ndisjoint spectra: {report.disjoint} (min gap {report.min_gap:.3f} at pair {report.pair})")

# --- ladder realizations -----------------------------------------------------
# two-sector lowering operator with phase twist gamma
gamma = 0.7
seqs = [spectra.shift(linear), spectra.shift(other)]
b = hilbert.lowering_operator(seqs, gamma)
print("\nlowering operator block (0,0), first 4x4:")
print(np.round(b.block(0, 0)[:4, :4], 3))

# B+ B is diagonal with the shifted eigenvalues on every sector
diag = np.diag((b.adjoint() @ b).matrix).real
print("B+B diagonal head:", np.round(diag[:6], 3))

# plain and deformed single-sector ladders carry their commutation diagnostics
boson = hilbert.boson_ladder(8)
quon = hilbert.quon_ladder(8, 0.5)
print("\nplain ladder commutator defect (interior, top):",
      boson.diagnostics["commutator_defect_interior"],
      boson.diagnostics["commutator_defect_top"])
print("deformed ladder relation defect (interior):",
      quon.diagnostics["qmutator_defect_interior"])

# first-order differential ladder on a grid; [a, a+] tracks 2c W'(x)
grid = hilbert.GridSpec(-10.0, 10.0, 512)
ladder = hilbert.grid_ladder(lambda x: x, grid)
print("grid ladder commutator probe residual:",
      f"{ladder.diagnostics['commutator_probe_residual']:.2e} (second order in dx)")
