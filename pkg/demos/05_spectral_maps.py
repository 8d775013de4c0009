"""Spectrum-mapped companions and the map-equality question.

Replacing h by f(h) inside the companion construction produces an operator
with spectrum f(e_n).  Does f(companion of h) equal companion of f(h)?  A
sufficient condition is the projection identity (x N1^-1 x+) h^l x = h^l x;
the probes below gather numerical evidence on the ladder cases, where the
equality holds even though the range of x misses the two lowest levels.
"""

import numpy as np

from vcslab import hilbert, intertwine
from vcslab.hilbert import BlockOperator
from vcslab.intertwine import IntertwiningProblem, SpectralMap

dim = 60

# --- plain ladder: closed forms under maps ------------------------------------
a = hilbert.boson_ladder(dim).matrix
ad = a.conj().T
problem = IntertwiningProblem(
    h=BlockOperator.single_sector(ad @ a),
    x=BlockOperator.single_sector(ad @ ad),
    ladder_degree=2,
)
n_op = (ad @ a).real
window = np.ix_(problem.mask, problem.mask)

iso = intertwine.construct_companion(problem)
print("plain ladder, x = (a+)^2:")
print("  N1 equals N^2+3N+2 to",
      f"{hilbert.max_abs((iso.n1.matrix - (n_op@n_op + 3*n_op + 2*np.eye(dim)))[window]):.1e}")
print("  companion equals N+2 to",
      f"{hilbert.max_abs((iso.companion.matrix - (n_op + 2*np.eye(dim)))[window]):.1e}")

squared = intertwine.map_companion(problem, SpectralMap.polynomial([0, 0, 1]))
ref = (n_op + 2 * np.eye(dim)) @ (n_op + 2 * np.eye(dim))
print("  f(t)=t^2 companion equals (N+2)^2 to",
      f"{hilbert.max_abs((squared.companion.matrix - ref)[window]):.1e}")

probe = intertwine.power_series_equality_probe(problem, SpectralMap.polynomial([0, 0, 1]))
print(f"  map-equality probe residual: {probe.max_residual:.1e} over {probe.n_trials} trials")

check = intertwine.projection_identity_check(problem, l_max=4)
print(f"  projection-identity residuals by order: "
      f"{['%.1e' % r for r in check.order_residuals]}")
print(f"  range deficiency on the window: {check.rank_deficiency} "
      "(the two lowest levels are orthogonal to Ran(x))")

# --- deformed ladder ----------------------------------------------------------
q = 0.5
report = intertwine.quon_closed_forms(dim, q)
print(f"\ndeformed ladder q={q}: closed-form deviations "
      f"N1 {report.n1_deviation:.1e}, companion {report.companion_deviation:.1e}")

aq = hilbert.quon_ladder(dim, q).matrix
problem_q = IntertwiningProblem(
    h=BlockOperator.single_sector(aq.conj().T @ aq),
    x=BlockOperator.single_sector(aq.conj().T @ aq.conj().T),
    ladder_degree=2,
)
f = SpectralMap.polynomial([0.5, 1.0, 0.25])
probe_q = intertwine.power_series_equality_probe(problem_q, f)
print(f"deformed map-equality probe residual: {probe_q.max_residual:.1e}")

# --- invertible intertwiner: the sufficient condition holds trivially ----------
problem_i = IntertwiningProblem(
    h=BlockOperator.single_sector(n_op),
    x=BlockOperator.single_sector(np.eye(dim) + n_op),
    ladder_degree=0,
)
check_i = intertwine.projection_identity_check(problem_i, l_max=4)
print(f"\ninvertible x = 1 + N: deficiency {check_i.rank_deficiency}, "
      f"projector commutant residual {check_i.commutant_residual:.1e}")
