"""The lattice shift route: interval-certified bounds for n = 3 and n = 4.

Trial functions here are sums of translated body transforms over group
orbits of a scaled integer lattice.  Gram entries become lattice sums,
truncated to a box of scale C with a certified tail estimate, so every
bound carries an explicit radius.  Growing C shrinks the radius; the
midpoints stabilize well before the enclosures get tight.
"""

import time
from fractions import Fraction as F

from corrbound.cli import ceil_decimal
from corrbound.functionals import TruncationParams, assemble_gram, default_shift
from corrbound.solver import certify_bound, solve_rank1
from corrbound.symmetry import invariant_shift_basis


def run(n, m, d, C):
    basis = invariant_shift_basis(n, m, d)
    params = TruncationParams(n=n, m=m, C=C)
    system = assemble_gram(n, m, basis, params=params)
    return certify_bound(system, solve_rank1(system)), len(basis)


print("default sampling shifts (chosen off the singular set):")
for n, m in ((3, 1), (3, 2), (4, 1)):
    print("  n=%d m=%d  s = %s" % (n, m, default_shift(n, m)))

print("\n(3,1) bound at d = 1: enclosure narrows as the box grows")
print("%6s  %-13s %-12s %s" % ("C", "mid", "rad", "s"))
for C in (40, 80, 160, 320):
    start = time.monotonic()
    cert, _ = run(3, 1, 1, C)
    print("%6d  %-13s %-12.2e %.2f"
          % (C, cert.bound.decimal_str(10), float(cert.bound.radius),
             time.monotonic() - start))
print("the exact route pins this quantity near 0.07771; the lattice route")
print("gets there with certified slack instead of exactness.")

print("\n(3,2) table at C = 200: wider band, weaker bound")
print("%4s %6s  %-13s %s" % ("d", "basis", "bound<=", "fraction mid"))
for d in (0, 1, 2):
    cert, k = run(3, 2, d, 200)
    print("%4d %6d  %-13s %s"
          % (d, k, ceil_decimal(cert.bound), cert.fraction.decimal_str(8)))

print("\n(4,1) single-orbit bound: the four-point reference is 447/3500")
cert, _ = run(4, 1, 0, 25)
lo, hi = cert.bound.lo_fraction, cert.bound.hi_fraction
print("  C=25 enclosure [%.6f, %.6f]" % (lo, hi))
print("  contains 447/3500 = %.6f: %s"
      % (F(447, 3500), lo <= F(447, 3500) <= hi))
print("  fraction midpoint %s" % cert.fraction.decimal_str(8))
