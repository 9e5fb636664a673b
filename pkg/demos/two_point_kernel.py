"""The two-point case in closed form.

For n = 2 the extremal problem lives in a reproducing-kernel space on an
interval, and the optimal value is exactly 1/K(0,0) for an explicit kernel
K built from sinc combinations.  No lattice, no truncation: the only
numerics are certified interval evaluations of trig closed forms, including
two removable singularities handled by a mean-value branch.
"""

from fractions import Fraction as F

from corrbound.kernel2 import k00, kernel2_eval
from corrbound.solver import fraction_bound

print("band parameter sweep: K(0,0) and the induced two-point bound")
print("%4s  %-22s %-22s %s" % ("m", "K(0,0)", "bound<=", "fraction>="))
for m in (1, 2, 3, 4, 8):
    value, bound = k00(m)
    frac = fraction_bound(2, bound)
    tag = "" if frac.lo_fraction > 0 else "  (vacuous)"
    print("%4d  %-22s %-22s %s%s"
          % (m, value.decimal_str(16), bound.decimal_str(16),
             frac.decimal_str(10), tag))
print("only m = 1 certifies a positive fraction here; two-point bounds")
print("sharper than this construction exist by other methods.")

print("\nkernel symmetry and a slice of values (m = 1):")
for x, y in ((F(1, 3), F(1, 5)), (F(1, 5), F(1, 3)), (F(0), F(1, 2))):
    v = kernel2_eval(1, x, y)
    print("  K(%s, %s) = %s  [rad %.1e]"
          % (x, y, v.decimal_str(18), float(v.radius)))

print("\nremovable points: the scaled abscissa 1/(pi sqrt 2) is a zero of")
print("a cleared denominator; enclosures stay tight straight through it")
u_num = F(22507907903927651, 10**17)
for x in (u_num, -u_num):
    v = kernel2_eval(1, x, F(1, 7))
    print("  K(%+.17f, 1/7) = %s  [rad %.1e]"
          % (float(x), v.decimal_str(18), float(v.radius)))

print("\nprecision ladder at the origin: the enclosure tracks the bits")
for prec in (64, 128, 256, 512):
    value, _ = k00(1, prec)
    print("  %4d bits  rad %.2e" % (prec, float(value.radius)))
