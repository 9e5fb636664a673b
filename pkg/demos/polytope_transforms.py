"""Tour of the polytope transforms behind the bound machinery.

The body in play is H = {x : |x_1| + ... + |x_k| + |x_1 + ... + x_k| <= 1},
an interval for k = 1, a hexagon for k = 2.  Its Fourier transform is the
basic building block of every lattice-route Gram entry, so this script walks
its exact values, its removable singularities, and the companion
cross-polytope transform.
"""

from fractions import Fraction as F

from corrbound.arith import iv_pi, iv_sin
from corrbound.polytopes import (
    HPolytope,
    classify_singular,
    ft_cross_polytope,
    ft_H,
    ft_H_singular_limit,
    hpolytope_vertices,
)

print("volumes (transform at the origin)")
for n in (2, 3, 4, 5):
    print("  n=%d  vol = %s" % (n, ft_H(n, (0,) * (n - 1))))

print("\nhexagon vertices (unit scale)")
for v in hpolytope_vertices(3):
    print("  (%s, %s)" % v)

print("\nk = 1 the transform is a plain sinc:")
y = F(1, 3)
val = ft_H(2, (y,))
ang = iv_pi(256) * y
print("  ft at 1/3      = %s" % val.decimal_str(20))
print("  sin(pi/3)/(pi/3) = %s" % (iv_sin(ang) / ang).decimal_str(20))

print("\ngeneric hexagon values are certified enclosures:")
for y in ((F(1, 5), F(2, 7)), (F(-3, 4), F(1, 3))):
    val = ft_H(3, y)
    print("  ft at (%s, %s) = %s  [rad %.1e]"
          % (y[0], y[1], val.decimal_str(18), float(val.radius)))

print("\nthe singular set: coordinates that null a denominator")
for y in ((F(1, 2), F(1, 2)), (F(0), F(2, 5)), (F(1, 4), F(-1, 4))):
    pat = classify_singular(y)
    desc = ("zeros at %s, tied groups %s" % (pat.zeros, pat.groups)
            if pat.is_singular else "regular")
    print("  (%s, %s) -> %s" % (y[0], y[1], desc))

print("\nremovable points evaluate through a dedicated limit:")
lim = ft_H_singular_limit(3, (F(1), F(0)))
print("  limit at (1, 0)  = %s" % lim.decimal_str(18))
near = ft_H(3, (F(1), F(1, 10**6)))
print("  nearby regular   = %s" % near.decimal_str(18))

print("\nscaling: a body at scale t picks up t^k and a dilated argument")
h = HPolytope(3, F(1, 2))
print("  half-scale volume = %s (vs %s at unit scale)"
      % (ft_H(h, (0, 0)), ft_H(3, (0, 0))))

print("\ncross-polytope transform (the L1 ball), volumes 2^n/n!:")
for n in (1, 2, 3, 4, 5):
    print("  n=%d  vol = %s" % (n, ft_cross_polytope(n, (0,) * n)))
