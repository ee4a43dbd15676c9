"""Tour of the two structuring elements and their parametrization links.

The directional K-functions count point pairs inside a double spherical
cone or a cylinder aligned with a probe direction.  This script shows the
membership tests, the volumes, and the two ways of tying the cone and the
cylinder together so their curves live on a comparable scale.
"""

import math

import numpy as np

from aniso3d import (
    ConeParams,
    CylinderParams,
    Z_AXIS,
    cone_contains,
    cone_volume,
    cylinder_contains,
    cylinder_volume,
    direction_set,
    equal_shape_link,
    equal_volume_link,
)

# ---------------------------------------------------------------------------
# Membership: a double cone of half angle ~26.6 degrees along z
# ---------------------------------------------------------------------------
cone = ConeParams(r_cn=1.0, theta=0.4636476)
print("double cone", cone)
for v in ([0.0, 0.0, 0.9], [0.0, 0.0, -0.9], [0.9, 0.0, 0.0], [0.3, 0.0, 0.7]):
    print(f"  v={v}: inside={bool(cone_contains(cone, Z_AXIS, v))}")

cyl = CylinderParams(r_cl=0.5, h=1.0)
print("cylinder", cyl)
for v in ([0.0, 0.0, 0.0], [0.4, 0.0, 0.9], [0.6, 0.0, 0.0]):
    print(f"  v={v}: inside={bool(cylinder_contains(cyl, Z_AXIS, v))}")

# ---------------------------------------------------------------------------
# Volumes, checked against a quick Monte Carlo hit rate
# ---------------------------------------------------------------------------
rng = np.random.default_rng(0)
samples = rng.uniform(-1.0, 1.0, (200_000, 3))
ball = samples[np.sum(samples**2, axis=1) <= 1.0]
hit_rate = np.mean(cone_contains(cone, Z_AXIS, ball))
print(f"cone volume analytic  {cone_volume(cone):.6f}")
print(f"cone volume hit-rate  {hit_rate * 4 * math.pi / 3:.6f}")
print(f"ball limit (theta=pi/2): {cone_volume(ConeParams(1.0, math.pi / 2)):.6f}"
      f" = 4pi/3 = {4 * math.pi / 3:.6f}")

# ---------------------------------------------------------------------------
# Equal shape: inscribe the cone in the cylinder via an aspect ratio
# ---------------------------------------------------------------------------
# With aspect ratio a = h / r_cl the link gives h = a r, r_cn = r sqrt(a^2+1),
# and theta = arctan(1/a).  a = 2 reproduces theta = 0.4636476.
for a in (1.5, 2.0, 3.0):
    c, k = equal_shape_link(1.0, a)
    print(f"a={a}: cylinder (r={c.r_cl}, h={c.h})  cone (r_cn={k.r_cn:.6f}, "
          f"theta={k.theta:.7f})  slant identity residual="
          f"{k.r_cn**2 - c.h**2 - c.r_cl**2:+.2e}")

# The cone's spherical caps poke through the cylinder's flat faces: the
# element boundary along the axis reaches r_cn > h.
c, k = equal_shape_link(1.0, 2.0)
tip = np.array([0.0, 0.0, 0.99 * k.r_cn])
print(f"axis tip {tip[2]:.3f}: in cone={bool(cone_contains(k, Z_AXIS, tip))}, "
      f"in cylinder={bool(cylinder_contains(c, Z_AXIS, tip))}")

# ---------------------------------------------------------------------------
# Equal volume: fix the cone half height, match the cylinder volume exactly
# ---------------------------------------------------------------------------
for h_cn in (0.5, 1.0, 2.0):
    k = equal_volume_link(c, h_cn)
    print(f"h_cn={h_cn}: r_cn={k.r_cn:.6f} theta={k.theta:.6f} "
          f"V_cn={cone_volume(k):.9f} V_cl={cylinder_volume(c):.9f}")

# ---------------------------------------------------------------------------
# Direction sets: coordinate axes for the tests, spirals for exploration
# ---------------------------------------------------------------------------
print("axes:\n", direction_set(3))
us = direction_set(20)
print(f"spiral n=20: norms all 1: {np.allclose(np.linalg.norm(us, axis=1), 1.0)}")
