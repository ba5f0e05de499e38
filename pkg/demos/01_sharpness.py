# %% [markdown]
# # The trapezoid bound is attained
#
# For the cone ``f(p) = R - |p - C|`` the gap between the surface mean and the
# volume mean equals the bound ``(1 / (16 pi R)) * integral of |df/drho|``
# exactly: both are ``R / 4``. This script checks that on several balls.

# %%
from hhball import Ball, catalog, check_trapezoid, means

for center, radius in [((0, 0, 0), 1.0), ((2, -1, 0.5), 0.3), ((-4, 4, 4), 3.0)]:
    ball = Ball(center, radius)
    cone = catalog("sharpness-cone", [], ball)
    s = means(cone, ball)
    r = check_trapezoid(cone, ball)
    print(f"R={radius:4}: volume mean {s.volume_mean:.12f} (R/4 = {radius / 4:.12f}), "
          f"surface mean {s.surface_mean:+.1e}")
    print(f"        |surface - volume| = {r.lhs:.12f}   bound = {r.rhs:.12f}   margin {r.margin:+.1e}")

# %% [markdown]
# The same run from the command line:
#
#     hhball --ball 0,0,0,1 --catalog sharpness-cone --check trapezoid
