# %% [markdown]
# # Tensor cubature against the Monte Carlo oracle
#
# The tensor rule (Gauss-Legendre in rho and cos(phi), periodic in theta)
# integrates polynomials exactly and converges fast for smooth fields. For a
# kinked max-affine field convergence is slower; the Monte Carlo estimate
# with its standard error serves as an independent check.

# %%
import math

from hhball import Ball, QuadratureSpec, ball_integral, catalog, mc_ball_integral

ball = Ball((0, 0, 0), 1.0)
smooth = catalog("exp-affine", [1.0, -0.5, 0.25, 0.0])
kinked = catalog("max-affine", [1, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0.2])

print(" n   exp-affine              err est    max-affine              err est")
for n in (2, 4, 8, 16, 32):
    spec = QuadratureSpec(n, n, 2 * n)
    a, b = ball_integral(smooth, ball, spec), ball_integral(kinked, ball, spec)
    print(f"{n:2d}   {a.value:.15f}   {a.error_estimate:.1e}    {b.value:.15f}   {b.error_estimate:.1e}")

# %%
for name, f in (("exp-affine", smooth), ("max-affine", kinked)):
    mc = mc_ball_integral(f, ball, QuadratureSpec(mc_samples=1_000_000, seed=1))
    t = ball_integral(f, ball)
    print(f"{name}: tensor {t.value:.6f}, Monte Carlo {mc.value:.6f} +- {mc.error_estimate:.1e}"
          f" ({abs(t.value - mc.value) / mc.error_estimate:.2f} standard errors apart)")

# %% [markdown]
# Exact reference for the smooth field: the integral of exp(g.p) over the unit
# ball is 4 pi (k cosh k - sinh k) / k^3 with k = |g|.

# %%
k = math.sqrt(1 + 0.25 + 0.0625)
print("closed form", 4 * math.pi * (k * math.cosh(k) - math.sinh(k)) / k**3)
