# %% [markdown]
# # The Hermite-Hadamard chain and its hypothesis
#
# For convex ``f`` the center value, the volume mean and the surface mean are
# increasing. Every report carries a sampled convexity certificate, so a
# failing inequality can be read next to the failing hypothesis.

# %%
import numpy as np

from hhball import Ball, catalog, check_hh_chain

ball = Ball((0.5, -0.5, 1.0), 1.5)
rng = np.random.default_rng(0)
fields = {
    "norm-squared": catalog("norm-squared", [0, 0, 0]),
    "max-affine": catalog("max-affine", rng.normal(size=16).tolist()),
    "exp-affine": catalog("exp-affine", [0.5, 0.2, -0.3, 0.0]),
    "sharpness-cone (concave)": catalog("sharpness-cone", [], ball),
}

for name, f in fields.items():
    lower, upper = check_hh_chain(f, ball)
    cert = lower.hypothesis_certificates[0]
    print(f"{name:26s} f(C)={lower.lhs:9.5f} <= vol={lower.rhs:9.5f} <= surf={upper.rhs:9.5f}"
          f"   holds={lower.holds and upper.holds}   convex sample passed={cert.passed}")

# %% [markdown]
# The cone breaks the chain, and its certificate names a chord where convexity fails:

# %%
lower, _ = check_hh_chain(fields["sharpness-cone (concave)"], ball)
x, y, lam = lower.hypothesis_certificates[0].counterexample
print("x =", np.round(x, 4), " y =", np.round(y, 4), " lambda =", round(lam, 4))
