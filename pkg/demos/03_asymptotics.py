"""Contour integrals J_m against the Irwin-Hall main term."""

# %%
from staircase import (
    QuadratureConfig,
    convergence_study,
    discriminant,
    empirical_orders,
    jm_integral,
    staircase_gf_dp,
)

est = jm_integral((40, 5), 80, 0)
print(est.value, staircase_gf_dp((40, 5))[80])

# %%
for m in (0, 1, 2):
    rows = convergence_study(5, m, 2.5, [64, 128, 256, 512])
    print(m, [f"{r.error:.3e}" for r in rows], [round(o, 3) for o in empirical_orders(rows)])

# %%
# the contour offset matters for J_2 at moderate n
for scale in (0.25, 0.5, 1.0):
    d = discriminant((256, 5), 640, QuadratureConfig(alpha_scale=scale))
    print(scale, f"{d.j_disc:.4e}", round(d.ratio, 4))
