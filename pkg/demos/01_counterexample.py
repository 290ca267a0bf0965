"""Where unimodality breaks: the n=19, b=6 staircase."""

# %%
from staircase import StaircaseShape, check_unimodal, staircase_gf_dp

shape = StaircaseShape(19, 6)
poly = staircase_gf_dp(shape)
print(len(poly), "coefficients, total", poly.total())

# %%
rep = check_unimodal(poly)
print("unimodal:", rep.is_unimodal, "violations:", rep.violations)

# the dip is a single step, buried in numbers near 1280
for ell in range(rep.violations[0] - 3, rep.violations[0] + 3):
    print(ell, poly[ell])

# %%
# neighbours of (19, 6) along n
for n in range(14, 24):
    r = check_unimodal(staircase_gf_dp((n, 6)))
    print(n, "ok" if r.is_unimodal else f"fails at {list(r.violations)}")
