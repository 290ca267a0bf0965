"""The convolution bound on (-log(f*g))'' in two cases."""

# %%
from fractions import Fraction as F

from staircase import GaussianDensity, irwin_hall_lemma_case, lemma1_check

grid = [F(k, 2) for k in range(-6, 7)]
rep = lemma1_check(GaussianDensity(2), GaussianDensity(3), 2, 3, grid)
print("gaussian:", rep.bound, rep.min_slack)

# %%
# Irwin-Hall blocks; A and B come from the exact margins of each factor
for b1, b2 in ((4, 4), (4, 5), (4, 7)):
    rep = irwin_hall_lemma_case(b1, b2)
    print(b1, b2, round(float(rep.bound), 4), round(float(rep.min_slack), 4), rep.holds)
