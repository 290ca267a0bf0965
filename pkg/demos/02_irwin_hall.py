"""Exact Irwin-Hall densities and their log-concavity margin."""

# %%
from fractions import Fraction as F

import numpy as np

from staircase import closed_form_irwin_hall, irwin_hall, log_concavity_margin

I5 = irwin_hall(5)
print(I5.breakpoints)
print(I5(F(5, 2)), closed_form_irwin_hall(5, F(5, 2)))

# %%
# tabulate on a float grid; breakpoints are avoided by the half-step offset
xs = np.arange(1, 50) / 10 + 0.05
vals = np.array([float(I5(F(x).limit_denominator(1000))) for x in xs])
print("peak near", xs[vals.argmax()], "max", vals.max())

# %%
# the margin tends to 12/b, the Gaussian value for variance b/12
for b in range(4, 13):
    rep = log_concavity_margin(b, F(1, 2), b - F(1, 2), F(1, 64))
    print(b, round(float(rep.min_value), 4), "at", rep.argmin, round(float(rep.min_value) * b / 12, 3))
