"""Why adjoin the backward data? A tour of the rank structure.

A sum of K undamped complex exponentials makes its Hankel matrix rank K,
but so does a sum of K damped ones: the plain Hankel model cannot tell
them apart. Adjoining the conjugated, reversed signal's Hankel block
changes that: undamped signals stay rank K, while off-circle poles cost
an extra rank unit unless they arrive with their conjugate-reciprocal
partner. This script walks through each case numerically.

Run:  python demos/01_rank_structure.py
"""

import numpy as np

from demac import (
    LevelShape,
    SpectralParams,
    double_hankel,
    level_hankel,
    numeric_rank,
    synthesize,
)

N = 21
shape = LevelShape.from_splits((N,), (11,))


def show(label, params):
    y = synthesize(params, (N,))
    r_single, _ = numeric_rank(level_hankel(y, shape))
    r_double, _ = numeric_rank(double_hankel(y, shape).matrix)
    print(f"{label:54s} rank(H y) = {r_single}   rank([H y | backward]) = {r_double}")


print(f"N = {N} samples, Hankel blocks 11 x 11 (augmented: 11 x 22)\n")

# 1. Three undamped components: both models agree at rank 3.
on_circle = SpectralParams(
    freqs=[[0.12], [0.31], [0.77]],
    amps=[1.0, 0.7 - 0.2j, 1.5j],
)
show("three poles on the unit circle", on_circle)

# 2. One of them damped: the plain model is blind to the change, the
#    augmented matrix pays one extra rank unit.
damped = SpectralParams(
    freqs=[[0.12], [0.31], [0.77]],
    amps=[1.0, 0.7 - 0.2j, 1.5j],
    damping=[[1.0], [1.08], [1.0]],
)
show("same, but the middle pole pushed off the circle", damped)

# 3. Add the conjugate-reciprocal partner of the damped pole (same
#    frequency, reciprocal magnitude): the augmented matrix accepts the
#    pair, at rank 4 for 4 poles.
paired = SpectralParams(
    freqs=[[0.12], [0.31], [0.31], [0.77]],
    amps=[1.0, 0.7 - 0.2j, 0.4 + 0.3j, 1.5j],
    damping=[[1.0], [1.08], [1 / 1.08], [1.0]],
)
show("partner with reciprocal magnitude added (4 poles)", paired)

# 4. The degenerate one-entry signal: Hankel rank 1 without being a
#    one-pole exponential; the augmented matrix expels it.
impulse = np.zeros(N, dtype=complex)
impulse[0] = 2.0 - 1.0j
r1, _ = numeric_rank(level_hankel(impulse, shape))
r2, _ = numeric_rank(double_hankel(impulse, shape).matrix)
print(f"{'single nonzero entry (no exponential structure)':54s} rank(H y) = {r1}   rank([H y | backward]) = {r2}")

print(
    "\nThe augmented matrix keeps rank K exactly when every pole is on the"
    "\ncircle or paired with its conjugate reciprocal: that is the prior the"
    "\nrecovery algorithms exploit."
)
