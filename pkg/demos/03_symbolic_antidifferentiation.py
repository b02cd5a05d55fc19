"""The noncommutative phrase calculus.

Phrases are sums of words over constants, z powers and the marker/operator
symbols; bracket trees are kept verbatim because octonion products do not
reassociate.  Differentiation at 1 and its exact inverse run entirely in
rational coefficient arithmetic, so round trips are exact.
"""

import numpy as np

from cdconf import phrase as ph
from cdconf.algebra import CdNumber, cd, mul

# parsing keeps bracket structure; adjacent powers merge
print(ph.parse("z^2 z^3").render())
print(ph.parse("(e z) e").render(), "!=", ph.parse("e (z e)").render())

# differentiate a two-group word: Leibniz at the marker level
nu = ph.parse("[0,1,0,0] z^2 [0,0,1,0] z^3 [0,0,0,1]")
print("\nd/dz at 1:")
print("  ", nu.derivative_at_one().render())

# antidifferentiation inverts it exactly, on either telescoping branch
for side in ("left", "right"):
    mu = nu.antiderive(side)
    print(f"\n{side} antiderivative ({len(mu.words)} words):")
    print("  ", mu.render())
    assert mu.derivative_at_one() == nu  # exact, not approximate

# both branches solve the same problem; their difference is a constant of
# the calculus (vanishing derivative), though not the same phrase
diff = nu.antiderive("left") - nu.antiderive("right")
print("\nbranch difference derivative is zero:", diff.derivative_at_one().is_zero())

# the hat operator opens the derivative's direction slot
hat = ph.parse("z").hat()
print("\nhat(z) =", hat.render())
z0, h = cd([1, 1, 0, 0]), cd([0, 0, 1, 0])
print("hat(z).h =", hat.eval(z0, h=h).coeffs, "= (z h + h z)/2 =",
      ((mul(z0, h) + mul(h, z0)) * 0.5).coeffs)

# phrase geometry: symbol lengths and the graded proximity metric
w = ph.parse("[0,1,0,0] z^3 [0,0,1,0]")
print("\nlength of a z^3 b:", ph.word_length(w.words[0]))
print("d(z^2, z^3) =", ph.phrase_distance(ph.parse("z^2"), ph.parse("z^3")))
print("d(nu, nu)   =", ph.phrase_distance(nu, nu))
