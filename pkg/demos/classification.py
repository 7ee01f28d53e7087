# Normalizing an isometry from the ball into D^IV_{n+1}.
#
# Every such isometry is determined by an (n+1)x(n+1) unitary U with
# (z, sum f_j^2 / 2) = f U. The normalizer reduces U to a one-parameter
# canonical matrix U(theta); theta = pi/4 is the rational map, every other
# angle is equivalent to the irrational model with beta = min(theta, pi/2 - theta).

import numpy as np

from typeiv.classify import classify_map, extract_unitary, normalize_unitary, reconstruct_map, witness_residual
from typeiv.domains import DomainSpec, sample_interior
from typeiv.groups import random_automorphism
from typeiv.maps import compose_autos, itheta, riv

rng = np.random.default_rng(7)

# hide I_{3, pi/8} behind random automorphisms on both sides
f = itheta(3, np.pi / 8)
g = compose_autos(random_automorphism(DomainSpec.ball(3), rng), f, random_automorphism(DomainSpec.type_iv(4), rng))

c = classify_map(g)
print("F(0) was moved to the origin first:", c.origin_move is not None)
print("case:", c.canonical.case, " theta_raw:", round(c.canonical.theta_raw, 6))
for step in c.canonical.transforms:
    print("  ", step.kind, "-", step.label)

# The recorded pre- and post-automorphisms bring g onto the canonical map.
pre, post = c.normalizing_pair()
h = compose_autos(pre, g, post)
z = sample_interior(DomainSpec.ball(3), 5, rng, 0.5)
ref = reconstruct_map(3, c.canonical.theta_raw)
print(f"pointwise distance to the canonical map: {np.abs(h.eval_batch(z) - ref.eval_batch(z)).max():.1e}")

# Moving F(0) to the origin uses a full automorphism, so the angle drifts away
# from pi/8. Only isotropy keeps it fixed; the rational/irrational split
# survives either way.
print("beta:", round(c.canonical.beta, 6), " vs pi/8 =", round(np.pi / 8, 6))

# The irrational family is a single orbit: B and T carry I_{n,0} to I_{n,theta}.
print("witness residual:", f"{witness_residual(c.witness):.1e}", " final class:", c.final_class)

# the rational map lands on theta = pi/4
u = extract_unitary(riv(3))
print()
print("RIV(3):", normalize_unitary(u).case)
