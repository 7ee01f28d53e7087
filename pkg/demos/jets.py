# CR maps between Heisenberg models, checked with exact weighted jets.
#
# Points are (z_1..z_{n-1}, w) with weight 1 on z and 2 on w. A map F sends
# Im w = |z|^2 into the signature-one model when the defining function,
# restricted by w = u + i|z|^2, vanishes order by order.

from typeiv.expr import Const, HoloMap, variables
from typeiv.domains import DomainSpec
from typeiv.jets import cayley_embedding, expand, linear_model, mapping_residual, normal_form_check, psi_model



def show(p):
    # exponent tuple -> coefficient
    return {e: complex(c) for e, c in sorted(p.terms.items())}


n = 3
z1, z2, w = variables(n)

# series are exact: coefficients live in Q(i, sqrt 2)
print(show(expand(1 / (1 - z1 - Const(1j) * w), n, 3).poly))

for f in [linear_model(n, 4), psi_model(n, 5), psi_model(n, 5, z1 * z2), psi_model(n, 5, w), cayley_embedding(n, 5)]:
    r = mapping_residual(f, 8)
    print(f"{f.name:22s} flat through order 8: {r.is_zero}")

# one copy of psi alone does not cancel: the residual starts at order 4
broken = HoloMap(DomainSpec.heisenberg(n), DomainSpec.heisenberg_sig1(4), (z1, z2, z1 * z1, w), "broken")
r = mapping_residual(broken)
print("broken map, first nonzero order:", r.first_nonzero(), "->", show(r.parts[4]), "in (z, zbar, u)")

# normal form: f = z + (i/2) a1(z) w + ..., phi = phi2(z) + ...
rep = normal_form_check(psi_model(n, 5))
print("phi2:", [show(p) for p in rep.phi2], " constraint holds:", rep.constraint_holds)
z, w2 = variables(2)
bad = HoloMap(DomainSpec.heisenberg(2), DomainSpec.heisenberg_sig1(3), (z + z * w2, Const(0), w2), "z+zw")
rep = normal_form_check(bad)
print("a1:", show(rep.a1[0]), " constraint holds:", rep.constraint_holds)
