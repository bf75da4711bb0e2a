"""From a quadratic field to theta values: D = -7, tower prime 3.

Run with  python3 docs/examples/walkthrough.py
"""

from cmtheta.config import default_config
from cmtheta.lfun import root_number
from cmtheta.theta import Lab, ell_adic_valuation

inst = next(i for i in default_config().instances if i.name == "d7p3")
lab = Lab(inst)

ef = lab.eigenform()
print(f"{len(ef['signs'])} right ideal classes, mass {ef['mass']}")
print(f"CM eigenform coordinates {ef['coords']} on components {ef['signs']}")
print(f"root number of lambda: {lab.base_root_number:+d}")

for n in (1, 2):
    th = lab.theta(n)
    print(f"\nconductor {th.m}: |G| = {th.group.order}, weights {list(th.weights)}")
    for i, nu in lab.family_characters(n):
        val = th.specialize(nu)
        eps = root_number(lab.lam, lab.twist(nu))
        v = "zero" if val.is_zero() else ell_adic_valuation(val, inst.ell)
        print(f"  character {i}: order {nu.N}, eps {eps:+d}, value {val}, v_{inst.ell} = {v}")
