import numpy as np
from clarklab import matfun, modelspace as ms, gallery

# cad tests
thz = gallery.shift_power(1,1)
r = ms.cad_test(thz, 1.0)
print("z at 1:", r.exists, r.derivative, r.c_liminf)
assert r.exists is True and abs(r.derivative[0,0]-1) < 1e-12

th_half = gallery.polynomial([0.5, 0.5])
r2 = ms.cad_test(th_half, -1.0)
print("(1+z)/2 at -1:", r2.exists, r2.c_liminf)
assert r2.exists is False

th_sing = gallery.singular_inner(((1.0, 1.0),))
r3 = ms.cad_test(th_sing, 1.0)
print("singular at 1:", r3.exists, "ladder growth:", r3.ladder[-1]/r3.ladder[-2])
assert r3.exists is False
assert r3.ladder[-1]/r3.ladder[-2] >= 2 - 1e-6

# (1+z)/2 at +1: CAD exists (scalar angular derivative 1/2)
r4 = ms.cad_test(th_half, 1.0)
print("(1+z)/2 at +1:", r4.exists, r4.derivative)

# densely defined
print("dd z:", ms.densely_defined_test(thz))
assert ms.densely_defined_test(thz) is False
print("dd singular:", ms.densely_defined_test(th_sing))
assert ms.densely_defined_test(th_sing) is True
# diag(z, singular)
from clarklab.matfun import MatFunction, BlaschkePotapovFactor
P1 = np.diag([1.0, 0.0])
th_mix = MatFunction(dim=2, bp_factors=(BlaschkePotapovFactor(0.0, P1),),
                     singular_factors=(), taylor_tail=None)
# need diag(z, exp(...)): singular factor is scalar though (multiplies everything)...
