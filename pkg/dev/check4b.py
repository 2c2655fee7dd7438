import numpy as np
from clarklab import matfun, modelspace as ms, gallery

# re-run earlier checks quickly
for f in ["check1.py", "check3.py"]:
    pass
thz = gallery.shift_power(1,1)
assert ms.densely_defined_test(thz) is False
th_sing = gallery.singular_inner(((1.0, 1.0),))
assert ms.densely_defined_test(th_sing) is True
th_mix = gallery.shift_oplus_singular()
v = matfun.evaluate(th_mix, 0.5)
print("mix at 0.5:", np.round(v, 6))
assert abs(v[0,0]-0.5) < 1e-14 and abs(v[1,1]-np.exp(-3)) < 1e-12 and abs(v[0,1]) == 0
dd = ms.densely_defined_test(th_mix)
print("dd diag(z, singular):", dd)
assert dd is False
# per-direction cad
r_e1 = ms.cad_test(th_mix, 1.0, direction=[1,0])
r_e2 = ms.cad_test(th_mix, 1.0, direction=[0,1])
print("e1:", r_e1.exists, " e2:", r_e2.exists)
assert r_e1.exists is True and r_e2.exists is False
# regular points for singular inner: off atom regular, at atom spectrum
labels = ms.regular_points(th_sing, [np.exp(1j*0.5), 1.0, np.exp(1j*3)])
print("regular:", labels)
assert labels == ["regular", "spectrum", "regular"]
labels2 = ms.regular_points(thz, [1.0, 1j, -1])
assert labels2 == ["regular"]*3
th_half = gallery.polynomial([0.5, 0.5])
labels3 = ms.regular_points(th_half, [1.0, 1j, -1.0])
print("half:", labels3)
assert labels3 == ["spectrum"]*3
# JSON round trip incl projection-singular
doc = matfun.to_json(th_mix)
th_back = matfun.from_json(doc)
assert np.allclose(matfun.evaluate(th_back, 0.3+0.2j), matfun.evaluate(th_mix, 0.3+0.2j))
print("OK")
