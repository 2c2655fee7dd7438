import numpy as np, time
from clarklab import matfun, modelspace as ms, gallery

t0=time.time()
# extreme classification corpus
cases = [
    (gallery.shift_power(1,1), "extreme"),
    (gallery.shift_power(2,1), "extreme"),
    (gallery.random_inner(2,3,seed=5), "extreme"),
    (gallery.zero_function(2), "non_extreme"),
    (gallery.polynomial([0.5, 0.5]), "non_extreme"),
]
# 0.5 * random inner
th_half_inner_src = gallery.random_inner(2,3,seed=8)
# scale by 0.5: represent as taylor tail from its coefficients
cs = matfun.taylor(th_half_inner_src, 24)
tail = tuple(0.5*c for c in [np.eye(2)*0+matfun.evaluate(th_half_inner_src,0.0)] + cs)
th_scaled = gallery.polynomial([0.5*matfun.evaluate(th_half_inner_src, 0.0)] + [0.5*c for c in cs], dim=2)
cases.append((th_scaled, "non_extreme"))
for th, want in cases:
    res = ms.extreme_test(th)
    print(want, "->", res.classification, res.integral)
    assert res.classification == want, (want, res)
# reference value for (1+z)/2: integral of ln(1-cos(t/2))/2pi
import scipy.integrate
ref = scipy.integrate.quad(lambda t: np.log(1-np.cos(t/2)), 0, np.pi, limit=400)[0]/np.pi
got = ms.extreme_test(gallery.polynomial([0.5,0.5])).integral
print("(1+z)/2 integral:", got, "ref:", ref, "diff:", abs(got-ref))
print("extreme time:", time.time()-t0)

# intertwine residual
t0=time.time()
for th in [gallery.zero_function(1), gallery.shift_power(2,1), gallery.random_inner(2,3,seed=1)]:
    r = ms.intertwine_residual(th, band=40)
    print("intertwine residual:", r)
    assert r < 1e-7, r
print("intertwine time:", time.time()-t0)
print("OK")
