import numpy as np
from clarklab import matfun, opmodel, charfun, gallery

# nagy-foias: z -> d=[1,0,..]; z^2 -> [0,1,0,..]
fz = opmodel.build_frame(gallery.shift_power(1,1), 12)
d = charfun.nagy_foias_coeffs(fz, 5)
print("z:", [np.round(c[0,0],10) for c in d.coeffs])
assert abs(d.coeffs[0][0,0]-1) < 1e-12 and all(abs(c[0,0]) < 1e-12 for c in d.coeffs[1:])
fz2 = opmodel.build_frame(gallery.shift_power(2,1), 12)
d2 = charfun.nagy_foias_coeffs(fz2, 5)
print("z2:", [np.round(c[0,0],10) for c in d2.coeffs])
assert abs(d2.coeffs[1][0,0]-1) < 1e-12

# n=2 BP product: d_k = c_k
th = gallery.random_inner(2, 4, seed=21)
fr = opmodel.build_frame(th, 16)
d6 = charfun.nagy_foias_coeffs(fr, 6)
cs = matfun.taylor(th, 6)
gap = max(np.linalg.norm(d6.coeffs[k]-cs[k], 2) for k in range(6))
print("nagy-foias vs taylor gap:", gap)
assert gap < 1e-8, gap

# gamma: A=0 -> Theta coeffs; Theta=z, A=a -> [1, abar, abar^2, ...]
g0 = charfun.gamma_coeffs(fr, np.zeros((2,2)), 6)
gap0 = max(np.linalg.norm(g0.coeffs[k]-cs[k], 2) for k in range(6))
print("gamma A=0 gap:", gap0); assert gap0 < 1e-8
a = np.array([[0.4+0.3j]])
fzK = opmodel.build_frame(gallery.shift_power(1,1), 12)
ga = charfun.gamma_coeffs(fzK, a, 5)
expect = [np.conj(a[0,0])**k for k in range(5)]
print("z gamma:", [np.round(c[0,0],8) for c in ga.coeffs], "expect", np.round(expect,8))
assert all(abs(ga.coeffs[k][0,0]-expect[k]) < 1e-10 for k in range(5))

# gamma frame vs series, n=2 random unitary A
U = gallery.haar_unitary(2, np.random.default_rng(4))
gf = charfun.gamma_coeffs(fr, U, 6)
gs = charfun.gamma_series_coeffs(th, U, 6)
gap2 = gf.max_gap(gs)
print("gamma frame vs series:", gap2)
assert gap2 < 1e-8, gap2
# b recurrence residual
resb = charfun.transfer_series_recurrence_gap(th, U, 8)
print("b-series recurrence:", resb); assert resb < 1e-10

# lifschitz: z at 0.5 with U_ref=1 -> 0.5 ; z^2 at 0.4i -> -0.16
lv = charfun.lifschitz_charfun(fzK, np.eye(1), 0.5)
print("lifschitz z(0.5):", lv)
assert abs(lv[0,0]-0.5) < 1e-9
lv2 = charfun.lifschitz_charfun(fz2, np.eye(1), 0.4j)
print("lifschitz z2(0.4i):", lv2)
assert abs(lv2[0,0]+0.16) < 1e-9

# orientation test: Theta = z * Uc nondiagonal, U_ref = 1: expect eval
Uc = gallery.haar_unitary(2, np.random.default_rng(12))
from clarklab.matfun import MatFunction, BlaschkePotapovFactor
th_u = MatFunction(dim=2, bp_factors=(BlaschkePotapovFactor(0.0, np.eye(2)),),
                   const_unitary=Uc, flags=frozenset({"inner","vanishes_at_zero"}))
f_u = opmodel.build_frame(th_u, 10)
for z in [0.3, 0.2-0.4j]:
    lvu = charfun.lifschitz_charfun(f_u, np.eye(2), z)
    tv = matfun.evaluate(th_u, z)
    print("orientation |lv - eval|:", np.linalg.norm(lvu - tv, 2),
          " |lv - eval^T|:", np.linalg.norm(lvu - tv.T, 2))
# degree-3 scalar blaschke probe consistency
th3 = gallery.scalar_blaschke([0.0, 0.4, -0.3+0.2j])
f3 = opmodel.build_frame(th3, 12)
worst = 0
rng = np.random.default_rng(0)
for _ in range(10):
    z = 0.7*np.sqrt(rng.random())*np.exp(2j*np.pi*rng.random())
    lv = charfun.lifschitz_charfun(f3, np.eye(1), z)
    worst = max(worst, abs(lv[0,0] - matfun.evaluate(th3, z)[0,0]))
print("blaschke3 lifschitz worst:", worst)
assert worst < 1e-7
# random unitary U_ref: relation to Theta(z) U_ref^* ?
Ur = gallery.haar_unitary(2, np.random.default_rng(77))
lvr = charfun.lifschitz_charfun(f_u, Ur, 0.3)
tv = matfun.evaluate(th_u, 0.3)
print("Uref twist: |lv - Theta U*|:", np.linalg.norm(lvr - tv @ Ur.conj().T, 2),
      " |lv - U* Theta|:", np.linalg.norm(lvr - Ur.conj().T @ tv, 2))
print("OK")
