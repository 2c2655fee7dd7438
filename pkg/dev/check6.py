import numpy as np, time
from clarklab import haar, gallery

t0 = time.time()
# sampler determinism + unitarity
s1 = haar.HaarSampler(dim=3, seed=42)
s2 = haar.HaarSampler(dim=3, seed=42)
u1 = [haar.sample_haar(s1) for _ in range(5)]
u2 = s2.batch(5)
assert all(np.allclose(a, b) for a, b in zip(u1, u2))
for u in u1:
    assert np.linalg.norm(u.conj().T @ u - np.eye(3), 2) < 1e-12

# n=1: mean modulus small
s = haar.HaarSampler(dim=1, seed=7)
zs = s.batch(10000)[:, 0, 0]
print("n=1 mean |E z|:", abs(zs.mean()))
assert abs(zs.mean()) <= 0.03

# |tr U|^2 over 1e4 samples, n=2 in [0.9, 1.1]
s = haar.HaarSampler(dim=2, seed=3)
us = s.batch(10000)
trs = np.einsum("kii->k", us)
m = np.mean(np.abs(trs)**2)
print("mean |tr U|^2:", m)
assert 0.9 <= m <= 1.1
print("sampling time:", time.time()-t0)

# class function quadrature
t0 = time.time()
for n in (1, 2, 3):
    M = 32 if n < 3 else 16
    one = haar.class_function_integrate(lambda U: 1.0, n, M)
    assert abs(one - 1) < 1e-10, (n, one)
    v = haar.class_function_integrate(lambda U: np.abs(np.trace(U))**2, n, M)
    print(f"n={n}: int |tr U|^2 =", v)
    assert abs(v - 1) < 1e-10
    # vanish: monomial z1^2 z2
    def mono(U, n=n):
        d = np.diagonal(U)
        out = d[0]**2
        if n > 1: out = out * d[1]
        return out
    vv = haar.class_function_integrate(mono, n, M)
    assert abs(vv) < 1e-12, (n, vv)
print("class fn time:", time.time()-t0)

# weyl_integrate
t0 = time.time()
g = haar.WeylGrid(dim=2, nodes_per_circle=64, mc_count=200)
print("total weight:", g.total_weight())
assert abs(g.total_weight() - 1) < 1e-10
sampler = haar.HaarSampler(dim=2, seed=11)
v = haar.weyl_integrate(lambda U: np.abs(np.trace(U))**2, g, sampler)
print("weyl |tr|^2:", v)
assert abs(v - 1) < 0.05
v1 = haar.weyl_integrate(lambda U: 1.0, haar.WeylGrid(dim=2, nodes_per_circle=16, mc_count=3), haar.HaarSampler(dim=2, seed=1))
assert abs(v1 - 1) < 1e-10
vtr = haar.weyl_integrate(lambda U: np.trace(U), haar.WeylGrid(dim=2, nodes_per_circle=24, mc_count=50), haar.HaarSampler(dim=2, seed=2))
print("weyl tr:", vtr)
assert abs(vtr) < 1e-10  # exact: translation invariance kills it nodewise? check
print("weyl time:", time.time()-t0)

# filtration
t0 = time.time()
th = gallery.shift_power(2, 1)
f = [0, 1.0, 0, 0, 0]  # a_{-2}..a_2 with a_{-1} = 1 -> f = conj(z)
res = haar.filtration_check(th, [0,1,0,0,0], samples=2000, seed=5)
print("filtration z^2 n=1: err", res.abs_err, "3sig", 3*res.sigma, res.within())
assert res.within()
# n=2 random inner, f = z^2 + conj(z)
th2 = gallery.random_inner(2, 3, seed=17)
res2 = haar.filtration_check(th2, [1,0,0,0,1], samples=1500, seed=6)
print("filtration n=2: err", res2.abs_err, "3sig", 3*res2.sigma, res2.within())
assert res2.within()
# determinism across worker counts
ra = haar.filtration_check(th2, [1,0,0,0,1], samples=512, seed=9, workers=1)
rb = haar.filtration_check(th2, [1,0,0,0,1], samples=512, seed=9, workers=4)
assert np.array_equal(ra.lhs, rb.lhs), "thread determinism"
# alpha grid
th1 = gallery.scalar_blaschke([0.0, 0.3, -0.2+0.4j])
ga = haar.filtration_alpha_grid(th1, [0.5, 1, 0, 2, 0.5j], grid=4096)
print("alpha grid err:", ga.abs_err)
assert ga.abs_err < 1e-3
print("filtration time:", time.time()-t0)
print("OK")
