import numpy as np
from clarklab import matfun, moments, gallery

# 1. evaluate basics
th = gallery.shift_power(1, 2)
assert np.allclose(matfun.evaluate(th, 0.5), 0.5*np.eye(2))
th2 = gallery.diag_inner([1, 2])
v = matfun.evaluate(th2, 0.5j)
assert np.allclose(v, np.diag([0.5j, -0.25])), v
z0 = gallery.zero_function(2)
assert np.allclose(matfun.evaluate(z0, 0.3+0.1j), 0)

# 2. taylor of a BP product vs symbolic series expansion
def bp_series(w, K):
    # (z-w)/(1-conj(w) z) = (z-w) * sum conj(w)^k z^k
    geo = np.array([np.conj(w)**k for k in range(K+1)])
    num = np.zeros(K+2, dtype=complex); num[0] = -w; num[1] = 1.0
    return np.convolve(num, geo)[:K+1]

def matfun_series(th, K):
    n = th.dim
    acc = np.zeros((K+1, n, n), dtype=complex); acc[0] = np.eye(n)
    def mul(A, B):
        out = np.zeros_like(A)
        for k in range(K+1):
            for j in range(k+1):
                out[k] += A[j] @ B[k-j]
        return out
    for f in th.bp_factors:
        b = bp_series(f.zero, K)
        fac = np.zeros((K+1, n, n), dtype=complex)
        fac[0] = np.eye(n) - f.projection
        for k in range(K+1):
            fac[k] = fac[k] + b[k]*f.projection
        acc = mul(acc, fac)
    if th.const_unitary is not None:
        acc = acc @ th.const_unitary
    return acc

rng = np.random.default_rng(5)
th3 = gallery.random_inner(2, 4, seed=3)
K = 5
cs = matfun.taylor(th3, K)
sym = matfun_series(th3, K)
err = max(np.linalg.norm(cs[k-1]-sym[k], 2) for k in range(1, K+1))
print("taylor vs symbolic:", err)
assert err < 1e-10

# 3. elliott vs recurrence, random corpus
worst = 0.0
for seed in range(6):
    n = [1,2,3][seed % 3]
    th = gallery.random_inner(n, min(4, n+1), seed=seed)
    for a in gallery.contraction_suite(n, seed=seed):
        ls = moments.recurrence_moments(th, a, 10)
        le = moments.elliott_negative_moments(th, a, 10)
        for k in range(10):
            worst = max(worst, np.linalg.norm(ls[k]-le[k], 2))
        # also single-k entry point, both signs
        e2 = moments.elliott_moment(th, a, -3)
        worst = max(worst, np.linalg.norm(e2 - ls[2], 2))
        e3 = moments.elliott_moment(th, a, 3)
        worst = max(worst, np.linalg.norm(e3 - ls[2].conj().T, 2))
print("elliott vs recurrence worst:", worst)
assert worst < 1e-8

# 4. mixed recurrence
res = moments.crosscheck_mixed_recurrence(th3, gallery.contraction_suite(2, 1)[3], 10)
print("mixed recurrence residual:", res)
assert res < 1e-10

# 5. point mass
thz2 = gallery.shift_power(2, 1)
pm = moments.point_mass(thz2, np.eye(1), 1.0)
print("point mass z^2 at 1:", pm.weight, pm.status)
assert abs(pm.weight[0,0] - 0.5) < 1e-8
pm0 = moments.point_mass(gallery.shift_power(1,1), np.eye(1)*1.0, -1.0)
print("z at -1 (U=1):", pm0.status, pm0.weight.ravel())
assert pm0.status == "zero"
# matrix case: Theta = z 1_2, U generic: weight should be x x* for eigvec x
U = gallery.haar_unitary(2, np.random.default_rng(7))
evals, evecs = np.linalg.eig(U)
th_id = gallery.shift_power(1, 2)
pm2 = moments.point_mass(th_id, U, evals[0])
x = evecs[:, 0:1]
print("matrix atom err:", np.linalg.norm(pm2.weight - x @ x.conj().T, 2), pm2.status)
assert np.linalg.norm(pm2.weight - x @ x.conj().T, 2) < 1e-6

# density: Theta=0 -> W == 1
d = moments.ac_density(gallery.zero_function(2), np.eye(2), 256)
assert np.allclose(d.values, np.eye(2))
# mass budget for (1+z)/2, U=1: atom 2 at 1, density == 1, total = 3
th_half = gallery.polynomial([0.5, 0.5])
pmh = moments.point_mass(th_half, np.eye(1), 1.0)
dh = moments.ac_density(th_half, np.eye(1), 4096)
tm = moments.total_mass(th_half, np.eye(1))
print("half: atom", pmh.weight.ravel(), "int W", dh.integral().ravel(), "ReB(0)", tm.ravel())
print("OK")
