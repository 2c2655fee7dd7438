import numpy as np
from clarklab import matfun, moments, modelspace as ms, gallery

# kernel basics
th0 = gallery.zero_function(2)
k = ms.kernel(th0, 0.3+0.1j, 0.2j)
assert np.allclose(k, np.eye(2)/(1 - 0.2j*np.conj(0.3+0.1j)))
thz2 = gallery.shift_power(2, 1)
k2 = ms.kernel(thz2, 1.0, 1.0)
print("kernel z^2 at (1,1):", k2.ravel())
assert abs(k2[0,0] - 2) < 1e-12

# boundary diagonal equals ladder limit of normalized defect
for th, zeta in [(gallery.random_inner(2,3,seed=4), np.exp(0.7j)), (thz2, 1j)]:
    A = ms.boundary_kernel_diagonal(th, zeta)
    r = 1 - 2.0**-24
    vals = matfun.evaluate(th, r*zeta)
    approx = (np.eye(th.dim) - vals @ vals.conj().T)/(1-r**2)
    print("A vs defect ladder:", np.linalg.norm(A - approx, 2))
    assert np.linalg.norm(A - approx, 2) < 1e-4
    ev = np.linalg.eigvalsh(A)
    assert ev.min() > -1e-10

# cauchy transform: V khat_a^i = kernel(.,a) e_i ; V constant e_i = e_i for Theta=0
th = gallery.random_inner(2, 3, seed=4)
a = 0.4-0.2j
coeffs = ms.modified_cauchy_kernel_coeffs(th, a, 80)
for i in range(2):
    ci = {k: v[:, i] for k, v in coeffs.items()}
    for z in [0.1, 0.3+0.3j, -0.5j]:
        lhs = ms.cauchy_transform(th, ci, z)
        rhs = ms.kernel(th, a, z)[:, i]
        err = np.linalg.norm(lhs - rhs)
        assert err < 1e-9, (i, z, err)
print("V khat = kernel ok")
v0 = ms.cauchy_transform(th0, {0: np.array([1.0, 0])}, 0.37+0.1j)
assert np.allclose(v0, [1, 0])

# isometry: (khat_a^i, khat_b^j) = (Delta_a(b) e_i, e_j) via independent quadrature
# use a strictly contractive theta -> pure AC measure, plain circle quadrature
th_s = gallery.polynomial([np.zeros((2,2)), 0.35*np.eye(2), 0.25*gallery.haar_unitary(2, np.random.default_rng(1))])
b = -0.2+0.5j
M = 8192
zs = matfun.unit_circle_nodes(M)
W = moments.ac_density(th_s, np.eye(2), M)
assert W.status == "ok" and W.valid.all()
vals_a = 1/(1 - np.conj(a)*zs)
vals_b = 1/(1 - b*np.conj(zs))
fa = np.eye(2) - matfun.evaluate(th_s, a).conj().T
fb = np.eye(2) - matfun.evaluate(th_s, b).conj().T
worst = 0
for i in range(2):
    for j in range(2):
        xi = fa @ np.eye(2)[:, i]
        yj = fb @ np.eye(2)[:, j]
        integ = np.einsum("s,s,j,sjk,k->", vals_a, vals_b, yj.conj(), W.values, xi)/M
        rhs = (ms.kernel(th_s, a, b) @ np.eye(2)[:, i])[j]
        worst = max(worst, abs(integ - rhs))
print("isometry quadrature check:", worst)
assert worst < 1e-9

# clark eigensystem: z^2, U=1 -> lambda=+-1, weights 1/2, |delta|^2 = 2
sys1 = ms.clark_eigensystem(thz2, np.eye(1))
print("z2 U=1:", [(np.round(n.point,6), np.round(n.norm_sq,6)) for n in sys1.nodes])
assert sys1.dim == 2 and len(sys1.nodes) == 2
for n in sys1.nodes:
    assert abs(n.norm_sq - 2) < 1e-9
for w in sys1.weights:
    assert abs(w[0,0] - 0.5) < 1e-9

# diag(z,z), U generic: eigen phases of U, directions eigvecs
thd = gallery.shift_power(1, 2)
U = gallery.haar_unitary(2, np.random.default_rng(7))
sysd = ms.clark_eigensystem(thd, U)
evals = np.linalg.eigvals(U)
print("diag sys points:", np.round(sysd.points, 5), " eig:", np.round(evals, 5))
assert sysd.dim == 2

# weights vs point_mass oracle (closed form check), incl. matrix random case
th3 = gallery.random_inner(2, 3, seed=12)
U3 = gallery.haar_unitary(2, np.random.default_rng(3))
sys3 = ms.clark_eigensystem(th3, U3)
print("dim:", sys3.dim, "points:", len(sys3.points))
wsum = sys3.weight_total()
print("weight sum err:", np.linalg.norm(wsum - np.eye(2), 2))
for lam, w in zip(sys3.points, sys3.weights):
    pm = moments.point_mass(th3, U3, lam)
    err = np.linalg.norm(pm.weight - w, 2)
    print("  atom", np.round(lam,5), "closed-form vs point_mass:", err, pm.status)
    assert err < 1e-5, err
assert np.linalg.norm(wsum - np.eye(2), 2) < 1e-8

# kernel gram orthogonality
g = ms.kernel_gram(sys3)
off = g - np.diag(np.diag(g))
print("kernel gram offdiag:", np.max(np.abs(off)))
assert np.max(np.abs(off)) < 1e-8

# reconstruction: f = delta_w^y
w0, y = 0.3+0.1j, np.array([0.6, -0.8j])
fvals = [ms.kernel(th3, w0, n.point) @ y for n in sys3.nodes]
samples = ms.sample_of(sys3, fvals)
for z in [0.2, -0.4j, 0.5+0.3j]:
    rec = ms.reconstruct(sys3, samples, z)
    direct = ms.kernel(th3, w0, z) @ y
    err = np.linalg.norm(rec - direct)
    assert err < 1e-9, (z, err)
print("reconstruct ok")

# half-plane: z^2, U=-1: lambda=+-i -> t in {-1,1}
sysm = ms.clark_eigensystem(thz2, -np.eye(1))
hp = ms.to_halfplane(sysm)
print("hp points:", sorted(np.round(hp.points, 9)))
assert sorted(np.round(p) for p in hp.points) == [-1, 1]

# half-plane reconstruction agrees with reweighted disc reconstruction
mu = matfun.mobius_to_disc
def canon(f_disc_vals, z):  # (1-mu(z))/sqrt(pi) f(mu(z))
    return (1-mu(z))/np.sqrt(np.pi) * f_disc_vals
f_disc = lambda z: ms.kernel(th3, w0, z) @ y
sys_hp_src = ms.clark_eigensystem(th3, U3)
lam1 = [abs(p-1) for p in sys_hp_src.points]
print("min |lam-1|:", min(lam1))
hp3 = ms.to_halfplane(sys_hp_src)
g_samples = []
for node_d, node_h in zip(sys_hp_src.nodes, hp3.nodes):
    gv = canon(f_disc(node_d.point), node_h.point)
    g_samples.append(np.vdot(node_h.direction, gv))
for z in [0.3+1.2j, -1.1+0.7j, 2.0+0.4j]:
    rec = ms.halfplane_reconstruct(hp3, np.array(g_samples), z)
    target = canon(f_disc(mu(z)*1.0), z)
    err = np.linalg.norm(rec - target)
    print("hp reconstruct err at", z, ":", err)
    assert err < 1e-8, err
print("OK")
