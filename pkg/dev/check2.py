import numpy as np
from clarklab import matfun, moments, opmodel, gallery

# frame examples from spec
f0 = opmodel.build_frame(gallery.zero_function(2), 3)
assert np.allclose(f0.gram, np.eye(14)), "zero frame gram"
print("zero: rank", f0.rank)

fz = opmodel.build_frame(gallery.shift_power(1,1), 2)
assert np.allclose(fz.gram, np.ones((5,5))), fz.gram
print("z: rank", fz.rank)
assert fz.rank == 1

fz2 = opmodel.build_frame(gallery.shift_power(2,1), 2)
expect = np.array([[1 if (i-j)%2==0 else 0 for j in range(5)] for i in range(5)], dtype=float)
assert np.allclose(fz2.gram, expect)
assert fz2.rank == 2
print("z2: rank", fz2.rank)

# clark operator: Theta=z, rank-1 frame, A=a -> whitened [a]
op = opmodel.clark_operator(fz, np.array([[0.3-0.4j]]))
print("whitened Z(a):", op.whitened)
assert np.allclose(op.whitened, 0.3-0.4j)

# A=1 -> coeff matrix is the pure shift
opz = opmodel.clark_operator(fz2, np.eye(1))
zc = opmodel._shift_coeff_matrix(fz2)
assert np.allclose(opz.coeff_matrix, zc)

# compressed moments: Theta=z: d_k = (A*)^k exactly
fzK = opmodel.build_frame(gallery.shift_power(1,1), 8)
a = np.array([[0.5+0.2j]])
ds = opmodel.compressed_moment_sweep(fzK, a, 4)
for k, d in enumerate(ds, 1):
    assert abs(d[0,0] - np.conj(a[0,0])**k) < 1e-12, (k, d)
print("z compressed ok")

# Theta=z^2, A=1, k=2 -> 1
fz2K = opmodel.build_frame(gallery.shift_power(2,1), 8)
d2 = opmodel.compressed_moment(fz2K, np.eye(1), 2)
assert abs(d2[0,0] - 1) < 1e-12, d2

# random theta compressed vs recurrence, n=2, unitary and strict contraction
rng = np.random.default_rng(2)
th = gallery.random_inner(2, 3, seed=9)
fr = opmodel.build_frame(th, 20)
print("rank:", fr.rank, "expected d:", 3)
for a in [gallery.haar_unitary(2, rng), gallery.random_contraction(2, rng)]:
    ls = moments.recurrence_moments(th, a, 6)
    ds = opmodel.compressed_moment_sweep(fr, a, 6)
    err = max(np.linalg.norm(ds[k]-ls[k], 2) for k in range(6))
    print("compressed vs recurrence err:", err)
    assert err < 1e-10, err

# partial isometry invariant: A=0, Theta=z^2: Zw* Zw = 1 - proj onto D_+
op0 = opmodel.clark_operator(fz2K, np.zeros((1,1)))
zw = op0.whitened
bp = fz2K.basis_plus()
qplus = bp @ np.linalg.solve(bp.conj().T @ bp, bp.conj().T)
resid = np.linalg.norm(zw.conj().T @ zw - (np.eye(zw.shape[0]) - qplus), 2)
print("partial isometry resid:", resid)
assert resid < 1e-10

# spectral measure examples
meas, eta = opmodel.spectral_measure(fz2K, np.eye(1))
print("z2,U=1 atoms:", [(np.round(p,6), np.round(w.ravel(),6)) for p,w in meas.atoms], "eta", eta)
meas2, eta2 = opmodel.spectral_measure(fz2K, -np.eye(1))
print("z2,U=-1 atoms:", [(np.round(p,6), np.round(w.ravel(),6)) for p,w in meas2.atoms])

# matrix case: Theta = z 1_2, U generic -> atoms at eig(U), weights x x*
th_id = gallery.shift_power(1, 2)
fid = opmodel.build_frame(th_id, 10)
U = gallery.haar_unitary(2, np.random.default_rng(7))
evals, evecs = np.linalg.eig(U)
meas3, eta3 = opmodel.spectral_measure(fid, U)
print("eta3:", eta3)
for p, w in meas3.atoms:
    j = int(np.argmin(np.abs(evals - p)))
    x = evecs[:, j:j+1]
    err = np.linalg.norm(w - x @ x.conj().T, 2)
    print("atom", np.round(p,6), "weight err vs xx*:", err)
    assert err < 1e-8, (w, x @ x.conj().T)
print("OK")
