import numpy as np
from clarklab import moments, opmodel, gallery

th = gallery.random_inner(2, 3, seed=9)
fr = opmodel.build_frame(th, 20)
rng = np.random.default_rng(2)
a = gallery.haar_unitary(2, rng)
ls = moments.recurrence_moments(th, a, 3)
ds = opmodel.compressed_moment_sweep(fr, a, 3)
for k in range(3):
    d, l = ds[k], ls[k]
    print("k=", k+1)
    print("  d vs l     :", np.linalg.norm(d - l))
    print("  d vs l.T   :", np.linalg.norm(d - l.T))
    print("  d vs l.conj:", np.linalg.norm(d - l.conj()))
    print("  d vs l*    :", np.linalg.norm(d - l.conj().T))
