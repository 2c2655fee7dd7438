import numpy as np
from clarklab import matfun, moments, gallery

for seed in range(6):
    n = [1,2,3][seed % 3]
    th = gallery.random_inner(n, min(4, n+1), seed=seed)
    for ai, a in enumerate(gallery.contraction_suite(n, seed=seed)):
        ls = moments.recurrence_moments(th, a, 10)
        le = moments.elliott_negative_moments(th, a, 10)
        errs = [np.linalg.norm(ls[k]-le[k], 2) for k in range(10)]
        if max(errs) > 1e-8:
            print("seed", seed, "n", n, "A idx", ai, "errs", np.round(errs, 12))
            break
    else:
        continue
    break
