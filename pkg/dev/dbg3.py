import numpy as np
from clarklab import moments, gallery
# matrix density sanity: random inner theta scaled? density of inner theta = 0
th = gallery.random_inner(2, 3, seed=11)
d = moments.ac_density(th, np.eye(2), 512)
print("inner density max:", np.max(np.abs(d.values)), d.status)
# non-inner matrix case: mass budget 1 when Theta(0)=0
thp = gallery.polynomial([np.zeros((2,2)), 0.4*np.eye(2), 0.3*np.ones((2,2))/2])
d2 = moments.ac_density(thp, gallery.haar_unitary(2, np.random.default_rng(3)), 8192)
print("budget:", np.round(d2.integral(), 8))
