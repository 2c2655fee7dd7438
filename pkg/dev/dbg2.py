import numpy as np
from clarklab import matfun, moments, gallery

th = gallery.random_inner(1, 2, seed=0)
a = gallery.contraction_suite(1, seed=0)[1]  # identity
ls = moments.recurrence_moments(th, a, 10)
e2 = moments.elliott_moment(th, a, -3)
print("l3 =", ls[2].ravel(), " elliott(-3) =", e2.ravel())
# try theta = z: l_k = 1
thz = gallery.shift_power(1,1)
for k in [-1,-2,-3]:
    print("z: k=",k, moments.elliott_moment(thz, np.eye(1), k).ravel())
