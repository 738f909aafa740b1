# mu* = 5 + 1 = 6 sits outside the optimal-alpha hypothesis.
CORRCLUST 1
N 3 K 1 TAU 1
MU 5 1 1
E 0 1 1 0
E 1 2 1 0
E 0 2 0 1
