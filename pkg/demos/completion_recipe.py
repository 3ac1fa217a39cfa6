"""Pieces of the completion: K0, W*, representation numbers of an indefinite
binary lattice modulo its unit group, and one beta coefficient.

The lattice is 5x^2 - xy - 11y^2 (discriminant 221). Its unit (15 + sqrt 221)/2
is small, which keeps the brute-force cross-check cheap. The large automorph
of the 229-example is only checked as an identity at the end."""

from fractions import Fraction

import numpy as np

from geolink.completion import (Lattice11, beta_coeff, bessel_k0, find_automorph,
                                rho_bruteforce, rho_indef, theta_rep_count, w_star,
                                w_star_bound)
from geolink.exact import Mat2, SymT

for x in (0.1, 1.0, 5.0):
    r = bessel_k0(x)
    print(f"K0({x}) = {r.value:.15f}  +- {r.err:.1e}")

for x1, x2 in ((-1, 2), (0, 1), (3, 0.2)):
    r = w_star(x1, x2)
    print(f"W*({x1}, {x2}) = {r.value:.6e}  bound {w_star_bound(x1, x2):.6e}")

P = SymT(5, Fraction(-1, 2), -11)
lat = Lattice11(P, find_automorph(P))
print("automorph", lat.automorph, "eigenvalue", round(lat.eigenvalue, 4))

for T in (SymT(5, Fraction(1, 2), -11), SymT(-11, Fraction(1, 2), 5), SymT(20, 1, -11)):
    print(T, rho_indef(lat, T), rho_bruteforce(lat, T, 1500))

# beta(T, v) = sum r(T'') rho(T') W*(tr T'v, 4|det T'v|) over T = T' + T''
theta = SymT(1, Fraction(1, 2), 1)
r_pos = lambda T2: theta_rep_count(theta, T2)
for y in (0.05, 0.1, 0.2):
    b = beta_coeff(SymT(6, -5, -4), y * np.eye(2), r_pos, lat, tol=1e-9)
    print(f"v = {y} I: beta = {b.value:.6e} +- {b.err:.1e} ({b.n_terms} terms, "
          f"delta_max {b.delta_max:.2f})")

Pe = SymT(17805, Fraction(377, 2), Fraction(457, 229))
M = Mat2(-647384, -6855, 61160175, 647611)
print("gamma^t P gamma == P:", Pe.conj(M @ M) == Pe, " det P =", Pe.det)
