"""CM points of discriminant -23 on the modular curve of Gamma_1(5) and how
the three reference geodesics wind around them."""

from fractions import Fraction

from geolink import SymT, classes, m_coeff, traverse, winding
from geolink.gamma15 import class_orbit_points
from geolink.linking import TRIPLE_FORMS, bounding_triple, winding_sums

T = SymT(2, Fraction(1, 2), 3)

# the class group: three reduced forms
for C in classes(-23):
    print(C.rep.pretty(), " m(T, q) =", m_coeff(T, C.rep))

# each class splits into 12 Gamma_1(5)-orbits
pts = class_orbit_points(classes(-23)[2])
print(len(pts), "orbit points for", classes(-23)[2].rep)

# the geodesics, as lists of translates crossing the fundamental domain
for name, q in TRIPLE_FORMS.items():
    c = traverse(q)
    print(name, q, "length", len(c), "homology", c.homology)

# w(x; c) jumps by one each time the path up to oo crosses c
c2 = traverse(TRIPLE_FORMS["c2"])
for f in pts[:4]:
    print(f[0], winding(f[0], c2), "  partner", f[1], winding(f[1], c2))

# iota' collects m(T, q) times the orbit sums w(x(q)) - w(x(-q~))
for cyc in bounding_triple().cycles:
    print([(str(rep), m, str(s)) for rep, m, s in winding_sums(T, cyc)])
