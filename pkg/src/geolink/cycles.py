"""Multiplicities m(T, q), the weighted zero-cycle c(T) and the counting
lattices used in the coefficient bounds."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .bqf import (BQF, FormError, _saturated_basis_3d, classes, double_inverse,
                  representations, vectors_of_value)
from .exact import SymT
from .gamma15 import class_orbit_points


def rep_count_pos(qp: BQF, t: BQF) -> int:
    """#{h in M2(Z) : t = qp . h, det h > 0}."""
    return len(representations(qp, t, det_sign=1))


def t_form(T: SymT) -> BQF:
    if not T.is_posdef():
        raise ValueError(f"T = {T} is not positive definite")
    if not T.is_half_integral():
        raise ValueError(f"T = {T} is not half-integral")
    return BQF(*T.form_coeffs())


def m_coeff(T: SymT, q: BQF) -> int:
    """Number of X in L'(T) whose associated form is q."""
    t = t_form(T)
    if q.disc != t.disc or not q.is_definite():
        return 0
    if q.a < 0:
        q = q.tilde()
    q0 = q.primitive_part()
    return rep_count_pos(double_inverse(q0).rep, t)


@dataclass(frozen=True)
class CyclePoint:
    form: BQF  # root in F; negative definite for negatively oriented points
    weight: int

    @property
    def sign(self) -> int:
        return 1 if self.form.a > 0 else -1


@dataclass(frozen=True)
class ZeroCycle:
    disc: int
    points: tuple[CyclePoint, ...]

    def degree(self) -> int:
        return sum(p.sign * p.weight for p in self.points)

    def to_json(self) -> dict:
        return {"disc": self.disc,
                "points": [{"form": str(p.form), "sign": p.sign, "weight": p.weight}
                           for p in self.points]}

    @classmethod
    def from_json(cls, obj) -> "ZeroCycle":
        if isinstance(obj, str):
            obj = json.loads(obj)
        from .bqf import parse_form
        pts = []
        for e in obj["points"]:
            f = parse_form(e["form"])
            if (1 if f.a > 0 else -1) != e["sign"]:
                raise ValueError(f"sign mismatch for {e}")
            pts.append(CyclePoint(f, int(e["weight"])))
        return cls(int(obj["disc"]), tuple(pts))


def zero_cycle(T: SymT) -> ZeroCycle:
    t = t_form(T)
    d = t.disc
    pts = []
    for C in classes(d):
        w = m_coeff(T, C.rep)
        if not w:
            continue
        for f, g in class_orbit_points(C):
            pts.append(CyclePoint(f, w))
            pts.append(CyclePoint(-g, w))
    return ZeroCycle(d, tuple(pts))


# ------------------------------------------------------------ counting lattices


def _q3(v) -> int:
    return v[0] * v[0] - v[1] * v[2]


def _b3(v, w) -> int:
    # twice the bilinear form of u^2 - vw
    return 2 * v[0] * w[0] - v[1] * w[2] - v[2] * w[1]


@dataclass(frozen=True)
class LatticeLT:
    n: int
    r: int
    m: int
    basis: tuple[tuple[int, int, int], tuple[int, int, int]]
    gram: BQF

    @property
    def D(self) -> int:
        return self.r * self.r - 4 * self.n * self.m


def lattice_LT(n: int, r: int, m: int) -> LatticeLT:
    """The plane {r u + m v + n w = 0} in Z^3 with the form u^2 - vw."""
    if math.gcd(math.gcd(n, r), m) != 1:
        raise ValueError("(n, r, m) must be coprime")
    D = r * r - 4 * n * m
    if D >= 0 or n <= 0:
        raise ValueError("need n > 0 and r^2 - 4nm < 0")
    gens = [(m, -r, 0), (n, 0, -r), (0, n, -m)]
    b1, b2 = _saturated_basis_3d([g for g in gens if any(g)])
    gram = BQF(_q3(b1), _b3(b1, b2), _q3(b2))
    if gram.disc != D or not gram.is_posdef():
        raise AssertionError(f"unexpected gram {gram} for D = {D}")
    return LatticeLT(n, r, m, (b1, b2), gram)


def count_rT(lat: LatticeLT, A: int) -> int:
    if A <= 0:
        raise ValueError("A must be positive")
    return len(vectors_of_value(lat.gram, A))


def _coord_bound(lat: LatticeLT, A: int) -> list[int]:
    """Bounds on |u|, |v|, |w| over vectors of 𝔏_T with u^2 - vw = A."""
    a, b, c = lat.gram.a, lat.gram.b, lat.gram.c
    D = -lat.gram.disc
    ymax = math.isqrt(4 * a * A // D) + 1
    xmax = math.isqrt(4 * c * A // D) + 1
    b1, b2 = lat.basis
    return [xmax * abs(b1[i]) + ymax * abs(b2[i]) for i in range(3)]


def count_NT(n: int, r: int, m: int, t: int, d: int) -> int:
    """#{sigma : sigma1 m - sigma0 r + sigma2 n = t/2, sigma0^2 - sigma1 sigma2 = d/4}
    with sigma1, sigma2, 2 sigma0 integers, by direct search in a window."""
    if d <= 0:
        raise ValueError("d must be positive")
    lat = lattice_LT(n, r, m)
    D = lat.D
    if (t * t - D * d) % 4:
        return 0
    A = (t * t - D * d) // 4
    # sigma is an affine function of (u, v, t/2); bound it from the image bound
    bu, bv, _ = _coord_bound(lat, A)
    half_t = Fraction(t, 2)
    det = -n * D
    # inverse of rows (m,0,-n), (-r,2n,0), (m,-r,n) via adjugate
    M = [[m, 0, -n], [-r, 2 * n, 0], [m, -r, n]]
    adj = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [k for k in range(3) if k != j]
            cols = [k for k in range(3) if k != i]
            minor = (M[rows[0]][cols[0]] * M[rows[1]][cols[1]]
                     - M[rows[0]][cols[1]] * M[rows[1]][cols[0]])
            adj[i][j] = (-1) ** (i + j) * minor
    rhs = [bu, bv, abs(half_t)]
    w1 = math.ceil(sum(abs(Fraction(adj[0][j], det)) * rhs[j] for j in range(3))) + 1
    w0 = math.ceil(2 * sum(abs(Fraction(adj[1][j], det)) * rhs[j] for j in range(3))) + 1
    count = 0
    for s1 in range(-w1, w1 + 1):
        for s0x2 in range(-w0, w0 + 1):
            s0 = Fraction(s0x2, 2)
            s2 = (half_t - m * s1 + s0 * r) / n
            if s2.denominator != 1:
                continue
            if 4 * (s0 * s0 - s1 * s2) == d:
                count += 1
    return count


def check_NT(n: int, r: int, m: int, t: int, d: int) -> tuple[int, int | None]:
    """(N_T(t, d), r_T((t^2 - Dd)/4)) with the vanishing and domination
    properties asserted."""
    D = r * r - 4 * n * m
    N = count_NT(n, r, m, t, d)
    if (t * t - D * d) % 4:
        assert N == 0
        return N, None
    bound = count_rT(lattice_LT(n, r, m), (t * t - D * d) // 4)
    assert N <= bound, (n, r, m, t, d, N, bound)
    return N, bound
