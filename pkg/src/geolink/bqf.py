"""Integral binary quadratic forms a x^2 + b xy + c y^2.

Forms are acted on from the right, ``(q . h)(x, y) = q(ax + by, cx + dy)`` for
h = ((a, b), (c, d)), so ``q.act(h1).act(h2) == q.act(h1 @ h2)`` and the root of
``q . g`` in the upper half-plane is ``g^-1`` applied to the root of q.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import Mat2, QuadIrr, gauss_reduce, is_square, sign


class FormError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BQF:
    a: int
    b: int
    c: int

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    def is_primitive(self) -> bool:
        return self.content == 1

    def primitive_part(self) -> "BQF":
        g = self.content
        return BQF(self.a // g, self.b // g, self.c // g)

    def is_posdef(self) -> bool:
        return self.disc < 0 and self.a > 0

    def is_negdef(self) -> bool:
        return self.disc < 0 and self.a < 0

    def is_definite(self) -> bool:
        return self.disc < 0

    def is_indefinite(self) -> bool:
        return self.disc > 0

    def act(self, h: Mat2) -> "BQF":
        return act(self, h)

    def tilde(self) -> "BQF":
        return tilde(self)

    def mirror(self) -> "BQF":
        """(a, -b, c): the inverse class, root reflected to -conj(z)."""
        return BQF(self.a, -self.b, self.c)

    def __neg__(self) -> "BQF":
        return BQF(-self.a, -self.b, -self.c)

    def scale(self, k: int) -> "BQF":
        return BQF(k * self.a, k * self.b, k * self.c)

    def bilinear(self, v, w):
        """B(v, w) with B(v, v) = q(v); may be a half-integer."""
        return Fraction(2 * self.a * v[0] * w[0] + self.b * (v[0] * w[1] + v[1] * w[0])
                        + 2 * self.c * v[1] * w[1], 2)

    def __str__(self):
        return f"{self.a},{self.b},{self.c}"

    def pretty(self) -> str:
        terms = []
        for coef, mono in ((self.a, "x^2"), (self.b, "xy"), (self.c, "y^2")):
            if coef == 0:
                continue
            mag = "" if abs(coef) == 1 else str(abs(coef))
            terms.append(("-" if coef < 0 else "+", mag + mono))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {t}" for s, t in terms[1:])


def parse_form(s: str) -> BQF:
    parts = s.strip().split(",")
    if len(parts) != 3:
        raise ValueError(f"expected 'a,b,c', got {s!r}")
    return BQF(*(int(p) for p in parts))


def act(q: BQF, h: Mat2) -> BQF:
    a, b, c = q.a, q.b, q.c
    p, r, s, t = h.a, h.b, h.c, h.d
    # q(p x + r y, s x + t y)
    return BQF(
        a * p * p + b * p * s + c * s * s,
        2 * a * p * r + b * (p * t + r * s) + 2 * c * s * t,
        a * r * r + b * r * t + c * t * t,
    )


def tilde(q: BQF) -> BQF:
    return BQF(-q.a, q.b, -q.c)


def roots(q: BQF) -> tuple[QuadIrr, QuadIrr]:
    """The endpoints (rho+, rho-) = ((-b + sqrt d)/2a, (-b - sqrt d)/2a)."""
    if q.a == 0:
        raise FormError("geodesic through infinity (a = 0)")
    d = q.disc
    if d < 0:
        raise FormError(f"{q} is definite; no real roots")
    return QuadIrr(-q.b, 1, 2 * q.a, d), QuadIrr(-q.b, -1, 2 * q.a, d)


def principal_form(d: int) -> BQF:
    k = d % 2
    return BQF(1, k, (k - d) // 4)


def _check_neg_disc(d: int) -> None:
    if d >= 0 or d % 4 not in (0, 1):
        raise FormError(f"{d} is not a negative discriminant")


def reduce_posdef(q: BQF) -> tuple[BQF, Mat2]:
    if not q.is_posdef():
        raise FormError(f"{q} is not positive definite")
    (a, b, c), g = gauss_reduce(q.a, q.b, q.c)
    return BQF(a, b, c), g


def is_reduced(q: BQF) -> bool:
    a, b, c = q.a, q.b, q.c
    if not (abs(b) <= a <= c):
        return False
    if b < 0 and (-b == a or a == c):
        return False
    return True


@dataclass(frozen=True)
class FormClass:
    rep: BQF
    disc: int

    @property
    def content(self) -> int:
        return self.rep.content

    @property
    def primitive(self) -> bool:
        return self.content == 1

    def to_json(self) -> dict:
        return {"rep": str(self.rep), "disc": self.disc, "content": self.content}

    @classmethod
    def from_json(cls, obj) -> "FormClass":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rep = parse_form(obj["rep"])
        if rep.disc != obj["disc"] or rep.content != obj["content"]:
            raise ValueError(f"inconsistent class record {obj}")
        return cls(rep, obj["disc"])


def form_class(q: BQF) -> FormClass:
    return FormClass(reduce_posdef(q)[0], q.disc)


_classes_lock = threading.Lock()
_classes_cache: dict[int, tuple[FormClass, ...]] = {}


def classes(d: int) -> list[FormClass]:
    """All PSL2(Z)-classes of positive definite forms of discriminant d,
    imprimitive ones included, as reduced representatives."""
    _check_neg_disc(d)
    with _classes_lock:
        hit = _classes_cache.get(d)
    if hit is not None:
        return list(hit)
    out = []
    amax = math.isqrt(-d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            out.append(FormClass(BQF(a, b, c), d))
    with _classes_lock:
        _classes_cache[d] = tuple(out)
    return out


def primitive_classes(d: int) -> list[FormClass]:
    return [C for C in classes(d) if C.primitive]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k = a // b
        a, b = b, a - k * b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def compose_forms(q1: BQF, q2: BQF) -> BQF:
    """Gauss composition of primitive forms of equal discriminant (unreduced)."""
    if q1.disc != q2.disc:
        raise FormError("discriminants differ")
    if not (q1.is_primitive() and q2.is_primitive()):
        raise FormError("composition needs primitive forms")
    a1, b1, c1 = q1.a, q1.b, q1.c
    a2, b2, c2 = q2.a, q2.b, q2.c
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    out = BQF(a3, b3, c3)
    assert out.disc == q1.disc, (q1, q2, out)
    return out


def compose(q1: BQF, q2: BQF) -> FormClass:
    if q1.disc >= 0:
        raise FormError("composition is implemented for negative discriminants")
    return form_class(compose_forms(q1, q2))


def inverse_form(q: BQF) -> BQF:
    return BQF(q.a, -q.b, q.c)


def hermite_rows(rows: list[tuple[int, int]]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Hermite normal form of the Z-span of integer rows in Z^2 (rank 2)."""
    rows = [list(r) for r in rows if r != (0, 0)]
    # column 0: gcd via repeated euclid
    while sum(1 for r in rows if r[0] != 0) > 1:
        rows.sort(key=lambda r: (r[0] == 0, abs(r[0])))
        piv = rows[0]
        for r in rows[1:]:
            if r[0]:
                k = r[0] // piv[0]
                r[0] -= k * piv[0]
                r[1] -= k * piv[1]
    rows.sort(key=lambda r: (r[0] == 0, abs(r[0])))
    top = rows[0]
    if top[0] < 0:
        top = [-top[0], -top[1]]
    rest = [r[1] for r in rows[1:]]
    g = 0
    for v in rest:
        g = math.gcd(g, v)
    if top[0] == 0 or g == 0:
        raise FormError("rows do not span a rank-2 lattice")
    top[1] %= g
    return (top[0], top[1]), (0, g)


def _norm_form_of_basis(e1, e2, b: int, ac: int) -> tuple[int, int, int]:
    """Coefficients of N(x e1 + y e2) for e = u + v w, w^2 + b w + ac = 0,
    where N(u + v w) = u^2 - b u v + ac v^2."""

    def nf(u1, v1, u2, v2):
        # bilinear polarisation of N
        return 2 * u1 * u2 - b * (u1 * v2 + v1 * u2) + 2 * ac * v1 * v2

    A = e1[0] ** 2 - b * e1[0] * e1[1] + ac * e1[1] ** 2
    C = e2[0] ** 2 - b * e2[0] * e2[1] + ac * e2[1] ** 2
    B = nf(e1[0], e1[1], e2[0], e2[1])
    return A, B, C


def double_inverse_form(q0: BQF) -> BQF:
    """A form in the class -2[q0], built from the square of the ideal
    a = Z a + Z w, w = (-b + sqrt d)/2 (which carries the class -[q0])."""
    if not q0.is_posdef():
        raise FormError(f"{q0} is not positive definite")
    if not q0.is_primitive():
        raise FormError(f"{q0} is not primitive")
    a, b, c = q0.a, q0.b, q0.c
    # generators a^2, a w, w^2 = -b w - ac in the basis (1, w)
    gens = [(a * a, 0), (0, a), (-c * a, -b)]
    e1, e2 = hermite_rows(gens)
    if e1[0] * e2[1] - e1[1] * e2[0] < 0:
        e2 = (-e2[0], -e2[1])
    A, B, C = _norm_form_of_basis(e1, e2, b, a * c)
    n = a * a  # norm of the ideal square
    if A % n or B % n or C % n:
        raise AssertionError("ideal-square norm form is not divisible by N(a)^2")
    out = BQF(A // n, B // n, C // n)
    assert out.disc == q0.disc
    return out


def double_inverse(q0: BQF) -> FormClass:
    return form_class(double_inverse_form(q0))


def double_inverse_by_composition(q0: BQF) -> FormClass:
    """Independent route: -([q0] + [q0]) by Gauss composition."""
    sq = compose_forms(q0, q0)
    return form_class(inverse_form(sq))


def _vectors_of_value(q: BQF, n: int):
    """All integer (x, y) with q(x, y) = n for positive definite q."""
    if n < 0:
        return
    if n == 0:
        yield (0, 0)
        return
    a, b, c = q.a, q.b, q.c
    D = -q.disc
    # 4a q = (2ax + by)^2 + D y^2  =>  D y^2 <= 4 a n
    ymax = math.isqrt(4 * a * n // D) + 1
    for y in range(-ymax, ymax + 1):
        rem = 4 * a * n - D * y * y
        if rem < 0:
            continue
        s = math.isqrt(rem)
        if s * s != rem:
            continue
        for t in {s, -s}:
            num = t - b * y
            if num % (2 * a) == 0:
                yield (num // (2 * a), y)


def vectors_of_value(q: BQF, n: int) -> list[tuple[int, int]]:
    if not q.is_posdef():
        raise FormError(f"{q} is not positive definite")
    return sorted(set(_vectors_of_value(q, n)))


def representations(qp: BQF, t: BQF, det_sign: int = 1) -> list[Mat2]:
    """All h in M2(Z) with t = qp . h and sign(det h) = det_sign."""
    if not (qp.is_posdef() and t.is_posdef()):
        raise FormError("representations need positive definite forms")
    out = []
    cols1 = vectors_of_value(qp, t.a)
    cols2 = vectors_of_value(qp, t.c)
    for v in cols1:
        for w in cols2:
            if 2 * qp.bilinear(v, w) != t.b:
                continue
            h = Mat2(v[0], w[0], v[1], w[1])
            if sign(h.det) == det_sign:
                out.append(h)
    return out


def automorphisms(q: BQF) -> list[Mat2]:
    """All h in SL2(Z) with q . h = q (both signs of each PSL2 element)."""
    if not q.is_definite():
        raise FormError("automorphisms are computed for definite forms only")
    qq = q if q.a > 0 else -q
    return [h for h in representations(qq, qq) if h.det == 1]


# ---------------------------------------------------------------- indefinite


def _is_reduced_indef(q: BQF) -> bool:
    d = q.disc
    # 0 < b < sqrt d and sqrt d - b < 2|a| < sqrt d + b
    if q.b <= 0 or q.b * q.b >= d:
        return False
    a2 = 2 * abs(q.a)
    lo = a2 + q.b  # sqrt d < 2|a| + b
    hi = a2 - q.b  # 2|a| - b < sqrt d
    return lo > 0 and lo * lo > d and (hi < 0 or hi * hi < d)


def _rho_step(q: BQF) -> tuple[BQF, Mat2]:
    """One step of the classical reduction operator for indefinite forms:
    (a, b, c) -> (c, -b + 2ck, ...) with the matching SL2(Z) matrix."""
    a, b, c = q.a, q.b, q.c
    d = q.disc
    r = math.isqrt(d)
    ac = abs(c)
    # choose k so that b' = -b + 2ck satisfies the standard normalisation
    if ac > r:
        # -|c| < b' <= |c|
        k = math.floor(Fraction(ac + b, 2 * ac))
        k0 = k if c > 0 else -k
        bp = -b + 2 * c * k0
        while bp > ac:
            k0 -= 1 if c > 0 else -1
            bp = -b + 2 * c * k0
        while bp <= -ac:
            k0 += 1 if c > 0 else -1
            bp = -b + 2 * c * k0
    else:
        # sqrt d - 2|c| < b' < sqrt d, b' = -b mod 2c
        m = 2 * ac
        # largest b' < sqrt(d) congruent to -b mod m
        top = r if r * r != d else r - 1
        bp = top - ((top + b) % m)
        k0 = (bp + b) // (2 * c)
    g = Mat2(0, -1, 1, k0)
    out = act(q, g)
    assert out.a == c and out.b == bp, (q, out, bp)
    return out, g


def reduce_indefinite(q: BQF) -> tuple[BQF, Mat2]:
    d = q.disc
    if d <= 0 or is_square(d):
        raise FormError(f"{q}: indefinite reduction needs nonsquare d > 0")
    g = Mat2.identity()
    cur = q
    for _ in range(10_000 + 10 * abs(q.a) + 10 * abs(q.c)):
        if _is_reduced_indef(cur):
            return cur, g
        cur, step = _rho_step(cur)
        g = g @ step
    raise RuntimeError(f"indefinite reduction of {q} did not terminate")


def indefinite_cycle(q: BQF) -> list[tuple[BQF, Mat2]]:
    """The reduction cycle of a reduced indefinite form, with matrices g_i such
    that q . g_i is the i-th cycle member."""
    if not _is_reduced_indef(q):
        raise FormError(f"{q} is not reduced")
    out = [(q, Mat2.identity())]
    cur, g = q, Mat2.identity()
    while True:
        cur, step = _rho_step(cur)
        g = g @ step
        if cur == q:
            return out
        out.append((cur, g))


def equivalent_psl2z(q1: BQF, q2: BQF) -> Mat2 | None:
    """Some g in SL2(Z) with q1 . g = q2, or None."""
    if q1.disc != q2.disc:
        return None
    if q1 == q2:
        return Mat2.identity()
    if q1.is_definite():
        if sign(q1.a) != sign(q2.a):
            return None
        s = 1 if q1.a > 0 else -1
        r1, g1 = reduce_posdef(q1.scale(s))
        r2, g2 = reduce_posdef(q2.scale(s))
        if r1 != r2:
            return None
        g = g1 @ g2.inv()
        assert act(q1, g) == q2
        return g
    if is_square(q1.disc):
        raise FormError("square discriminants are not supported")
    r1, g1 = reduce_indefinite(q1)
    r2, g2 = reduce_indefinite(q2)
    for f, c in indefinite_cycle(r1):
        if f == r2:
            g = g1 @ c @ g2.inv()
            assert act(q1, g) == q2
            return g
    return None


# ---------------------------------------------------------------- L_q


def _q_ternary(v) -> int:
    """Q(X) = x^2 + yz for X = ((-x, y), (z, x)) in coordinates (x, y, z)."""
    return v[0] * v[0] + v[1] * v[2]


def _b_ternary2(v, w) -> int:
    """Twice the bilinear form attached to Q."""
    return 2 * v[0] * w[0] + v[1] * w[2] + v[2] * w[1]


def _det3(u, v, w) -> int:
    return (u[0] * (v[1] * w[2] - v[2] * w[1])
            - v[0] * (u[1] * w[2] - u[2] * w[1])
            + w[0] * (u[1] * v[2] - u[2] * v[1]))


def _saturated_basis_3d(gens: list[tuple[int, int, int]]) -> tuple[tuple, tuple]:
    """A Z-basis of the rank-2 span of integer vectors in Z^3 (row HNF)."""
    rows = [list(g) for g in gens]
    basis = []
    col = 0
    while rows and col < 3:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while sum(1 for r in rows if r[col] != 0) > 1:
            rows.sort(key=lambda r: (r[col] == 0, abs(r[col])))
            piv = rows[0]
            for r in rows[1:]:
                if r[col]:
                    k = r[col] // piv[col]
                    for j in range(3):
                        r[j] -= k * piv[j]
        rows.sort(key=lambda r: (r[col] == 0, abs(r[col])))
        basis.append(tuple(rows[0]))
        rows = [r for r in rows[1:] if any(r)]
        col += 1
    if len(basis) != 2:
        raise FormError("generators do not span a rank-2 lattice")
    return basis[0], basis[1]


def lattice_Lq(q: BQF) -> tuple[tuple[tuple[int, int, int], tuple[int, int, int]], BQF]:
    """Oriented basis of L_q = {X in L' : (X, X_q) = 0} and its Gram form.

    Vectors are in coordinates (x, y, z) of X = ((-x, y), (z, x)); the basis
    is oriented so that (lambda1, lambda2, X_q) is positively oriented.
    """
    if not q.is_posdef():
        raise FormError(f"{q} is not positive definite")
    if not q.is_primitive():
        raise FormError(f"{q} is not primitive")
    a, b, c = q.a, q.b, q.c
    gens = [(a, -b, 0), (0, c, a), (-c, 0, -b)]
    l1, l2 = _saturated_basis_3d(gens)
    xq = (b, -2 * c, 2 * a)
    if _det3(l1, l2, xq) < 0:
        l2 = tuple(-v for v in l2)
    gram = BQF(_q_ternary(l1), _b_ternary2(l1, l2), _q_ternary(l2))
    return (l1, l2), gram
