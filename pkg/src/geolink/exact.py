"""Exact arithmetic: rationals, real quadratic irrationals, 2x2 integer
matrices and half-integral symmetric matrices.

Everything that feeds a discrete decision (interval membership, sign tests,
equivalence) goes through this module and never touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rat = Fraction
RatLike = Union[int, Fraction, str]


def rat(x: RatLike) -> Fraction:
    """Coerce ``x`` to an exact rational; strings use the ``"p/q"`` form."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_arith(x: RatLike, y: RatLike, op: str) -> Fraction:
    x, y = rat(x), rat(y)
    if op == "+":
        return x + y
    if op in ("-", "−"):
        return x - y
    if op in ("*", "×"):
        return x * y
    if op in ("/", "÷"):
        if y == 0:
            raise ZeroDivisionError("rational division by zero")
        return x / y
    raise ValueError(f"unknown operator {op!r}")


def format_rat(x: Fraction) -> str:
    x = rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rat(s: str) -> Fraction:
    return Fraction(s.strip())


def sign(x) -> int:
    return (x > 0) - (x < 0)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    x = rat(x)
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    sp, sq = math.isqrt(p), math.isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return None


# --------------------------------------------------------------------------
# sign of a + b*sqrt(d) and friends, integer/rational arithmetic only


def sign_sqrt_sum(a: Fraction, b: Fraction, d: int) -> int:
    """Exact sign of ``a + b*sqrt(d)`` for rationals a, b and integer d >= 0."""
    if d < 0:
        raise ValueError("negative radicand")
    sa, sb = sign(a), sign(b)
    if sb == 0 or d == 0:
        return sa
    if sa == 0:
        return sb
    if sa == sb:
        return sa
    # opposite signs: compare a^2 with b^2 d
    return sa * sign(a * a - b * b * d)


def sign_two_radicals(a: Fraction, b: Fraction, d1: int, c: Fraction, d2: int) -> int:
    """Exact sign of ``a + b*sqrt(d1) + c*sqrt(d2)``."""
    if c == 0 or d2 == 0:
        return sign_sqrt_sum(a, b, d1)
    if b == 0 or d1 == 0:
        return sign_sqrt_sum(a, c, d2)
    # sign of the radical part r = b sqrt(d1) + c sqrt(d2)
    sb, sc = sign(b), sign(c)
    sr = sb if sb == sc else sb * sign(b * b * d1 - c * c * d2)
    sa = sign(a)
    if sr == 0:
        return sa
    if sa == 0 or sa == sr:
        return sr
    # a and r have opposite signs: compare a^2 with r^2
    # a^2 - r^2 = (a^2 - b^2 d1 - c^2 d2) - 2bc sqrt(d1 d2)
    s = sign_sqrt_sum(a * a - b * b * d1 - c * c * d2, -2 * b * c, d1 * d2)
    return sa * s


# --------------------------------------------------------------------------


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return (s, e) with d = s^2 * e and e squarefree (trial division)."""
    s, e = 1, 1
    n = d
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            e *= p
        p += 1
    return s, e * n


@dataclass(frozen=True, eq=False)
@total_ordering
class QuadIrr:
    """The real number (p + q*sqrt(d))/r, stored canonically."""

    p: int
    q: int
    r: int
    d: int

    def __post_init__(self):
        p, q, r, d = self.p, self.q, self.r, self.d
        if r == 0:
            raise ZeroDivisionError("QuadIrr with zero denominator")
        if d < 0:
            raise ValueError("QuadIrr radicand must be nonnegative")
        if d == 0 or q == 0:
            q, d = 0, 0
        else:
            s, e = _squarefree_split(d)
            q, d = q * s, e
            if d == 1:
                p, q, d = p + q, 0, 0
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "r", r // g)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_rat(cls, x: RatLike) -> "QuadIrr":
        x = rat(x)
        return cls(x.numerator, 0, x.denominator, 0)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def __float__(self) -> float:
        return (self.p + self.q * math.sqrt(self.d)) / self.r

    def _parts(self) -> tuple[Fraction, Fraction, int]:
        return Fraction(self.p, self.r), Fraction(self.q, self.r), self.d

    def cmp(self, other: "QuadIrr | RatLike") -> int:
        return qirr_cmp(self, other)

    def __eq__(self, other):
        if isinstance(other, (QuadIrr, int, Fraction)):
            return qirr_cmp(self, other) == 0
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, (QuadIrr, int, Fraction)):
            return qirr_cmp(self, other) < 0
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q, self.r, self.d))

    def __repr__(self):
        if self.q == 0:
            return f"QuadIrr({format_rat(Fraction(self.p, self.r))})"
        return f"QuadIrr(({self.p}{self.q:+d}*sqrt({self.d}))/{self.r})"


def _as_qirr(x) -> QuadIrr:
    if isinstance(x, QuadIrr):
        return x
    return QuadIrr.from_rat(x)


def qirr_cmp(x: "QuadIrr | RatLike", y: "QuadIrr | RatLike") -> int:
    """Exact sign of x - y."""
    x, y = _as_qirr(x), _as_qirr(y)
    a1, b1, d1 = x._parts()
    a2, b2, d2 = y._parts()
    if d1 == d2 or b2 == 0:
        if b2 == 0:
            return sign_sqrt_sum(a1 - a2, b1, d1)
        return sign_sqrt_sum(a1 - a2, b1 - b2, d1)
    if b1 == 0:
        return sign_sqrt_sum(a1 - a2, -b2, d2)
    return sign_two_radicals(a1 - a2, b1, d1, -b2, d2)


class _Infinity:
    """The point at infinity of the extended real line."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __float__(self):
        return math.inf


INF = _Infinity()
ExtReal = Union[QuadIrr, _Infinity]


def ext_cmp(x, y) -> int:
    """Compare extended reals; INF is greater than every finite value."""
    if x is INF and y is INF:
        return 0
    if x is INF:
        return 1
    if y is INF:
        return -1
    return qirr_cmp(x, y)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    """Integer 2x2 matrix ((a, b), (c, d))."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def inv(self) -> "Mat2":
        """Inverse of a unimodular matrix (det = +-1)."""
        det = self.det
        if det not in (1, -1):
            raise ValueError(f"matrix {self} is not invertible over Z (det={det})")
        return Mat2(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def adj(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def canonical(self) -> "Mat2":
        """Representative of +-M in PSL2: first nonzero entry positive."""
        for v in (self.a, self.b, self.c, self.d):
            if v:
                return self if v > 0 else -self
        return self

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __str__(self):
        return f"{self.a},{self.b},{self.c},{self.d}"


def parse_mat2(s: str) -> Mat2:
    parts = [int(v) for v in s.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected 'a,b,c,d', got {s!r}")
    return Mat2(*parts)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SymT:
    """Symmetric matrix ((t1, t0), (t0, t2)) with rational entries."""

    t1: Fraction
    t0: Fraction
    t2: Fraction

    def __init__(self, t1: RatLike, t0: RatLike, t2: RatLike):
        object.__setattr__(self, "t1", rat(t1))
        object.__setattr__(self, "t0", rat(t0))
        object.__setattr__(self, "t2", rat(t2))

    @property
    def det(self) -> Fraction:
        return self.t1 * self.t2 - self.t0 * self.t0

    @property
    def trace(self) -> Fraction:
        return self.t1 + self.t2

    def is_posdef(self) -> bool:
        return self.t1 > 0 and self.det > 0

    def is_indefinite(self) -> bool:
        return self.det < 0

    def is_half_integral(self) -> bool:
        return (
            self.t1.denominator == 1
            and self.t2.denominator == 1
            and (2 * self.t0).denominator == 1
        )

    def form_coeffs(self) -> tuple[int, int, int]:
        """Coefficients of t(x,y) = t1 x^2 + 2 t0 xy + t2 y^2 (integral T only)."""
        if not self.is_half_integral():
            raise ValueError(f"{self} is not half-integral")
        return int(self.t1), int(2 * self.t0), int(self.t2)

    def disc(self) -> Fraction:
        """-4 det T, the discriminant of the attached binary form."""
        return -4 * self.det

    def conj(self, g: Mat2) -> "SymT":
        """g^T T g."""
        a, b, c, d = g.a, g.b, g.c, g.d
        t1, t0, t2 = self.t1, self.t0, self.t2
        return SymT(
            a * a * t1 + 2 * a * c * t0 + c * c * t2,
            a * b * t1 + (a * d + b * c) * t0 + c * d * t2,
            b * b * t1 + 2 * b * d * t0 + d * d * t2,
        )

    def flip(self) -> "SymT":
        return SymT(self.t1, -self.t0, self.t2)

    def swap(self) -> "SymT":
        return SymT(self.t2, self.t0, self.t1)

    def __sub__(self, o: "SymT") -> "SymT":
        return SymT(self.t1 - o.t1, self.t0 - o.t0, self.t2 - o.t2)

    def __add__(self, o: "SymT") -> "SymT":
        return SymT(self.t1 + o.t1, self.t0 + o.t0, self.t2 + o.t2)

    def __str__(self):
        return ",".join(format_rat(v) for v in (self.t1, self.t0, self.t2))

    def __repr__(self):
        return f"SymT({self})"


def parse_symt(s: str) -> SymT:
    parts = s.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected 't1,t0,t2', got {s!r}")
    return SymT(*(parse_rat(p) for p in parts))


def delta(T: SymT) -> tuple[Fraction, float]:
    """Eigenvalue gap of T: returns (exact radicand, numerical root)."""
    radicand = T.trace**2 - 4 * T.det
    if radicand < 0:
        raise ValueError("complex eigenvalues")
    return radicand, math.sqrt(radicand)


def gauss_reduce(a, b, c):
    """Reduce a positive definite form (a, b, c) with int or rational entries.

    Returns ((a', b', c'), g) where (a', b', c') = (a, b, c) . g with g in SL2(Z),
    |b'| <= a' <= c', and b' >= 0 whenever |b'| = a' or a' = c'.
    """
    if not (a > 0 and b * b - 4 * a * c < 0):
        raise ValueError(f"form ({a}, {b}, {c}) is not positive definite")
    g = Mat2.identity()
    while True:
        # translate: x -> x + k y keeps a, shifts b by 2ak
        k = math.floor(Fraction(a - b, 2 * a))
        if k:
            b, c = b + 2 * a * k, a * k * k + b * k + c
            g = g @ Mat2(1, k, 0, 1)
        if a > c:
            a, b, c = c, -b, a
            g = g @ Mat2(0, -1, 1, 0)
            continue
        break
    if a == c and b < 0:
        b = -b
        g = g @ Mat2(0, -1, 1, 0)
    return (a, b, c), g


def reduce_sym(T: SymT) -> tuple[SymT, Mat2, bool]:
    """PSL2(Z)-reduce a positive definite T.

    Returns (T_red, g, flipped) with g^T T g reduced (2|t0| <= t1 <= t2) and
    ``flipped`` telling whether the final t0 -> -t0 sign change was applied to
    reach t0 >= 0; ``T_red`` already includes that flip.  The flip is an
    orientation reversal, so linking coefficients change sign under it.
    """
    if not T.is_posdef():
        raise ValueError(f"{T} is not positive definite")
    (a, b, c), g = gauss_reduce(T.t1, 2 * T.t0, T.t2)
    red = SymT(a, b / 2, c)
    flipped = red.t0 < 0
    if flipped:
        red = red.flip()
    return red, g, flipped
