r"""Analytic pieces of the non-holomorphic completion.

* ``bessel_k0``  -- K_0(x) = \int_0^oo exp(-x cosh t) dt
* ``w_star``     -- W*(x1, x2) = 1/2 sqrt(x2) \int_1^oo e^{2 pi t x1} K_0(2 pi t Delta) dt,
                    Delta = sqrt(x1^2 + x2)
* ``rho_indef``  -- signed representation numbers of a signature (1,1) lattice
                    modulo an infinite cyclic automorph group
* ``beta_coeff`` -- the truncated sum  sum r(T'') rho(T') W*(tr T'v, 4|det T'v|)

W* is evaluated after exchanging the two integrals: the t-integral of
exp(-2 pi t k) is elementary, leaving

    W* = 1/2 sqrt(x2) \int_0^oo exp(-2 pi k(u)) / (2 pi k(u)) du,
    k(u) = Delta cosh u - x1 >= Delta - x1 > 0.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np
from scipy import integrate

from .exact import Mat2, SymT, rational_sqrt, sign

Vec = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class RealTol:
    value: float
    err: float
    tol: float

    def __float__(self):
        return self.value


def _tail_cut(x: float, target: float) -> float:
    """U with exp(-x cosh U) / (x sinh U) <= target."""
    U = 1.0
    while math.exp(-x * math.cosh(U)) / (x * math.sinh(U)) > target:
        U += 0.25
    return U


def bessel_k0(x: float, tol: float = 1e-12) -> RealTol:
    if not x > 0:
        raise ValueError("K0 needs x > 0")
    U = _tail_cut(x, tol / 10)
    tail = math.exp(-x * math.cosh(U)) / (x * math.sinh(U))
    val, err = integrate.quad(lambda t: math.exp(-x * math.cosh(t)), 0.0, U,
                              epsabs=tol / 4, epsrel=0.0, limit=400)
    return RealTol(val, err + tail, tol)


def k0_bound(x: float) -> float:
    """sqrt(pi / 2x) e^{-x}, an upper bound for K0(x)."""
    return math.sqrt(math.pi / (2 * x)) * math.exp(-x)


def w_star_bound(x1: float, x2: float) -> float:
    """Closed-form majorant (sqrt(x2) / 4 sqrt(Delta)) e^{-2pi(Delta-x1)} / (2pi(Delta-x1))."""
    if not x2 > 0:
        raise ValueError("W* needs x2 > 0")
    D = math.sqrt(x1 * x1 + x2)
    g = _gap(x1, x2)
    return math.sqrt(x2) / (4 * math.sqrt(D)) * math.exp(-2 * math.pi * g) / (2 * math.pi * g)


def _gap(x1: float, x2: float) -> float:
    # Delta - x1 without cancellation when x1 >> x2
    D = math.sqrt(x1 * x1 + x2)
    return x2 / (D + x1) if x1 > 0 else D - x1


def w_star(x1: float, x2: float, tol: float = 1e-10) -> RealTol:
    if not x2 > 0:
        raise ValueError("W* needs x2 > 0")
    D = math.sqrt(x1 * x1 + x2)
    g = _gap(x1, x2)
    pref = 0.5 * math.sqrt(x2)

    def kappa(u):
        # D cosh u - x1 = (D - x1) + D (cosh u - 1)
        return g + 2 * D * math.sinh(u / 2) ** 2

    def f(u):
        k = kappa(u)
        return math.exp(-2 * math.pi * k) / (2 * math.pi * k)

    # tail: int_U^oo f <= f(U) / (2 pi D sinh U)
    target = tol / (10 * pref) if pref > 0 else tol
    U = 0.5
    while f(U) / (2 * math.pi * D * math.sinh(U)) > target:
        U += 0.25
    tail = pref * f(U) / (2 * math.pi * D * math.sinh(U))
    # integrand is sharply peaked at 0 when the gap is small
    pts = [p for p in (min(1.0, 4 * math.sqrt(g / D)),) if 0 < p < U]
    val, err = integrate.quad(f, 0.0, U, epsabs=tol / (4 * pref), epsrel=0.0,
                              limit=400, points=pts or None)
    return RealTol(pref * val, pref * err + tail, tol)


# ---------------------------------------------------------------- lattices


def epsilon_sign(X1, X2) -> int:
    """Sign of det of the matrix with columns X1, X2."""
    return sign(X1[0] * X2[1] - X1[1] * X2[0])


def _pval(P: SymT, v) -> Fraction:
    return P.t1 * v[0] * v[0] + 2 * P.t0 * v[0] * v[1] + P.t2 * v[1] * v[1]


def _pbil(P: SymT, v, w) -> Fraction:
    return P.t1 * v[0] * w[0] + P.t0 * (v[0] * w[1] + v[1] * w[0]) + P.t2 * v[1] * w[1]


def _mv(g: Mat2, v):
    return (g.a * v[0] + g.b * v[1], g.c * v[0] + g.d * v[1])


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice11:
    """Z^2 + eta_i (i = 1, 2) with indefinite Gram matrix P and an automorph
    gamma of infinite order preserving P and both cosets."""

    gram: SymT
    automorph: Mat2
    shift: tuple[Vec, Vec] = ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)))

    def __post_init__(self):
        P, g = self.gram, self.automorph
        if not P.det < 0:
            raise LatticeError("Gram matrix must be indefinite")
        if P.conj(g) != P:
            raise LatticeError("automorph does not preserve the Gram matrix")
        if g.det != 1 or g.trace <= 2:
            raise LatticeError("automorph must be hyperbolic with positive eigenvalues")
        for eta in self.shift:
            moved = _mv(g, eta)
            if any((Fraction(m) - e).denominator != 1 for m, e in zip(moved, eta)):
                raise LatticeError("automorph does not preserve the shift coset")

    @property
    def eigenvalue(self) -> float:
        t = self.automorph.trace
        return (t + math.sqrt(t * t - 4)) / 2

    def eigen(self):
        """(lambda, e_plus, e_minus) of the automorph as floats."""
        g = np.array([[self.automorph.a, self.automorph.b],
                      [self.automorph.c, self.automorph.d]], dtype=float)
        w, V = np.linalg.eig(g)
        i = int(np.argmax(w.real))
        return float(w.real[i]), V[:, i].real, V[:, 1 - i].real


def find_automorph(P: SymT, bound: int = 50) -> Mat2:
    """The hyperbolic automorph of P (trace > 2) with the smallest trace
    among entries bounded by ``bound``."""
    best = None
    for a, c in product(range(1, bound + 1), range(-bound, bound + 1)):
        for b in range(-bound, bound + 1):
            # d from det = 1
            if (1 + b * c) % a:
                continue
            d = (1 + b * c) // a
            if abs(d) > bound or a + d <= 2:
                continue
            g = Mat2(a, b, c, d)
            if P.conj(g) == P and (best is None or g.trace < best.trace):
                best = g
    if best is None:
        raise LatticeError(f"no automorph with entries <= {bound}")
    return best


def _coords(lat: Lattice11, v) -> tuple[float, float]:
    """Coordinates of v in the eigenbasis (e_plus, e_minus)."""
    _, ep, em = lat.eigen()
    M = np.column_stack([ep, em])
    c = np.linalg.solve(M, np.array([float(v[0]), float(v[1])]))
    return float(c[0]), float(c[1])


def _solve_on_conic(P: SymT, t: Fraction, eta: Vec, xr, yr):
    """All v in Z^2 + eta with P(v) = t, v[1] - eta[1] in yr (and v[0] in xr
    when P has no x^2 term)."""
    out = []
    p11, p12, p22 = P.t1, P.t0, P.t2
    if p11 != 0:
        for j in yr:
            y = j + eta[1]
            # p11 x^2 + 2 p12 y x + (p22 y^2 - t) = 0
            disc = (p12 * y) ** 2 - p11 * (p22 * y * y - t)
            if disc < 0:
                continue
            s = rational_sqrt(disc)
            if s is None:
                continue
            for x in {(-p12 * y + s) / p11, (-p12 * y - s) / p11}:
                if (x - eta[0]).denominator == 1:
                    out.append((x, y))
    else:
        for i in xr:
            x = i + eta[0]
            # 2 p12 x y + p22 y^2 = t
            if p22 == 0:
                if p12 * x != 0:
                    y = t / (2 * p12 * x)
                    if (y - eta[1]).denominator == 1:
                        out.append((x, y))
                continue
            disc = (p12 * x) ** 2 + p22 * t
            if disc < 0:
                continue
            s = rational_sqrt(disc)
            if s is None:
                continue
            for y in {(-p12 * x + s) / p22, (-p12 * x - s) / p22}:
                if (y - eta[1]).denominator == 1:
                    out.append((x, y))
    return out


def _first_vectors(lat: Lattice11, t1: Fraction, start: float = 1.0, periods: int = 2):
    """Vectors X1 in Z^2 + eta1 with P(X1) = t1 and |l+(X1)| in a window
    [s, s lambda^periods] (s scaled by ``start``)."""
    P = lat.gram
    lam, ep, em = lat.eigen()
    kappa = float(t1) / (2 * float(_pbil(P, tuple(ep), tuple(em))))
    s = math.sqrt(abs(kappa)) / lam * start
    hi = s * lam ** periods
    hi_m = abs(kappa) / s
    xb = hi * abs(ep[0]) + hi_m * abs(em[0])
    yb = hi * abs(ep[1]) + hi_m * abs(em[1])
    eta = lat.shift[0]
    yr = range(math.floor(-yb - float(eta[1])) - 1, math.ceil(yb - float(eta[1])) + 2)
    xr = range(math.floor(-xb - float(eta[0])) - 1, math.ceil(xb - float(eta[0])) + 2)
    sols = _solve_on_conic(P, t1, eta, xr, yr)
    out = []
    for v in sols:
        lp, _ = _coords(lat, v)
        if s * (1 - 1e-9) <= abs(lp) <= hi * (1 + 1e-9):
            out.append(v)
    return out


def _orbit_reps(lat: Lattice11, vecs) -> list[Vec]:
    """One representative per <gamma>-orbit among vecs (which must cover at
    least one full period of every orbit)."""
    S = set(vecs)
    ginv = lat.automorph.inv()
    reps = []
    for v in S:
        prev = _mv(ginv, v)
        if prev not in S:
            reps.append(v)
    return sorted(reps)


def _second_vectors(P: SymT, X1: Vec, t0: Fraction, t2: Fraction, eta: Vec) -> list[Vec]:
    """X2 in Z^2 + eta with B(X1, X2) = t0 and P(X2) = t2."""
    c = (P.t1 * X1[0] + P.t0 * X1[1], P.t0 * X1[0] + P.t2 * X1[1])  # P X1
    if c == (0, 0):
        return []
    # c . (k + eta) = t0, k in Z^2: clear denominators
    rhs = t0 - c[0] * eta[0] - c[1] * eta[1]
    den = math.lcm(c[0].denominator, c[1].denominator, rhs.denominator)
    A, B, R = int(c[0] * den), int(c[1] * den), int(rhs * den)
    g = math.gcd(A, B)
    if R % g:
        return []
    # particular solution via extended gcd
    from .bqf import _xgcd
    _, u, w = _xgcd(A, B)
    k0 = (u * (R // g), w * (R // g))
    step = (B // g, -A // g)
    base = (k0[0] + eta[0], k0[1] + eta[1])
    # P(base + n step) = t2  ->  alpha n^2 + beta n + gamma = 0
    alpha = _pval(P, step)
    beta = 2 * _pbil(P, base, step)
    gam = _pval(P, base) - t2
    if alpha == 0:
        raise LatticeError("isotropic direction; Gram matrix must be anisotropic")
    disc = beta * beta - 4 * alpha * gam
    if disc < 0:
        return []
    s = rational_sqrt(disc)
    if s is None:
        return []
    out = []
    for n in {(-beta + s) / (2 * alpha), (-beta - s) / (2 * alpha)}:
        if n.denominator == 1:
            n = int(n)
            out.append((base[0] + n * step[0], base[1] + n * step[1]))
    return out


_rho_lock = threading.Lock()
_rho_cache: dict = {}


def rho_indef(lat: Lattice11, T: SymT, start: float = 1.0) -> int:
    """sum of sgn det X over X = (X1, X2) in (Z^2 + eta)^2 / <gamma> with
    Gram matrix T; ``start`` moves the fundamental window."""
    if not T.det < 0:
        return 0
    key = (lat, T, start)
    with _rho_lock:
        if key in _rho_cache:
            return _rho_cache[key]
    if T.t1 == 0:
        if T.t2 == 0:
            val = 0  # both columns isotropic, hence zero for anisotropic P
        else:
            swapped = Lattice11(lat.gram, lat.automorph, (lat.shift[1], lat.shift[0]))
            val = -rho_indef(swapped, T.swap(), start)
    else:
        total = 0
        X1s = _orbit_reps(lat, _first_vectors(lat, T.t1, start))
        for X1 in X1s:
            for X2 in _second_vectors(lat.gram, X1, T.t0, T.t2, lat.shift[1]):
                total += epsilon_sign(X1, X2)
        val = total
    with _rho_lock:
        _rho_cache[key] = val
    return val


def _scan_conic(P: SymT, t: Fraction, eta: Vec, box: int):
    """v in Z^2 + eta, |v[0] - eta[0]| <= box, with P(v) = t; y from the quadratic."""
    a, b, c = P.t1, P.t0, P.t2
    out = []
    for i in range(-box, box + 1):
        x = i + eta[0]
        if c == 0:
            if b == 0:
                continue
            ys = [(t - a * x * x) / (2 * b * x)] if x else []
        else:
            r = rational_sqrt(4 * b * b * x * x - 4 * c * (a * x * x - t))
            if r is None:
                continue
            ys = {(-2 * b * x + r) / (2 * c), (-2 * b * x - r) / (2 * c)}
        for y in ys:
            if (y - eta[1]).denominator == 1:
                out.append((x, y))
    return out


def rho_bruteforce(lat: Lattice11, T: SymT, box: int, periods: int = 3) -> Fraction:
    """Independent count: X1 on the conic P = t1 inside a window of ``periods``
    automorph periods, X2 by a scan over its first coordinate; the total is
    divided by ``periods``."""
    if not T.det < 0:
        return Fraction(0)
    P = lat.gram
    t1, t0, t2 = T.t1, T.t0, T.t2
    if t1 == 0:
        raise ValueError("brute force needs t1 != 0")
    e1, e2 = lat.shift
    lam, ep, em = lat.eigen()
    kappa = float(t1) / (2 * float(_pbil(P, tuple(ep), tuple(em))))
    s = math.sqrt(abs(kappa)) / lam * 1.37  # generic start, away from lattice points
    total = 0
    for X1 in _scan_conic(P, t1, e1, box):
        lp, _ = _coords(lat, X1)
        if not (s <= abs(lp) < s * lam ** periods):
            continue
        # P(X1, X2) = t0 is linear in X2 = (x, y)
        cx = P.t1 * X1[0] + P.t0 * X1[1]
        cy = P.t0 * X1[0] + P.t2 * X1[1]
        for k in range(-box, box + 1):
            if cy != 0:
                x = k + e2[0]
                y = (t0 - cx * x) / cy
            else:
                y = k + e2[1]
                x = (t0 - cy * y) / cx
            X2 = (x, y)
            if any((z - e).denominator != 1 for z, e in zip(X2, e2)):
                continue
            if _pval(P, X2) == t2:
                total += epsilon_sign(X1, X2)
    return Fraction(total, periods)


# ---------------------------------------------------------------- theta side


def theta_rep_count(P: SymT, T: SymT) -> int:
    """#{N in M2(Z) : N^t P N = T} for positive definite P."""
    if not P.is_posdef():
        raise ValueError("P must be positive definite")
    if not T.is_posdef():
        return 0
    cols = {}
    for tv in {T.t1, T.t2}:
        cols[tv] = _vectors_with_value(P, tv)
    n = 0
    for v in cols[T.t1]:
        for w in cols[T.t2]:
            if _pbil(P, v, w) == T.t0:
                n += 1
    return n


def _vectors_with_value(P: SymT, t: Fraction) -> list[tuple[int, int]]:
    # P(x, y) = t  =>  y^2 <= t p11 / det P,  x^2 <= t p22 / det P
    det = P.det
    yb = math.isqrt(math.floor(t * P.t1 / det)) + 1
    xb = math.isqrt(math.floor(t * P.t2 / det)) + 1
    return [(x, y) for x in range(-xb, xb + 1) for y in range(-yb, yb + 1)
            if _pval(P, (x, y)) == t]


# ---------------------------------------------------------------- beta


@dataclass(frozen=True)
class BetaResult:
    value: float
    tail_bound: float
    quad_err: float
    n_terms: int
    delta_max: float
    coef_bound: tuple[float, float]

    @property
    def err(self) -> float:
        return self.tail_bound + self.quad_err


def _sym_np(T: SymT) -> np.ndarray:
    return np.array([[float(T.t1), float(T.t0)], [float(T.t0), float(T.t2)]])


def _candidates(T: SymT, v: np.ndarray, N: int, R: float, detP: Fraction):
    """Indefinite T' in (1/N)Sym2(Z) with T - T' positive definite,
    Delta(T'v) < R and det T' / det P a rational square (necessary for
    T' to be a Gram matrix of lattice vectors)."""
    vinv = np.linalg.inv(v)
    A = -R * vinv
    B = _sym_np(T)
    w0 = math.sqrt(max((B - A)[0, 0] * (B - A)[1, 1], 0.0))
    s2 = np.arange(math.floor(A[1, 1] * N) - 1, math.ceil(B[1, 1] * N) + 2, dtype=np.int64)
    h = np.arange(math.floor(2 * (A[0, 1] - w0) * N) - 1,
                  math.ceil(2 * (A[0, 1] + w0) * N) + 2, dtype=np.int64)
    S2, H = np.meshgrid(s2, h, indexing="ij")
    S2, H = S2.ravel(), H.ravel()
    pq = detP.numerator * detP.denominator
    L = np.linalg.cholesky(v)
    for s1 in range(math.floor(A[0, 0] * N) - 1, math.ceil(B[0, 0] * N) + 2):
        d4 = 4 * s1 * S2 - H * H  # 4 N^2 det T'
        t1, t0, t2 = s1 / N, H / (2 * N), S2 / N
        # T - T' positive definite
        u1, u0, u2 = B[0, 0] - t1, B[0, 1] - t0, B[1, 1] - t2
        ok = (d4 < 0) & (u1 > 0) & (u1 * u2 - u0 * u0 > 0)
        # Delta(T'v) = lambda_+ - lambda_- of L^t T' L
        a11 = L[0, 0] ** 2 * t1 + 2 * L[0, 0] * L[1, 0] * t0 + L[1, 0] ** 2 * t2
        a12 = L[0, 0] * L[1, 1] * t0 + L[1, 0] * L[1, 1] * t2
        a22 = L[1, 1] ** 2 * t2
        ok &= np.sqrt((a11 - a22) ** 2 + 4 * a12 * a12) < R * (1 + 1e-12)
        z = d4 * pq
        r = np.rint(np.sqrt(np.abs(z).astype(float))).astype(np.int64)
        ok &= (z > 0) & (r * r == z)
        for j in np.nonzero(ok)[0]:
            yield SymT(Fraction(s1, N), Fraction(int(H[j]), 2 * N), Fraction(int(S2[j]), N))


def _box_count(T: SymT, v: np.ndarray, N: int, R: float) -> int:
    vinv = np.linalg.inv(v)
    A = -R * vinv
    B = _sym_np(T)
    n1 = math.ceil(B[0, 0] * N) - math.floor(A[0, 0] * N) + 3
    n2 = math.ceil(B[1, 1] * N) - math.floor(A[1, 1] * N) + 3
    w0 = math.sqrt(max((B - A)[0, 0] * (B - A)[1, 1], 0.0))
    n0 = math.ceil(4 * w0 * N) + 3
    return n1 * n2 * n0


def beta_coeff(T: SymT, v, r_pos: Callable[[SymT], int], lat: Lattice11, N: int = 1,
               delta_max: float | None = None, factor: Fraction | float = 1,
               coef_bound: tuple[float, float] | None = None,
               wtol: float = 1e-12, tol: float | None = None,
               max_delta: float = 64.0) -> BetaResult:
    """Truncated sum over T = T' + T'' (T' in (1/N)Sym2(Z) indefinite, T''
    positive definite) of r_pos(T'') rho(T') W*(tr T'v, 4|det T'v|), keeping
    terms with Delta(T'v) < delta_max.

    The tail bound assumes |r rho| <= C (1 + |lambda_-|)^k with
    coef_bound = (C, k); when omitted, (C, k) is fitted to the kept terms
    with k = 2, which makes the certificate empirical.

    With ``tol`` and no ``delta_max``, delta_max starts one unit above the
    top eigenvalue of Tv and doubles until the error is below tol."""
    v = np.asarray(v, dtype=float)
    if v.shape != (2, 2) or not np.allclose(v, v.T) or np.linalg.eigvalsh(v).min() <= 0:
        raise ValueError("v must be symmetric positive definite")
    lam_top = float(np.linalg.eigvals(_sym_np(T) @ v).real.max())
    if delta_max is None:
        if tol is None:
            raise ValueError("give delta_max or tol")
        dm = max(lam_top, 0.0) + 1.0
        while True:
            res = beta_coeff(T, v, r_pos, lat, N, dm, factor, coef_bound, wtol)
            if res.err < tol or 2 * dm > max_delta:
                return res
            dm *= 2
    total = 0.0
    qerr = 0.0
    n = 0
    fit = 0.0
    for Tp in _candidates(T, v, N, delta_max, lat.gram.det):
        Tpp = T - Tp
        if not Tpp.is_posdef():
            continue
        M = _sym_np(Tp) @ v
        x1 = float(np.trace(M))
        x2 = 4 * abs(float(np.linalg.det(M)))
        if math.sqrt(x1 * x1 + x2) >= delta_max:
            continue
        r = r_pos(Tpp)
        if r == 0:
            continue
        rho = rho_indef(lat, Tp)
        if rho == 0:
            continue
        w = w_star(x1, x2, wtol)
        total += r * rho * w.value
        qerr += abs(r * rho) * w.err
        n += 1
        lam_minus = (x1 - math.sqrt(x1 * x1 + x2)) / 2
        fit = max(fit, abs(r * rho) / (1 + abs(lam_minus)) ** 2)
    C, k = coef_bound if coef_bound is not None else (max(fit, 1.0), 2.0)
    # tail: terms with Delta >= delta_max have |lambda_-| >= delta_max - lam_top
    tail = 0.0
    R = delta_max - max(lam_top, 0.0)
    if R <= 0:
        # no margin above the top eigenvalue: nothing is certified
        tail = math.inf
    while R > 0:
        shell = _box_count(T, v, N, R + 1) * C * (2 + R) ** k
        wb = math.sqrt(max(lam_top, 1e-300)) / 2 * math.exp(-4 * math.pi * R) / (4 * math.pi * R)
        term = shell * wb
        tail += term
        if term < 1e-18 * max(1.0, tail) or R > delta_max + 200:
            break
        R += 1
    f = float(factor)
    return BetaResult(f * total, abs(f) * tail, abs(f) * qerr, n, delta_max, (C, k))
