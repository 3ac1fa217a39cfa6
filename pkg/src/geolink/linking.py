"""Linking coefficients iota'(T) and iota(T), coefficient tables and the
growth ratio |iota(T)| / det(T)^(3/2)."""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .bqf import BQF, classes, reduce_posdef
from .cycles import m_coeff, t_form
from .exact import SymT, format_rat, rational_sqrt
from .gamma15 import GeodesicCycle, orbit_winding_sum, traverse

_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")

# the three geodesics whose homology classes sum to zero
TRIPLE_FORMS = {
    "c1": BQF(1, 0, -3),
    "c2": BQF(2, 2, -1),
    "c3": BQF(-3, -11, 9),
}


@dataclass(frozen=True)
class CycleSet:
    cycles: tuple[GeodesicCycle, ...]

    @classmethod
    def of_forms(cls, forms) -> "CycleSet":
        return cls(tuple(traverse(q) for q in forms))

    @classmethod
    def named(cls, names) -> "CycleSet":
        """Build from names c1, c2, c3 (the fixed triple) or 'a,b,c' literals."""
        from .bqf import parse_form
        out = []
        for nm in names:
            key = (nm.strip().translate(_SUBSCRIPTS).lower()
                   .replace("'", "").replace("′", ""))
            out.append(TRIPLE_FORMS[key] if key in TRIPLE_FORMS else parse_form(nm))
        return cls.of_forms(out)

    @property
    def homology(self) -> tuple[int, int, int]:
        h = [0, 0, 0]
        for c in self.cycles:
            for i in range(3):
                h[i] += c.homology[i]
        return tuple(h)


def bounding_triple() -> CycleSet:
    return CycleSet.of_forms(TRIPLE_FORMS.values())


@lru_cache(maxsize=65536)
def _class_sum(rep: BQF, cyc: GeodesicCycle) -> Fraction:
    return orbit_winding_sum(rep, cyc)


def winding_sums(T: SymT, cyc: GeodesicCycle) -> list[tuple[BQF, int, Fraction]]:
    """Per class of disc -4 det T: (rep, m(T, rep), inner winding sum)."""
    t = t_form(T)
    return [(C.rep, m_coeff(T, C.rep), _class_sum(C.rep, cyc)) for C in classes(t.disc)]


_iota_lock = threading.Lock()
_iota_cache: dict = {}


def iota_prime(T: SymT, cs: CycleSet) -> Fraction:
    """Sum over classes C of m(T, C) times the orbit winding sums of C."""
    if not T.is_posdef():
        return Fraction(0)
    t = t_form(T)
    key = (reduce_posdef(t)[0], cs)
    with _iota_lock:
        hit = _iota_cache.get(key)
    if hit is not None:
        return hit
    total = Fraction(0)
    for C in classes(t.disc):
        m = m_coeff(T, C.rep)
        if m:
            total += m * sum((_class_sum(C.rep, c) for c in cs.cycles), Fraction(0))
    with _iota_lock:
        _iota_cache[key] = total
    return total


def theta_shifts(T: SymT) -> list[tuple[int, int]]:
    """All (n, m) with T - (n^2, nm; nm, m^2) positive definite."""
    if not T.is_posdef():
        return []
    out = []
    nb = math.isqrt(math.floor(T.t1)) + 1
    mb = math.isqrt(math.floor(T.t2)) + 1
    for n in range(-nb, nb + 1):
        for m in range(-mb, mb + 1):
            if (T - SymT(n * n, n * m, m * m)).is_posdef():
                out.append((n, m))
    return out


def iota_full(T: SymT, cs: CycleSet) -> Fraction:
    return sum((iota_prime(T - SymT(n * n, n * m, m * m), cs) for n, m in theta_shifts(T)),
               Fraction(0))


@dataclass(frozen=True)
class CoeffRow:
    T: SymT
    value: Fraction

    @property
    def det(self) -> Fraction:
        return self.T.det

    @property
    def surface_dependent(self) -> bool:
        # square det: the value depends on the choice of bounding surface
        return rational_sqrt(self.T.det) is not None

    def to_json(self) -> dict:
        return {"T": str(self.T), "det": format_rat(self.det), "value": format_rat(self.value),
                "surface_dependent": self.surface_dependent}


@dataclass(frozen=True)
class CoeffTable:
    rows: tuple[CoeffRow, ...]

    def values(self) -> list[Fraction]:
        return [r.value for r in self.rows]

    def as_dict(self) -> dict[tuple[int, int, Fraction], Fraction]:
        """Keyed by (t1, t2, t0)."""
        return {(int(r.T.t1), int(r.T.t2), r.T.t0): r.value for r in self.rows}


def reduced_T(max_det: Fraction):
    """Reduced half-integral positive definite T, 0 <= 2 t0 <= t1 <= t2,
    det T < max_det, ordered by (det, t1, t2, t0)."""
    max_det = Fraction(max_det)
    out = []
    t1 = 1
    while Fraction(3, 4) * t1 * t1 < max_det:
        for s in range(0, t1 + 1):  # s = 2 t0
            t0 = Fraction(s, 2)
            t2 = t1
            while t1 * t2 - t0 * t0 < max_det:
                out.append(SymT(t1, t0, t2))
                t2 += 1
        t1 += 1
    out.sort(key=lambda T: (T.det, T.t1, T.t2, T.t0))
    return out


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GEOLINK_THREADS", "1")))
    except ValueError:
        return 1


def series_table(max_det, cs: CycleSet, nonsquare_only: bool = True,
                 keep_zero: bool = False, workers: int | None = None) -> CoeffTable:
    """Rows in (det, t1, t2, t0) order; GEOLINK_THREADS sets the default
    worker count."""
    if not cs.cycles:
        return CoeffTable(())
    Ts = [T for T in reduced_T(Fraction(max_det))
          if not (nonsquare_only and rational_sqrt(T.det) is not None)]
    n = workers or _workers()
    if n > 1:
        with ThreadPoolExecutor(n) as ex:
            vals = list(ex.map(lambda T: iota_full(T, cs), Ts))
    else:
        vals = [iota_full(T, cs) for T in Ts]
    return CoeffTable(tuple(CoeffRow(T, v) for T, v in zip(Ts, vals) if v or keep_zero))


def growth_check(max_det, cs: CycleSet, nonsquare_only: bool = True) -> tuple[float, SymT | None]:
    """max |iota(T)| / det(T)^(3/2) over reduced T with det T < max_det."""
    best, arg = 0.0, None
    for row in series_table(max_det, cs, nonsquare_only).rows:
        ratio = abs(float(row.value)) / float(row.det) ** 1.5
        if ratio > best:
            best, arg = ratio, row.T
    return best, arg


def clear_caches() -> None:
    """Drop every memo table (class lists, orbit points, winding sums, iota')."""
    from . import bqf, gamma15
    with bqf._classes_lock:
        bqf._classes_cache.clear()
    gamma15._orbit_points.cache_clear()
    _class_sum.cache_clear()
    with _iota_lock:
        _iota_cache.clear()
