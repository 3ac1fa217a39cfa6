"""Nonzero linking coefficients iota(T) for reduced T with det T < 15, against
the geodesic of -3x^2 - 11xy + 9y^2, plus the growth ratio."""

import time

from geolink.linking import CycleSet, growth_check, series_table

cs = CycleSet.named(["c3"])

t = time.perf_counter()
tab = series_table(15, cs, nonsquare_only=True)
print(f"{'t1':>3} {'t2':>3} {'t0':>4} | iota")
for row in tab.rows:
    print(f"{row.T.t1!s:>3} {row.T.t2!s:>3} {row.T.t0!s:>4} | {row.value}")
print(f"({time.perf_counter() - t:.2f}s)")

# square determinants depend on the bounding surface; shown separately
sq = [r for r in series_table(15, cs, nonsquare_only=False, keep_zero=True).rows
      if r.surface_dependent]
print("square det rows:", [(str(r.T), str(r.value)) for r in sq])

ratio, T = growth_check(15, cs)
print(f"max |iota| / det^1.5 = {ratio:.4f} at T = {T}")
