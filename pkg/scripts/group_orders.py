"""Enumerate the restricted Clifford group for each q and report order and timing."""

import time

from mubkit.clifford import enumerate_group
from mubkit.gf import field_for_q

for q in (2, 3, 4, 5, 7, 8, 9):
    t0 = time.perf_counter()
    G = enumerate_group(field_for_q(q))
    dt = time.perf_counter() - t0
    print(f"q={q}  order={len(G)}  expected={q**3 * (q * q - 1)}  {dt:.2f}s")
