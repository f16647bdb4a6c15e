"""Cross-check bitmaps + SplitOracle after the scratch-buffer rewrite."""
import sys, time
sys.path.insert(0, "/root/pkg/src")
import numpy as np
from quadforms.forms_core import parse_form, enum_context, represented_set, represents
from quadforms._bitmap import BitmapBuilder, represented_bitmap, unpack_bits, SplitOracle
from quadforms._enum import theta_counts, represents_value

FORMS = [
    "x^2+y^2+z^2",
    "x^2+x*z+2*y^2+3*y*z+7*z^2",
    "x^2+2*y^2+5*z^2+5*z*w+10*w^2",
    "x^2+2*x*z+7*x*w+2*y^2+y*z+7*z^2+7*z*w+14*w^2",
    "x^2+x*z+2*x*w+2*y^2+5*z^2+10*w^2",
]

B = 4000
for s in FORMS:
    f = parse_form(s)
    ctx = enum_context(f)
    counts = theta_counts(ctx, B)
    direct = {i for i in range(1, B + 1) if counts[i] > 0}
    arr = represented_bitmap(f.matrix, B)
    bm = {i for i in range(1, B + 1) if arr[i]}
    assert bm == direct, (s, sorted(bm ^ direct)[:20])
    print(f"bitmap==theta B={B}: OK  {s}")

# timings
f3 = parse_form("x^2+x*z+2*y^2+3*y*z+7*z^2")
t0 = time.time(); represented_bitmap(f3.matrix, 10**6); t1 = time.time()
print(f"rank3 bitmap 1e6: {t1-t0:.2f} s")
f4 = parse_form("x^2+2*x*z+7*x*w+2*y^2+y*z+7*z^2+7*z*w+14*w^2")
t0 = time.time(); represented_bitmap(f4.matrix, 10**5); t1 = time.time()
print(f"rank4 bitmap 1e5: {t1-t0:.2f} s")

# SplitOracle: build on 5251 quaternary, cutoff 2^20 for the test
t0 = time.time()
orc = SplitOracle(f4.matrix, 1 << 20)
t1 = time.time()
print(f"oracle build (2^20): {t1-t0:.2f} s  complete_below={orc.complete_below}")

# exactness below the line: compare with represents_value on a stripe
ctx4 = enum_context(f4)
ns = list(range(1, 2000)) + list(range(100000, 100400)) + list(range(1000000, 1000200))
ns = [n for n in ns if n <= orc.complete_below]
res = orc.probe_many(ns)
bad = []
for n, r in zip(ns, res):
    truth = represents_value(ctx4, n)
    if bool(r) != bool(truth):
        bad.append((n, bool(r), bool(truth)))
assert not bad, bad[:10]
print(f"oracle exact on {len(ns)} probes below line: OK")

# soundness above the line: every True is a witness (spot-check)
hi_ns = list(range((1 << 20) + 1, (1 << 20) + 400))
res = orc.probe_many(hi_ns)
for n, r in zip(hi_ns, res):
    if r:
        assert represents_value(ctx4, n), n
print("oracle sound above line: OK")

# bulk timing
rng = np.random.default_rng(0)
big = rng.integers(1, 2 * 10**9, size=100000).astype(np.int64)
orc2 = SplitOracle(f4.matrix, 1 << 25)
t0 = time.time()
out = orc2.probe_many(big)
t1 = time.time()
print(f"oracle 1e5 probes (cutoff 2^25): {t1-t0:.2f} s, hit rate {out.mean():.4f}")
print(f"oracle complete_below (2^25): {orc2.complete_below}")
