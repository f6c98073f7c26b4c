"""
Layout thrashing and the batch processor
========================================

Reading geometry while mutations are pending forces a synchronous layout.
Interleaving reads and writes per element therefore costs one forced layout
per element, while grouping reads and writes into levels costs one in total.
Layout passes are counted, not timed.
"""

from elq import bench

##############################################################################
# The doubleWidth workload reads an element's width, doubles it and reports
# the resulting height. Its callback writes the height back to the element.

print("doubleWidth")
print(f"{'n':>6} {'naive':>8} {'batched':>8}")
for n in (10, 100, 1000):
    naive = bench(n, "doubleWidth", "scroll-naive")["forced_layouts"]
    batched = bench(n, "doubleWidth", "scroll")["forced_layouts"]
    print(f"{n:>6} {naive:>8} {batched:>8}")

##############################################################################
# Installing resize detectors has the same shape. Object detectors read the
# target's size right after injecting, so each costs a forced layout plus
# roughly 0.55 MB. Scroll detectors split the install into read, mutate and
# reposition levels that run for every element at once.

print()
print("detector install")
print(f"{'n':>6} {'strategy':>13} {'forced':>7} {'memory':>7}")
for n in (100, 700):
    for strategy in ("object", "scroll-naive", "scroll"):
        row = bench(n, "install", strategy)
        print(f"{n:>6} {strategy:>13} {row['forced_layouts']:>7} {row['memory_units']:>7}")
