"""Reference implementations the test suites compare the engine against.

Each oracle is deliberately naive: brute force, exact fractions, or a
straight-line simulation. None of them import engine internals beyond the
public data types they inspect.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# -- selector matching: enumerate every placement of compounds on the ancestor path

def _compound_ok(compound, node) -> bool:
    if compound.tag is not None and compound.tag != node.tag:
        return False
    return all(c in node.classes for c in compound.classes)


def brute_force_matches(selector, doc, el: int) -> bool:
    """Try every increasing choice of ancestor-path positions for the compounds."""
    path = []
    cur = doc.get(el)
    while True:
        path.append(cur)
        if cur.parent is None:
            break
        cur = doc.get(cur.parent)
    comps = list(reversed(selector.compounds))  # subject first
    combs = list(reversed(selector.combinators))  # combinator to the left of comps[i]
    k = len(comps)
    for rest in itertools.combinations(range(1, len(path)), k - 1):
        pos = (0,) + rest
        if not all(_compound_ok(comps[i], path[pos[i]]) for i in range(k)):
            continue
        if all(combs[i] == "descendant" or pos[i + 1] == pos[i] + 1 for i in range(k - 1)):
            return True
    return False


# -- box widths: exact multiplication down a chain of length specs

def chain_widths(viewport: int, specs, root_font: int = 16):
    """Widths for a root-to-leaf chain; ``specs`` are (kind, value) pairs.

    kinds: auto, pct (value in percent), px, em (against the element's own
    font, which is inherited unchanged here), rem.
    """
    out = []
    parent = Fraction(viewport)
    for kind, value in specs:
        value = Fraction(value)
        if kind == "auto":
            w = parent
        elif kind == "pct":
            w = parent * value / 100
        elif kind == "px":
            w = value
        else:  # em and rem both resolve against 16px in these chains
            w = value * root_font
        out.append(w)
        parent = w
    return out


# -- layout thrashing: count reads that land on a dirty tree

def count_forced(ops) -> int:
    """``ops`` is a sequence of 'r' (geometry read) and 'w' (mutation)."""
    dirty = False
    forced = 0
    for op in ops:
        if op == "w":
            dirty = True
        elif dirty:
            forced += 1
            dirty = False
    return forced


def naive_double_width_ops(n: int) -> list[str]:
    # read width, write width, read height, callback writes the height back
    return ["r", "w", "r", "w"] * n


def batched_double_width_ops(n: int) -> list[str]:
    # synchronous width reads, then level 0 writes, level 1 reads, and the
    # callbacks' writes land in the next batch
    return ["r"] * n + ["w"] * n + ["r"] * n + ["w"] * n


# -- batch processor: a plain list of batches

def reference_batch_trace(program):
    """Expected execution order for ``program``.

    ``program`` is a list of (level, name, children) where children are
    (level, name, children) jobs added while ``name`` runs.
    """
    trace = []
    batches = [list(program)]
    while batches:
        batch = batches.pop(0)
        nxt = []
        for level, name, children in sorted(batch, key=lambda job: job[0]):
            trace.append(name)
            nxt.extend(children)
        if nxt:
            batches.append(nxt)
    return trace


# -- resize events: poll every committed layout

class PollingOracle:
    """Records the committed size of each target after every layout pass.

    Polling is rejected as a product strategy; here it only serves to check
    that the event-driven detectors report every change.
    """

    def __init__(self, layout, targets):
        self.layout = layout
        self.targets = list(targets)
        self.log = {el: [] for el in self.targets}
        layout.commit_listeners.append(self._poll)

    def _poll(self, changed, forced=False):
        committed = self.layout.state.committed
        for el in self.targets:
            box = committed.get(el)
            self.log[el].append(None if box is None else (box.width, box.height))

    def expected_events(self, start_sizes):
        """Size after each change, skipping hidden passes."""
        out = {}
        for el in self.targets:
            last = start_sizes[el]
            seq = []
            for size in self.log[el]:
                if size is None or size == last:
                    continue
                seq.append(size)
                last = size
            out[el] = seq
        return out


# -- breakpoint states

def expected_states(breakpoints_px, width, height):
    sizes = {"width": width, "height": height}
    return {(dim, px, "min" if sizes[dim] >= px else "max") for dim, px in breakpoints_px}
