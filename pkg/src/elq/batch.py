"""Leveled batch processor.

Jobs are grouped into integer levels and run asynchronously, lowest level
first, so that all reads of one level happen before the writes of the next.
The first ``add`` of a batch schedules its flush as a macrotask on the event
loop; every synchronous ``add`` until then lands in the same batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import BatchJobFailed, NegativeLevel
from .layout import EventLoop, LayoutEngine
from .style import format_number

Job = Callable[[], None]


@dataclass
class Batch:
    levels: dict[int, list[Job]] = field(default_factory=dict)
    state: str = "pending"  # pending | flushing | done

    def __len__(self):
        return sum(len(jobs) for jobs in self.levels.values())


class BatchProcessor:
    def __init__(self, loop: EventLoop | None = None, auto_process: bool = True):
        self.loop = loop
        self.auto_process = auto_process
        self._pending: Batch | None = None
        self._current: Batch | None = None
        self.batches_flushed = 0

    @property
    def pending(self) -> Batch | None:
        return self._pending

    @property
    def flushing(self) -> bool:
        return self._current is not None

    def add(self, level: int, job: Job) -> None:
        if level < 0:
            raise NegativeLevel(f"batch level must be >= 0, got {level}")
        if self._pending is None:
            self._pending = Batch()
            if self.auto_process and self.loop is not None:
                self.loop.call_soon(self.flush)
        self._pending.levels.setdefault(level, []).append(job)

    def flush(self) -> None:
        """Run the pending batch now.

        Jobs added while flushing go to a fresh batch with its own scheduled
        flush. A failing job aborts the rest of its batch only.
        """
        batch = self._pending
        if batch is None:
            return
        self._pending = None
        self._current = batch
        batch.state = "flushing"
        try:
            for level in sorted(batch.levels):
                for index, job in enumerate(batch.levels[level]):
                    try:
                        job()
                    except Exception as exc:
                        raise BatchJobFailed(level, index, exc) from exc
        finally:
            batch.state = "done"
            self._current = None
            self.batches_flushed += 1


def double_width(bp: BatchProcessor, layout: LayoutEngine, el: int,
                 callback: Callable[[float], None]) -> None:
    """Reference workload: double an element's width, report its new height.

    The width is read synchronously; the write goes to level 0 and the height
    read (plus ``callback``) to level 1.
    """
    width = layout.read_size(el).width
    new_width = f"{format_number(width * 2)}px"

    def mutate_width():
        layout.doc.set_style(el, "width", new_width)

    def read_height():
        callback(layout.read_size(el).height)

    bp.add(0, mutate_width)
    bp.add(1, read_height)


def double_width_naive(layout: LayoutEngine, el: int, callback: Callable[[float], None]) -> None:
    """Same workload with every step executed immediately (thrashing oracle)."""
    width = layout.read_size(el).width
    layout.doc.set_style(el, "width", f"{format_number(width * 2)}px")
    callback(layout.read_size(el).height)
