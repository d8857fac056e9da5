"""Per-vehicle blockage state machine.

A block opens the moment path planning fails (or a mobile object obstructs
movement). A block that persists 10 s closes as a raw event and immediately
reopens; the third such rollover (30 s continuously blocked) additionally
resets the whole planning process. A successful plan closes any open block.
Raw events carry the vehicle position at the moment each one opened.
"""

from __future__ import annotations

from dataclasses import dataclass, field

RESET_PERSIST_MS = 10_000
RESETS_BEFORE_PLANNER_RESET = 3


@dataclass(frozen=True)
class RawBlockEvent:
    start_ms: int
    end_ms: int
    x: float
    y: float
    z: float

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass
class BlockTracker:
    blocked_since: int | None = None
    resets: int = 0
    events: list[RawBlockEvent] = field(default_factory=list)
    _open_pos: tuple[float, float, float] | None = None
    _last_now: int | None = None

    @property
    def is_blocked(self) -> bool:
        return self.blocked_since is not None

    def update(self, blocked: bool, now_ms: int, position):
        """Advance the state machine.

        Returns (opened, emitted, planner_reset): ``opened`` lists
        (start_ms, position) for blocks opened by this update (a 10-s
        rollover closes one raw event and opens the next), ``emitted``
        lists the raw events closed, and ``planner_reset`` reports a third
        rollover. Handles arbitrary call cadence: a long gap may close
        several 10-s events at once.
        """
        if self._last_now is not None and now_ms < self._last_now:
            raise ValueError("time went backwards")
        self._last_now = now_ms
        emitted: list[RawBlockEvent] = []
        opened: list[tuple[int, tuple[float, float, float]]] = []
        planner_reset = False
        if blocked:
            if self.blocked_since is None:
                self.blocked_since = now_ms
                self._open_pos = tuple(position)
                opened.append((now_ms, self._open_pos))
            while now_ms - self.blocked_since >= RESET_PERSIST_MS:
                end = self.blocked_since + RESET_PERSIST_MS
                emitted.append(RawBlockEvent(self.blocked_since, end, *self._open_pos))
                self.resets += 1
                self.blocked_since = end
                self._open_pos = tuple(position)
                opened.append((end, self._open_pos))
                if self.resets >= RESETS_BEFORE_PLANNER_RESET:
                    planner_reset = True
                    self.resets = 0
        else:
            if self.blocked_since is not None:
                if now_ms > self.blocked_since:
                    emitted.append(
                        RawBlockEvent(self.blocked_since, now_ms, *self._open_pos))
                self.blocked_since = None
                self._open_pos = None
                self.resets = 0
        for ev in emitted:
            self.events.append(ev)
        return opened, emitted, planner_reset

    def close(self, now_ms: int):
        """Force-close any open block (used at trial end)."""
        _, emitted, _ = self.update(False, now_ms, (0.0, 0.0, 0.0))
        return emitted


def update_block_state(tracker: BlockTracker, blocked: bool, now_ms: int, position):
    """Functional wrapper: returns (tracker, emitted events, planner_reset)."""
    _, emitted, planner_reset = tracker.update(blocked, now_ms, position)
    return tracker, emitted, planner_reset
