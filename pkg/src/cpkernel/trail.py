"""Reversible state: a stamped undo log with checkpoints."""

from __future__ import annotations

from typing import Any

from .kernel import KernelError


class Trail:
    """Undo log of ``(cell, saved)`` pairs.

    A cell is any object with a ``_restore(saved)`` method. ``magic`` is
    bumped on every checkpoint push and every backtrack, so a cell whose
    stamp equals ``magic`` has already been saved in the current epoch.
    """

    __slots__ = ("_log", "_marks", "magic")

    def __init__(self) -> None:
        self._log: list[tuple[Any, Any]] = []
        self._marks: list[int] = []
        self.magic = 0

    @property
    def depth(self) -> int:
        return len(self._marks)

    def __len__(self) -> int:
        return len(self._log)

    def push_checkpoint(self) -> int:
        self._marks.append(len(self._log))
        self.magic += 1
        return len(self._marks) - 1

    def save(self, cell, saved) -> None:
        # Root state (no checkpoint) is never restored, so nothing to log.
        if self._marks:
            self._log.append((cell, saved))

    def assign(self, cell: "TrailedInt", v: int) -> None:
        if cell._stamp != self.magic:
            cell._stamp = self.magic
            if self._marks:
                self._log.append((cell, cell.value))
        cell.value = v

    def backtrack_to(self, cp: int) -> None:
        """Restore the state at checkpoint ``cp`` and pop it with everything above."""
        marks = self._marks
        if not 0 <= cp < len(marks):
            raise KernelError(f"stale checkpoint {cp} (depth {len(marks)})")
        pos = marks[cp]
        del marks[cp:]
        log = self._log
        while len(log) > pos:
            cell, saved = log.pop()
            cell._restore(saved)
        self.magic += 1


class TrailedInt:
    """An integer cell restored on backtrack."""

    __slots__ = ("value", "_stamp")

    def __init__(self, value: int = 0) -> None:
        self.value = value
        self._stamp = -1

    def _restore(self, saved) -> None:
        self.value = saved

    def __repr__(self) -> str:
        return f"TrailedInt({self.value})"
