"""Operational limits: per-channel pacing, the daily community budget, the run
deadline and checkpoint cadence.

The platform soft-bans an account for about a day once it pulls from more than
~200 distinct communities, so admissions are tracked in a sliding 24 h window
and can be persisted between runs.
"""

from __future__ import annotations

import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from filelock import FileLock, Timeout

logger = logging.getLogger(__name__)

DAY = 86400


@dataclass(frozen=True)
class PacingPolicy:
    min_loop_seconds: float = 60.0

    def __post_init__(self):
        if not self.min_loop_seconds > 0:
            raise ValueError("min_loop_seconds must be positive")


@dataclass(frozen=True)
class CheckpointPolicy:
    interval: int = 1000

    def __post_init__(self):
        if self.interval < 1:
            raise ValueError("checkpoint interval must be >= 1")


@dataclass(frozen=True)
class Decision:
    admitted: bool
    retry_after: float = 0.0

    def __bool__(self):
        return self.admitted


ADMIT = Decision(True)


@dataclass
class BudgetState:
    admissions: list[tuple[str, float]] = field(default_factory=list)
    budget_limit: int = 200
    window_seconds: int = DAY

    def __post_init__(self):
        if self.budget_limit < 1 or self.window_seconds < 1:
            raise ValueError("budget_limit and window_seconds must be positive")

    def in_window(self, now: float) -> list[tuple[str, float]]:
        return [(h, t) for h, t in self.admissions if now - t < self.window_seconds]

    def admit(self, handle: str, now: float) -> Decision:
        return admit_channel(self, handle, now)


def admit_channel(state: BudgetState, handle: str, now: float) -> Decision:
    """Admit ``handle`` if the trailing window still has room for another community.

    Expired admissions are pruned. A handle already admitted inside the window
    is admitted again for free.
    """
    state.admissions[:] = state.in_window(now)
    if any(h == handle for h, _ in state.admissions):
        return ADMIT
    if len(state.admissions) < state.budget_limit:
        state.admissions.append((handle, now))
        return ADMIT
    oldest = state.admissions[0][1]
    return Decision(False, retry_after=oldest + state.window_seconds - now)


def pace_channel_loop(loop_duration: float, policy: PacingPolicy = PacingPolicy()) -> float:
    return max(0.0, policy.min_loop_seconds - loop_duration)


def should_checkpoint(t_index: int, policy: CheckpointPolicy = CheckpointPolicy()) -> bool:
    return t_index % policy.interval == 0


def deadline_exceeded(start: float, now: float, time_limit_seconds: float) -> bool:
    return now - start > time_limit_seconds


def dump_budget(state: BudgetState) -> str:
    return "".join(f"{h}\t{t!r}\n" for h, t in state.admissions)


def parse_budget(text: str, budget_limit: int = 200, window_seconds: int = DAY) -> BudgetState:
    admissions = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        handle, sep, stamp = line.rpartition("\t")
        if not sep or not handle:
            raise ValueError(f"budget state line {lineno}: expected 'handle<TAB>epoch-seconds'")
        admissions.append((handle, float(stamp)))
    admissions.sort(key=lambda a: a[1])
    return BudgetState(admissions, budget_limit, window_seconds)


def atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


class BudgetLockedError(RuntimeError):
    pass


class PersistentBudget:
    """A BudgetState backed by a ``handle<TAB>epoch`` file, saved after every admission.

    Use as a context manager: entering takes an exclusive lock file next to the
    state file so two runs cannot share one budget.
    """

    def __init__(self, path, budget_limit: int = 200, window_seconds: int = DAY):
        self.path = Path(path)
        self.budget_limit = budget_limit
        self.window_seconds = window_seconds
        self._lock = FileLock(str(self.path) + ".lock")
        self.state = BudgetState([], budget_limit, window_seconds)

    def __enter__(self):
        try:
            self._lock.acquire(timeout=0)
        except Timeout:
            raise BudgetLockedError(f"{self.path} is in use by another run") from None
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            self.state = parse_budget(
                self.path.read_text(encoding="utf-8"), self.budget_limit, self.window_seconds
            )
        return self

    def __exit__(self, *exc):
        self._lock.release()

    def admit(self, handle: str, now: float) -> Decision:
        before = list(self.state.admissions)
        decision = admit_channel(self.state, handle, now)
        if self.state.admissions != before:
            atomic_write_text(self.path, dump_budget(self.state))
        return decision
