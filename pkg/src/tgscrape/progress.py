"""Elapsed-time formatting and the progress/ETA estimate printed after each record.

The estimator treats the id of the message just archived as the number of
messages still ahead in the channel. Ids grow with recency and iteration runs
newest-first, so that is roughly right without a keyword filter; with a filter
active it overestimates the remaining work.
"""

from __future__ import annotations

from dataclasses import dataclass

RULE_WIDTH = 80


@dataclass(frozen=True)
class ProgressSnapshot:
    percentage: float
    elapsed_seconds: float
    remaining_seconds: float
    display_ceiling: int

    @property
    def fraction(self) -> float:
        return self.percentage / 100


def format_duration(seconds: float) -> str:
    """Render seconds as ``DD:HH:MM:SS``, truncating each field.

    >>> format_duration(90061.9)
    '01:01:01:01'
    """
    days = seconds // 86400
    hours = (seconds % 86400) // 3600
    minutes = (seconds % 3600) // 60
    secs = seconds % 60
    return f"{int(days):02}:{int(hours):02}:{int(minutes):02}:{int(secs):02}"


def estimate_progress(
    t_index: int,
    message_id: int,
    elapsed_seconds: float,
    max_t_index: int,
    c_index: int | None = None,
) -> ProgressSnapshot:
    """Estimate completion after ``t_index`` records, the latest with id ``message_id``.

    Must not be called before the first record is archived (``t_index >= 1``).
    ``c_index`` (records from the current channel) only feeds the display
    ceiling and defaults to ``t_index``.
    """
    if t_index + message_id <= max_t_index:
        current = t_index / (t_index + message_id)
    else:
        current = t_index / max_t_index
    estimated_total = elapsed_seconds / current
    remaining = estimated_total - elapsed_seconds
    if c_index is None:
        c_index = t_index
    return ProgressSnapshot(
        percentage=current * 100,
        elapsed_seconds=elapsed_seconds,
        remaining_seconds=max(remaining, 0.0),
        display_ceiling=min(c_index + message_id, max_t_index),
    )


def progress_line(snap: ProgressSnapshot) -> str:
    return (
        f"Progress: {snap.percentage:.2f}% "
        f"Elapsed Time: {format_duration(snap.elapsed_seconds)} "
        f"Remaining Time: {format_duration(snap.remaining_seconds)}"
    )


def render_progress_block(
    channel: str,
    c_index: int,
    t_index: int,
    message_id: int,
    date_text: str,
    snap: ProgressSnapshot,
) -> str:
    rule = "-" * RULE_WIDTH
    return "\n".join(
        [
            rule,
            progress_line(snap),
            f"From {channel}: {c_index:05} contents of {snap.display_ceiling:05}",
            f"Id: {message_id:05} / Date: {date_text}",
            f"Total: {t_index:05} contents until now",
            rule + "\n\n",
        ]
    )
