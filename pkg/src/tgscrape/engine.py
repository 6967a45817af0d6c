"""The scraping loop: channels -> messages in the date window -> records -> files.

Console output keeps the original tool's wording so existing log parsers and
operators' habits carry over.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .clock import SystemClock
from .governor import CheckpointPolicy, PacingPolicy, deadline_exceeded, pace_channel_loop, should_checkpoint
from .progress import estimate_progress, render_progress_block
from .records import build_comment_record, build_message_record

OK = "ok"
ERROR = "error"
SKIPPED_BUDGET = "skipped_budget"


@dataclass
class ChannelResult:
    handle: str
    c_index: int = 0
    status: str = OK
    detail: str = ""


@dataclass
class JobSummary:
    t_index: int = 0
    per_channel: list[ChannelResult] = field(default_factory=list)
    files_written: list[Path] = field(default_factory=list)
    wall_seconds: float = 0.0
    stop_reason: str = "completed"  # completed | cap | deadline | interrupted
    final_file: Path | None = None

    def render(self) -> str:
        lines = [f"records: {self.t_index}  stop: {self.stop_reason}  wall: {self.wall_seconds:.1f}s"]
        for ch in self.per_channel:
            extra = f"  ({ch.detail})" if ch.detail else ""
            lines.append(f"  {ch.handle}: {ch.c_index} [{ch.status}]{extra}")
        if self.final_file is not None:
            lines.append(f"final file: {self.final_file}")
        return "\n".join(lines)


def _print(out, text=""):
    out.write(text + "\n")


def run_job(
    job,
    source,
    sink,
    budget=None,
    clock=None,
    *,
    pacing: PacingPolicy = PacingPolicy(),
    checkpoint: CheckpointPolicy = CheckpointPolicy(),
    out=None,
) -> JobSummary:
    """Scrape every channel of ``job`` and write backup, partial and final archives.

    ``job`` is a ValidatedJob (or ScrapeJobSpec); ``source`` provides
    ``iter_messages``/``iter_replies``; ``sink`` is an ArchiveSink; ``budget``
    is anything with ``admit(handle, now)`` (None disables the budget);
    ``clock`` provides ``now()``/``sleep()``.

    Channel, message and comment-thread failures are logged and contained.
    Only a failure writing the final file propagates.
    """
    clock = clock or SystemClock()
    out = out or sys.stdout
    window = job.window
    search = job.key_search or None
    max_t = job.max_t_index

    data = []
    summary = JobSummary()
    start = clock.now()

    def out_of_time():
        return deadline_exceeded(start, clock.now(), job.time_limit)

    try:
        for ref in job.channels:
            channel = ref.handle if hasattr(ref, "handle") else str(ref)
            if summary.t_index >= max_t:
                summary.stop_reason = "cap"
                break
            if out_of_time():
                summary.stop_reason = "deadline"
                break

            if budget is not None:
                decision = budget.admit(channel, clock.now())
                if not decision.admitted:
                    hours = decision.retry_after / 3600
                    _print(out, f"{channel} skipped: community budget exhausted, retry in {hours:.1f}h")
                    summary.per_channel.append(
                        ChannelResult(channel, 0, SKIPPED_BUDGET, f"retry after {decision.retry_after:.0f}s")
                    )
                    continue

            result = ChannelResult(channel)
            summary.per_channel.append(result)
            loop_start = clock.now()
            try:
                for message in source.iter_messages(channel, search):
                    try:
                        if window.date_min <= message.date <= window.date_max:
                            comments = []
                            try:
                                for reply in source.iter_replies(channel, message.id):
                                    comments.append(build_comment_record(reply, channel, message.id))
                            except Exception as e:
                                comments = []
                                _print(out, f"Error processing comments: {e}")

                            record = build_message_record(message, channel, comments)
                            data.append(record)
                            result.c_index += 1
                            summary.t_index += 1

                            snap = estimate_progress(
                                summary.t_index, message.id, clock.now() - start, max_t, c_index=result.c_index
                            )
                            _print(
                                out,
                                render_progress_block(
                                    channel, result.c_index, summary.t_index, message.id, record.date, snap
                                ),
                            )
                            if should_checkpoint(summary.t_index, checkpoint):
                                summary.files_written.append(
                                    sink.write_backup(data, summary.t_index, channel, message.id)
                                )
                            if summary.t_index >= max_t:
                                summary.stop_reason = "cap"
                                break
                            if out_of_time():
                                summary.stop_reason = "deadline"
                                break
                        elif message.date < window.date_min:
                            break
                    except Exception as e:
                        _print(out, f"Error processing message: {e}")

                _print(out, f"\n\n#### {channel} was ok with {result.c_index:05} posts ####\n\n")
                summary.files_written.append(sink.write_partial(data, channel, summary.t_index))
            except Exception as e:
                result.status = ERROR
                result.detail = str(e)
                _print(out, f"{channel} error: {e}")

            loop_duration = clock.now() - loop_start
            clock.sleep(pace_channel_loop(loop_duration, pacing))
    except KeyboardInterrupt:
        summary.stop_reason = "interrupted"
        _print(out, "\nInterrupted; writing what was collected so far.")

    rule = "-" * 50
    _print(out, f"\n{rule}\n#Concluded! #{summary.t_index:05} posts were scraped!\n{rule}\n\n")
    summary.final_file = sink.write_final(data, summary.t_index)
    summary.files_written.append(summary.final_file)
    summary.wall_seconds = clock.now() - start
    return summary
