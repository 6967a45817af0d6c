"""Date-windowed Telegram channel archiver with comment threads, pacing and checkpoints."""

from .config import (
    ChannelRef,
    ConfigError,
    Credentials,
    DateWindow,
    OutputFormat,
    ScrapeJobSpec,
    ValidatedJob,
    normalize_output_format,
    parse_channel_list,
    parse_date_window,
    validate_job,
)
from .engine import JobSummary, run_job
from .sink import ArchiveSink, ArchiveTable, read_back, write_records

__version__ = "0.1.0"
