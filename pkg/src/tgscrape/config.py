"""Credentials and per-run scraping parameters.

Credentials are set up once and kept in a small key=value file (or the
environment); everything else is passed per run and validated here before
the engine sees it.
"""

from __future__ import annotations

import enum
import logging
import os
import re
from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from pathlib import Path

logger = logging.getLogger(__name__)

# Hosted notebook runtimes die at roughly 6h20m (22,800 s); 6h leaves headroom.
RECOMMENDED_MAX_SECONDS = 21600

CREDENTIAL_FIELDS = ("username", "phone", "api_id", "api_hash")
CREDENTIAL_ENV = {
    "username": "TG_USERNAME",
    "phone": "TG_PHONE",
    "api_id": "TG_API_ID",
    "api_hash": "TG_API_HASH",
}

_PHONE_RE = re.compile(r"^\+\d{7,15}$")
_HASH_RE = re.compile(r"^[0-9a-fA-F]{32}$")
_TME_PREFIXES = ("https://t.me/", "http://t.me/")
_WEB_PREFIX = "https://web.telegram.org"


class ConfigError(ValueError):
    """A parameter failed validation. ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class OutputFormat(enum.Enum):
    WORKBOOK = "excel"
    PARQUET = "parquet"

    @property
    def extension(self) -> str:
        return "xlsx" if self is OutputFormat.WORKBOOK else "parquet"


@dataclass(frozen=True)
class Credentials:
    username: str
    phone: str
    api_id: str
    api_hash: str

    def __post_init__(self):
        if not self.username or "@" in self.username:
            raise ConfigError("username", "must be the bare handle, without '@'")
        if not _PHONE_RE.match(self.phone):
            raise ConfigError("phone", "expected '+' followed by 7-15 digits")
        if not self.api_id.isdigit():
            raise ConfigError("api_id", "must be numeric")
        if not _HASH_RE.match(self.api_hash):
            raise ConfigError("api_hash", "must be 32 hexadecimal characters")

    def __repr__(self):
        return f"Credentials(username={self.username!r}, phone=<hidden>, api_id={self.api_id!r}, api_hash=<hidden>)"


@dataclass(frozen=True)
class ChannelRef:
    handle: str

    def __post_init__(self):
        h = self.handle
        if not h or any(c.isspace() for c in h):
            raise ConfigError("channels", f"invalid handle {h!r}")
        if h.startswith(_WEB_PREFIX):
            raise ConfigError("channels", f"web client links are not supported: {h!r}")
        if all(c.isdigit() or c == "-" for c in h):
            raise ConfigError("channels", f"numeric chat ids are not supported: {h!r}")
        if "/" in h or "\\" in h or h == "@":
            raise ConfigError("channels", f"invalid handle {h!r}")

    def __str__(self):
        return self.handle


@dataclass(frozen=True)
class DateWindow:
    """Inclusive UTC window; both bounds sit at midnight of their day."""

    date_min: datetime
    date_max: datetime

    def __post_init__(self):
        for name in ("date_min", "date_max"):
            value = getattr(self, name)
            if value.tzinfo is None or value.utcoffset().total_seconds() != 0:
                raise ConfigError(name, "must be a UTC instant")
        if self.date_min > self.date_max:
            raise ConfigError("date_min", "date_min is after date_max")

    def __contains__(self, instant: datetime) -> bool:
        return self.date_min <= instant <= self.date_max


@dataclass(frozen=True)
class ScrapeJobSpec:
    channels: list[ChannelRef]
    window: DateWindow
    file_name: str
    key_search: str = ""
    max_t_index: int = 1_000_000
    time_limit: int = RECOMMENDED_MAX_SECONDS
    output_format: OutputFormat = OutputFormat.WORKBOOK


@dataclass(frozen=True)
class ValidatedJob:
    job: ScrapeJobSpec
    warnings: list[str] = field(default_factory=list)

    def __getattr__(self, name):
        # Expose the job's fields directly: validated.channels, validated.window, ...
        return getattr(self.job, name)


def parse_channel_list(raw: str) -> list[ChannelRef]:
    """Split a comma-separated list of channels into normalized handles.

    ``https://t.me/<slug>`` links become ``@<slug>``; empty items are dropped.

    >>> [c.handle for c in parse_channel_list("https://t.me/Foo ,  @Bar")]
    ['@Foo', '@Bar']
    """
    refs = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        for prefix in _TME_PREFIXES:
            if item.startswith(prefix):
                slug = item[len(prefix):].rstrip("/")
                if not slug:
                    raise ConfigError("channels", f"missing channel name in {item!r}")
                item = "@" + slug
                break
        refs.append(ChannelRef(item))
    return refs


def parse_date_window(date_min: str, date_max: str) -> DateWindow:
    bounds = []
    for name, text in (("date_min", date_min), ("date_max", date_max)):
        try:
            day = date.fromisoformat(text.strip())
        except (ValueError, AttributeError):
            raise ConfigError(name, f"expected YYYY-MM-DD, got {text!r}") from None
        bounds.append(datetime.combine(day, time(0), tzinfo=timezone.utc))
    return DateWindow(*bounds)


def normalize_output_format(raw: str) -> OutputFormat:
    """Map a loosely written format name ("Excel!", "PARQUET") to an OutputFormat."""
    cleaned = re.sub(r"[^a-z]", "", raw.lower())
    for fmt in OutputFormat:
        if cleaned == fmt.value:
            return fmt
    raise ConfigError("format", f"unsupported output format {raw!r} (use excel or parquet)")


def validate_job(spec: ScrapeJobSpec) -> ValidatedJob:
    if not spec.channels:
        raise ConfigError("channels", "empty")
    for ref in spec.channels:
        if not isinstance(ref, ChannelRef):
            raise ConfigError("channels", f"expected ChannelRef, got {ref!r}")
    if not isinstance(spec.window, DateWindow):
        raise ConfigError("window", "expected DateWindow")
    if not spec.file_name or "/" in spec.file_name or "\\" in spec.file_name or os.sep in spec.file_name:
        raise ConfigError("file_name", f"must be a bare file stem, got {spec.file_name!r}")
    if not isinstance(spec.max_t_index, int) or spec.max_t_index < 1:
        raise ConfigError("max_t_index", "must be a positive integer")
    if not isinstance(spec.time_limit, int) or spec.time_limit < 1:
        raise ConfigError("time_limit", "must be a positive integer")
    if not isinstance(spec.output_format, OutputFormat):
        raise ConfigError("format", f"unsupported output format {spec.output_format!r}")

    warnings = []
    if spec.time_limit > RECOMMENDED_MAX_SECONDS:
        msg = (
            f"time_limit {spec.time_limit}s exceeds {RECOMMENDED_MAX_SECONDS}s; hosted notebook "
            "runtimes are typically killed after about 6h20m (22800s), so keep runs at 6h or less"
        )
        logger.warning(msg)
        warnings.append(msg)
    return ValidatedJob(spec, warnings)


def parse_credentials(text: str) -> Credentials:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError("credentials", f"line {lineno}: expected key=value")
        key = key.strip()
        if key not in CREDENTIAL_FIELDS:
            raise ConfigError("credentials", f"line {lineno}: unknown key {key!r}")
        values[key] = value.strip().strip("'\"")
    missing = [k for k in CREDENTIAL_FIELDS if k not in values]
    if missing:
        raise ConfigError("credentials", f"missing {', '.join(missing)}")
    return Credentials(**values)


def load_credentials(path: str | os.PathLike | None = None, environ=None) -> Credentials:
    """Read credentials from ``path`` or, failing that, from TG_* environment variables."""
    environ = os.environ if environ is None else environ
    if path is not None:
        return parse_credentials(Path(path).read_text(encoding="utf-8"))
    values = {k: environ.get(var) for k, var in CREDENTIAL_ENV.items()}
    missing = [CREDENTIAL_ENV[k] for k, v in values.items() if not v]
    if missing:
        raise ConfigError("credentials", f"no credentials file given and {', '.join(missing)} unset")
    return Credentials(**values)
