"""Message sources consumed by the engine.

A source exposes two iterators:

* ``iter_messages(handle, search)`` yields a channel's messages newest-first
  (strictly decreasing date). The engine's early exit on messages older than
  the window depends on this order.
* ``iter_replies(handle, parent_id)`` yields the comment thread under a post.

``SimulatedSource`` replays a JSON fixture and is fully deterministic.
``TelethonSource`` talks to the real platform and is never used by tests.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterator
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path


class SourceError(Exception):
    """Base class for failures raised by a message source."""


class UnknownChannelError(SourceError):
    pass


class ChannelFetchError(SourceError):
    pass


class ThreadFetchError(SourceError):
    pass


class MessageFault(SourceError):
    pass


class FixtureError(ValueError):
    pass


@dataclass
class RawMessage:
    id: int
    date: datetime
    text: str | None = None
    author_id: int | None = None
    post_author: str | None = None
    views: int | None = None
    forwards: int | None = None
    has_media: bool = False
    reactions: list[tuple[str, int]] = field(default_factory=list)


class _FaultyMessage(RawMessage):
    # Reading the text fails, the way a malformed server object would.
    @property
    def text(self):
        raise MessageFault(f"injected fault reading message {self.id}")

    @text.setter
    def text(self, value):
        self._text = value


@dataclass
class FixtureMessage:
    raw: RawMessage
    replies: list[RawMessage] = field(default_factory=list)
    fail_message: bool = False
    fail_thread: bool = False


@dataclass
class FixtureChannel:
    handle: str
    messages: list[FixtureMessage] = field(default_factory=list)
    fail_channel: bool = False
    fail_thread: bool = False
    latency: float | None = None

    def __post_init__(self):
        seen = set()
        for m in self.messages:
            if m.raw.id in seen:
                raise FixtureError(f"{self.handle}: duplicate message id {m.raw.id}")
            seen.add(m.raw.id)


def _newest_first(messages):
    return sorted(messages, key=lambda m: (m.date, m.id), reverse=True)


def matches_search(text: str | None, search: str | None) -> bool:
    if not search:
        return True
    return bool(text) and search.lower() in text.lower()


class SimulatedSource:
    """Replays fixture channels.

    When a clock is attached, every delivered message or reply advances it by
    the channel's latency, so runs have a deterministic simulated duration.
    """

    def __init__(self, channels: list[FixtureChannel], clock=None, latency: float = 0.0):
        self.channels = {c.handle: c for c in channels}
        if len(self.channels) != len(channels):
            raise FixtureError("duplicate channel handle")
        self.clock = clock
        self.latency = latency

    def _channel(self, handle: str) -> FixtureChannel:
        try:
            return self.channels[handle]
        except KeyError:
            raise UnknownChannelError(f"no channel {handle!r} in fixture") from None

    def _tick(self, channel: FixtureChannel) -> None:
        latency = self.latency if channel.latency is None else channel.latency
        if self.clock is not None and latency:
            self.clock.advance(latency)

    def iter_messages(self, handle: str, search: str | None = None) -> Iterator[RawMessage]:
        channel = self._channel(handle)
        if channel.fail_channel:
            raise ChannelFetchError(f"injected fault fetching {handle}")
        by_raw = {id(m.raw): m for m in channel.messages}
        for raw in _newest_first([m.raw for m in channel.messages]):
            if not matches_search(raw.text, search):
                continue
            self._tick(channel)
            if by_raw[id(raw)].fail_message:
                yield _FaultyMessage(**_fields(raw))
            else:
                yield raw

    def iter_replies(self, handle: str, parent_id: int) -> Iterator[RawMessage]:
        channel = self._channel(handle)
        parent = next((m for m in channel.messages if m.raw.id == parent_id), None)
        if parent is None:
            return
        if channel.fail_thread or parent.fail_thread:
            raise ThreadFetchError(f"injected fault fetching replies to {handle}/{parent_id}")
        for reply in _newest_first(parent.replies):
            self._tick(channel)
            yield reply

    def message_count(self) -> int:
        return sum(len(c.messages) for c in self.channels.values())


def _fields(raw: RawMessage) -> dict:
    return {
        "id": raw.id,
        "date": raw.date,
        "text": raw.text,
        "author_id": raw.author_id,
        "post_author": raw.post_author,
        "views": raw.views,
        "forwards": raw.forwards,
        "has_media": raw.has_media,
        "reactions": list(raw.reactions),
    }


# --- fixture parsing -------------------------------------------------------

_MISSING = object()


def _get(obj: dict, key: str, where: str, kind, default=_MISSING, nullable=False):
    if key not in obj:
        if default is _MISSING:
            raise FixtureError(f"{where}.{key}: required field missing")
        return default
    value = obj[key]
    if value is None and nullable:
        return None
    # bool is an int subclass; keep them apart
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FixtureError(f"{where}.{key}: expected integer, got {value!r}")
    if kind is not int and not isinstance(value, kind):
        raise FixtureError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _parse_date(value, where: str) -> datetime:
    if not isinstance(value, str):
        raise FixtureError(f"{where}.date: expected ISO-8601 text, got {value!r}")
    try:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise FixtureError(f"{where}.date: not ISO-8601: {value!r}") from None
    if dt.tzinfo is None:
        raise FixtureError(f"{where}.date: missing zone designator in {value!r}")
    return dt.astimezone(timezone.utc)


def _parse_raw(obj, where: str) -> RawMessage:
    if not isinstance(obj, dict):
        raise FixtureError(f"{where}: expected an object")
    msg_id = _get(obj, "id", where, int)
    if msg_id < 1:
        raise FixtureError(f"{where}.id: must be >= 1")
    reactions = []
    for i, r in enumerate(_get(obj, "reactions", where, list, default=[])):
        rw = f"{where}.reactions[{i}]"
        if not isinstance(r, dict):
            raise FixtureError(f"{rw}: expected an object")
        count = _get(r, "count", rw, int)
        if count < 1:
            raise FixtureError(f"{rw}.count: must be >= 1")
        reactions.append((_get(r, "emoticon", rw, str), count))
    for key in ("views", "forwards"):
        value = _get(obj, key, where, int, default=None, nullable=True)
        if value is not None and value < 0:
            raise FixtureError(f"{where}.{key}: must be >= 0")
    return RawMessage(
        id=msg_id,
        date=_parse_date(obj.get("date"), where),
        text=_get(obj, "text", where, str, default=None, nullable=True),
        author_id=_get(obj, "author_id", where, int, default=None, nullable=True),
        post_author=_get(obj, "post_author", where, str, default=None, nullable=True),
        views=obj.get("views"),
        forwards=obj.get("forwards"),
        has_media=_get(obj, "has_media", where, bool, default=False),
        reactions=reactions,
    )


def parse_fixture(doc) -> tuple[list[FixtureChannel], float]:
    """Build fixture channels from a decoded JSON document.

    The document is either an array of channels or an object with a
    ``channels`` array and an optional default ``latency`` (simulated seconds
    per delivered item).
    """
    latency = 0.0
    if isinstance(doc, dict):
        latency = float(_get(doc, "latency", "fixture", (int, float), default=0.0))
        doc = _get(doc, "channels", "fixture", list)
    if not isinstance(doc, list):
        raise FixtureError("fixture: expected an array of channels")
    channels = []
    for ci, ch in enumerate(doc):
        where = f"channels[{ci}]"
        if not isinstance(ch, dict):
            raise FixtureError(f"{where}: expected an object")
        messages = []
        for mi, m in enumerate(_get(ch, "messages", where, list, default=[])):
            mw = f"{where}.messages[{mi}]"
            raw = _parse_raw(m, mw)
            replies = [
                _parse_raw(r, f"{mw}.replies[{ri}]")
                for ri, r in enumerate(_get(m, "replies", mw, list, default=[]))
            ]
            messages.append(
                FixtureMessage(
                    raw,
                    replies,
                    fail_message=_get(m, "fail_message", mw, bool, default=False),
                    fail_thread=_get(m, "fail_thread", mw, bool, default=False),
                )
            )
        ch_latency = _get(ch, "latency", where, (int, float), default=None, nullable=True)
        channels.append(
            FixtureChannel(
                handle=_get(ch, "handle", where, str),
                messages=messages,
                fail_channel=_get(ch, "fail_channel", where, bool, default=False),
                fail_thread=_get(ch, "fail_thread", where, bool, default=False),
                latency=None if ch_latency is None else float(ch_latency),
            )
        )
    return channels, latency


def load_fixture(path, clock=None) -> SimulatedSource:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FixtureError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    try:
        channels, latency = parse_fixture(doc)
    except FixtureError as e:
        raise FixtureError(f"{path}: {e}") from None
    return SimulatedSource(channels, clock=clock, latency=latency)


# --- fixture generation ----------------------------------------------------

_WORDS = (
    "urna voto eleicao governo povo brasil noticia live hoje amanha presidente "
    "debate reforma economia saude escola familia liberdade verdade"
).split()
_EMOJI = ("\U0001F44D", "❤", "\U0001F525", "\U0001F602", "\U0001F64F", "\U0001F621")


def _iso(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _random_message(rng: random.Random, msg_id: int, date: datetime) -> dict:
    text = " ".join(rng.choice(_WORDS) for _ in range(rng.randint(1, 8)))
    return {
        "id": msg_id,
        "date": _iso(date),
        "text": text.capitalize() if rng.random() > 0.05 else None,
        "author_id": rng.randint(1000, 99999) if rng.random() > 0.3 else None,
        "post_author": rng.choice(["Admin", "Equipe", None]),
        "views": rng.randint(0, 50000) if rng.random() > 0.1 else None,
        "forwards": rng.randint(0, 500) if rng.random() > 0.1 else None,
        "has_media": rng.random() < 0.3,
        "reactions": [
            {"emoticon": e, "count": rng.randint(1, 300)}
            for e in rng.sample(_EMOJI, rng.randint(0, 3))
        ],
    }


def synthesize_fixture(
    per_channel: list[int],
    window: tuple[datetime, datetime],
    *,
    seed: int = 0,
    before: int = 5,
    after: int = 5,
    max_replies: int = 3,
    handles: list[str] | None = None,
    latency: float = 0.0,
) -> dict:
    """Generate a fixture document with ``per_channel[i]`` in-window messages per channel.

    Each channel also gets ``after`` messages newer than the window and
    ``before`` older ones, so both ends of the date filter are exercised. In-window
    messages carry 0..max_replies replies.
    """
    rng = random.Random(seed)
    lo, hi = window
    span = (hi - lo).total_seconds()
    handles = handles or [f"@sim_channel_{i}" for i in range(len(per_channel))]
    channels = []
    for handle, n in zip(handles, per_channel):
        # distinct second offsets keep dates strictly ordered
        offsets = sorted(rng.sample(range(int(span) + 1), n)) if n else []
        dates = [lo + timedelta(seconds=s) for s in offsets]
        dates = [lo - timedelta(days=before - i) for i in range(before)] + dates
        dates += [hi + timedelta(hours=i + 1) for i in range(after)]
        messages = []
        next_reply_id = 10_000_000
        for msg_id, date in enumerate(dates, start=1):
            m = _random_message(rng, msg_id, date)
            if lo <= date <= hi and max_replies:
                replies = []
                for k in range(rng.randint(0, max_replies)):
                    reply = _random_message(rng, next_reply_id, date + timedelta(minutes=k + 1))
                    next_reply_id += 1
                    replies.append(reply)
                m["replies"] = replies
            messages.append(m)
        channels.append({"handle": handle, "messages": messages})
    return {"latency": latency, "channels": channels}


class TelethonSource:  # pragma: no cover - needs a real account and network
    """Adapter over a Telethon client. Install the ``telegram`` extra to use it."""

    def __init__(self, credentials, session: str | None = None, code_callback=None):
        try:
            from telethon.sync import TelegramClient
        except ImportError as e:
            raise RuntimeError("real transport needs telethon: pip install 'artifact[telegram]'") from e
        self.credentials = credentials
        self.client = TelegramClient(
            session or credentials.username, int(credentials.api_id), credentials.api_hash
        )
        self._code_callback = code_callback

    def __enter__(self):
        self.client.start(phone=self.credentials.phone, code_callback=self._code_callback)
        return self

    def __exit__(self, *exc):
        self.client.disconnect()

    @staticmethod
    def _convert(message) -> RawMessage:
        reactions = []
        if getattr(message, "reactions", None):
            for rc in message.reactions.results:
                reactions.append((getattr(rc.reaction, "emoticon", "") or "", rc.count))
        return RawMessage(
            id=message.id,
            date=message.date,
            text=message.text,
            author_id=message.sender_id,
            post_author=message.post_author,
            views=message.views,
            forwards=message.forwards,
            has_media=bool(message.media),
            reactions=reactions,
        )

    def iter_messages(self, handle, search=None):
        try:
            for message in self.client.iter_messages(handle, search=search or None):
                yield self._convert(message)
        except SourceError:
            raise
        except Exception as e:
            raise ChannelFetchError(str(e)) from e

    def iter_replies(self, handle, parent_id):
        try:
            for message in self.client.iter_messages(handle, reply_to=parent_id):
                yield self._convert(message)
        except Exception as e:
            raise ThreadFetchError(str(e)) from e
