"""Archive row types and the field mapping from raw messages."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .textsan import encode_comments_json, sanitize_xml

DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

MESSAGE_COLUMNS = (
    "Type",
    "Group",
    "Author ID",
    "Content",
    "Date",
    "Message ID",
    "Author",
    "Views",
    "Reactions",
    "Shares",
    "Media",
    "Url",
    "Comments List",
)

COMMENT_COLUMNS = (
    "Type",
    "Comment Group",
    "Comment Author ID",
    "Comment Content",
    "Comment Date",
    "Comment Message ID",
    "Comment Author",
    "Comment Views",
    "Comment Reactions",
    "Comment Shares",
    "Comment Media",
    "Comment Url",
)


class _Row:
    COLUMNS: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {col: getattr(self, f.name) for col, f in zip(self.COLUMNS, fields(self))}

    @classmethod
    def from_dict(cls, row: dict):
        return cls(*(row[col] for col in cls.COLUMNS))


@dataclass(frozen=True)
class CommentRecord(_Row):
    type: str
    group: str
    author_id: int | None
    content: str
    date: str
    message_id: int
    author: str | None
    views: int | None
    reactions: str
    shares: int | None
    media: str
    url: str

    COLUMNS = COMMENT_COLUMNS


@dataclass(frozen=True)
class MessageRecord(_Row):
    type: str
    group: str
    author_id: int | None
    content: str
    date: str
    message_id: int
    author: str | None
    views: int | None
    reactions: str
    shares: int | None
    media: str
    url: str
    comments_list: str

    COLUMNS = MESSAGE_COLUMNS


def render_reactions(reactions) -> str:
    """``[("👍", 3), ("❤", 1)]`` -> ``"👍 3 ❤ 1 "`` (every entry keeps its trailing space)."""
    return "".join(f"{emoticon} {count} " for emoticon, count in reactions)


def build_message_url(channel: str, message_id: int) -> str:
    return f"https://t.me/{channel}/{message_id}".replace("@", "")


def build_comment_url(channel: str, parent_id: int, comment_id: int) -> str:
    return f"https://t.me/{channel}/{parent_id}?comment={comment_id}".replace("@", "")


def format_date(dt) -> str:
    return dt.strftime(DATE_FORMAT)


def build_comment_record(raw, channel: str, parent_id: int) -> CommentRecord:
    return CommentRecord(
        type="comment",
        group=channel,
        author_id=raw.author_id,
        content=raw.text or "",
        date=format_date(raw.date),
        message_id=raw.id,
        author=raw.post_author,
        views=raw.views,
        reactions=render_reactions(raw.reactions),
        shares=raw.forwards,
        media="True" if raw.has_media else "False",
        url=build_comment_url(channel, parent_id, raw.id),
    )


def build_message_record(raw, channel: str, comments) -> MessageRecord:
    return MessageRecord(
        type="text",
        group=channel,
        author_id=raw.author_id,
        content=sanitize_xml(raw.text),
        date=format_date(raw.date),
        message_id=raw.id,
        author=raw.post_author,
        views=raw.views,
        reactions=render_reactions(raw.reactions),
        shares=raw.forwards,
        media="True" if raw.has_media else "False",
        url=build_message_url(channel, raw.id),
        comments_list=encode_comments_json(comments),
    )
