"""Strip characters that are not legal in XML 1.0 and encode comment lists as JSON."""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Mapping

_INVALID_XML = re.compile(
    "[^\u0009\u000A\u000D\u0020-\uD7FF\uE000-\uFFFD\U00010000-\U0010FFFF]"
)


def sanitize_xml(text: str | None) -> str:
    if not text:
        return ""
    return _INVALID_XML.sub("", text)


def encode_comments_json(comments: Iterable) -> str:
    """Serialize comment records to a JSON array, keeping non-ASCII text readable.

    String fields are sanitized before encoding as well as after: JSON escapes
    control characters, so filtering only the serialized text would let them
    survive a decode.
    """
    rows = []
    for comment in comments:
        row = comment if isinstance(comment, Mapping) else comment.to_dict()
        rows.append({k: sanitize_xml(v) if isinstance(v, str) else v for k, v in row.items()})
    return sanitize_xml(json.dumps(rows, ensure_ascii=False))
