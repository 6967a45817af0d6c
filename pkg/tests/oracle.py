"""Independent reference for the engine: filter and format records straight from
a fixture document, without touching the package's record builders."""

import json
from datetime import datetime


def _valid(c):
    cp = ord(c)
    return cp in (9, 10, 13) or 0x20 <= cp <= 0xD7FF or 0xE000 <= cp <= 0xFFFD or 0x10000 <= cp <= 0x10FFFF


def _clean(s):
    return "".join(c for c in (s or "") if _valid(c))


def _when(text):
    return datetime.fromisoformat(text.replace("Z", "+00:00"))


def _stamp(text):
    d = _when(text)
    return f"{d.year:04d}-{d.month:02d}-{d.day:02d} {d.hour:02d}:{d.minute:02d}:{d.second:02d}"


def _emoji(reactions):
    out = ""
    for r in reactions or []:
        out += r["emoticon"] + " " + str(r["count"]) + " "
    return out


def _newest_first(items):
    return sorted(items, key=lambda m: (_when(m["date"]), m["id"]), reverse=True)


def expected_rows(doc, handles, date_min, date_max, search="", cap=10**9):
    channels = doc["channels"] if isinstance(doc, dict) else doc
    by_handle = {c["handle"]: c for c in channels}
    rows = []
    for handle in handles:
        if len(rows) >= cap:
            break
        ch = by_handle.get(handle)
        if ch is None or ch.get("fail_channel"):
            continue
        slug = handle.replace("@", "")
        for m in _newest_first(ch.get("messages", [])):
            if search and search.lower() not in (m.get("text") or "").lower():
                continue
            if not (date_min <= _when(m["date"]) <= date_max):
                continue
            if m.get("fail_message"):
                continue
            comments = []
            if not (ch.get("fail_thread") or m.get("fail_thread")):
                for r in _newest_first(m.get("replies", [])):
                    comments.append({
                        "Type": "comment",
                        "Comment Group": _clean(handle),
                        "Comment Author ID": r.get("author_id"),
                        "Comment Content": _clean(r.get("text")),
                        "Comment Date": _stamp(r["date"]),
                        "Comment Message ID": r["id"],
                        "Comment Author": None if r.get("post_author") is None else _clean(r["post_author"]),
                        "Comment Views": r.get("views"),
                        "Comment Reactions": _clean(_emoji(r.get("reactions"))),
                        "Comment Shares": r.get("forwards"),
                        "Comment Media": str(bool(r.get("has_media"))),
                        "Comment Url": f"https://t.me/{slug}/{m['id']}?comment={r['id']}",
                    })
            rows.append({
                "Type": "text",
                "Group": handle,
                "Author ID": m.get("author_id"),
                "Content": _clean(m.get("text")),
                "Date": _stamp(m["date"]),
                "Message ID": m["id"],
                "Author": m.get("post_author"),
                "Views": m.get("views"),
                "Reactions": _emoji(m.get("reactions")),
                "Shares": m.get("forwards"),
                "Media": str(bool(m.get("has_media"))),
                "Url": f"https://t.me/{slug}/{m['id']}",
                "Comments": comments,
            })
            if len(rows) >= cap:
                break
    return rows
